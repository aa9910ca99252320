#pragma once

#include "fasy/error.hpp"
#include "fasy/image.hpp"
#include "fasy/catalog.hpp"
#include "fasy/assembler.hpp"
#include "fasy/tuning.hpp"
#include "fasy/datapath.hpp"
#include "fasy/session.hpp"
