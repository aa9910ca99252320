#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fasy {

enum class Errc {
  MalformedHeader,
  TruncatedRaster,
  UnsupportedMaxval,
  CountMismatch,
  ValueOutOfRange,
  NotAnInteger,
  DegenerateImage,
  DimensionMismatch,
  UnknownKind,
  IoFailure,
  CorruptManifest,
  NoForeground,
  NegativeCoordinate,
  OutOfBounds,
  WindowOutOfBounds,
  EmptyBoundary,
  DegenerateDenominator,
  MissingKind,
  NotACandidate,
  StageNotReady,
  UnknownSession,
  IllegalState,
  InvalidArgument,
};

constexpr std::string_view errc_name(Errc e) noexcept {
  switch (e) {
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::TruncatedRaster: return "TruncatedRaster";
    case Errc::UnsupportedMaxval: return "UnsupportedMaxval";
    case Errc::CountMismatch: return "CountMismatch";
    case Errc::ValueOutOfRange: return "ValueOutOfRange";
    case Errc::NotAnInteger: return "NotAnInteger";
    case Errc::DegenerateImage: return "DegenerateImage";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::UnknownKind: return "UnknownKind";
    case Errc::IoFailure: return "IoFailure";
    case Errc::CorruptManifest: return "CorruptManifest";
    case Errc::NoForeground: return "NoForeground";
    case Errc::NegativeCoordinate: return "NegativeCoordinate";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::WindowOutOfBounds: return "WindowOutOfBounds";
    case Errc::EmptyBoundary: return "EmptyBoundary";
    case Errc::DegenerateDenominator: return "DegenerateDenominator";
    case Errc::MissingKind: return "MissingKind";
    case Errc::NotACandidate: return "NotACandidate";
    case Errc::StageNotReady: return "StageNotReady";
    case Errc::UnknownSession: return "UnknownSession";
    case Errc::IllegalState: return "IllegalState";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace fasy
