#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fasy/error.hpp"
#include "fasy/image.hpp"

namespace fasy {

enum class ComponentKind {
  FaceCutting,
  RightEyebrow,
  RightEye,
  LeftEyebrow,
  LeftEye,
  Nose,
  Lip,
};

inline constexpr std::array<ComponentKind, 7> kAllKinds = {
    ComponentKind::FaceCutting, ComponentKind::RightEyebrow, ComponentKind::RightEye,
    ComponentKind::LeftEyebrow, ComponentKind::LeftEye,      ComponentKind::Nose,
    ComponentKind::Lip,
};

/// The six parts placed on a face cutting, in compositing order
/// (eyebrows, eyes, nose, lip). Later entries overwrite earlier ones.
inline constexpr std::array<ComponentKind, 6> kPlacementOrder = {
    ComponentKind::RightEyebrow, ComponentKind::LeftEyebrow, ComponentKind::RightEye,
    ComponentKind::LeftEye,      ComponentKind::Nose,        ComponentKind::Lip,
};

constexpr std::string_view kind_name(ComponentKind k) noexcept {
  switch (k) {
    case ComponentKind::FaceCutting: return "FaceCutting";
    case ComponentKind::RightEyebrow: return "RightEyebrow";
    case ComponentKind::RightEye: return "RightEye";
    case ComponentKind::LeftEyebrow: return "LeftEyebrow";
    case ComponentKind::LeftEye: return "LeftEye";
    case ComponentKind::Nose: return "Nose";
    case ComponentKind::Lip: return "Lip";
  }
  return "";
}

inline ComponentKind parse_kind(std::string_view name) {
  for (auto k : kAllKinds) {
    if (kind_name(k) == name) return k;
  }
  throw Error(Errc::UnknownKind, "unknown component kind '" + std::string(name) + "'");
}

/// Parameter values are stored without spaces ("Cant Say" -> "CantSay").
inline std::string canonical_token(std::string_view raw) {
  std::string out;
  for (char ch : raw) {
    if (ch != ' ' && ch != '\t' && ch != '_' && ch != '-') out += ch;
  }
  return out;
}

inline constexpr std::string_view kCantSay = "CantSay";

using ParamMap = std::map<std::string, std::string>;

struct ParameterSpec {
  std::string name;
  std::vector<std::string> values;
};

namespace detail {

inline const std::vector<ParameterSpec>& face_cutting_schema() {
  static const std::vector<ParameterSpec> s = {
      {"Sex", {"Male", "Female"}},
      {"Shape", {"Oval", "Round", "CantSay"}},
      {"HairDensity", {"HighlyDense", "LowDense", "Normal", "CantSay"}},
  };
  return s;
}

inline const std::vector<ParameterSpec>& eyebrow_schema() {
  static const std::vector<ParameterSpec> s = {
      {"Length", {"Small", "Large", "Normal", "CantSay"}},
      {"Width", {"Small", "Large", "Normal", "CantSay"}},
      {"Shape", {"Flat", "Round", "Wavy", "Artistic", "CantSay"}},
      {"Hair", {"HighlyDense", "LowDense", "Normal", "CantSay"}},
  };
  return s;
}

inline const std::vector<ParameterSpec>& eye_schema() {
  static const std::vector<ParameterSpec> s = {
      {"Length", {"Small", "Large", "Normal", "CantSay"}},
      {"Width", {"Small", "Large", "Normal", "CantSay"}},
      {"Shape", {"Round", "Elliptic", "CantSay"}},
  };
  return s;
}

inline const std::vector<ParameterSpec>& nose_schema() {
  static const std::vector<ParameterSpec> s = {
      {"Sharpness", {"Sharp", "Blunt", "Normal", "CantSay"}},
      {"Length", {"Small", "Large", "Normal", "CantSay"}},
      {"Width", {"Small", "Large", "Normal", "CantSay"}},
  };
  return s;
}

inline const std::vector<ParameterSpec>& lip_schema() {
  static const std::vector<ParameterSpec> s = {
      {"Length", {"Wide", "Small", "Normal", "CantSay"}},
      {"Width", {"Thick", "Thin", "Normal", "CantSay"}},
      {"Shape", {"Linear", "Wavy", "CantSay"}},
  };
  return s;
}

}  // namespace detail

/// Parameter names and vocabularies for one kind.
inline const std::vector<ParameterSpec>& parameter_schema(ComponentKind k) {
  switch (k) {
    case ComponentKind::FaceCutting: return detail::face_cutting_schema();
    case ComponentKind::RightEyebrow:
    case ComponentKind::LeftEyebrow: return detail::eyebrow_schema();
    case ComponentKind::RightEye:
    case ComponentKind::LeftEye: return detail::eye_schema();
    case ComponentKind::Nose: return detail::nose_schema();
    case ComponentKind::Lip: return detail::lip_schema();
  }
  throw Error(Errc::UnknownKind, "unknown component kind");
}

struct ValidationWarning {
  enum class Type { UnknownParameter, OutOfVocabulary, MissingParameter };
  Type type;
  std::string name;
  std::string value;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationWarning> warnings;
  bool clean() const noexcept { return warnings.empty(); }
};

inline ValidationReport validate_params(ComponentKind kind, const ParamMap& params,
                                        bool require_all = false) {
  ValidationReport report;
  const auto& schema = parameter_schema(kind);
  for (const auto& [raw_name, raw_value] : params) {
    const std::string name = canonical_token(raw_name);
    const std::string value = canonical_token(raw_value);
    auto spec = std::find_if(schema.begin(), schema.end(),
                             [&](const ParameterSpec& p) { return p.name == name; });
    if (spec == schema.end()) {
      report.warnings.push_back({ValidationWarning::Type::UnknownParameter, name, value,
                                 "unknown parameter '" + name + "' for " +
                                     std::string(kind_name(kind))});
      continue;
    }
    if (std::find(spec->values.begin(), spec->values.end(), value) == spec->values.end()) {
      report.warnings.push_back({ValidationWarning::Type::OutOfVocabulary, name, value,
                                 "value '" + value + "' not in vocabulary of " +
                                     std::string(kind_name(kind)) + "." + name});
    }
  }
  if (require_all) {
    for (const auto& spec : schema) {
      bool present = std::any_of(params.begin(), params.end(), [&](const auto& kv) {
        return canonical_token(kv.first) == spec.name;
      });
      if (!present) {
        report.warnings.push_back({ValidationWarning::Type::MissingParameter, spec.name, "",
                                   "parameter '" + spec.name + "' missing, stored as CantSay"});
      }
    }
  }
  return report;
}

struct ComponentRecord {
  std::string id;
  ComponentKind kind = ComponentKind::FaceCutting;
  ParamMap params;
  GrayImage image;
  std::optional<BinaryMask> mask;
  std::string source;

  friend bool operator==(const ComponentRecord&, const ComponentRecord&) = default;
};

struct Query {
  ComponentKind kind = ComponentKind::FaceCutting;
  ParamMap desired;
};

/// Number of non-wildcard constraints the record satisfies, or nullopt if
/// any constraint fails. "CantSay" and omitted names match anything.
inline std::optional<int> match_score(const Query& q, const ComponentRecord& rec) {
  if (rec.kind != q.kind) return std::nullopt;
  int matched = 0;
  for (const auto& [raw_name, raw_value] : q.desired) {
    const std::string value = canonical_token(raw_value);
    if (value == kCantSay || value.empty()) continue;
    auto it = rec.params.find(canonical_token(raw_name));
    if (it == rec.params.end() || it->second != value) return std::nullopt;
    ++matched;
  }
  return matched;
}

/**
 * In-memory component store.
 *
 * Ids are "<kind>-<serial>" and survive save/load. Mutation goes through
 * ingest(); a const Catalog is safe to share between readers.
 */
class Catalog {
 public:
  struct IngestResult {
    ComponentRecord record;
    ValidationReport report;
  };

  IngestResult ingest(ComponentKind kind, const ParamMap& params, GrayImage image,
                      std::optional<BinaryMask> mask = std::nullopt, std::string source = {}) {
    if (mask && !mask->same_shape(image)) {
      throw Error(Errc::DimensionMismatch,
                  "mask " + std::to_string(mask->width()) + "x" + std::to_string(mask->height()) +
                      " vs image " + std::to_string(image.width()) + "x" +
                      std::to_string(image.height()));
    }
    if (!mask && kind != ComponentKind::FaceCutting) {
      mask = binarize(image, otsu_threshold(image));
    }
    ValidationReport report = validate_params(kind, params, true);

    ComponentRecord rec;
    rec.id = next_id(kind);
    rec.kind = kind;
    rec.image = std::move(image);
    rec.mask = std::move(mask);
    rec.source = sanitize(source);
    const auto& schema = parameter_schema(kind);
    for (const auto& spec : schema) rec.params[spec.name] = std::string(kCantSay);
    for (const auto& [raw_name, raw_value] : params) {
      const std::string name = canonical_token(raw_name);
      if (rec.params.count(name)) rec.params[name] = canonical_token(raw_value);
    }
    records_.push_back(std::move(rec));
    return {records_.back(), std::move(report)};
  }

  /// Inserts a record verbatim (used when loading from disk).
  void insert(ComponentRecord rec) {
    if (find(rec.id)) throw Error(Errc::CorruptManifest, "duplicate id '" + rec.id + "'");
    bump_serial(rec.id);
    records_.push_back(std::move(rec));
  }

  const ComponentRecord* find(std::string_view id) const {
    auto it = std::find_if(records_.begin(), records_.end(),
                           [&](const ComponentRecord& r) { return r.id == id; });
    return it == records_.end() ? nullptr : &*it;
  }

  const ComponentRecord& get(std::string_view id) const {
    if (auto* r = find(id)) return *r;
    throw Error(Errc::InvalidArgument, "no component with id '" + std::string(id) + "'");
  }

  const std::vector<ComponentRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }

  friend bool operator==(const Catalog& a, const Catalog& b) { return a.records_ == b.records_; }

 private:
  static std::string sanitize(std::string s) {
    for (auto& ch : s) {
      if (ch == '\t' || ch == '\n' || ch == '\r') ch = ' ';
    }
    return s;
  }

  static std::string slug(ComponentKind k) {
    std::string out;
    for (char ch : kind_name(k)) out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
  }

  std::string next_id(ComponentKind k) {
    std::string id;
    do {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04d", ++serial_);
      id = slug(k) + "-" + buf;
    } while (find(id));
    return id;
  }

  void bump_serial(const std::string& id) {
    auto dash = id.rfind('-');
    if (dash == std::string::npos) return;
    int n = 0;
    auto tail = std::string_view(id).substr(dash + 1);
    auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), n);
    if (ec == std::errc() && p == tail.data() + tail.size()) serial_ = std::max(serial_, n);
  }

  std::vector<ComponentRecord> records_;
  int serial_ = 0;
};

/// Records matching q, best match first, ties by id.
inline std::vector<const ComponentRecord*> match_query(const Query& q, const Catalog& catalog) {
  std::vector<std::pair<int, const ComponentRecord*>> hits;
  for (const auto& rec : catalog.records()) {
    if (auto score = match_score(q, rec)) hits.emplace_back(*score, &rec);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->id < b.second->id;
  });
  std::vector<const ComponentRecord*> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(h.second);
  return out;
}

// ---------------------------------------------------------------------------
// Persistence
//
// <root>/manifest.tsv, one record per line:
//   id TAB kind TAB image-file TAB mask-file ("-" if none) TAB source [TAB name=value]...
// Lines starting with '#' are comments. Images are canonical P5 files under root.

inline constexpr std::string_view kManifestName = "manifest.tsv";

namespace detail {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, std::string_view data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + p.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(Errc::IoFailure, "short write to " + p.string());
}

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace detail

inline void save_catalog(const Catalog& catalog, const std::filesystem::path& root) {
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + root.string() + ": " + ec.message());

  std::string manifest = "# fasy component catalog v1\n";
  for (const auto& rec : catalog.records()) {
    const std::string image_file = rec.id + ".pgm";
    const std::string mask_file = rec.mask ? rec.id + ".mask.pgm" : "-";
    detail::write_file(root / image_file, save_pgm(rec.image));
    if (rec.mask) detail::write_file(root / mask_file, save_pgm(mask_to_image(*rec.mask)));
    manifest += rec.id + '\t' + std::string(kind_name(rec.kind)) + '\t' + image_file + '\t' +
                mask_file + '\t' + rec.source;
    for (const auto& [name, value] : rec.params) manifest += '\t' + name + '=' + value;
    manifest += '\n';
  }
  detail::write_file(root / kManifestName, manifest);
}

inline Catalog load_catalog(const std::filesystem::path& root) {
  const auto manifest_path = root / kManifestName;
  if (!std::filesystem::exists(manifest_path)) {
    throw Error(Errc::IoFailure, "no manifest at " + manifest_path.string());
  }
  std::istringstream in(detail::read_file(manifest_path));
  Catalog catalog;
  std::string line;
  int line_no = 0;
  auto corrupt = [&](const std::string& why) {
    return Error(Errc::CorruptManifest, "line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = detail::split_tabs(line);
    if (fields.size() < 5) throw corrupt("expected at least 5 tab-separated fields");

    ComponentRecord rec;
    rec.id = fields[0];
    if (rec.id.empty()) throw corrupt("empty id");
    try {
      rec.kind = parse_kind(fields[1]);
    } catch (const Error& e) {
      throw corrupt(e.what());
    }
    rec.source = fields[4];
    for (std::size_t i = 5; i < fields.size(); ++i) {
      auto eq = fields[i].find('=');
      if (eq == std::string::npos || eq == 0) throw corrupt("bad parameter field '" + fields[i] + "'");
      rec.params[fields[i].substr(0, eq)] = fields[i].substr(eq + 1);
    }

    auto load_image = [&](const std::string& name) {
      const auto p = root / name;
      if (name.find("..") != std::string::npos || !std::filesystem::exists(p)) {
        throw corrupt("missing image file '" + name + "'");
      }
      try {
        return load_pgm(detail::read_file(p));
      } catch (const Error& e) {
        throw corrupt("unreadable image '" + name + "': " + e.what());
      }
    };
    rec.image = load_image(fields[2]);
    if (fields[3] != "-") {
      rec.mask = image_to_mask(load_image(fields[3]));
      if (!rec.mask->same_shape(rec.image)) throw corrupt("mask dimensions differ from image");
    }
    try {
      catalog.insert(std::move(rec));
    } catch (const Error& e) {
      throw corrupt(e.what());
    }
  }
  return catalog;
}

}  // namespace fasy
