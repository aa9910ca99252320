#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fasy/assembler.hpp"
#include "fasy/catalog.hpp"
#include "fasy/error.hpp"
#include "fasy/image.hpp"
#include "fasy/tuning.hpp"

namespace fasy {

enum class SessionStatus { Describing, Selecting, Assembled, Tuned };
enum class Stage { Blind, Masked, Tuned };

constexpr std::string_view status_name(SessionStatus s) noexcept {
  switch (s) {
    case SessionStatus::Describing: return "Describing";
    case SessionStatus::Selecting: return "Selecting";
    case SessionStatus::Assembled: return "Assembled";
    case SessionStatus::Tuned: return "Tuned";
  }
  return "";
}

constexpr std::string_view stage_name(Stage s) noexcept {
  switch (s) {
    case Stage::Blind: return "blind";
    case Stage::Masked: return "masked";
    case Stage::Tuned: return "tuned";
  }
  return "";
}

inline Stage parse_stage(std::string_view s) {
  for (auto st : {Stage::Blind, Stage::Masked, Stage::Tuned}) {
    if (stage_name(st) == s) return st;
  }
  throw Error(Errc::InvalidArgument, "unknown stage '" + std::string(s) + "'");
}

struct Offset {
  int d_row = 0;
  int d_col = 0;
  friend bool operator==(const Offset&, const Offset&) = default;
};

struct Session {
  std::string id;
  std::map<ComponentKind, Query> description;
  std::map<ComponentKind, std::vector<std::string>> candidates;
  std::map<ComponentKind, std::string> selections;
  std::optional<Layout> base_layout;
  std::map<ComponentKind, Offset> offsets;
  std::optional<TuneConfig> tune_config;
  std::map<Stage, GrayImage> stage_images;
  std::vector<std::string> warnings;
  SessionStatus status = SessionStatus::Describing;

  /// Computed layout with manual offsets applied.
  Layout layout() const {
    if (!base_layout) throw Error(Errc::IllegalState, "session is not assembled");
    Layout out = *base_layout;
    for (const auto& [kind, off] : offsets) {
      auto it = out.placements.find(kind);
      if (it != out.placements.end()) it->second = it->second.shifted(off.d_row, off.d_col);
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Workflow operations. Each one either fully succeeds or throws and leaves
// the session untouched.

namespace detail {

inline void require_status(const Session& s, std::initializer_list<SessionStatus> allowed,
                           std::string_view action) {
  if (std::find(allowed.begin(), allowed.end(), s.status) == allowed.end()) {
    throw Error(Errc::IllegalState, std::string(action) + " not allowed in state " +
                                        std::string(status_name(s.status)));
  }
}

// Recomputes blind/masked (and tuned, if a tune config is present) from the
// pristine face cutting and the current layout.
inline void render_stages(Session& s, const Catalog& catalog) {
  const auto& face = catalog.get(s.selections.at(ComponentKind::FaceCutting)).image;
  const Layout layout = s.layout();
  for (auto kind : kPlacementOrder) {
    const auto& p = layout.at(kind);
    if (!p.fits(face.height(), face.width())) {
      std::ostringstream msg;
      msg << kind_name(kind) << " at (" << p.top_row << "," << p.left_col << ") size " << p.width
          << "x" << p.height << " does not fit the " << face.width() << "x" << face.height()
          << " face cutting";
      throw Error(Errc::OutOfBounds, msg.str());
    }
  }
  GrayImage blind = face;
  GrayImage masked = face;
  for (auto kind : kPlacementOrder) {
    const auto& rec = catalog.get(s.selections.at(kind));
    blind = overlay_blind(blind, rec.image, layout.at(kind));
    masked = overlay_masked(masked, rec.image, *rec.mask, layout.at(kind));
  }
  std::map<Stage, GrayImage> stages;
  stages.emplace(Stage::Blind, std::move(blind));
  stages.emplace(Stage::Masked, std::move(masked));
  if (s.tune_config) {
    GrayImage tuned = face;
    for (auto kind : kPlacementOrder) {
      const auto& rec = catalog.get(s.selections.at(kind));
      tuned = tune_masked(tuned, rec.image, *rec.mask, layout.at(kind), *s.tune_config);
    }
    stages.emplace(Stage::Tuned, std::move(tuned));
  }
  s.stage_images = std::move(stages);
}

}  // namespace detail

inline Session create_session(std::string id) {
  Session s;
  s.id = std::move(id);
  return s;
}

/// Runs one query per kind and moves the session to Selecting. Any earlier
/// selections, layout, offsets and stage images are discarded.
inline void submit_description(Session& session, const std::map<ComponentKind, Query>& desc,
                               const Catalog& catalog) {
  for (auto kind : kAllKinds) {
    if (!desc.count(kind)) {
      throw Error(Errc::MissingKind, "description lacks " + std::string(kind_name(kind)));
    }
  }
  Session next = session;
  next.description.clear();
  next.candidates.clear();
  next.warnings.clear();
  for (const auto& [kind, q] : desc) {
    Query query = q;
    query.kind = kind;
    for (const auto& w : validate_params(kind, query.desired).warnings) next.warnings.push_back(w.message);
    std::vector<std::string> ids;
    for (const auto* rec : match_query(query, catalog)) ids.push_back(rec->id);
    next.candidates[kind] = std::move(ids);
    next.description[kind] = std::move(query);
  }
  next.selections.clear();
  next.base_layout.reset();
  next.offsets.clear();
  next.tune_config.reset();
  next.stage_images.clear();
  next.status = SessionStatus::Selecting;
  session = std::move(next);
}

inline void select_candidate(Session& session, ComponentKind kind, const std::string& record_id) {
  detail::require_status(session, {SessionStatus::Selecting}, "select");
  auto it = session.candidates.find(kind);
  if (it == session.candidates.end() ||
      std::find(it->second.begin(), it->second.end(), record_id) == it->second.end()) {
    throw Error(Errc::NotACandidate,
                "'" + record_id + "' is not a candidate for " + std::string(kind_name(kind)));
  }
  session.selections[kind] = record_id;
}

inline bool ready_to_assemble(const Session& s) {
  return std::all_of(kAllKinds.begin(), kAllKinds.end(),
                     [&](ComponentKind k) { return s.selections.count(k) > 0; });
}

/// Finds the ear anchor on the selected face cutting, lays out the six
/// components and renders the blind and masked composites.
inline void assemble_session(Session& session, const Catalog& catalog) {
  detail::require_status(session, {SessionStatus::Selecting, SessionStatus::Assembled}, "assemble");
  for (auto kind : kAllKinds) {
    if (!session.selections.count(kind)) {
      throw Error(Errc::IllegalState, "no selection for " + std::string(kind_name(kind)));
    }
  }
  const auto& face = catalog.get(session.selections.at(ComponentKind::FaceCutting));
  BinaryMask face_mask;
  try {
    face_mask = binarize(face.image, otsu_threshold(face.image));
  } catch (const Error& e) {
    if (e.code() != Errc::DegenerateImage) throw;
    throw Error(Errc::NoForeground, "face cutting '" + face.id + "' has a single intensity");
  }
  const AnchorPoint anchor = find_ear_position(face_mask);

  std::map<ComponentKind, ComponentDims> dims;
  for (auto kind : kPlacementOrder) {
    const auto& rec = catalog.get(session.selections.at(kind));
    if (!rec.mask) throw Error(Errc::InvalidArgument, "component '" + rec.id + "' has no mask");
    dims[kind] = {rec.image.height(), rec.image.width()};
  }

  Session next = session;
  next.base_layout = compute_layout(anchor, dims);
  next.offsets.clear();
  next.tune_config.reset();
  detail::render_stages(next, catalog);
  next.status = SessionStatus::Assembled;
  session = std::move(next);
}

inline void tune_session(Session& session, const Catalog& catalog, const TuneConfig& cfg = {}) {
  detail::require_status(session, {SessionStatus::Assembled, SessionStatus::Tuned}, "tune");
  Session next = session;
  next.tune_config = cfg;
  detail::render_stages(next, catalog);
  next.status = SessionStatus::Tuned;
  session = std::move(next);
}

/// Shifts one component by (d_row, d_col) on top of any earlier nudges and
/// re-renders every computed stage from the pristine face cutting.
inline void nudge_component(Session& session, const Catalog& catalog, ComponentKind kind, int d_row,
                            int d_col) {
  detail::require_status(session, {SessionStatus::Assembled, SessionStatus::Tuned}, "nudge");
  if (kind == ComponentKind::FaceCutting) {
    throw Error(Errc::UnknownKind, "the face cutting cannot be nudged");
  }
  Session next = session;
  auto& off = next.offsets[kind];
  off.d_row += d_row;
  off.d_col += d_col;
  if (off == Offset{}) next.offsets.erase(kind);
  detail::render_stages(next, catalog);
  session = std::move(next);
}

inline const GrayImage& stage_image(const Session& session, Stage stage) {
  auto it = session.stage_images.find(stage);
  if (it == session.stage_images.end()) {
    throw Error(Errc::StageNotReady, "stage '" + std::string(stage_name(stage)) + "' not computed");
  }
  return it->second;
}

/// Canonical PGM bytes of a computed stage.
inline std::string export_face(const Session& session, Stage stage) {
  return save_pgm(stage_image(session, stage));
}

// ---------------------------------------------------------------------------
// Transcript: the action log from which a session can be rebuilt.

struct DescribeAction {
  std::map<ComponentKind, Query> description;
};
struct SelectAction {
  ComponentKind kind;
  std::string record_id;
};
struct AssembleAction {};
struct TuneAction {
  TuneConfig config;
};
struct NudgeAction {
  ComponentKind kind;
  int d_row = 0;
  int d_col = 0;
};

using Action = std::variant<DescribeAction, SelectAction, AssembleAction, TuneAction, NudgeAction>;

inline void apply_action(Session& session, const Catalog& catalog, const Action& action) {
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, DescribeAction>) {
          submit_description(session, a.description, catalog);
        } else if constexpr (std::is_same_v<T, SelectAction>) {
          select_candidate(session, a.kind, a.record_id);
        } else if constexpr (std::is_same_v<T, AssembleAction>) {
          assemble_session(session, catalog);
        } else if constexpr (std::is_same_v<T, TuneAction>) {
          tune_session(session, catalog, a.config);
        } else {
          nudge_component(session, catalog, a.kind, a.d_row, a.d_col);
        }
      },
      action);
}

using json = nlohmann::json;

inline json query_to_json(const Query& q) {
  json params = json::object();
  for (const auto& [k, v] : q.desired) params[k] = v;
  return params;
}

inline std::map<ComponentKind, Query> description_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::InvalidArgument, "description must be a JSON object");
  std::map<ComponentKind, Query> desc;
  for (const auto& [kind_str, params] : j.items()) {
    const ComponentKind kind = parse_kind(kind_str);
    Query q{kind, {}};
    if (!params.is_object()) {
      throw Error(Errc::InvalidArgument, "parameters for " + kind_str + " must be an object");
    }
    for (const auto& [name, value] : params.items()) {
      if (!value.is_string()) throw Error(Errc::InvalidArgument, "parameter values must be strings");
      q.desired[name] = value.get<std::string>();
    }
    desc[kind] = std::move(q);
  }
  return desc;
}

inline json description_to_json(const std::map<ComponentKind, Query>& desc) {
  json j = json::object();
  for (const auto& [kind, q] : desc) j[std::string(kind_name(kind))] = query_to_json(q);
  return j;
}

inline std::string_view policy_name(ZeroCiPolicy p) noexcept {
  return p == ZeroCiPolicy::LeaveFace ? "LeaveFace" : "CopyComponent";
}

inline ZeroCiPolicy parse_policy(std::string_view s) {
  if (s == "LeaveFace") return ZeroCiPolicy::LeaveFace;
  if (s == "CopyComponent") return ZeroCiPolicy::CopyComponent;
  throw Error(Errc::InvalidArgument, "unknown zero-CI policy '" + std::string(s) + "'");
}

inline json action_to_json(const Action& action) {
  return std::visit(
      [](const auto& a) -> json {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, DescribeAction>) {
          return {{"action", "describe"}, {"description", description_to_json(a.description)}};
        } else if constexpr (std::is_same_v<T, SelectAction>) {
          return {{"action", "select"}, {"kind", kind_name(a.kind)}, {"record_id", a.record_id}};
        } else if constexpr (std::is_same_v<T, AssembleAction>) {
          return {{"action", "assemble"}};
        } else if constexpr (std::is_same_v<T, TuneAction>) {
          return {{"action", "tune"},
                  {"threshold", a.config.component_threshold.value},
                  {"zero_ci_policy", policy_name(a.config.zero_ci_policy)}};
        } else {
          return {{"action", "nudge"}, {"kind", kind_name(a.kind)}, {"d_row", a.d_row}, {"d_col", a.d_col}};
        }
      },
      action);
}

inline Threshold parse_threshold(const json& j) {
  if (!j.is_number_integer()) throw Error(Errc::InvalidArgument, "threshold must be an integer");
  const auto v = j.get<long long>();
  if (v < 0 || v > 255) throw Error(Errc::ValueOutOfRange, "threshold must lie in [0,255]");
  return Threshold{static_cast<std::uint8_t>(v)};
}

inline Action action_from_json(const json& j) {
  try {
    const std::string type = j.at("action").get<std::string>();
    if (type == "describe") return DescribeAction{description_from_json(j.at("description"))};
    if (type == "select") {
      return SelectAction{parse_kind(j.at("kind").get<std::string>()), j.at("record_id").get<std::string>()};
    }
    if (type == "assemble") return AssembleAction{};
    if (type == "tune") {
      TuneConfig cfg;
      if (j.contains("threshold")) cfg.component_threshold = parse_threshold(j.at("threshold"));
      if (j.contains("zero_ci_policy")) cfg.zero_ci_policy = parse_policy(j.at("zero_ci_policy").get<std::string>());
      return TuneAction{cfg};
    }
    if (type == "nudge") {
      return NudgeAction{parse_kind(j.at("kind").get<std::string>()), j.at("d_row").get<int>(),
                         j.at("d_col").get<int>()};
    }
    throw Error(Errc::InvalidArgument, "unknown action '" + type + "'");
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed action: ") + e.what());
  }
}

/// Rebuilds a session by replaying its transcript from scratch.
inline Session replay(const std::string& id, const std::vector<Action>& transcript,
                      const Catalog& catalog) {
  Session s = create_session(id);
  for (const auto& a : transcript) apply_action(s, catalog, a);
  return s;
}

inline json transcript_to_json(const std::string& id, const std::vector<Action>& transcript) {
  json actions = json::array();
  for (const auto& a : transcript) actions.push_back(action_to_json(a));
  return {{"session", id}, {"actions", actions}};
}

inline std::pair<std::string, std::vector<Action>> transcript_from_json(const json& j) {
  try {
    std::vector<Action> actions;
    for (const auto& a : j.at("actions")) actions.push_back(action_from_json(a));
    return {j.at("session").get<std::string>(), std::move(actions)};
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed transcript: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// SessionStore: in-memory sessions keyed by id. Mutations on one session are
// serialized by its own mutex; different sessions proceed independently.

class SessionStore {
 public:
  explicit SessionStore(std::shared_ptr<const Catalog> catalog, unsigned seed = std::random_device{}())
      : catalog_(std::move(catalog)), rng_(seed) {}

  const Catalog& catalog() const noexcept { return *catalog_; }

  Session create() {
    auto entry = std::make_shared<Entry>();
    std::unique_lock lock(map_mutex_);
    std::string id;
    do {
      id = fresh_id();
    } while (entries_.count(id));
    entry->session = create_session(id);
    entries_[id] = entry;
    return entry->session;
  }

  Session get(const std::string& id) const {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    return entry->session;
  }

  std::vector<Action> transcript(const std::string& id) const {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    return entry->transcript;
  }

  /// Applies an action; on failure the session and its transcript are unchanged.
  Session apply(const std::string& id, const Action& action) {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    Session next = entry->session;
    apply_action(next, *catalog_, action);
    entry->session = std::move(next);
    entry->transcript.push_back(action);
    return entry->session;
  }

  void save_transcript(const std::string& id, const std::filesystem::path& file) const {
    const auto log = transcript_to_json(id, transcript(id));
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw Error(Errc::IoFailure, "cannot write " + file.string());
    out << log.dump(2) << '\n';
  }

  /// Loads a transcript file and replays it into a live session.
  Session restore(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error(Errc::IoFailure, "cannot open " + file.string());
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error(Errc::InvalidArgument, std::string("transcript is not JSON: ") + e.what());
    }
    auto [id, actions] = transcript_from_json(j);
    auto entry = std::make_shared<Entry>();
    entry->session = replay(id, actions, *catalog_);
    entry->transcript = std::move(actions);
    std::unique_lock lock(map_mutex_);
    entries_[id] = entry;
    return entry->session;
  }

  std::size_t size() const {
    std::shared_lock lock(map_mutex_);
    return entries_.size();
  }

 private:
  struct Entry {
    mutable std::mutex mutex;
    Session session;
    std::vector<Action> transcript;
  };

  std::shared_ptr<Entry> find(const std::string& id) const {
    std::shared_lock lock(map_mutex_);
    auto it = entries_.find(id);
    if (it == entries_.end()) throw Error(Errc::UnknownSession, "no session '" + id + "'");
    return it->second;
  }

  std::string fresh_id() {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string id = "s-";
    for (int i = 0; i < 12; ++i) id += kHex[rng_() & 15u];
    return id;
  }

  std::shared_ptr<const Catalog> catalog_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> entries_;
  std::mt19937 rng_;
};

}  // namespace fasy
