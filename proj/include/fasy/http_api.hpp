#pragma once

// JSON/PGM HTTP surface for the interactive workflow. Routes:
//
//   GET  /schema                          parameter vocabularies per kind
//   POST /sessions                        create
//   GET  /sessions/{id}                   session state
//   PUT  /sessions/{id}/description       {"FaceCutting": {"Sex": "Male", ...}, ...}
//   POST /sessions/{id}/selection         {"kind": ..., "record_id": ...}
//   POST /sessions/{id}/assemble
//   POST /sessions/{id}/tune              {"threshold": 0, "zero_ci_policy": "LeaveFace"}
//   POST /sessions/{id}/nudge             {"kind": ..., "d_row": ..., "d_col": ...}
//   GET  /sessions/{id}/image/{stage}     PGM, or JSON+base64 with Accept: application/json
//   GET  /sessions/{id}/transcript        action log
//   GET  /components?kind=K&<param>=<value>...
//   GET  /components/{id}/image

#include <string>

#include <httplib.h>
#include <json.hpp>

#include "fasy/catalog.hpp"
#include "fasy/session.hpp"

namespace fasy::http {

using json = nlohmann::json;

inline constexpr const char* kPgmMime = "image/x-portable-graymap";

inline int status_for(Errc code) {
  switch (code) {
    case Errc::UnknownSession: return 404;
    case Errc::IllegalState:
    case Errc::StageNotReady: return 409;
    case Errc::NoForeground:
    case Errc::NegativeCoordinate:
    case Errc::OutOfBounds:
    case Errc::NotACandidate: return 422;
    default: return 400;
  }
}

inline json schema_json() {
  json j = json::object();
  for (auto kind : kAllKinds) {
    json params = json::object();
    for (const auto& spec : parameter_schema(kind)) params[spec.name] = spec.values;
    j[std::string(kind_name(kind))] = params;
  }
  return j;
}

inline json record_json(const ComponentRecord& rec) {
  return {{"id", rec.id},
          {"kind", kind_name(rec.kind)},
          {"params", rec.params},
          {"width", rec.image.width()},
          {"height", rec.image.height()},
          {"has_mask", rec.mask.has_value()},
          {"source", rec.source}};
}

inline json session_json(const Session& s) {
  json candidates = json::object();
  for (const auto& [kind, ids] : s.candidates) candidates[std::string(kind_name(kind))] = ids;
  json selections = json::object();
  for (const auto& [kind, id] : s.selections) selections[std::string(kind_name(kind))] = id;
  json offsets = json::object();
  for (const auto& [kind, off] : s.offsets) {
    offsets[std::string(kind_name(kind))] = {{"d_row", off.d_row}, {"d_col", off.d_col}};
  }
  json stages = json::array();
  for (const auto& [stage, img] : s.stage_images) stages.push_back(stage_name(stage));

  json j = {{"id", s.id},
            {"status", status_name(s.status)},
            {"description", description_to_json(s.description)},
            {"candidates", candidates},
            {"selections", selections},
            {"offsets", offsets},
            {"stages", stages},
            {"warnings", s.warnings},
            {"ready_to_assemble", ready_to_assemble(s)}};
  if (s.base_layout) {
    const Layout layout = s.layout();
    json placements = json::object();
    for (const auto& [kind, p] : layout.placements) {
      placements[std::string(kind_name(kind))] = {
          {"top_row", p.top_row}, {"left_col", p.left_col}, {"height", p.height}, {"width", p.width}};
    }
    j["layout"] = {{"anchor", {{"row", layout.anchor.row}, {"col", layout.anchor.col}}},
                   {"placements", placements}};
  }
  if (s.tune_config) {
    j["tune"] = {{"threshold", s.tune_config->component_threshold.value},
                 {"zero_ci_policy", policy_name(s.tune_config->zero_ci_policy)}};
  }
  return j;
}

inline std::string base64(std::string_view in) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((in.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < in.size(); i += 3) {
    const unsigned n = (static_cast<unsigned char>(in[i]) << 16) |
                       (static_cast<unsigned char>(in[i + 1]) << 8) | static_cast<unsigned char>(in[i + 2]);
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += kAlphabet[(n >> 6) & 63];
    out += kAlphabet[n & 63];
  }
  if (i < in.size()) {
    unsigned n = static_cast<unsigned char>(in[i]) << 16;
    if (i + 1 < in.size()) n |= static_cast<unsigned char>(in[i + 1]) << 8;
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += i + 1 < in.size() ? kAlphabet[(n >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

namespace detail {

inline void send_error(httplib::Response& res, const Error& e) {
  res.status = status_for(e.code());
  res.set_content(json{{"error", errc_name(e.code())}, {"message", e.what()}}.dump(), "application/json");
}

inline void send_json(httplib::Response& res, const json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

inline json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("request body is not JSON: ") + e.what());
  }
}

inline void send_image(const httplib::Request& req, httplib::Response& res, const GrayImage& img) {
  const std::string pgm = save_pgm(img);
  if (req.has_header("Accept") && req.get_header_value("Accept").find("application/json") != std::string::npos) {
    send_json(res, {{"width", img.width()}, {"height", img.height()}, {"pgm_base64", base64(pgm)}});
    return;
  }
  res.set_content(pgm, kPgmMime);
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const json::exception& e) {
      send_error(res, Error(Errc::InvalidArgument, e.what()));
    }
  };
}

}  // namespace detail

/// Registers every route on `server`. The store must outlive the server.
inline void mount(httplib::Server& server, SessionStore& store) {
  using detail::guarded;
  using detail::send_json;

  server.Get("/schema", guarded([](const httplib::Request&, httplib::Response& res) {
               send_json(res, schema_json());
             }));

  server.Post("/sessions", guarded([&store](const httplib::Request&, httplib::Response& res) {
                send_json(res, session_json(store.create()), 201);
              }));

  server.Get(R"(/sessions/([^/]+))", guarded([&store](const httplib::Request& req, httplib::Response& res) {
               send_json(res, session_json(store.get(req.matches[1])));
             }));

  server.Get(R"(/sessions/([^/]+)/transcript)",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
               const std::string id = req.matches[1];
               send_json(res, transcript_to_json(id, store.transcript(id)));
             }));

  server.Put(R"(/sessions/([^/]+)/description)",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
               const json body = detail::parse_body(req);
               const json& desc = body.contains("description") ? body.at("description") : body;
               send_json(res, session_json(store.apply(req.matches[1], DescribeAction{description_from_json(desc)})));
             }));

  server.Post(R"(/sessions/([^/]+)/selection)",
              guarded([&store](const httplib::Request& req, httplib::Response& res) {
                const json body = detail::parse_body(req);
                SelectAction a{parse_kind(body.at("kind").get<std::string>()),
                               body.at("record_id").get<std::string>()};
                send_json(res, session_json(store.apply(req.matches[1], a)));
              }));

  server.Post(R"(/sessions/([^/]+)/assemble)",
              guarded([&store](const httplib::Request& req, httplib::Response& res) {
                send_json(res, session_json(store.apply(req.matches[1], AssembleAction{})));
              }));

  server.Post(R"(/sessions/([^/]+)/tune)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                const json body = detail::parse_body(req);
                TuneConfig cfg;
                if (body.contains("threshold")) cfg.component_threshold = parse_threshold(body.at("threshold"));
                if (body.contains("zero_ci_policy")) {
                  cfg.zero_ci_policy = parse_policy(body.at("zero_ci_policy").get<std::string>());
                }
                send_json(res, session_json(store.apply(req.matches[1], TuneAction{cfg})));
              }));

  server.Post(R"(/sessions/([^/]+)/nudge)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                const json body = detail::parse_body(req);
                NudgeAction a{parse_kind(body.at("kind").get<std::string>()), body.value("d_row", 0),
                              body.value("d_col", 0)};
                send_json(res, session_json(store.apply(req.matches[1], a)));
              }));

  server.Get(R"(/sessions/([^/]+)/image/([a-z]+))",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
               const Session s = store.get(req.matches[1]);
               detail::send_image(req, res, stage_image(s, parse_stage(req.matches[2].str())));
             }));

  server.Get("/components", guarded([&store](const httplib::Request& req, httplib::Response& res) {
               if (!req.has_param("kind")) throw Error(Errc::InvalidArgument, "missing 'kind' query parameter");
               Query q{parse_kind(req.get_param_value("kind")), {}};
               for (const auto& [name, value] : req.params) {
                 if (name != "kind") q.desired[name] = value;
               }
               json out = json::array();
               for (const auto* rec : match_query(q, store.catalog())) out.push_back(record_json(*rec));
               send_json(res, out);
             }));

  server.Get(R"(/components/([^/]+)/image)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
               const auto* rec = store.catalog().find(req.matches[1].str());
               if (!rec) {
                 send_json(res, {{"error", "NotFound"}, {"message", "no component '" + req.matches[1].str() + "'"}}, 404);
                 return;
               }
               detail::send_image(req, res, rec->image);
             }));
}

}  // namespace fasy::http
