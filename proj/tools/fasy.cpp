// fasy: command-line front end for the face construction engine.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "fasy/demo.hpp"
#include "fasy/fasy.hpp"
#include "fasy/http_api.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw fasy::Error(fasy::Errc::IoFailure, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_all(const fs::path& p, std::string_view data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw fasy::Error(fasy::Errc::IoFailure, "cannot write " + p.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

fasy::ParamMap parse_params(const std::vector<std::string>& pairs) {
  fasy::ParamMap out;
  for (const auto& p : pairs) {
    auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw fasy::Error(fasy::Errc::InvalidArgument, "expected NAME=VALUE, got '" + p + "'");
    }
    out[p.substr(0, eq)] = p.substr(eq + 1);
  }
  return out;
}

std::shared_ptr<const fasy::Catalog> open_catalog(const std::string& root) {
  if (root.empty()) return std::make_shared<const fasy::Catalog>(fasy::demo::make_catalog());
  return std::make_shared<const fasy::Catalog>(fasy::load_catalog(root));
}

fasy::Catalog open_or_create(const std::string& root) {
  if (fs::exists(fs::path(root) / fasy::kManifestName)) return fasy::load_catalog(root);
  return {};
}

struct GenerateOptions {
  std::string desc_file;
  std::string out_file;
  std::string stage = "tuned";
  int threshold = 0;
  std::string text_dir;
  std::string transcript_file;
};

// Batch run of the whole loop: describe, take the first candidate of every
// kind, assemble, tune, write the requested stage.
int run_generate(const fasy::Catalog& catalog, const GenerateOptions& opt) {
  const json desc_json = json::parse(read_all(opt.desc_file));
  fasy::SessionStore store(std::shared_ptr<const fasy::Catalog>(&catalog, [](const fasy::Catalog*) {}), 1);
  const std::string id = store.create().id;

  fasy::Session s = store.apply(id, fasy::DescribeAction{fasy::description_from_json(desc_json)});
  for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
  for (auto kind : fasy::kAllKinds) {
    const auto& cands = s.candidates.at(kind);
    if (cands.empty()) {
      std::cerr << "no candidate for " << fasy::kind_name(kind) << "; relax the description\n";
      return 3;
    }
    s = store.apply(id, fasy::SelectAction{kind, cands.front()});
  }
  s = store.apply(id, fasy::AssembleAction{});
  fasy::TuneConfig cfg;
  cfg.component_threshold = fasy::Threshold{static_cast<std::uint8_t>(opt.threshold)};
  s = store.apply(id, fasy::TuneAction{cfg});

  write_all(opt.out_file, fasy::export_face(s, fasy::parse_stage(opt.stage)));
  std::cout << fasy::format_layout(s.layout());

  if (!opt.transcript_file.empty()) store.save_transcript(id, opt.transcript_file);

  if (!opt.text_dir.empty()) {
    // Hardware stimulus: blank face and component sheet at 23x28.
    fs::create_directories(opt.text_dir);
    const auto& face = catalog.get(s.selections.at(fasy::ComponentKind::FaceCutting)).image;
    const fasy::Layout layout = s.layout();
    std::vector<fasy::PlacedComponent> placed;
    for (auto kind : fasy::kPlacementOrder) {
      const auto& rec = catalog.get(s.selections.at(kind));
      placed.push_back({&rec.image, &*rec.mask, layout.at(kind)});
    }
    const auto sheet = fasy::build_component_sheet(face.height(), face.width(), placed);
    write_all(fs::path(opt.text_dir) / "Face.txt", fasy::write_intensity_text(fasy::resize_nearest(face, 23, 28)));
    write_all(fs::path(opt.text_dir) / "Components.txt",
              fasy::write_intensity_text(fasy::resize_nearest(sheet, 23, 28)));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fasy - assemble faces from described components"};
  app.require_subcommand(1);

  std::string catalog_root;
  auto add_catalog = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--catalog", catalog_root, "catalog directory")->envname("FASY_CATALOG");
    if (required) opt->required();
  };

  // seed-demo
  auto* seed = app.add_subcommand("seed-demo", "write the synthetic demo catalog to a directory");
  add_catalog(seed, true);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "add a component image to a catalog");
  add_catalog(ingest, true);
  std::string kind_str, image_file, mask_file, source;
  std::vector<std::string> params;
  ingest->add_option("--kind", kind_str, "component kind")->required();
  ingest->add_option("--image", image_file, "PGM image")->required()->check(CLI::ExistingFile);
  ingest->add_option("--mask", mask_file, "PGM mask (nonzero = background)")->check(CLI::ExistingFile);
  ingest->add_option("--param", params, "NAME=VALUE, repeatable");
  ingest->add_option("--source", source, "provenance note");

  // query
  auto* query = app.add_subcommand("query", "list components matching a description");
  add_catalog(query, false);
  query->add_option("--kind", kind_str, "component kind")->required();
  query->add_option("--param", params, "NAME=VALUE, repeatable; CantSay is a wildcard");

  // generate
  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "run describe/select/assemble/tune in one shot");
  add_catalog(generate, false);
  generate->add_option("--desc", gen.desc_file, "JSON description file")->required()->check(CLI::ExistingFile);
  generate->add_option("--out", gen.out_file, "output PGM")->required();
  generate->add_option("--stage", gen.stage, "blind, masked or tuned")->check(CLI::IsMember({"blind", "masked", "tuned"}));
  generate->add_option("--threshold", gen.threshold, "component threshold")->check(CLI::Range(0, 255));
  generate->add_option("--text-dir", gen.text_dir, "also write 23x28 Face.txt and Components.txt here");
  generate->add_option("--transcript", gen.transcript_file, "save the session action log");

  // tune-fpga
  std::string face_txt = "Face.txt", comp_txt = "Components.txt", out_txt = "Out.txt", trace_file;
  int width = 23, height = 28, threshold = 0;
  auto* tune = app.add_subcommand("tune-fpga", "integer tuning pass over headerless intensity text files");
  tune->add_option("--face", face_txt, "blank face intensities");
  tune->add_option("--components", comp_txt, "component sheet intensities");
  tune->add_option("--width", width)->check(CLI::PositiveNumber);
  tune->add_option("--height", height)->check(CLI::PositiveNumber);
  tune->add_option("--threshold", threshold)->check(CLI::Range(0, 255));
  tune->add_option("--out", out_txt, "output intensities");
  tune->add_option("--trace", trace_file, "per-pixel datapath trace (TSV)");

  // to-text
  std::string text_out;
  int resize_w = 0, resize_h = 0;
  auto* to_text = app.add_subcommand("to-text", "dump a PGM as a headerless intensity text file");
  to_text->add_option("--image", image_file)->required()->check(CLI::ExistingFile);
  to_text->add_option("--out", text_out)->required();
  to_text->add_option("--width", resize_w, "resize width first");
  to_text->add_option("--height", resize_h, "resize height first");

  // serve
  std::string listen = "127.0.0.1:8080";
  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  add_catalog(serve, false);
  serve->add_option("--listen", listen, "host:port")->envname("FASY_LISTEN");
  std::string transcript_dir;
  serve->add_option("--restore", transcript_dir, "directory of saved transcripts to replay on start");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*seed) {
      fasy::save_catalog(fasy::demo::make_catalog(), catalog_root);
      std::cout << "wrote demo catalog to " << catalog_root << "\n";
    } else if (*ingest) {
      fasy::Catalog cat = open_or_create(catalog_root);
      const auto kind = fasy::parse_kind(kind_str);
      auto image = fasy::load_pgm(read_all(image_file));
      std::optional<fasy::BinaryMask> mask;
      if (!mask_file.empty()) mask = fasy::image_to_mask(fasy::load_pgm(read_all(mask_file)));
      auto result = cat.ingest(kind, parse_params(params), std::move(image), std::move(mask), source);
      for (const auto& w : result.report.warnings) std::cerr << "warning: " << w.message << "\n";
      fasy::save_catalog(cat, catalog_root);
      std::cout << result.record.id << "\n";
    } else if (*query) {
      auto cat = open_catalog(catalog_root);
      fasy::Query q{fasy::parse_kind(kind_str), parse_params(params)};
      for (const auto& w : fasy::validate_params(q.kind, q.desired).warnings) std::cerr << "warning: " << w.message << "\n";
      for (const auto* rec : fasy::match_query(q, *cat)) {
        std::cout << rec->id;
        for (const auto& [k, v] : rec->params) std::cout << '\t' << k << '=' << v;
        std::cout << "\n";
      }
    } else if (*generate) {
      auto cat = open_catalog(catalog_root);
      return run_generate(*cat, gen);
    } else if (*tune) {
      fasy::TuneConfig cfg;
      cfg.component_threshold = fasy::Threshold{static_cast<std::uint8_t>(threshold)};
      auto res = fasy::run_textfile_flow(read_all(face_txt), read_all(comp_txt), width, height, cfg);
      write_all(out_txt, res.output_text);
      if (!trace_file.empty()) write_all(trace_file, fasy::format_trace_tsv(res.trace));
      std::cout << res.trace.size() << " pixels tuned\n";
    } else if (*to_text) {
      auto img = fasy::load_pgm(read_all(image_file));
      if (resize_w > 0 || resize_h > 0) {
        img = fasy::resize_nearest(img, resize_w > 0 ? resize_w : img.width(), resize_h > 0 ? resize_h : img.height());
      }
      write_all(text_out, fasy::write_intensity_text(img));
      std::cout << img.width() << " " << img.height() << "\n";
    } else if (*serve) {
      auto colon = listen.rfind(':');
      if (colon == std::string::npos) throw fasy::Error(fasy::Errc::InvalidArgument, "--listen must be host:port");
      const std::string host = listen.substr(0, colon);
      const int port = std::stoi(listen.substr(colon + 1));
      fasy::SessionStore store(open_catalog(catalog_root));
      if (!transcript_dir.empty()) {
        for (const auto& entry : fs::directory_iterator(transcript_dir)) {
          if (entry.path().extension() == ".json") std::cout << "restored " << store.restore(entry.path()).id << "\n";
        }
      }
      httplib::Server server;
      fasy::http::mount(server, store);
      std::cout << "listening on " << host << ":" << port << std::endl;
      if (!server.listen(host, port)) {
        std::cerr << "cannot listen on " << listen << "\n";
        return 1;
      }
    }
  } catch (const fasy::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
