// opalg: experiment harness.
//
//   opalg verify-lemma --lemma inver --dims 4 --samples 1000
//   opalg defect-suite --dims 2,3 --eps 1e-2,1e-3 --samples 50
//   opalg recover --dims 2,3 --eps 1e-3 --seed 7
//   opalg certify [--allow-flagged vn-epsilon0 ...]
//   opalg bench
//   opalg replay dumps/case-0003.json
//
// Options may also come from a flat key=value file (--config); flags win.
// Exit codes: 0 all checks pass, 1 some check failed, 2 usage/config error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "opalg/campaign.hpp"

namespace fs = std::filesystem;
using namespace opalg;

namespace {

std::uint64_t default_seed() {
  if (const char* s = std::getenv("OPALG_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw ArgumentError("OPALG_SEED is not an unsigned integer");
    }
  }
  return 0;
}

void add_common(CLI::App& app, ExperimentConfig& cfg) {
  app.add_option("--dims", cfg.dims, "block sizes, e.g. 2,3")->delimiter(',');
  app.add_option("--eps", cfg.eps, "perturbation scales")->delimiter(',');
  app.add_option("--samples", cfg.samples, "samples per scale");
  app.add_option("--instances", cfg.instances, "pipeline instances per scale");
  app.add_option("--restarts", cfg.restarts, "ascent restarts");
  app.add_option("--max-iter", cfg.max_iter, "ascent iteration cap");
  app.add_option("--level", cfg.level, "matrix level for defect norms (0: largest block)");
  app.add_option("--seed", cfg.seed, "base seed (default: $OPALG_SEED or 0)");
  app.add_option("--tol", cfg.tol, "check tolerance");
  app.add_option("--lemma", cfg.lemma, "unit | inver | unitmult | l2");
  app.add_option("--allow-flagged", cfg.allow_flagged, "violated step ids that do not fail the run")->delimiter(',');
  app.add_option("--deltas", cfg.deltas, "delta grid for the constant chain")->delimiter(',');
  app.add_option("--lengths", cfg.lengths, "lengths for the length threshold")->delimiter(',');
  app.add_option("--ks", cfg.ks, "K values for the length threshold")->delimiter(',');
  app.add_option("--out", cfg.out, "JSON report path (default: stdout)");
  app.add_option("--csv-dir", cfg.csv_dir, "directory for CSV series");
  app.add_option("--dump-dir", cfg.dump_dir, "directory for case dumps (default: dumps)");
  app.add_flag("--dump-all", cfg.dump_all, "dump passing cases too");
}

void write_text(const fs::path& p, const std::string& s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw ArgumentError("cannot write " + p.string());
  out << s;
}

int run(ExperimentConfig& cfg) {
  const CampaignResult r = run_campaign(cfg);
  const json report = make_report(cfg, r);
  if (cfg.out.empty()) std::cout << report.dump(2) << '\n';
  else write_text(cfg.out, report.dump(2) + "\n");
  if (!cfg.csv_dir.empty())
    for (const auto& [name, contents] : r.csv) write_text(fs::path(cfg.csv_dir) / name, contents);

  const fs::path dump_dir = cfg.dump_dir.empty() ? fs::path("dumps") : fs::path(cfg.dump_dir);
  int n = 0;
  auto dump = [&](const json& c, const char* prefix) {
    const fs::path p = dump_dir / (std::string(prefix) + "-" + std::to_string(n++) + ".json");
    write_text(p, c.dump(2) + "\n");
    return p;
  };
  for (const auto& c : r.failing_cases) std::cerr << "failing case dumped to " << dump(c, "fail").string() << '\n';
  for (const auto& c : r.all_cases) dump(c, "case");

  if (cfg.mode == "certify") {
    for (const auto& f : r.results.at("violated"))
      std::cerr << "violated: " << f.at("chain").get<std::string>() << " / " << f.at("step").get<std::string>()
                << (f.at("allowed").get<bool>() ? " (allowed)" : "") << '\n';
  }
  return r.pass ? 0 : 1;
}

int replay(const std::string& path) {
  const json c = io::read_json_file(path);
  const CaseResult r = evaluate_case(c);
  const json out = {{"kind", c.at("kind")}, {"pass", r.pass}, {"details", r.details}};
  std::cout << out.dump(2) << '\n';
  if (c.contains("verdict") && c.at("verdict").get<bool>() != r.pass) std::cerr << "verdict differs from the dump\n";
  return r.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"operator algebra perturbation toolkit"};
  app.require_subcommand(0, 1);
  app.set_config("--config", "", "flat key=value configuration file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  ExperimentConfig cfg;
  std::string mode;
  app.add_option("--mode", mode, "campaign when no subcommand is given");
  add_common(app, cfg);

  std::vector<CLI::App*> subs;
  for (const char* m : {"verify-lemma", "defect-suite", "recover", "certify", "bench"}) {
    CLI::App* s = app.add_subcommand(m, std::string("run the ") + m + " campaign");
    s->fallthrough();
    subs.push_back(s);
  }
  std::string case_file;
  CLI::App* rep = app.add_subcommand("replay", "re-evaluate a case dump");
  rep->add_option("case", case_file, "case dump (JSON)")->required();

  try {
    cfg.seed = default_seed();
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (rep->parsed()) return replay(case_file);
    cfg.mode = mode;
    for (CLI::App* s : subs)
      if (s->parsed()) cfg.mode = s->get_name();
    if (cfg.mode.empty()) {
      std::cerr << app.help() << '\n';
      return 2;
    }
    cfg.validate();
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return 1;
  }

  try {
    return run(cfg);
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return 1;
  }
}
