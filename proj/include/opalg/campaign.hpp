#ifndef OPALG_CAMPAIGN_HPP
#define OPALG_CAMPAIGN_HPP

// Batch campaigns behind the command line tool. Every sample is turned into a
// self-contained case (kind + inputs + options); evaluate_case re-runs a case
// from that data alone, which is what makes failure dumps replayable.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "opalg/io.hpp"

namespace opalg {

using io::json;

struct ExperimentConfig {
  std::string mode;
  std::vector<int> dims{2, 3};
  std::vector<double> eps{1e-3};
  int samples = 100;
  int instances = 1;
  int restarts = 8;
  int max_iter = 200;
  int level = 0;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  std::string lemma = "unit";
  std::vector<std::string> allow_flagged;
  std::vector<double> deltas{1e-10, 1e-9, 1e-8, 1e-7, 2e-7};
  std::vector<int> lengths{1, 2, 3, 4, 5, 6};
  std::vector<double> ks{1, 2, 10};
  std::string out;
  std::string csv_dir;
  std::string dump_dir;
  bool dump_all = false;

  void validate() const {
    static const char* modes[] = {"verify-lemma", "defect-suite", "recover", "certify", "bench"};
    if (std::find(std::begin(modes), std::end(modes), mode) == std::end(modes))
      throw ArgumentError("unknown mode '" + mode + "'");
    try {
      BlockAlgebra check(dims);
    } catch (const StructuralError& e) {
      throw ArgumentError(std::string("dims: ") + e.what());
    }
    for (double e : eps)
      if (!(e >= 0.0)) throw ArgumentError("eps must be >= 0");
    if (samples < 1 || instances < 1 || restarts < 1 || max_iter < 1) throw ArgumentError("counts must be >= 1");
    if (level < 0) throw ArgumentError("level must be >= 0");
    static const char* lemmas[] = {"unit", "inver", "unitmult", "l2"};
    if (mode == "verify-lemma" && std::find(std::begin(lemmas), std::end(lemmas), lemma) == std::end(lemmas))
      throw ArgumentError("unknown lemma '" + lemma + "'");
  }

  AscentOptions ascent(std::uint64_t s) const { return {restarts, max_iter, 1e-10, s}; }

  json to_json() const {
    return {{"mode", mode},       {"dims", dims},         {"eps", eps},           {"samples", samples},
            {"instances", instances}, {"restarts", restarts}, {"max_iter", max_iter}, {"level", level},
            {"seed", seed},       {"tol", tol},           {"lemma", lemma},       {"allow_flagged", allow_flagged},
            {"deltas", deltas},   {"lengths", lengths},   {"ks", ks}};
  }
};

struct CaseResult {
  bool pass = false;
  json details;
};

// ---------------------------------------------------------------------------
// case evaluators

namespace cases {

inline CaseResult unit(const json& c) {
  const AlgElement x = io::element_from_json(c.at("x"));
  const int samples = c.value("samples", 200);
  const double tol = c.value("tol", 1e-9);
  const PolarResult p = polar(x);
  const double formula = std::max(op_norm(x) - 1.0, 1.0 - min_singular_value(x));
  const double direct = op_norm(x - p.unitary_part);
  Rng rng = make_rng(c.value("seed", std::uint64_t{0}), 0x7);
  double sampled = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) sampled = std::min(sampled, op_norm(x - random_unitary(x.algebra(), rng)));
  const bool pass = std::abs(p.distance_to_unitary - formula) <= tol && std::abs(direct - formula) <= tol &&
                    sampled >= formula - tol && unitarity_defect(p.unitary_part) <= tol;
  return {pass, {{"formula", formula}, {"polar", p.distance_to_unitary}, {"direct", direct}, {"sampled_min", sampled}}};
}

inline CaseResult inver(const json& c) {
  const AlgElement x = io::element_from_json(c.at("x"));
  const int projections = c.value("projections", 1000);
  const int contractions = c.value("contractions", 1000);
  const double tol = c.value("tol", 1e-9);
  const double inflate = c.value("inflate", 0.01);
  const double alpha = std::pow(min_singular_value(x), 2);
  Tolerances t;
  t.algebraic = tol;
  Rng rng = make_rng(c.value("seed", std::uint64_t{0}), 0xc);
  int failures = 0;
  for (int i = 0; i < projections; ++i)
    if (!check_condition_C(x, alpha, random_projection(x.algebra(), rng), t)) ++failures;
  for (int i = 0; i < contractions; ++i)
    if (!check_condition_C(x, alpha, random_contraction(x.algebra(), rng), t)) ++failures;
  const auto violating = find_violating_projection(x, alpha * (1.0 + inflate), t);
  bool witness_ok = false;
  if (violating) witness_ok = !check_condition_C(x, alpha * (1.0 + inflate), *violating, t);
  return {failures == 0 && witness_ok, {{"alpha", alpha}, {"failures", failures}, {"violating_found", witness_ok}}};
}

inline CaseResult unitmult(const json& c) {
  const AlgElement u = io::element_from_json(c.at("u"));
  const AlgElement v = io::element_from_json(c.at("v"));
  const AlgElement x = io::element_from_json(c.at("x"));
  const double tol = c.value("tol", 1e-9);
  const AlgElement one = AlgElement::identity(u.algebra());
  const double block = op_norm(block2x2(u, x, -1.0 * one, v));
  const double cc = std::max(1.0, block / std::sqrt(2.0));
  const double lhs = op_norm(x - u * v);
  const double rhs = 2.0 * std::sqrt(cc * cc - 1.0);
  return {lhs <= rhs + tol, {{"c", cc}, {"lhs", lhs}, {"rhs", rhs}}};
}

inline CaseResult l2(const json& c) {
  const auto rows = c.at("rows").get<Eigen::Index>();
  const auto cols = c.at("cols").get<Eigen::Index>();
  const Mat t = io::matrix_from_rows(c.at("T"), rows, cols);
  const Mat s = io::matrix_from_rows(c.at("S"), rows, cols);
  const double k = quotient_inverse_norm(t);
  const SurjectivityReport r = stability_surjectivity(t, s, k, c.value("tol", 1e-6));
  return {r.holds, {{"K", k}, {"distance", r.distance}, {"bound", r.bound}, {"measured", r.measured}, {"surjective", r.surjective}}};
}

inline CaseResult defmult(const json& c) {
  const LinMap t = io::linmap_from_json(c.at("T"));
  DefectOptions opt;
  opt.ascent = io::ascent_from_json(c.at("ascent"));
  opt.level = c.value("level", 0);
  opt.tol = c.value("tol", 1e-9);
  const DefectReport r = verify_defmult(t, opt);
  return {r.satisfied(), io::to_json(r, false)};
}

inline CaseResult recover(const json& c, const CoboundarySolver* solver = nullptr) {
  const LinMap l = io::linmap_from_json(c.at("L"));
  RecoveryOptions opt;
  opt.ascent = io::ascent_from_json(c.at("ascent"));
  opt.samples = c.value("samples", 100);
  const double tol = c.value("tol", 1e-9);
  const RecoveryResult r = recover_isomorphism(l, opt, solver);
  const RecoveryReport& rep = r.report;
  const bool pass = rep.mult_residual < tol && rep.sa_residual < tol && rep.star_residual < tol &&
                    rep.unitary_residual < tol && rep.distance_to_input <= rep.distance_bound;
  return {pass, io::to_json(rep)};
}

inline CaseResult correct(const json& c, const CoboundarySolver* solver = nullptr) {
  const Multiplication m(io::bilmap_from_json(c.at("m")));
  const int max_steps = c.value("max_steps", 8);
  const double residual_tol = c.value("residual_tol", 1e-10);
  const double max_ratio = c.value("max_ratio", 20.0);
  const CorrectionResult r = solver ? correct_multiplication(m, *solver) : correct_multiplication(m);
  const double resid = intertwining_residual(r.phi, m);
  const double dist = coord_norm(Mat(r.phi.matrix() - Mat::Identity(m.algebra.coord_dim(), m.algebra.coord_dim())));
  const double ratio = r.trace.max_ratio();
  const bool pass = static_cast<int>(r.trace.steps.size()) <= max_steps && resid < residual_tol &&
                    dist <= 10.0 * r.trace.eps0 + 1e-8 && std::isfinite(ratio) && ratio <= max_ratio;
  return {pass, {{"trace", io::to_json(r.trace)}, {"residual", resid}, {"phi_distance", dist}, {"iterations", r.trace.steps.size()}}};
}

}  // namespace cases

/// Re-runs a case from its dump. Throws StructuralError on malformed input.
inline CaseResult evaluate_case(const json& c) {
  if (!c.is_object() || !c.contains("kind")) throw StructuralError("case: missing kind");
  const std::string kind = c.at("kind").get<std::string>();
  try {
    if (kind == "unit") return cases::unit(c);
    if (kind == "inver") return cases::inver(c);
    if (kind == "unitmult") return cases::unitmult(c);
    if (kind == "l2") return cases::l2(c);
    if (kind == "defmult") return cases::defmult(c);
    if (kind == "recover") return cases::recover(c);
    if (kind == "correct") return cases::correct(c);
  } catch (const json::exception& e) {
    throw StructuralError(std::string("case: ") + e.what());
  }
  throw StructuralError("case: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// case generators

namespace gen {

inline json unit(const BlockAlgebra& alg, Rng& rng, std::uint64_t seed) {
  AlgElement x = random_invertible_contraction(alg, rng, 0.05);
  std::uniform_real_distribution<double> scale(0.3, 2.0);
  x *= cd(scale(rng));
  return {{"kind", "unit"}, {"x", io::to_json(x)}, {"seed", seed}};
}

inline json inver(const BlockAlgebra& alg, Rng& rng, std::uint64_t seed, int count) {
  return {{"kind", "inver"}, {"x", io::to_json(random_invertible_contraction(alg, rng, 0.05))}, {"seed", seed},
          {"projections", count}, {"contractions", count}};
}

inline json unitmult(const BlockAlgebra& alg, Rng& rng) {
  const AlgElement u = random_unitary(alg, rng);
  const AlgElement v = random_unitary(alg, rng);
  static const double radii[] = {0.0, 1e-6, 1e-3, 1e-2, 0.1, 0.5, 1.0};
  std::uniform_int_distribution<int> pick(0, 6);
  AlgElement e = random_element(alg, rng);
  e *= cd(radii[pick(rng)] / std::max(op_norm(e), 1e-300));
  const AlgElement x = u * v + e;
  return {{"kind", "unitmult"}, {"u", io::to_json(u)}, {"v", io::to_json(v)}, {"x", io::to_json(x)}};
}

inline json l2(Rng& rng) {
  std::uniform_int_distribution<int> rows_d(2, 6);
  const int rows = rows_d(rng);
  std::uniform_int_distribution<int> extra(0, 4);
  const int cols = rows + extra(rng);
  const Mat t = gaussian_matrix(rows, cols, rng);
  const double k = quotient_inverse_norm(t);
  std::uniform_real_distribution<double> frac(0.0, 0.95);
  Mat e = gaussian_matrix(rows, cols, rng);
  e *= frac(rng) / (k * spectral_norm(e));
  return {{"kind", "l2"}, {"rows", rows}, {"cols", cols}, {"T", io::rows_json(t)}, {"S", io::rows_json(t + e)}};
}

/// unitize o symmetrize of (id + eps G) o pi for a random *-isomorphism pi
inline LinMap defmult_instance(const BlockAlgebra& alg, double eps, Rng& rng) {
  const LinMap pi = random_star_isomorphism(alg, rng);
  const LinMap l = perturb_map(pi, eps, rng);
  AscentOptions quick{4, 100, 1e-10, rng()};
  const LinMap s = unitize(l, quick).map;
  return symmetrize(s);
}

}  // namespace gen

// ---------------------------------------------------------------------------
// campaigns

struct CampaignResult {
  json results;
  std::vector<json> failing_cases;
  std::vector<json> all_cases;
  std::vector<std::pair<std::string, std::string>> csv;  ///< (file name, contents)
  bool pass = true;
};

inline void record(CampaignResult& out, const ExperimentConfig& cfg, json c, const CaseResult& r, json& rows) {
  rows.push_back({{"pass", r.pass}, {"details", r.details}});
  if (!r.pass) out.pass = false;
  c["verdict"] = r.pass;
  c["details"] = r.details;
  if (!r.pass) out.failing_cases.push_back(c);
  if (cfg.dump_all) out.all_cases.push_back(std::move(c));
}

inline CampaignResult run_verify_lemma(const ExperimentConfig& cfg) {
  CampaignResult out;
  const BlockAlgebra alg(cfg.dims);
  json rows = json::array();
  for (int i = 0; i < cfg.samples; ++i) {
    const std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
    Rng rng(s);
    json c;
    if (cfg.lemma == "unit") c = gen::unit(alg, rng, s);
    else if (cfg.lemma == "inver") c = gen::inver(alg, rng, s, 100);
    else if (cfg.lemma == "unitmult") c = gen::unitmult(alg, rng);
    else c = gen::l2(rng);
    c["tol"] = cfg.lemma == "l2" ? 1e-6 : cfg.tol;
    record(out, cfg, c, evaluate_case(c), rows);
  }
  int failures = 0;
  for (const auto& r : rows) failures += r.at("pass").get<bool>() ? 0 : 1;
  out.results = {{"lemma", cfg.lemma}, {"samples", cfg.samples}, {"failures", failures}, {"cases", rows}};
  return out;
}

inline CampaignResult run_defect_suite(const ExperimentConfig& cfg) {
  CampaignResult out;
  const BlockAlgebra alg(cfg.dims);
  json rows = json::array();
  std::ostringstream csv;
  csv << io::defect_csv_header() << '\n';
  int index = 0;
  for (double eps : cfg.eps)
    for (int i = 0; i < cfg.samples; ++i, ++index) {
      const std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(index));
      Rng rng(s);
      const LinMap t = gen::defmult_instance(alg, eps, rng);
      const json c = {{"kind", "defmult"}, {"T", io::to_json(t)}, {"ascent", io::to_json(cfg.ascent(s))},
                      {"level", cfg.level}, {"tol", cfg.tol}, {"eps", eps}};
      DefectOptions opt;
      opt.ascent = cfg.ascent(s);
      opt.level = cfg.level;
      opt.tol = cfg.tol;
      const DefectReport r = verify_defmult(t, opt);
      csv << io::defect_csv_row(index, eps, r) << '\n';
      record(out, cfg, c, {r.satisfied(), io::to_json(r, false)}, rows);
    }
  int failures = 0;
  for (const auto& r : rows) failures += r.at("pass").get<bool>() ? 0 : 1;
  out.results = {{"instances", index}, {"violations", failures}, {"cases", rows}};
  out.csv.emplace_back("defect_vs_bound.csv", csv.str());
  return out;
}

inline CampaignResult run_recover(const ExperimentConfig& cfg) {
  CampaignResult out;
  const BlockAlgebra alg(cfg.dims);
  const CoboundarySolver solver(alg);
  json rows = json::array();
  std::ostringstream csv;
  csv << "instance,eps,iteration,defect\n";
  int index = 0;
  for (double eps : cfg.eps)
    for (int i = 0; i < cfg.instances; ++i, ++index) {
      const std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(index));
      Rng rng(s);
      const LinMap pi0 = random_star_isomorphism(alg, rng);
      const LinMap l = perturb_map(pi0, eps, rng);
      const json c = {{"kind", "recover"}, {"L", io::to_json(l)}, {"ascent", io::to_json(cfg.ascent(s))},
                      {"samples", 100}, {"tol", cfg.tol}, {"eps", eps}};
      const CaseResult r = cases::recover(c, &solver);
      const auto& steps = r.details.at("trace").at("steps");
      csv << index << ',' << json(eps).dump() << ",0," << r.details.at("trace").at("eps0").dump() << '\n';
      for (std::size_t k = 0; k < steps.size(); ++k)
        csv << index << ',' << json(eps).dump() << ',' << k + 1 << ',' << steps[k].at("eps_next").dump() << '\n';
      record(out, cfg, c, r, rows);
    }
  out.results = {{"instances", index}, {"cases", rows}};
  out.csv.emplace_back("defect_series.csv", csv.str());
  return out;
}

inline CampaignResult run_certify(const ExperimentConfig& cfg) {
  CampaignResult out;
  std::vector<ChainReport> reports;
  for (double d : cfg.deltas) reports.push_back(replay_quant_chain(Interval::around(d)));
  reports.push_back(threshold_nuclear());
  reports.push_back(threshold_vn());
  for (int l : cfg.lengths)
    for (double k : cfg.ks) reports.push_back(threshold_length(l, k));
  reports.push_back(lemma_constant_checks());

  json chains = json::array();
  json flagged = json::array();
  std::ostringstream csv;
  csv << "chain,input_lo,input_hi,step,status,derived_lo,derived_hi,claimed_lo,claimed_hi\n";
  for (const auto& r : reports) {
    chains.push_back(io::to_json(r));
    for (const auto& s : r.steps) {
      csv << r.name << ',' << json(r.input.lo()).dump() << ',' << json(r.input.hi()).dump() << ',' << s.id << ','
          << to_string(s.status) << ',' << json(s.derived.lo()).dump() << ',' << json(s.derived.hi()).dump() << ','
          << json(s.claimed.lo()).dump() << ',' << json(s.claimed.hi()).dump() << '\n';
      if (s.status != Status::violated) continue;
      const bool allowed = std::find(cfg.allow_flagged.begin(), cfg.allow_flagged.end(), s.id) != cfg.allow_flagged.end();
      flagged.push_back({{"chain", r.name}, {"step", s.id}, {"allowed", allowed}});
      if (!allowed) out.pass = false;
    }
  }
  out.results = {{"chains", chains}, {"violated", flagged}};
  out.csv.emplace_back("chains.csv", csv.str());
  return out;
}

inline CampaignResult run_bench(const ExperimentConfig& cfg) {
  CampaignResult out;
  const BlockAlgebra alg(cfg.dims);
  Rng rng = make_rng(cfg.seed, 0xbe);
  const LinMap t = gen::defmult_instance(alg, cfg.eps.front(), rng);
  auto timed = [](const std::function<void()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  json timings;
  timings["cb_norm"] = timed([&] { (void)cb_norm(t, cfg.ascent(cfg.seed)); });
  timings["bilinear_h_norm"] = timed([&] { (void)bilinear_h_norm(mult_defect(t), alg.max_block(), cfg.ascent(cfg.seed)); });
  timings["coboundary_factor"] = timed([&] { (void)CoboundarySolver(alg); });
  const PlantedInstance p = planted_multiplication(alg, 1e-2, rng);
  timings["correct_multiplication"] = timed([&] { (void)correct_multiplication(p.m); });
  timings["quant_chain"] = timed([&] { (void)replay_quant_chain(Interval::around(1e-8)); });
  out.results = {{"timings_seconds", timings}};
  return out;
}

inline CampaignResult run_campaign(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.mode == "verify-lemma") return run_verify_lemma(cfg);
  if (cfg.mode == "defect-suite") return run_defect_suite(cfg);
  if (cfg.mode == "recover") return run_recover(cfg);
  if (cfg.mode == "certify") return run_certify(cfg);
  return run_bench(cfg);
}

/// {"header": {...timestamp...}, "config": ..., "pass": ..., "results": ...}
inline json make_report(const ExperimentConfig& cfg, const CampaignResult& r) {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return {{"header", {{"tool", "opalg"}, {"timestamp", buf}}},
          {"config", cfg.to_json()},
          {"pass", r.pass},
          {"results", r.results}};
}

}  // namespace opalg

#endif  // OPALG_CAMPAIGN_HPP
