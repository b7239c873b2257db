#ifndef OPALG_IO_HPP
#define OPALG_IO_HPP

// JSON formats.
//   element:  {"dims": [n1, ...], "blocks": [[[re, im], ...], ...]}   (row-major per block)
//   LinMap:   {"domain": [..], "codomain": [..], "matrix": [[[re, im], ...], ...]}   (rows)
//   BilMap:   {"domain": [..], "codomain": [..], "tensor": [[[re, im], ...], ...]}   (rows, column i + D*j)
// Doubles are written in shortest round-trip form, so reading back is bit-exact.

#include <fstream>
#include <string>

#include <json.hpp>

#include "opalg/certify.hpp"
#include "opalg/perturb.hpp"

namespace opalg::io {

using json = nlohmann::json;

inline json to_json(const cd& z) { return json::array({z.real(), z.imag()}); }

inline cd complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw StructuralError("json: complex entries must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json dims_json(const BlockAlgebra& alg) { return json(alg.dims()); }

inline BlockAlgebra algebra_from_json(const json& j) {
  if (!j.is_array()) throw StructuralError("json: dims must be an array");
  std::vector<int> dims;
  for (const auto& d : j) {
    if (!d.is_number_integer()) throw StructuralError("json: dims must be integers");
    dims.push_back(d.get<int>());
  }
  return BlockAlgebra(std::move(dims));
}

/// Rows of a complex matrix, each a list of [re, im].
inline json rows_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Mat matrix_from_rows(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) throw StructuralError("json: wrong row count");
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw StructuralError("json: wrong column count");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

inline json to_json(const AlgElement& x) {
  json blocks = json::array();
  for (const auto& b : x.blocks()) {
    json flat = json::array();
    for (Eigen::Index r = 0; r < b.rows(); ++r)
      for (Eigen::Index c = 0; c < b.cols(); ++c) flat.push_back(to_json(b(r, c)));
    blocks.push_back(std::move(flat));
  }
  return {{"dims", dims_json(x.algebra())}, {"blocks", std::move(blocks)}};
}

inline AlgElement element_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dims") || !j.contains("blocks")) throw StructuralError("json: element needs dims and blocks");
  const BlockAlgebra alg = algebra_from_json(j.at("dims"));
  const json& bl = j.at("blocks");
  if (!bl.is_array() || static_cast<int>(bl.size()) != alg.num_blocks()) throw StructuralError("json: wrong block count");
  std::vector<Mat> blocks;
  for (int b = 0; b < alg.num_blocks(); ++b) {
    const int n = alg.dim(b);
    const json& flat = bl[static_cast<std::size_t>(b)];
    if (!flat.is_array() || static_cast<int>(flat.size()) != n * n) throw StructuralError("json: wrong block size");
    Mat m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m(r, c) = complex_from_json(flat[static_cast<std::size_t>(r * n + c)]);
    blocks.push_back(std::move(m));
  }
  return AlgElement(alg, std::move(blocks));
}

inline json to_json(const LinMap& t) {
  return {{"domain", dims_json(t.domain())}, {"codomain", dims_json(t.codomain())}, {"matrix", rows_json(t.matrix())}};
}

inline LinMap linmap_from_json(const json& j) {
  if (!j.is_object() || !j.contains("matrix")) throw StructuralError("json: LinMap needs domain, codomain, matrix");
  const BlockAlgebra dom = algebra_from_json(j.at("domain"));
  const BlockAlgebra cod = algebra_from_json(j.at("codomain"));
  return LinMap(dom, cod, matrix_from_rows(j.at("matrix"), cod.coord_dim(), dom.coord_dim()));
}

inline json to_json(const BilMap& b) {
  return {{"domain", dims_json(b.domain())}, {"codomain", dims_json(b.codomain())}, {"tensor", rows_json(b.tensor())}};
}

inline BilMap bilmap_from_json(const json& j) {
  if (!j.is_object() || !j.contains("tensor")) throw StructuralError("json: BilMap needs domain, codomain, tensor");
  const BlockAlgebra dom = algebra_from_json(j.at("domain"));
  const BlockAlgebra cod = algebra_from_json(j.at("codomain"));
  const Eigen::Index d = dom.coord_dim();
  return BilMap(dom, cod, matrix_from_rows(j.at("tensor"), cod.coord_dim(), d * d));
}

inline json to_json(const NormEstimate& e) {
  json w = json::array();
  for (const auto& x : e.witness) w.push_back(to_json(x));
  return {{"lower", e.lower}, {"value", e.value}, {"level", e.level}, {"restarts", e.restarts},
          {"converged", e.converged}, {"witness", std::move(w)}};
}

inline NormEstimate norm_estimate_from_json(const json& j) {
  NormEstimate e;
  e.lower = j.at("lower").get<double>();
  e.value = j.at("value").get<double>();
  e.level = j.at("level").get<int>();
  e.restarts = j.at("restarts").get<int>();
  e.converged = j.at("converged").get<bool>();
  for (const auto& w : j.at("witness")) e.witness.push_back(element_from_json(w));
  return e;
}

inline json to_json(const AscentOptions& o) {
  return {{"restarts", o.restarts}, {"max_iter", o.max_iter}, {"stall_tol", o.stall_tol}, {"seed", o.seed}};
}

inline AscentOptions ascent_from_json(const json& j) {
  AscentOptions o;
  o.restarts = j.at("restarts").get<int>();
  o.max_iter = j.at("max_iter").get<int>();
  o.stall_tol = j.at("stall_tol").get<double>();
  o.seed = j.at("seed").get<std::uint64_t>();
  return o;
}

inline json to_json(const DefectReport& r, bool with_witnesses = true) {
  json j = {{"cb_T", r.cb_t.value},
            {"cb_Tinv", r.cb_tinv.value},
            {"mu", r.mu},
            {"mult_defect", {{"lower", r.mult_defect.lower}, {"value", r.mult_defect.value}}},
            {"sa_defect", {{"lower", r.sa_defect.lower}, {"value", r.sa_defect.value}}},
            {"bound_mult", r.bound_mult},
            {"bound_sa", r.bound_sa},
            {"tol", r.tol},
            {"mult_satisfied", r.mult_satisfied},
            {"sa_satisfied", r.sa_satisfied}};
  if (with_witnesses) {
    j["estimates"] = {{"cb_T", to_json(r.cb_t)},
                      {"cb_Tinv", to_json(r.cb_tinv)},
                      {"mult_defect", to_json(r.mult_defect)},
                      {"sa_defect", to_json(r.sa_defect)}};
  }
  return j;
}

inline std::string defect_csv_header() {
  return "index,eps,cb_T,cb_Tinv,mu,mult_defect_lower,mult_defect_value,bound_mult,sa_defect_lower,sa_defect_value,bound_sa,"
         "satisfied";
}

inline std::string defect_csv_row(int index, double eps, const DefectReport& r) {
  const json row = json::array({index, eps, r.cb_t.value, r.cb_tinv.value, r.mu, r.mult_defect.lower, r.mult_defect.value,
                                r.bound_mult, r.sa_defect.lower, r.sa_defect.value, r.bound_sa, r.satisfied() ? 1 : 0});
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += row[i].dump();
  }
  return out;
}

inline json to_json(const IterationTrace& t) {
  json steps = json::array();
  for (const auto& s : t.steps)
    steps.push_back({{"eps", s.eps},
                     {"eps_next", s.eps_next},
                     {"ratio", s.ratio},
                     {"floor_limited", s.floor_limited},
                     {"h_norm", s.h_norm},
                     {"residual", s.residual},
                     {"w_cond", s.w_cond},
                     {"phi_cond", s.phi_cond}});
  return {{"eps0", t.eps0}, {"converged", t.converged}, {"max_ratio", t.max_ratio()}, {"steps", std::move(steps)}};
}

inline json to_json(const RecoveryReport& r) {
  return {{"cb_distance", r.cb_distance},
          {"excess", r.excess},
          {"inv_unit_norm", r.inv_unit_norm},
          {"imageunit_bound", r.imageunit_bound},
          {"induced_defect", r.induced_defect},
          {"trace", to_json(r.trace)},
          {"mult_residual", r.mult_residual},
          {"sa_residual", r.sa_residual},
          {"star_residual", r.star_residual},
          {"unitary_residual", r.unitary_residual},
          {"distance_to_input", r.distance_to_input},
          {"distance_bound", r.distance_bound}};
}

inline json to_json(const Interval& i) { return json::array({i.lo(), i.hi()}); }

inline json to_json(const ChainReport& r) {
  json steps = json::array();
  for (const auto& s : r.steps)
    steps.push_back({{"id", s.id},
                     {"description", s.description},
                     {"claimed", to_json(s.claimed)},
                     {"derived", to_json(s.derived)},
                     {"relation", to_string(s.relation)},
                     {"status", to_string(s.status)},
                     {"note", s.note}});
  return {{"name", r.name}, {"input", to_json(r.input)}, {"steps", std::move(steps)}, {"facts", r.facts}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw StructuralError(std::string("malformed json in ") + path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace opalg::io

#endif  // OPALG_IO_HPP
