#ifndef OPALG_DEFECT_HPP
#define OPALG_DEFECT_HPP

// Defects of multiplicativity and selfadjointness of a map between block
// algebras, the unitization S = L(1)^{-1} L and symmetrization T = (S + S*)/2,
// and numerical verification of the two defect bounds
//
//   ||T^v||_cb     <= 2 sqrt((||T||_cb + mu/sqrt2)^2 - 1) + mu (1 + ||T||_cb)
//   ||T - T*||_cb  <= 2 sqrt((||T||_cb + mu/sqrt2)^2 - 1) + 2 mu
//
// with mu = max{ ||T||_cb - 1, 1 - sqrt(2/||T^{-1}||_cb^2 - ||T||_cb^2) }.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "opalg/opspace.hpp"

namespace opalg {

/// T^v(a, b) = T(ab) - T(a)T(b) as an exact coordinate tensor.
inline BilMap mult_defect(const LinMap& t) {
  const BlockAlgebra& dom = t.domain();
  const BlockAlgebra& cod = t.codomain();
  const int d = dom.coord_dim();
  const auto table = product_table(dom);
  std::vector<AlgElement> images;
  images.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) images.push_back(AlgElement::from_coords(cod, t.matrix().col(i)));
  Mat tensor(cod.coord_dim(), d * d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      Vec col = -(images[static_cast<std::size_t>(i)] * images[static_cast<std::size_t>(j)]).coords();
      if (const int k = table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; k >= 0) col += t.matrix().col(k);
      tensor.col(i + d * j) = col;
    }
  return BilMap(dom, cod, std::move(tensor));
}

/// Coordinate permutation realizing x -> x* up to conjugation: (x*)_k = conj(x_{perm[k]}).
inline std::vector<int> adjoint_permutation(const BlockAlgebra& alg) {
  std::vector<int> perm(static_cast<std::size_t>(alg.coord_dim()));
  for (int b = 0; b < alg.num_blocks(); ++b)
    for (int r = 0; r < alg.dim(b); ++r)
      for (int s = 0; s < alg.dim(b); ++s) perm[static_cast<std::size_t>(alg.index(b, r, s))] = alg.index(b, s, r);
  return perm;
}

/// T*(x) = T(x*)*. Only permutes and conjugates entries, so star_map(star_map(T)) == T bitwise.
inline LinMap star_map(const LinMap& t) {
  const auto pc = adjoint_permutation(t.codomain());
  const auto pd = adjoint_permutation(t.domain());
  const Mat& m = t.matrix();
  Mat out(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      out(r, c) = std::conj(m(pc[static_cast<std::size_t>(r)], pd[static_cast<std::size_t>(c)]));
  return LinMap(t.domain(), t.codomain(), std::move(out));
}

/// mu from given values of ||T||_cb and ||T^{-1}||_cb.
inline double mu_from_norms(double norm, double inv_norm) {
  const double product = norm * inv_norm;
  if (!(product < std::sqrt(2.0))) throw HypothesisNotMet("mu: requires ||T||_cb ||T^-1||_cb < sqrt(2)", product);
  const double q = 2.0 / (inv_norm * inv_norm) - norm * norm;
  if (q <= 0.0) return std::max(norm - 1.0, 1.0);
  return std::max({norm - 1.0, 1.0 - std::sqrt(q), 0.0});
}

/// The shared square-root term  2 sqrt((||T|| + mu/sqrt2)^2 - 1).
inline double defmult_root_term(double norm, double mu) {
  const double a = norm + mu / std::sqrt(2.0);
  return 2.0 * std::sqrt(std::max(0.0, a * a - 1.0));
}

inline double defmult_mult_bound(double norm, double mu) { return defmult_root_term(norm, mu) + mu * (1.0 + norm); }
inline double defmult_sa_bound(double norm, double mu) { return defmult_root_term(norm, mu) + 2.0 * mu; }

/// ||T(u)^{-1}|| <= ||T^{-1}||_cb / sqrt(2 - ||T||_cb^2 ||T^{-1}||_cb^2)
inline double imageunit_bound(double norm, double inv_norm) {
  const double p = norm * inv_norm;
  if (!(p < std::sqrt(2.0))) throw HypothesisNotMet("imageunit: requires ||T||_cb ||T^-1||_cb < sqrt(2)", p);
  return inv_norm / std::sqrt(2.0 - p * p);
}

/// mu(T) using the reported (`value`) cb-norm estimates of T and T^{-1}.
inline double mu(const LinMap& t, const AscentOptions& opt = {}) {
  AscentOptions o2 = opt;
  o2.seed = derive_seed(opt.seed, 1);
  return mu_from_norms(cb_norm(t, opt).value, cb_norm(inverse(t), o2).value);
}

struct UnitizeResult {
  LinMap map;                 ///< S = L(1)^{-1} L
  double inv_unit_norm = 0;   ///< ||L(1)^{-1}||
  double bound = 0;           ///< imageunit bound from the cb-norm estimates of L, L^{-1}
  bool bound_holds = false;
  double cb_norm = 0;
  double cb_inv_norm = 0;
};

/// S = L(1)^{-1} L, together with the certificate ||L(1)^{-1}|| against the
/// imageunit bound. Throws HypothesisNotMet if ||L||_cb ||L^{-1}||_cb >= sqrt2
/// and NotInvertible if L(1) is numerically singular.
inline UnitizeResult unitize(const LinMap& l, const AscentOptions& opt = {}, const Tolerances& tol = {}) {
  UnitizeResult res{l};
  AscentOptions o2 = opt;
  o2.seed = derive_seed(opt.seed, 2);
  res.cb_norm = cb_norm(l, opt).value;
  res.cb_inv_norm = cb_norm(inverse(l), o2).value;
  res.bound = imageunit_bound(res.cb_norm, res.cb_inv_norm);
  const AlgElement unit_image = l.apply(AlgElement::identity(l.domain()));
  const AlgElement inv = inverse(unit_image, tol);
  res.inv_unit_norm = op_norm(inv);
  res.bound_holds = res.inv_unit_norm <= res.bound + tol.optimization;
  res.map = compose(left_multiplication(inv), l);
  return res;
}

/// T = (S + S*)/2; star_map(T) == T exactly.
inline LinMap symmetrize(const LinMap& s) {
  const LinMap st = star_map(s);
  return LinMap(s.domain(), s.codomain(), 0.5 * (s.matrix() + st.matrix()));
}

struct DefectReport {
  NormEstimate cb_t;
  NormEstimate cb_tinv;
  double mu = 0.0;
  NormEstimate mult_defect;
  NormEstimate sa_defect;
  double bound_mult = 0.0;
  double bound_sa = 0.0;
  double tol = 0.0;
  bool mult_satisfied = false;
  bool sa_satisfied = false;
  bool satisfied() const { return mult_satisfied && sa_satisfied; }
};

struct DefectOptions {
  AscentOptions ascent;
  /// Matrix level for the defect norms; 0 selects the largest codomain block.
  int level = 0;
  double tol = 1e-9;
};

/// Estimates both defects of a unital T and compares them with the two bounds.
inline DefectReport verify_defmult(const LinMap& t, const DefectOptions& opt = {}) {
  const AlgElement one = AlgElement::identity(t.domain());
  const double unit_err = op_norm(t.apply(one) - AlgElement::identity(t.codomain()));
  if (unit_err > 1e-9) throw HypothesisNotMet("verify_defmult: T must be unital", unit_err);

  DefectReport rep;
  rep.tol = opt.tol;
  AscentOptions o = opt.ascent;
  rep.cb_t = cb_norm(t, o);
  o.seed = derive_seed(opt.ascent.seed, 1);
  rep.cb_tinv = cb_norm(inverse(t), o);
  rep.mu = mu_from_norms(rep.cb_t.value, rep.cb_tinv.value);

  const int k = opt.level > 0 ? opt.level : t.codomain().max_block();
  o.seed = derive_seed(opt.ascent.seed, 2);
  rep.mult_defect = bilinear_h_norm(mult_defect(t), k, o);
  o.seed = derive_seed(opt.ascent.seed, 3);
  rep.sa_defect = cb_norm(t - star_map(t), o);

  rep.bound_mult = defmult_mult_bound(rep.cb_t.value, rep.mu);
  rep.bound_sa = defmult_sa_bound(rep.cb_t.value, rep.mu);
  rep.mult_satisfied = rep.mult_defect.value <= rep.bound_mult + opt.tol;
  rep.sa_satisfied = rep.sa_defect.value <= rep.bound_sa + opt.tol;
  return rep;
}

/// S^{v l}(x_1, ..., x_l) = S(x_1 ... x_l) - S(x_1) ... S(x_l)
struct IteratedDefect {
  int order = 2;
  LinMap map;
  double cb_s = 0.0;         ///< estimate of ||S||_cb
  double cb_defect = 0.0;    ///< estimate of ||S^v||_cb
  double bound = 0.0;        ///< ||S^v||_cb * sum_{k=0}^{l-2} ||S||_cb^k

  AlgElement operator()(std::span<const AlgElement> xs) const {
    if (static_cast<int>(xs.size()) != order) throw ArgumentError("iterated defect: wrong number of arguments");
    AlgElement prod = xs.front();
    AlgElement img_prod = map.apply(xs.front());
    for (std::size_t i = 1; i < xs.size(); ++i) {
      prod = prod * xs[i];
      img_prod = img_prod * map.apply(xs[i]);
    }
    return map.apply(prod) - img_prod;
  }
};

inline double chained_defect_bound(double cb_defect, double cb_s, int order) {
  double sum = 0.0;
  double pw = 1.0;
  for (int k = 0; k <= order - 2; ++k) {
    sum += pw;
    pw *= cb_s;
  }
  return cb_defect * sum;
}

inline IteratedDefect iterated_defect(const LinMap& s, int order, const AscentOptions& opt = {}) {
  if (order < 2) throw ArgumentError("iterated_defect: order must be >= 2");
  IteratedDefect out{order, s};
  out.cb_s = cb_norm(s, opt).value;
  AscentOptions o = opt;
  o.seed = derive_seed(opt.seed, 4);
  // pointwise bounds only need the level-1 bilinear norm
  out.cb_defect = bilinear_h_norm(mult_defect(s), 1, o).value;
  out.bound = chained_defect_bound(out.cb_defect, out.cb_s, order);
  return out;
}

/// Largest value of ||S^{v l}(x)|| - bound * prod ||x_i|| over random tuples.
inline double iterated_defect_excess(const IteratedDefect& def, int samples, Rng& rng) {
  double worst = -std::numeric_limits<double>::infinity();
  std::vector<AlgElement> xs;
  for (int s = 0; s < samples; ++s) {
    xs.clear();
    double prod = 1.0;
    for (int i = 0; i < def.order; ++i) {
      xs.push_back(random_element(def.map.domain(), rng));
      prod *= op_norm(xs.back());
    }
    worst = std::max(worst, op_norm(def(xs)) - def.bound * prod);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// near-isometric instances

/// (id + eps G) o pi with G a Gaussian endomorphism of the codomain, normalized to coordinate norm 1.
inline LinMap perturb_map(const LinMap& pi, double eps, Rng& rng) {
  const int d = pi.codomain().coord_dim();
  Mat g = gaussian_matrix(d, d, rng);
  g /= coord_norm(g);
  const LinMap id_plus = LinMap(pi.codomain(), pi.codomain(), Mat::Identity(d, d) + eps * g);
  return compose(id_plus, pi);
}

/// A random *-isomorphism of alg onto a block-permuted copy: x -> u sigma(x) u*.
inline LinMap random_star_isomorphism(const BlockAlgebra& alg, Rng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(alg.num_blocks()));
  std::iota(perm.begin(), perm.end(), 0);
  // shuffle among equal-size blocks only
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> ud(0, i - 1);
    const std::size_t j = ud(rng);
    if (alg.dims()[i - 1] == alg.dims()[j]) std::swap(perm[i - 1], perm[j]);
  }
  const LinMap sigma = block_permutation(alg, perm);
  const AlgElement u = random_unitary(sigma.codomain(), rng);
  return compose(conjugation(u), sigma);
}

}  // namespace opalg

#endif  // OPALG_DEFECT_HPP
