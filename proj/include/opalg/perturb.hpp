#ifndef OPALG_PERTURB_HPP
#define OPALG_PERTURB_HPP

// Hochschild coboundaries on a block algebra, the least-squares coboundary
// solver, and the Newton-type correction of a perturbed multiplication
// m back to the native one:  W = id + h  with  delta1 h = m - m_A,
// m <- W o m o (W^{-1} x W^{-1}),  Phi <- W Phi.

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "opalg/defect.hpp"

namespace opalg {

struct Multiplication {
  BlockAlgebra algebra;
  BilMap bil;

  explicit Multiplication(BilMap b) : algebra(b.domain()), bil(std::move(b)) {
    if (!(bil.codomain() == algebra)) throw StructuralError("Multiplication: bilinear map must be square");
  }
  static Multiplication native(const BlockAlgebra& alg) { return Multiplication(native_multiplication(alg)); }

  AlgElement operator()(const AlgElement& x, const AlgElement& y) const { return bil.apply(x, y); }

  /// coordinate operator norm of m - m_A
  double defect_norm() const { return coord_norm(bil.tensor() - native_multiplication(algebra).tensor()); }
};

/// max ||m(m(x,y),z) - m(x,m(y,z))|| over `triples` seeded random contractions.
inline double assoc_residual(const Multiplication& m, int triples = 50, std::uint64_t seed = 0) {
  Rng rng = make_rng(seed, 0xa550c);
  double worst = 0.0;
  for (int t = 0; t < triples; ++t) {
    const AlgElement x = random_contraction(m.algebra, rng);
    const AlgElement y = random_contraction(m.algebra, rng);
    const AlgElement z = random_contraction(m.algebra, rng);
    worst = std::max(worst, op_norm(m(m(x, y), z) - m(x, m(y, z))));
  }
  return worst;
}

/// max ||m(x*, y*) - m(y, x)*|| over seeded random contractions.
inline double star_residual(const Multiplication& m, int pairs = 50, std::uint64_t seed = 0) {
  Rng rng = make_rng(seed, 0x57a7);
  double worst = 0.0;
  for (int t = 0; t < pairs; ++t) {
    const AlgElement x = random_contraction(m.algebra, rng);
    const AlgElement y = random_contraction(m.algebra, rng);
    worst = std::max(worst, op_norm(m(x.adjoint(), y.adjoint()) - m(y, x).adjoint()));
  }
  return worst;
}

/// Haagerup-norm estimate of m - m_A at level k.
inline NormEstimate distance_to_native(const Multiplication& m, int k = 1, const AscentOptions& opt = {}) {
  return bilinear_h_norm(m.bil - native_multiplication(m.algebra), k, opt);
}

// ---------------------------------------------------------------------------
// Hochschild complex

/// delta1 h (x, y) = x h(y) - h(xy) + h(x) y
inline BilMap coboundary_1(const LinMap& h) {
  if (!(h.domain() == h.codomain())) throw StructuralError("coboundary_1: h must be an endomorphism");
  const BlockAlgebra& alg = h.domain();
  return BilMap::from_function(alg, alg, [&](const AlgElement& x, const AlgElement& y) {
    return x * h.apply(y) - h.apply(x * y) + h.apply(x) * y;
  });
}

/// delta2 D (x, y, z) = x D(y,z) - D(xy, z) + D(x, yz) - D(x,y) z
struct Coboundary2 {
  BilMap d;
  AlgElement operator()(const AlgElement& x, const AlgElement& y, const AlgElement& z) const {
    return x * d.apply(y, z) - d.apply(x * y, z) + d.apply(x, y * z) - d.apply(x, y) * z;
  }
};

inline Coboundary2 coboundary_2(const BilMap& d) {
  if (!(d.domain() == d.codomain())) throw StructuralError("coboundary_2: bilinear map must be square");
  return Coboundary2{d};
}

/// The real 0/+-1 matrix of delta1 acting on vec(h): column p + D*q is the
/// elementary map e_q -> e_p, row r + D*(i + D*j) the e_r coordinate of delta1 h(e_i, e_j).
inline Eigen::MatrixXd coboundary_matrix(const BlockAlgebra& alg) {
  const int d = alg.coord_dim();
  const auto t = product_table(alg);
  auto at = [&](int a, int b) { return t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; };
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d) * d * d, static_cast<Eigen::Index>(d) * d);
  auto row = [d](int r, int i, int j) { return static_cast<Eigen::Index>(r) + d * (static_cast<Eigen::Index>(i) + static_cast<Eigen::Index>(d) * j); };
  for (int q = 0; q < d; ++q)
    for (int p = 0; p < d; ++p) {
      const Eigen::Index col = p + static_cast<Eigen::Index>(d) * q;
      for (int i = 0; i < d; ++i) {
        // x h(y) with y = e_q
        if (const int r = at(i, p); r >= 0) a(row(r, i, q), col) += 1.0;
        // h(x) y with x = e_q
        if (const int r = at(p, i); r >= 0) a(row(r, q, i), col) += 1.0;
        for (int j = 0; j < d; ++j)
          if (at(i, j) == q) a(row(p, i, j), col) -= 1.0;
      }
    }
  return a;
}

struct CoboundarySolution {
  LinMap h;
  double residual = 0.0;  ///< Euclidean distance of D to the range of delta1
};

/// Minimum-norm least-squares solver for delta1 h = D, factored once per algebra.
class CoboundarySolver {
public:
  explicit CoboundarySolver(const BlockAlgebra& alg, double rel_cutoff = 1e-12) : alg_(alg) {
    const Eigen::MatrixXd a = coboundary_matrix(alg);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double cutoff = rel_cutoff * (s.size() > 0 ? s(0) : 0.0);
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > cutoff) ++r;
    rank_ = r;
    sigma_max_ = s.size() > 0 ? s(0) : 0.0;
    sigma_min_ = r > 0 ? s(r - 1) : 0.0;
    u_ = svd.matrixU().leftCols(r);
    v_scaled_ = svd.matrixV().leftCols(r) * s.head(r).cwiseInverse().asDiagonal();
  }

  const BlockAlgebra& algebra() const noexcept { return alg_; }
  Eigen::Index rank() const noexcept { return rank_; }
  double sigma_max() const noexcept { return sigma_max_; }
  /// smallest singular value kept; 1/sigma_min bounds the solution norm
  double sigma_min() const noexcept { return sigma_min_; }

  CoboundarySolution solve(const BilMap& d) const {
    if (!(d.domain() == alg_) || !(d.codomain() == alg_)) throw StructuralError("solve_coboundary: wrong algebra");
    const Eigen::Index n = d.tensor().size();
    const Eigen::Map<const Vec> rhs(d.tensor().data(), n);
    const Vec proj = u_.cast<cd>().adjoint() * rhs;
    const Vec h = v_scaled_.cast<cd>() * proj;
    const double residual = (rhs - u_.cast<cd>() * proj).norm();
    const int dim = alg_.coord_dim();
    return {LinMap(alg_, alg_, Eigen::Map<const Mat>(h.data(), dim, dim)), residual};
  }

private:
  BlockAlgebra alg_;
  Eigen::MatrixXd u_;
  Eigen::MatrixXd v_scaled_;
  Eigen::Index rank_ = 0;
  double sigma_max_ = 0.0;
  double sigma_min_ = 0.0;
};

inline CoboundarySolution solve_coboundary(const BilMap& d) { return CoboundarySolver(d.domain()).solve(d); }

// ---------------------------------------------------------------------------
// correction iteration

struct IterationStep {
  double eps = 0.0;            ///< ||m_i - m_A|| before the step
  double eps_next = 0.0;
  double ratio = 0.0;          ///< eps_next / eps^2
  bool floor_limited = false;  ///< eps_next at the rounding floor; ratio carries no information
  double h_norm = 0.0;
  double residual = 0.0;       ///< least-squares residual of the coboundary solve
  double w_cond = 0.0;
  double phi_cond = 0.0;
};

struct IterationTrace {
  double eps0 = 0.0;
  std::vector<IterationStep> steps;
  bool converged = false;

  std::vector<double> eps_series() const {
    std::vector<double> e{eps0};
    for (const auto& s : steps) e.push_back(s.eps_next);
    return e;
  }
  /// largest ratio over steps that are not floor-limited (0 if none)
  double max_ratio() const {
    double r = 0.0;
    for (const auto& s : steps)
      if (!s.floor_limited) r = std::max(r, s.ratio);
    return r;
  }
};

struct CorrectionOptions {
  double tol = 1e-12;
  int max_iter = 20;
  double hypothesis = 1.0 / 11.0;
  double assoc_tol = 1e-8;
  /// eps below this is treated as rounding floor when reading contraction ratios
  double floor = 1e-13;
  double max_cond = 1e12;
};

struct CorrectionResult {
  LinMap phi;
  IterationTrace trace;
};

inline double condition_number(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  const double lo = s(s.size() - 1);
  return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

/// Pushes the multiplication tensor forward along W: (x, y) -> W m(W^{-1}x, W^{-1}y).
inline Mat transport_tensor(const Mat& tensor, const Mat& w, const Mat& w_inv) {
  const Eigen::Index d = w.rows();
  // contract the second argument
  const Eigen::Map<const Mat> stacked(tensor.data(), d * d, d);
  Mat step1 = stacked * w_inv;
  // contract the first argument slice by slice
  Mat out(d, d * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const Eigen::Map<const Mat> slice(step1.col(j).data(), d, d);
    out.middleCols(d * j, d) = w * (slice * w_inv);
  }
  return out;
}

inline CorrectionResult correct_multiplication(const Multiplication& m, const CoboundarySolver& solver,
                                               const CorrectionOptions& opt = {}) {
  const BlockAlgebra& alg = m.algebra;
  if (!(solver.algebra() == alg)) throw StructuralError("correct_multiplication: solver built for another algebra");
  const int d = alg.coord_dim();
  const Mat native = native_multiplication(alg).tensor();

  CorrectionResult res{LinMap::identity(alg), {}};
  Mat cur = m.bil.tensor();
  double eps = coord_norm(Mat(cur - native));
  res.trace.eps0 = eps;
  if (eps > opt.hypothesis) throw HypothesisNotMet("correct_multiplication: initial defect exceeds hypothesis", eps);
  const double assoc = assoc_residual(m);
  if (assoc > opt.assoc_tol) throw HypothesisNotMet("correct_multiplication: multiplication is not associative", assoc);

  Mat phi = Mat::Identity(d, d);
  for (int it = 0; eps >= opt.tol; ++it) {
    if (it >= opt.max_iter) throw NoConvergence("correct_multiplication: no convergence within max_iter");
    const CoboundarySolution sol = solver.solve(BilMap(alg, alg, cur - native));
    const Mat w = Mat::Identity(d, d) + sol.h.matrix();
    IterationStep step;
    step.w_cond = condition_number(w);
    if (!(step.w_cond <= opt.max_cond)) throw SingularStep("correct_multiplication: step map is numerically singular");
    const Mat w_inv = w.partialPivLu().inverse();
    cur = transport_tensor(cur, w, w_inv);
    phi = w * phi;
    step.eps = eps;
    step.eps_next = coord_norm(Mat(cur - native));
    step.ratio = step.eps_next / (eps * eps);
    step.floor_limited = step.eps_next < opt.floor;
    step.h_norm = coord_norm(sol.h.matrix());
    step.residual = sol.residual;
    step.phi_cond = condition_number(phi);
    res.trace.steps.push_back(step);
    if (step.eps_next >= eps && step.eps_next >= opt.tol)
      throw NoConvergence("correct_multiplication: defect stopped decreasing at " + std::to_string(step.eps_next));
    eps = step.eps_next;
  }
  res.trace.converged = true;
  res.phi = LinMap(alg, alg, std::move(phi));
  return res;
}

inline CorrectionResult correct_multiplication(const Multiplication& m, const CorrectionOptions& opt = {}) {
  return correct_multiplication(m, CoboundarySolver(m.algebra), opt);
}

/// m(x, y) = T^{-1}(T(x) T(y))
inline Multiplication induced_multiplication(const LinMap& t) {
  const LinMap t_inv = inverse(t);
  const BlockAlgebra& dom = t.domain();
  const int d = dom.coord_dim();
  std::vector<AlgElement> images;
  for (int i = 0; i < d; ++i) images.push_back(AlgElement::from_coords(t.codomain(), t.matrix().col(i)));
  Mat prods(t.codomain().coord_dim(), d * d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i)
      prods.col(i + d * j) = (images[static_cast<std::size_t>(i)] * images[static_cast<std::size_t>(j)]).coords();
  return Multiplication(BilMap(dom, dom, t_inv.matrix() * prods));
}

/// max ||Phi(m(x,y)) - Phi(x) Phi(y)|| over seeded random contractions.
inline double intertwining_residual(const LinMap& phi, const Multiplication& m, int pairs = 100, std::uint64_t seed = 0) {
  Rng rng = make_rng(seed, 0x1e7);
  double worst = 0.0;
  for (int t = 0; t < pairs; ++t) {
    const AlgElement x = random_contraction(m.algebra, rng);
    const AlgElement y = random_contraction(m.algebra, rng);
    worst = std::max(worst, op_norm(phi.apply(m(x, y)) - phi.apply(x) * phi.apply(y)));
  }
  return worst;
}

/// max ||T(xy) - T(x)T(y)|| over seeded random contractions.
inline double multiplicativity_residual(const LinMap& t, int pairs = 100, std::uint64_t seed = 0) {
  return intertwining_residual(t, Multiplication::native(t.domain()), pairs, seed);
}

/// max ||T(x*) - T(x)*|| / ||x|| over seeded random elements.
inline double star_preservation_residual(const LinMap& t, int samples = 100, std::uint64_t seed = 0) {
  Rng rng = make_rng(seed, 0x5a);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const AlgElement x = random_element(t.domain(), rng);
    worst = std::max(worst, op_norm(t.apply(x.adjoint()) - t.apply(x).adjoint()) / op_norm(x));
  }
  return worst;
}

/// max unitarity defect of T(u) over seeded Haar unitaries u.
inline double unitary_image_residual(const LinMap& t, int samples = 100, std::uint64_t seed = 0) {
  Rng rng = make_rng(seed, 0x0417);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) worst = std::max(worst, unitarity_defect(t.apply(random_unitary(t.domain(), rng))));
  return worst;
}

// ---------------------------------------------------------------------------
// recovery pipeline

struct RecoveryOptions {
  AscentOptions ascent{8, 200, 1e-10, 0};
  CorrectionOptions correction;
  int samples = 100;
};

struct RecoveryReport {
  double cb_distance = 0.0;      ///< cb_distance_upper(L)
  double excess = 0.0;           ///< cb_distance - 1
  double inv_unit_norm = 0.0;
  double imageunit_bound = 0.0;
  double induced_defect = 0.0;   ///< coordinate norm of m - m_A
  IterationTrace trace;
  double mult_residual = 0.0;
  double sa_residual = 0.0;      ///< cb estimate of ||pi - pi*||
  double star_residual = 0.0;    ///< pointwise max ||pi(x*) - pi(x)*|| / ||x||
  double unitary_residual = 0.0;
  double distance_to_input = 0.0;  ///< cb estimate of ||pi - L||
  double distance_bound = 0.0;        ///< 1808 sqrt(excess)
};

struct RecoveryResult {
  LinMap pi;
  RecoveryReport report;
};

namespace detail {
template <class F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}
}  // namespace detail

/// S = unitize(L), T = symmetrize(S), m = T^{-1}(T(.)T(.)), Phi = correct(m), pi = T Phi^{-1}.
inline RecoveryResult recover_isomorphism(const LinMap& l, const RecoveryOptions& opt = {},
                                          const CoboundarySolver* solver = nullptr) {
  RecoveryReport rep;
  AscentOptions a = opt.ascent;
  rep.cb_distance = detail::staged("cb-distance", [&] { return cb_distance_upper(l, a); });
  rep.excess = std::max(0.0, rep.cb_distance - 1.0);
  const UnitizeResult u = detail::staged("unitize", [&] { return unitize(l, a); });
  rep.inv_unit_norm = u.inv_unit_norm;
  rep.imageunit_bound = u.bound;
  const LinMap t = detail::staged("symmetrize", [&] { return symmetrize(u.map); });
  const Multiplication m = detail::staged("induce", [&] { return induced_multiplication(t); });
  rep.induced_defect = m.defect_norm();
  const CorrectionResult corr = detail::staged("correct", [&] {
    return solver ? correct_multiplication(m, *solver, opt.correction) : correct_multiplication(m, opt.correction);
  });
  rep.trace = corr.trace;
  LinMap pi = detail::staged("compose", [&] { return compose(t, inverse(corr.phi)); });

  rep.mult_residual = multiplicativity_residual(pi, opt.samples, a.seed);
  rep.star_residual = star_preservation_residual(pi, opt.samples, a.seed);
  rep.unitary_residual = unitary_image_residual(pi, opt.samples, a.seed);
  a.seed = derive_seed(opt.ascent.seed, 0x5e1f);
  rep.sa_residual = cb_norm(pi - star_map(pi), a).value;
  a.seed = derive_seed(opt.ascent.seed, 0xd157);
  rep.distance_to_input = cb_norm(pi - l, a).value;
  rep.distance_bound = 1808.0 * std::sqrt(rep.excess);
  return {std::move(pi), rep};
}

// ---------------------------------------------------------------------------
// surjectivity under perturbation

struct SurjectivityReport {
  double bound = 0.0;      ///< K / (1 - K ||T - S||)
  double distance = 0.0;   ///< ||T - S||
  double measured = 0.0;   ///< quotient-inverse norm of S, 1/sigma_m(S)
  bool surjective = false;
  bool holds = false;
};

/// Quotient-inverse norm  sup_{||y|| <= 1} inf{||x|| : Sx = y} = 1/sigma_rows(S) in Euclidean norms.
inline double quotient_inverse_norm(const Mat& s) {
  Eigen::JacobiSVD<Mat> svd(s);
  const auto& sv = svd.singularValues();
  if (s.rows() > s.cols() || s.rows() == 0) return std::numeric_limits<double>::infinity();
  const double lo = sv(s.rows() - 1);
  return lo > 0.0 ? 1.0 / lo : std::numeric_limits<double>::infinity();
}

inline SurjectivityReport stability_surjectivity(const Mat& t, const Mat& s, double k, double tol = 1e-6) {
  if (t.rows() != s.rows() || t.cols() != s.cols()) throw StructuralError("stability_surjectivity: shape mismatch");
  if (!(k > 0.0)) throw ArgumentError("stability_surjectivity: K must be positive");
  SurjectivityReport rep;
  rep.distance = spectral_norm(t - s);
  if (!(k * rep.distance < 1.0)) throw HypothesisNotMet("stability_surjectivity: requires ||T - S|| < 1/K", rep.distance);
  rep.bound = k / (1.0 - k * rep.distance);
  rep.measured = quotient_inverse_norm(s);
  Eigen::JacobiSVD<Mat> svd(s);
  svd.setThreshold(1e-12);
  rep.surjective = svd.rank() == s.rows();
  rep.holds = rep.surjective && rep.measured <= rep.bound + tol;
  return rep;
}

inline SurjectivityReport stability_surjectivity(const LinMap& t, const LinMap& s, double k, double tol = 1e-6) {
  t.check_same(s);
  return stability_surjectivity(t.matrix(), s.matrix(), k, tol);
}

// ---------------------------------------------------------------------------
// instance generators

struct PlantedInstance {
  LinMap phi0;
  Multiplication m;
};

/// m(x, y) = Phi0^{-1}(Phi0(x) Phi0(y)) with Phi0 = id + scale G, ||G|| = 1 in coordinates.
inline PlantedInstance planted_multiplication(const BlockAlgebra& alg, double scale, Rng& rng) {
  const int d = alg.coord_dim();
  Mat g = gaussian_matrix(d, d, rng);
  g /= coord_norm(g);
  LinMap phi0(alg, alg, Mat::Identity(d, d) + scale * g);
  return {phi0, induced_multiplication(phi0)};
}

}  // namespace opalg

#endif  // OPALG_PERTURB_HPP
