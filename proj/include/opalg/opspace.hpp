#ifndef OPALG_OPSPACE_HPP
#define OPALG_OPSPACE_HPP

// Amplified norms ||id_{M_k} (x) T|| of linear maps, the row-times-column
// (Haagerup) amplified norms of bilinear maps, cb-distance upper bounds and
// Kadison-Kastler distance estimates between represented algebras.
//
// All norm estimates are produced by alternating ascent: for the current
// image take its top singular pair, then replace the argument by the exact
// maximizer of the resulting linear functional over the unit ball (the polar
// part of the gradient). Each half-step is nondecreasing, so the value at the
// stored witness is a certified lower bound.

#include <optional>
#include <vector>

#include "opalg/linmap.hpp"

namespace opalg {

struct AscentOptions {
  int restarts = 32;
  int max_iter = 500;
  double stall_tol = 1e-10;
  std::uint64_t seed = 0;
};

struct NormEstimate {
  double lower = 0.0;  ///< value of the map at `witness`; a true lower bound
  double value = 0.0;  ///< best value seen by the ascent (reported estimate)
  int level = 1;
  int restarts = 0;
  bool converged = false;
  /// One amplified element (linear maps) or two (bilinear maps), all in M_level(domain).
  std::vector<AlgElement> witness;
};

namespace detail {

/// Amplified element of M_k(alg) from its entry coordinates: column a + k*c of
/// `entries` holds the coordinates of the (a, c) entry.
inline std::vector<Mat> assemble_amplified(const BlockAlgebra& alg, int k, const Mat& entries) {
  std::vector<Mat> blocks;
  for (int b = 0; b < alg.num_blocks(); ++b) {
    const int n = alg.dim(b);
    Mat m(k * n, k * n);
    for (int c = 0; c < k; ++c)
      for (int a = 0; a < k; ++a)
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s) m(a * n + r, c * n + s) = entries(alg.index(b, r, s), a + k * c);
    blocks.push_back(std::move(m));
  }
  return blocks;
}

inline Mat disassemble_amplified(const BlockAlgebra& alg, int k, const std::vector<Mat>& blocks) {
  Mat entries(alg.coord_dim(), k * k);
  for (int b = 0; b < alg.num_blocks(); ++b) {
    const int n = alg.dim(b);
    const Mat& m = blocks[static_cast<std::size_t>(b)];
    for (int c = 0; c < k; ++c)
      for (int a = 0; a < k; ++a)
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s) entries(alg.index(b, r, s), a + k * c) = m(a * n + r, c * n + s);
  }
  return entries;
}

struct TopPair {
  double sigma = 0.0;
  int block = 0;
  Vec left;
  Vec right;
};

inline TopPair top_singular_pair(const std::vector<Mat>& blocks) {
  TopPair best;
  best.sigma = -1.0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const Mat& m = blocks[b];
    Eigen::SelfAdjointEigenSolver<Mat> es(m.adjoint() * m);
    const Eigen::Index top = es.eigenvalues().size() - 1;
    const double sigma = std::sqrt(std::max(0.0, es.eigenvalues()(top)));
    if (sigma > best.sigma) {
      best.sigma = sigma;
      best.block = static_cast<int>(b);
      best.right = es.eigenvectors().col(top);
      Vec u = m * best.right;
      const double nu = u.norm();
      best.left = nu > 0.0 ? Vec(u / nu) : Vec(Vec::Unit(m.rows(), 0));
    }
  }
  return best;
}

/// conj of the coordinate functional  Y -> xi^* Y eta  on M_k(alg), restricted to block j:
/// column a + k*c holds  xi_{(a,r)} conj(eta_{(c,s)})  at index(j, r, s).
inline Mat dual_rank_one(const BlockAlgebra& alg, int k, const TopPair& p) {
  Mat w = Mat::Zero(alg.coord_dim(), k * k);
  const int m = alg.dim(p.block);
  for (int c = 0; c < k; ++c)
    for (int a = 0; a < k; ++a)
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s)
          w(alg.index(p.block, r, s), a + k * c) = p.left(a * m + r) * std::conj(p.right(c * m + s));
  return w;
}

/// Unitary polar part of g (a maximizer of Re tr(g^* X) over the unit ball).
/// Directions with singular value below 1e-7 sigma_max are completed arbitrarily.
inline Mat polar_unitary(const Mat& g) {
  const Eigen::Index n = g.cols();
  Eigen::SelfAdjointEigenSolver<Mat> es(g.adjoint() * g);
  const auto& lam = es.eigenvalues();
  const double smax = std::sqrt(std::max(0.0, lam(n - 1)));
  // eigenvalues ascend: columns n-1, n-2, ... carry the largest singular values
  Mat v(n, n);
  for (Eigen::Index j = 0; j < n; ++j) v.col(j) = es.eigenvectors().col(n - 1 - j);
  Eigen::Index r = 0;
  Mat u(n, n);
  for (; r < n; ++r) {
    const double sr = std::sqrt(std::max(0.0, lam(n - 1 - r)));
    if (!(sr > 1e-7 * smax)) break;
    u.col(r) = g * v.col(r) / sr;
  }
  for (Eigen::Index j = r; j < n; ++j) u.col(j) = Vec::Unit(n, j - r);
  Eigen::HouseholderQR<Mat> qr(u);
  Mat q = qr.householderQ();
  const Mat& rr = qr.matrixQR();
  for (Eigen::Index j = 0; j < r; ++j) {
    const double a = std::abs(rr(j, j));
    if (a > 0.0) q.col(j) *= rr(j, j) / a;
  }
  return q * v.adjoint();
}

inline std::vector<Mat> polar_parts(const std::vector<Mat>& blocks) {
  std::vector<Mat> out;
  for (const auto& g : blocks) out.push_back(polar_unitary(g));
  return out;
}

inline Mat random_unitary_entries(const BlockAlgebra& alg, int k, Rng& rng) {
  std::vector<Mat> bl;
  for (int n : alg.dims()) bl.push_back(haar_unitary(k * n, rng));
  return disassemble_amplified(alg, k, bl);
}

/// Embeds entries of an element of M_j(alg) into M_k(alg), k >= j, padding with zeros.
inline Mat pad_entries(const Mat& entries, int j, int k) {
  Mat out = Mat::Zero(entries.rows(), k * k);
  for (int c = 0; c < j; ++c)
    for (int a = 0; a < j; ++a) out.col(a + k * c) = entries.col(a + j * c);
  return out;
}

inline double amplified_value(const LinMap& t, int k, const Mat& entries) {
  double v = 0.0;
  for (const auto& m : assemble_amplified(t.codomain(), k, t.matrix() * entries)) v = std::max(v, spectral_norm(m));
  return v;
}

}  // namespace detail

/// Entry (a, c) of an element of M_k(alg) as an element of alg.
inline AlgElement amplified_entry(const AlgElement& x, const BlockAlgebra& alg, int k, int a, int c) {
  if (!(x.algebra() == alg.amplified(k))) throw StructuralError("amplified_entry: element not in M_k(alg)");
  std::vector<Mat> bl;
  for (int b = 0; b < alg.num_blocks(); ++b) {
    const int n = alg.dim(b);
    bl.push_back(x.block(b).block(a * n, c * n, n, n));
  }
  return AlgElement(alg, std::move(bl));
}

inline AlgElement amplified_from_entries(const BlockAlgebra& alg, int k, const std::vector<AlgElement>& entries) {
  if (static_cast<int>(entries.size()) != k * k) throw StructuralError("amplified_from_entries: need k*k entries");
  std::vector<Mat> bl;
  for (int b = 0; b < alg.num_blocks(); ++b) {
    const int n = alg.dim(b);
    Mat m(k * n, k * n);
    for (int c = 0; c < k; ++c)
      for (int a = 0; a < k; ++a) m.block(a * n, c * n, n, n) = entries[static_cast<std::size_t>(a + k * c)].block(b);
    bl.push_back(std::move(m));
  }
  return AlgElement(alg.amplified(k), std::move(bl));
}

/// (id_{M_k} (x) T)(X), evaluated entry by entry.
inline AlgElement apply_amplified(const LinMap& t, int k, const AlgElement& x) {
  std::vector<AlgElement> out;
  for (int c = 0; c < k; ++c)
    for (int a = 0; a < k; ++a) out.push_back(t.apply(amplified_entry(x, t.domain(), k, a, c)));
  return amplified_from_entries(t.codomain(), k, out);
}

/// [ sum_p B(x_{ip}, y_{pj}) ]_{ij}, evaluated entry by entry.
inline AlgElement apply_amplified(const BilMap& bm, int k, const AlgElement& x, const AlgElement& y) {
  std::vector<AlgElement> out;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) {
      AlgElement z = AlgElement::zero(bm.codomain());
      for (int p = 0; p < k; ++p)
        z += bm.apply(amplified_entry(x, bm.domain(), k, i, p), amplified_entry(y, bm.domain(), k, p, j));
      out.push_back(std::move(z));
    }
  return amplified_from_entries(bm.codomain(), k, out);
}

namespace detail {

inline NormEstimate amplified_norm_seeded(const LinMap& t, int k, const AscentOptions& opt,
                                          const std::vector<Mat>& extra_starts) {
  if (k <= 0) throw ArgumentError("amplified_norm: level must be >= 1");
  const BlockAlgebra& dom = t.domain();
  const BlockAlgebra& cod = t.codomain();
  const Mat t_adj = t.matrix().adjoint();

  double best = -1.0;
  bool best_converged = false;
  Mat best_entries;
  const int total = opt.restarts + static_cast<int>(extra_starts.size());
  for (int run = 0; run < total; ++run) {
    Mat x;
    if (run < static_cast<int>(extra_starts.size())) {
      x = extra_starts[static_cast<std::size_t>(run)];
    } else {
      Rng rng = make_rng(opt.seed, static_cast<std::uint64_t>(run));
      x = random_unitary_entries(dom, k, rng);
    }
    double current = -1.0;
    Mat current_x = x;
    bool stalled = false;
    for (int it = 0; it < opt.max_iter; ++it) {
      const auto image = assemble_amplified(cod, k, t.matrix() * x);
      const TopPair p = top_singular_pair(image);
      if (p.sigma > current) {
        current_x = x;
      }
      if (it > 0 && p.sigma <= current + opt.stall_tol * std::max(1.0, p.sigma)) {
        current = std::max(current, p.sigma);
        stalled = true;
        break;
      }
      current = std::max(current, p.sigma);
      if (p.sigma == 0.0) {
        stalled = true;
        break;
      }
      const Mat grad = t_adj * dual_rank_one(cod, k, p);
      x = disassemble_amplified(dom, k, polar_parts(assemble_amplified(dom, k, grad)));
    }
    if (current > best) {
      best = current;
      best_entries = current_x;
      best_converged = stalled;
    }
  }

  NormEstimate est;
  est.level = k;
  est.restarts = total;
  est.converged = best_converged;
  AlgElement w(dom.amplified(k), assemble_amplified(dom, k, best_entries));
  est.lower = op_norm(apply_amplified(t, k, w));
  est.value = std::max(est.lower, best);
  est.witness.push_back(std::move(w));
  return est;
}

}  // namespace detail

namespace detail {

inline Mat padded_witness(const LinMap& t, const NormEstimate& prev, int k) {
  return pad_entries(disassemble_amplified(t.domain(), k - 1, prev.witness.front().blocks()), k - 1, k);
}

}  // namespace detail

/// Estimate of ||id_{M_k} (x) T|| by alternating ascent from `opt.restarts` random
/// unitary starts plus the padded level k-1 witness, so lower bounds never drop with k.
inline NormEstimate amplified_norm(const LinMap& t, int k, const AscentOptions& opt = {}) {
  if (k <= 0) throw ArgumentError("amplified_norm: level must be >= 1");
  if (k == 1) return detail::amplified_norm_seeded(t, 1, opt, {});
  const NormEstimate prev = amplified_norm(t, k - 1, opt);
  return detail::amplified_norm_seeded(t, k, opt, {detail::padded_witness(t, prev, k)});
}

/// ||T||_cb, computed at level k = largest block of the codomain (where the
/// amplified norms stabilize). `converged` is cleared if value(k) < value(k-1) - 1e-9.
inline NormEstimate cb_norm(const LinMap& t, const AscentOptions& opt = {}) {
  const int k = t.codomain().max_block();
  if (k == 1) return amplified_norm(t, 1, opt);
  const NormEstimate prev = amplified_norm(t, k - 1, opt);
  NormEstimate est = detail::amplified_norm_seeded(t, k, opt, {detail::padded_witness(t, prev, k)});
  if (est.value < prev.value - 1e-9) est.converged = false;
  return est;
}

// ---------------------------------------------------------------------------
// bilinear maps

namespace detail {

/// Z_{ij} = sum_p M_{pj} x_{ip} with M_{pj} = B(., y_{pj}); entries layout as above.
inline Mat bilinear_image(const std::vector<Mat>& left_ops, int k, const Mat& x, Eigen::Index cdim) {
  Mat z = Mat::Zero(cdim, k * k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i)
      for (int p = 0; p < k; ++p) z.col(i + k * j) += left_ops[static_cast<std::size_t>(p + k * j)] * x.col(i + k * p);
  return z;
}

inline std::vector<Mat> ops_fix_second(const BilMap& bm, int k, const Mat& y) {
  std::vector<Mat> ops;
  for (int j = 0; j < k; ++j)
    for (int p = 0; p < k; ++p) ops.push_back(bm.fix_second(y.col(p + k * j)));
  return ops;  // index p + k*j
}

inline std::vector<Mat> ops_fix_first(const BilMap& bm, int k, const Mat& x) {
  std::vector<Mat> ops;
  for (int p = 0; p < k; ++p)
    for (int i = 0; i < k; ++i) ops.push_back(bm.fix_first(x.col(i + k * p)));
  return ops;  // index i + k*p
}

}  // namespace detail

/// Estimate of sup || [sum_p B(x_ip, y_pj)]_ij ||  over X, Y in the unit ball of M_k(A),
/// by alternating ascent in X and Y.
inline NormEstimate bilinear_h_norm(const BilMap& bm, int k, const AscentOptions& opt = {}) {
  using namespace detail;
  if (k <= 0) throw ArgumentError("bilinear_h_norm: level must be >= 1");
  const BlockAlgebra& dom = bm.domain();
  const BlockAlgebra& cod = bm.codomain();
  const Eigen::Index cdim = cod.coord_dim();

  double best = -1.0;
  bool best_converged = false;
  Mat best_x, best_y;
  for (int run = 0; run < opt.restarts; ++run) {
    Rng rng = make_rng(opt.seed, static_cast<std::uint64_t>(run));
    Mat x = random_unitary_entries(dom, k, rng);
    Mat y = random_unitary_entries(dom, k, rng);
    double current = -1.0;
    Mat cx = x, cy = y;
    bool stalled = false;
    for (int it = 0; it < opt.max_iter; ++it) {
      // X half-step
      auto mops = ops_fix_second(bm, k, y);
      TopPair p = top_singular_pair(assemble_amplified(cod, k, bilinear_image(mops, k, x, cdim)));
      if (p.sigma > current) {
        cx = x;
        cy = y;
      }
      if (it > 0 && p.sigma <= current + opt.stall_tol * std::max(1.0, p.sigma)) {
        current = std::max(current, p.sigma);
        stalled = true;
        break;
      }
      current = std::max(current, p.sigma);
      if (p.sigma == 0.0) {
        stalled = true;
        break;
      }
      {
        const Mat w = dual_rank_one(cod, k, p);  // conj(w) layout, column i + k*j
        Mat g = Mat::Zero(dom.coord_dim(), k * k);
        for (int p_ = 0; p_ < k; ++p_)
          for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
              g.col(i + k * p_) += mops[static_cast<std::size_t>(p_ + k * j)].adjoint() * w.col(i + k * j);
        x = disassemble_amplified(dom, k, polar_parts(assemble_amplified(dom, k, g)));
      }
      // Y half-step
      auto nops = ops_fix_first(bm, k, x);
      Mat z = Mat::Zero(cdim, k * k);
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i)
          for (int p_ = 0; p_ < k; ++p_)
            z.col(i + k * j) += nops[static_cast<std::size_t>(i + k * p_)] * y.col(p_ + k * j);
      p = top_singular_pair(assemble_amplified(cod, k, z));
      if (p.sigma > current) {
        current = p.sigma;
        cx = x;
        cy = y;
      }
      if (p.sigma == 0.0) {
        stalled = true;
        break;
      }
      {
        const Mat w = dual_rank_one(cod, k, p);
        Mat g = Mat::Zero(dom.coord_dim(), k * k);
        for (int p_ = 0; p_ < k; ++p_)
          for (int j = 0; j < k; ++j)
            for (int i = 0; i < k; ++i)
              g.col(p_ + k * j) += nops[static_cast<std::size_t>(i + k * p_)].adjoint() * w.col(i + k * j);
        y = disassemble_amplified(dom, k, polar_parts(assemble_amplified(dom, k, g)));
      }
    }
    if (current > best) {
      best = current;
      best_x = cx;
      best_y = cy;
      best_converged = stalled;
    }
  }

  NormEstimate est;
  est.level = k;
  est.restarts = opt.restarts;
  est.converged = best_converged;
  AlgElement wx(dom.amplified(k), assemble_amplified(dom, k, best_x));
  AlgElement wy(dom.amplified(k), assemble_amplified(dom, k, best_y));
  est.lower = op_norm(apply_amplified(bm, k, wx, wy));
  est.value = std::max(est.lower, best);
  est.witness.push_back(std::move(wx));
  est.witness.push_back(std::move(wy));
  return est;
}

/// Re-evaluates a stored witness independently of the ascent.
inline double evaluate_witness(const LinMap& t, const NormEstimate& est) {
  return op_norm(apply_amplified(t, est.level, est.witness.at(0)));
}

inline double evaluate_witness(const BilMap& bm, const NormEstimate& est) {
  return op_norm(apply_amplified(bm, est.level, est.witness.at(0), est.witness.at(1)));
}

/// ||T||_cb ||T^{-1}||_cb: an upper bound on d_cb between domain and codomain
/// as operator spaces (up to the estimation error of the two cb-norms).
inline double cb_distance_upper(const LinMap& t, const AscentOptions& opt = {}) {
  const LinMap tinv = inverse(t);
  AscentOptions o2 = opt;
  o2.seed = derive_seed(opt.seed, 0xdcb);
  return cb_norm(t, opt).value * cb_norm(tinv, o2).value;
}

// ---------------------------------------------------------------------------
// Kadison-Kastler distance at a fixed representation

struct KKEstimate {
  double lower = 0.0;  ///< certified lower bound on the Hausdorff distance of the unit balls
  double upper = 0.0;  ///< max over explored points of a feasible-point distance
  Mat witness;         ///< unit-ball element achieving `lower`
  bool witness_in_first = true;
};

namespace detail {

/// Orthonormal basis (Frobenius) of span{basis} as columns of vectorized N x N matrices.
inline Mat orthonormal_span(const std::vector<Mat>& basis, Eigen::Index n) {
  Mat v(n * n, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].rows() != n || basis[i].cols() != n) throw StructuralError("kk_distance_estimate: ambient mismatch");
    v.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vec>(basis[i].data(), n * n);
  }
  Eigen::ColPivHouseholderQR<Mat> qr(v);
  qr.setThreshold(1e-12);
  const Eigen::Index r = qr.rank();
  Mat q = qr.householderQ() * Mat::Identity(n * n, r);
  return q;
}

inline Mat project(const Mat& q, const Mat& a) {
  const Eigen::Index n = a.rows();
  const Eigen::Map<const Vec> va(a.data(), n * n);
  Vec p = q * (q.adjoint() * va);
  return Eigen::Map<Mat>(p.data(), n, n);
}

inline double trace_norm(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues().sum();
}

struct PointDistance {
  double lower = 0.0;
  double upper = 0.0;
  Mat dual;  ///< normalized functional in the annihilator of the target achieving `lower`
};

/// Bounds on  dist(a, Ball(span Q))  for one point a.
inline PointDistance point_distance(const Mat& a, const Mat& q_target, int refine_iters) {
  Mat b = project(q_target, a);
  const double nb = spectral_norm(b);
  if (nb > 1.0) b /= nb;
  Mat best_b = b;
  double best = spectral_norm(a - b);
  // projected subgradient refinement of  b -> ||a - b||  over Ball(span Q)
  for (int it = 0; it < refine_iters && best > 0.0; ++it) {
    Eigen::JacobiSVD<Mat> svd(a - b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double f = svd.singularValues()(0);
    const Mat g = project(q_target, svd.matrixU().col(0) * svd.matrixV().col(0).adjoint());
    const double gn = g.norm();
    if (gn < 1e-15) break;
    b += (f / (gn * gn)) / (1.0 + it) * g;
    const double nb2 = spectral_norm(b);
    if (nb2 > 1.0) b /= nb2;
    const double v = spectral_norm(a - b);
    if (v < best) {
      best = v;
      best_b = b;
    }
  }
  PointDistance out;
  out.upper = best;
  // dual certificates: functionals vanishing on span Q
  Eigen::JacobiSVD<Mat> svd(a - best_b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const std::vector<Mat> candidates = {svd.matrixU().col(0) * svd.matrixV().col(0).adjoint(),
                                       svd.matrixU() * svd.matrixV().adjoint()};
  for (const Mat& c : candidates) {
    Mat w = c - project(q_target, c);
    const double tn = trace_norm(w);
    if (tn < 1e-14) continue;
    w /= tn;
    const double val = (w.adjoint() * a).trace().real();
    if (val > out.lower) {
      out.lower = val;
      out.dual = w;
    }
  }
  return out;
}

/// One direction of the Hausdorff distance: sup over Ball(span Qs) of the distance to Ball(span Qt).
inline void directed_kk(const Mat& q_source, const Mat& q_target, Eigen::Index n, int samples, Rng& rng,
                        KKEstimate& est, bool source_is_first) {
  const Eigen::Index rs = q_source.cols();
  auto from_coeffs = [&](const Vec& c) {
    Vec v = q_source * c;
    return Mat(Eigen::Map<Mat>(v.data(), n, n));
  };
  auto normalized = [](Mat m) {
    const double nm = spectral_norm(m);
    return nm > 0.0 ? Mat(m / nm) : m;
  };
  std::vector<Mat> starts;
  for (Eigen::Index i = 0; i < rs; ++i) starts.push_back(normalized(from_coeffs(Vec::Unit(rs, i))));
  for (int s = 0; s < samples; ++s) starts.push_back(normalized(from_coeffs(gaussian_matrix(rs, 1, rng).col(0))));

  for (Mat a : starts) {
    for (int round = 0; round < 8; ++round) {
      const PointDistance pd = point_distance(a, q_target, 60);
      est.upper = std::max(est.upper, pd.upper);
      if (pd.lower > est.lower) {
        est.lower = pd.lower;
        est.witness = a;
        est.witness_in_first = source_is_first;
      }
      if (pd.dual.size() == 0) break;
      // dual ascent: move a toward the maximizer of Re tr(w^* a) over the source ball
      Eigen::JacobiSVD<Mat> svd(project(q_source, pd.dual), Eigen::ComputeFullU | Eigen::ComputeFullV);
      Mat next = normalized(project(q_source, svd.matrixU() * svd.matrixV().adjoint()));
      if (next.size() == 0 || (next - a).norm() < 1e-13) break;
      a = std::move(next);
    }
  }
}

}  // namespace detail

/// Hausdorff distance between the unit balls of span(a_rep) and span(b_rep) inside M_N.
inline KKEstimate kk_distance_estimate(const std::vector<Mat>& a_rep, const std::vector<Mat>& b_rep, int samples,
                                       std::uint64_t seed) {
  if (a_rep.empty() || b_rep.empty()) throw StructuralError("kk_distance_estimate: empty basis");
  const Eigen::Index n = a_rep.front().rows();
  if (b_rep.front().rows() != n) throw StructuralError("kk_distance_estimate: ambient mismatch");
  const Mat qa = detail::orthonormal_span(a_rep, n);
  const Mat qb = detail::orthonormal_span(b_rep, n);
  KKEstimate est;
  Rng rng = make_rng(seed, 0);
  detail::directed_kk(qa, qb, n, samples, rng, est, true);
  detail::directed_kk(qb, qa, n, samples, rng, est, false);
  return est;
}

}  // namespace opalg

#endif  // OPALG_OPSPACE_HPP
