#ifndef OPALG_MATCORE_HPP
#define OPALG_MATCORE_HPP

// Elements of finite-dimensional von Neumann algebras  A = M_{n_1} (+) ... (+) M_{n_r},
// their C*-norm, polar decomposition, spectral projections and the 2x2-matrix
// invertibility test used by the defect estimates.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "opalg/errors.hpp"
#include "opalg/random.hpp"

namespace opalg {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Default tolerances: algebraic residuals, optimization comparisons, and the
/// relative threshold below which a smallest singular value counts as zero.
struct Tolerances {
  double algebraic = 1e-9;
  double optimization = 1e-6;
  double invertibility = 1e-10;
};

/// The algebra  (+)_i M_{n_i}  described by its block sizes.
///
/// Coordinates of an element are the concatenation of its blocks, each read
/// row-major; the matrix units e^{(b)}_{rs} form the coordinate basis.
class BlockAlgebra {
public:
  BlockAlgebra() : BlockAlgebra(std::vector<int>{1}) {}

  explicit BlockAlgebra(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw StructuralError("BlockAlgebra: dims must be nonempty");
    offsets_.reserve(dims_.size());
    int off = 0;
    for (int n : dims_) {
      if (n < 1) throw StructuralError("BlockAlgebra: block sizes must be >= 1");
      offsets_.push_back(off);
      off += n * n;
    }
    coord_dim_ = off;
  }

  const std::vector<int>& dims() const noexcept { return dims_; }
  int num_blocks() const noexcept { return static_cast<int>(dims_.size()); }
  int dim(int b) const { return dims_.at(static_cast<std::size_t>(b)); }
  int offset(int b) const { return offsets_.at(static_cast<std::size_t>(b)); }
  int coord_dim() const noexcept { return coord_dim_; }
  int max_block() const { return *std::max_element(dims_.begin(), dims_.end()); }

  /// Coordinate index of the matrix unit e^{(b)}_{rs}.
  int index(int b, int r, int s) const { return offset(b) + r * dim(b) + s; }

  /// M_k(A), i.e. the block sizes multiplied by k.
  BlockAlgebra amplified(int k) const {
    std::vector<int> d(dims_);
    for (int& n : d) n *= k;
    return BlockAlgebra(std::move(d));
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < dims_.size(); ++i) s += (i ? "," : "") + std::to_string(dims_[i]);
    return s + "]";
  }

  friend bool operator==(const BlockAlgebra& a, const BlockAlgebra& b) { return a.dims_ == b.dims_; }

private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  int coord_dim_ = 0;
};

class AlgElement {
public:
  AlgElement(BlockAlgebra alg, std::vector<Mat> blocks) : alg_(std::move(alg)), blocks_(std::move(blocks)) {
    if (static_cast<int>(blocks_.size()) != alg_.num_blocks())
      throw StructuralError("AlgElement: block count does not match algebra " + alg_.to_string());
    for (int b = 0; b < alg_.num_blocks(); ++b) {
      const auto& m = blocks_[static_cast<std::size_t>(b)];
      if (m.rows() != alg_.dim(b) || m.cols() != alg_.dim(b))
        throw StructuralError("AlgElement: block shape does not match algebra " + alg_.to_string());
      if (!m.allFinite()) throw StructuralError("AlgElement: non-finite entry");
    }
  }

  static AlgElement zero(const BlockAlgebra& alg) {
    std::vector<Mat> bl;
    for (int n : alg.dims()) bl.push_back(Mat::Zero(n, n));
    return AlgElement(alg, std::move(bl));
  }

  static AlgElement identity(const BlockAlgebra& alg) {
    std::vector<Mat> bl;
    for (int n : alg.dims()) bl.push_back(Mat::Identity(n, n));
    return AlgElement(alg, std::move(bl));
  }

  static AlgElement from_coords(const BlockAlgebra& alg, const Vec& c) {
    if (c.size() != alg.coord_dim()) throw StructuralError("AlgElement::from_coords: wrong length");
    std::vector<Mat> bl;
    for (int b = 0; b < alg.num_blocks(); ++b) {
      const int n = alg.dim(b);
      Mat m(n, n);
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) m(r, s) = c(alg.index(b, r, s));
      bl.push_back(std::move(m));
    }
    return AlgElement(alg, std::move(bl));
  }

  static AlgElement matrix_unit(const BlockAlgebra& alg, int b, int r, int s) {
    AlgElement e = zero(alg);
    e.blocks_[static_cast<std::size_t>(b)](r, s) = 1.0;
    return e;
  }

  const BlockAlgebra& algebra() const noexcept { return alg_; }
  const std::vector<Mat>& blocks() const noexcept { return blocks_; }
  const Mat& block(int b) const { return blocks_.at(static_cast<std::size_t>(b)); }

  Vec coords() const {
    Vec c(alg_.coord_dim());
    for (int b = 0; b < alg_.num_blocks(); ++b) {
      const int n = alg_.dim(b);
      const auto& m = blocks_[static_cast<std::size_t>(b)];
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) c(alg_.index(b, r, s)) = m(r, s);
    }
    return c;
  }

  AlgElement adjoint() const {
    std::vector<Mat> bl;
    for (const auto& m : blocks_) bl.push_back(m.adjoint());
    return AlgElement(alg_, std::move(bl));
  }

  AlgElement& operator+=(const AlgElement& o) {
    check_same(o);
    for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b] += o.blocks_[b];
    return *this;
  }
  AlgElement& operator-=(const AlgElement& o) {
    check_same(o);
    for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b] -= o.blocks_[b];
    return *this;
  }
  AlgElement& operator*=(cd s) {
    for (auto& m : blocks_) m *= s;
    return *this;
  }

  friend AlgElement operator+(AlgElement a, const AlgElement& b) { return a += b; }
  friend AlgElement operator-(AlgElement a, const AlgElement& b) { return a -= b; }
  friend AlgElement operator*(cd s, AlgElement a) { return a *= s; }
  friend AlgElement operator*(AlgElement a, cd s) { return a *= s; }

  void check_same(const AlgElement& o) const {
    if (!(alg_ == o.alg_))
      throw StructuralError("algebra mismatch: " + alg_.to_string() + " vs " + o.alg_.to_string());
  }

private:
  BlockAlgebra alg_;
  std::vector<Mat> blocks_;
};

inline AlgElement mul(const AlgElement& x, const AlgElement& y) {
  x.check_same(y);
  std::vector<Mat> bl;
  for (int b = 0; b < x.algebra().num_blocks(); ++b) bl.push_back(x.block(b) * y.block(b));
  return AlgElement(x.algebra(), std::move(bl));
}

inline AlgElement operator*(const AlgElement& x, const AlgElement& y) { return mul(x, y); }

inline double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

/// C*-norm: largest singular value over all blocks.
inline double op_norm(const AlgElement& x) {
  double n = 0.0;
  for (const auto& m : x.blocks()) n = std::max(n, spectral_norm(m));
  return n;
}

/// Smallest singular value over all blocks, i.e. 1/||x^{-1}|| for invertible x.
inline double min_singular_value(const AlgElement& x) {
  double s = std::numeric_limits<double>::infinity();
  for (const auto& m : x.blocks()) {
    Eigen::JacobiSVD<Mat> svd(m);
    s = std::min(s, svd.singularValues()(svd.singularValues().size() - 1));
  }
  return s;
}

inline bool is_invertible(const AlgElement& x, const Tolerances& tol = {}) {
  const double nx = op_norm(x);
  return nx > 0.0 && min_singular_value(x) > tol.invertibility * nx;
}

inline AlgElement inverse(const AlgElement& x, const Tolerances& tol = {}) {
  if (!is_invertible(x, tol)) throw NotInvertible("inverse: element is numerically singular");
  std::vector<Mat> bl;
  for (const auto& m : x.blocks()) bl.push_back(m.partialPivLu().inverse());
  return AlgElement(x.algebra(), std::move(bl));
}

inline double hermitian_defect(const AlgElement& h) { return op_norm(h - h.adjoint()); }

inline bool is_hermitian(const AlgElement& h, double tol) {
  return hermitian_defect(h) <= tol * std::max(1.0, op_norm(h));
}

inline double unitarity_defect(const AlgElement& u) {
  const AlgElement one = AlgElement::identity(u.algebra());
  return std::max(op_norm(u.adjoint() * u - one), op_norm(u * u.adjoint() - one));
}

struct PolarResult {
  AlgElement unitary_part;
  AlgElement positive_part;
  double distance_to_unitary;
};

/// x = u|x| with u unitary; distance_to_unitary = ||x - u|| = max{||x|| - 1, 1 - 1/||x^{-1}||}.
inline PolarResult polar(const AlgElement& x, const Tolerances& tol = {}) {
  if (!is_invertible(x, tol)) throw NotInvertible("polar: element is numerically singular");
  std::vector<Mat> us, ps;
  double smax = 0.0;
  double smin = std::numeric_limits<double>::infinity();
  for (const auto& m : x.blocks()) {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    smax = std::max(smax, s(0));
    smin = std::min(smin, s(s.size() - 1));
    us.push_back(svd.matrixU() * svd.matrixV().adjoint());
    ps.push_back(svd.matrixV() * s.cast<cd>().asDiagonal() * svd.matrixV().adjoint());
  }
  const BlockAlgebra& alg = x.algebra();
  return {AlgElement(alg, std::move(us)), AlgElement(alg, std::move(ps)), std::max(smax - 1.0, 1.0 - smin)};
}

/// chi_{[0, lambda]}(h) for Hermitian h. Eigenvalues that are negative are
/// excluded (the interval starts at 0); lambda < 0 yields the zero projection.
inline AlgElement spectral_projection(const AlgElement& h, double lambda, const Tolerances& tol = {}) {
  if (!is_hermitian(h, tol.algebraic)) throw StructuralError("spectral_projection: input is not Hermitian");
  std::vector<Mat> bl;
  for (const auto& m : h.blocks()) {
    const Mat herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(herm);
    const auto& ev = es.eigenvalues();
    const auto& V = es.eigenvectors();
    Mat p = Mat::Zero(m.rows(), m.cols());
    if (lambda >= 0.0) {
      // Eigenvalues within rounding of 0 belong to [0, lambda].
      const double floor = -tol.algebraic * std::max(1.0, ev.cwiseAbs().maxCoeff());
      for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) <= lambda && ev(i) >= floor) p += V.col(i) * V.col(i).adjoint();
    }
    bl.push_back(std::move(p));
  }
  return AlgElement(h.algebra(), std::move(bl));
}

/// ||[x; y]||^2 = ||x*x + y*y||.
inline double column_norm_sq(const AlgElement& x, const AlgElement& y) {
  return op_norm(x.adjoint() * x + y.adjoint() * y);
}

/// ||[x  y]||^2 = ||xx* + yy*||.
inline double row_norm_sq(const AlgElement& x, const AlgElement& y) {
  return op_norm(x * x.adjoint() + y * y.adjoint());
}

/// Both halves of the 2x2 invertibility condition
///   ||[x; y]||^2 >= alpha + ||y||^2   and   ||[x  y]||^2 >= alpha + ||y||^2.
inline bool check_condition_C(const AlgElement& x, double alpha, const AlgElement& y, const Tolerances& tol = {}) {
  if (op_norm(x) > 1.0 + tol.algebraic) throw ArgumentError("check_condition_C: requires ||x|| <= 1");
  const double ny = op_norm(y);
  const double rhs = alpha + ny * ny - tol.algebraic;
  return column_norm_sq(x, y) >= rhs && row_norm_sq(x, y) >= rhs;
}

namespace detail {

inline std::vector<double> eigen_grid(const AlgElement& h) {
  std::vector<double> grid;
  for (const auto& m : h.blocks()) {
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (m + m.adjoint())), Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) grid.push_back(std::max(0.0, es.eigenvalues()(i)));
  }
  std::sort(grid.begin(), grid.end());
  return grid;
}

}  // namespace detail

/// Scans the spectral projections chi_{[0,lambda]}(x*x) and chi_{[0,lambda]}(xx*)
/// over their (finite) eigenvalue grids and returns the first nonzero one that
/// violates condition (C) for `alpha`.
inline std::optional<AlgElement> find_violating_projection(const AlgElement& x, double alpha,
                                                           const Tolerances& tol = {}) {
  if (op_norm(x) > 1.0 + tol.algebraic) throw ArgumentError("find_violating_projection: requires ||x|| <= 1");
  for (const AlgElement& h : {AlgElement(x.adjoint() * x), AlgElement(x * x.adjoint())}) {
    const double scale = std::max(1.0, op_norm(h));
    for (double lambda : detail::eigen_grid(h)) {
      AlgElement p = spectral_projection(h, lambda + 1e-12 * scale, tol);
      if (op_norm(p) < 0.5) continue;
      if (!check_condition_C(x, alpha, p, tol)) return p;
    }
  }
  return std::nullopt;
}

/// Per block, the 2x2 operator matrix [[a, b], [c, d]] as an element of M_2(A).
inline AlgElement block2x2(const AlgElement& a, const AlgElement& b, const AlgElement& c, const AlgElement& d) {
  a.check_same(b);
  a.check_same(c);
  a.check_same(d);
  std::vector<Mat> bl;
  for (int i = 0; i < a.algebra().num_blocks(); ++i) {
    const int n = a.algebra().dim(i);
    Mat m(2 * n, 2 * n);
    m.topLeftCorner(n, n) = a.block(i);
    m.topRightCorner(n, n) = b.block(i);
    m.bottomLeftCorner(n, n) = c.block(i);
    m.bottomRightCorner(n, n) = d.block(i);
    bl.push_back(std::move(m));
  }
  return AlgElement(a.algebra().amplified(2), std::move(bl));
}

// ---------------------------------------------------------------------------
// random instances

/// Complex Gaussian n x m matrix with E|z|^2 = 1.
inline Mat gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      m(i, j) = cd(re, im);
    }
  return m;
}

/// Haar unitary: QR of a Ginibre matrix with the phases of diag(R) moved into Q.
inline Mat haar_unitary(int n, Rng& rng) {
  const Mat g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    const double a = std::abs(r(i, i));
    q.col(i) *= (a > 0.0) ? r(i, i) / a : cd(1.0);
  }
  return q;
}

inline AlgElement random_unitary(const BlockAlgebra& alg, Rng& rng) {
  std::vector<Mat> bl;
  for (int n : alg.dims()) bl.push_back(haar_unitary(n, rng));
  return AlgElement(alg, std::move(bl));
}

inline AlgElement random_unitary(const BlockAlgebra& alg, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0));
  return random_unitary(alg, rng);
}

/// Ginibre element (independent standard complex Gaussian entries).
inline AlgElement random_element(const BlockAlgebra& alg, Rng& rng) {
  std::vector<Mat> bl;
  for (int n : alg.dims()) bl.push_back(gaussian_matrix(n, n, rng));
  return AlgElement(alg, std::move(bl));
}

inline AlgElement random_element(const BlockAlgebra& alg, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0));
  return random_element(alg, rng);
}

/// Orthogonal projection of uniformly random rank in each block, Haar-rotated.
inline AlgElement random_projection(const BlockAlgebra& alg, Rng& rng) {
  std::vector<Mat> bl;
  for (int n : alg.dims()) {
    std::uniform_int_distribution<int> rank_dist(0, n);
    const int r = rank_dist(rng);
    const Mat u = haar_unitary(n, rng);
    bl.push_back(u.leftCols(r) * u.leftCols(r).adjoint());
  }
  return AlgElement(alg, std::move(bl));
}

inline AlgElement random_projection(const BlockAlgebra& alg, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0));
  return random_projection(alg, rng);
}

/// Random element with norm uniform in [0, 1].
inline AlgElement random_contraction(const BlockAlgebra& alg, Rng& rng) {
  AlgElement x = random_element(alg, rng);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  const double target = ud(rng);
  const double n = op_norm(x);
  return n > 0.0 ? x * cd(target / n) : x;
}

/// Random invertible element with ||x|| = 1 and 1/||x^{-1}|| >= min_sv.
inline AlgElement random_invertible_contraction(const BlockAlgebra& alg, Rng& rng, double min_sv = 0.05) {
  std::uniform_real_distribution<double> ud(min_sv, 1.0);
  std::vector<Mat> bl;
  for (int n : alg.dims()) {
    const Mat u = haar_unitary(n, rng);
    const Mat v = haar_unitary(n, rng);
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s(i) = ud(rng);
    bl.push_back(u * s.cast<cd>().asDiagonal() * v.adjoint());
  }
  AlgElement x(alg, std::move(bl));
  return x * cd(1.0 / op_norm(x));
}

}  // namespace opalg

#endif  // OPALG_MATCORE_HPP
