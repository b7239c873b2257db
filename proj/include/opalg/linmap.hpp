#ifndef OPALG_LINMAP_HPP
#define OPALG_LINMAP_HPP

// Linear and bilinear maps between block algebras, stored as coordinate
// arrays over the matrix-unit bases.

#include <functional>
#include <utility>

#include "opalg/matcore.hpp"

namespace opalg {

class LinMap {
public:
  LinMap(BlockAlgebra domain, BlockAlgebra codomain, Mat matrix)
      : domain_(std::move(domain)), codomain_(std::move(codomain)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != codomain_.coord_dim() || matrix_.cols() != domain_.coord_dim())
      throw StructuralError("LinMap: matrix shape does not match domain/codomain");
    if (!matrix_.allFinite()) throw StructuralError("LinMap: non-finite entry");
  }

  static LinMap identity(const BlockAlgebra& alg) {
    return LinMap(alg, alg, Mat::Identity(alg.coord_dim(), alg.coord_dim()));
  }

  static LinMap zero(const BlockAlgebra& domain, const BlockAlgebra& codomain) {
    return LinMap(domain, codomain, Mat::Zero(codomain.coord_dim(), domain.coord_dim()));
  }

  /// Tabulates f on the matrix units of `domain`.
  static LinMap from_function(const BlockAlgebra& domain, const BlockAlgebra& codomain,
                              const std::function<AlgElement(const AlgElement&)>& f) {
    Mat m(codomain.coord_dim(), domain.coord_dim());
    for (int b = 0; b < domain.num_blocks(); ++b)
      for (int r = 0; r < domain.dim(b); ++r)
        for (int s = 0; s < domain.dim(b); ++s) {
          const AlgElement y = f(AlgElement::matrix_unit(domain, b, r, s));
          if (!(y.algebra() == codomain)) throw StructuralError("LinMap::from_function: codomain mismatch");
          m.col(domain.index(b, r, s)) = y.coords();
        }
    return LinMap(domain, codomain, std::move(m));
  }

  const BlockAlgebra& domain() const noexcept { return domain_; }
  const BlockAlgebra& codomain() const noexcept { return codomain_; }
  const Mat& matrix() const noexcept { return matrix_; }

  AlgElement apply(const AlgElement& x) const {
    if (!(x.algebra() == domain_)) throw StructuralError("LinMap::apply: element not in domain");
    return AlgElement::from_coords(codomain_, matrix_ * x.coords());
  }
  AlgElement operator()(const AlgElement& x) const { return apply(x); }

  friend LinMap operator+(const LinMap& a, const LinMap& b) {
    a.check_same(b);
    return LinMap(a.domain_, a.codomain_, a.matrix_ + b.matrix_);
  }
  friend LinMap operator-(const LinMap& a, const LinMap& b) {
    a.check_same(b);
    return LinMap(a.domain_, a.codomain_, a.matrix_ - b.matrix_);
  }
  friend LinMap operator*(cd s, const LinMap& a) { return LinMap(a.domain_, a.codomain_, s * a.matrix_); }

  void check_same(const LinMap& o) const {
    if (!(domain_ == o.domain_) || !(codomain_ == o.codomain_)) throw StructuralError("LinMap: shape mismatch");
  }

private:
  BlockAlgebra domain_;
  BlockAlgebra codomain_;
  Mat matrix_;
};

/// s o t
inline LinMap compose(const LinMap& s, const LinMap& t) {
  if (!(t.codomain() == s.domain())) throw StructuralError("compose: dimensions do not agree");
  return LinMap(t.domain(), s.codomain(), s.matrix() * t.matrix());
}

/// Largest singular value of the coordinate matrix (Hilbert-Schmidt to Hilbert-Schmidt norm).
inline double coord_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

inline double coord_norm(const LinMap& t) { return coord_norm(t.matrix()); }

inline bool is_invertible(const LinMap& t, double rel_tol = 1e-10) {
  if (t.matrix().rows() != t.matrix().cols()) return false;
  Eigen::BDCSVD<Mat> svd(t.matrix());
  const auto& s = svd.singularValues();
  return s.size() > 0 && s(0) > 0.0 && s(s.size() - 1) > rel_tol * s(0);
}

inline LinMap inverse(const LinMap& t, double rel_tol = 1e-10) {
  if (!is_invertible(t, rel_tol)) throw NotInvertible("LinMap inverse: map is numerically singular");
  return LinMap(t.codomain(), t.domain(), t.matrix().partialPivLu().inverse());
}

/// x -> c x
inline LinMap left_multiplication(const AlgElement& c) {
  const BlockAlgebra& alg = c.algebra();
  return LinMap::from_function(alg, alg, [&](const AlgElement& x) { return c * x; });
}

/// x -> v x w
inline LinMap two_sided_multiplication(const AlgElement& v, const AlgElement& w) {
  const BlockAlgebra& alg = v.algebra();
  return LinMap::from_function(alg, alg, [&](const AlgElement& x) { return v * x * w; });
}

/// Inner automorphism x -> u x u*.
inline LinMap conjugation(const AlgElement& u) { return two_sided_multiplication(u, u.adjoint()); }

/// Transpose on every block; the standard example of an isometry that is not completely isometric.
inline LinMap transpose_map(const BlockAlgebra& alg) {
  return LinMap::from_function(alg, alg, [](const AlgElement& x) {
    std::vector<Mat> bl;
    for (const auto& m : x.blocks()) bl.push_back(m.transpose());
    return AlgElement(x.algebra(), std::move(bl));
  });
}

/// *-isomorphism moving block b of the domain to block perm[b] of the
/// codomain (block sizes must agree).
inline LinMap block_permutation(const BlockAlgebra& domain, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != domain.num_blocks()) throw StructuralError("block_permutation: size");
  std::vector<int> cd_dims(domain.dims().size());
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t b = 0; b < perm.size(); ++b) {
    const auto t = static_cast<std::size_t>(perm[b]);
    if (t >= perm.size() || seen[t]) throw StructuralError("block_permutation: not a permutation");
    seen[t] = true;
    cd_dims[t] = domain.dims()[b];
  }
  const BlockAlgebra codomain(cd_dims);
  Mat m = Mat::Zero(codomain.coord_dim(), domain.coord_dim());
  for (int b = 0; b < domain.num_blocks(); ++b)
    for (int r = 0; r < domain.dim(b); ++r)
      for (int s = 0; s < domain.dim(b); ++s)
        m(codomain.index(perm[static_cast<std::size_t>(b)], r, s), domain.index(b, r, s)) = 1.0;
  return LinMap(domain, codomain, std::move(m));
}

/// Bilinear map B: A x A -> C. The coordinate tensor is stored as a
/// codomain.coord_dim x (D*D) matrix whose column  i + D*j  holds B(e_i, e_j).
class BilMap {
public:
  BilMap(BlockAlgebra domain, BlockAlgebra codomain, Mat tensor)
      : domain_(std::move(domain)), codomain_(std::move(codomain)), tensor_(std::move(tensor)) {
    const Eigen::Index d = domain_.coord_dim();
    if (tensor_.rows() != codomain_.coord_dim() || tensor_.cols() != d * d)
      throw StructuralError("BilMap: tensor shape does not match domain/codomain");
    if (!tensor_.allFinite()) throw StructuralError("BilMap: non-finite entry");
  }

  static BilMap zero(const BlockAlgebra& domain, const BlockAlgebra& codomain) {
    const int d = domain.coord_dim();
    return BilMap(domain, codomain, Mat::Zero(codomain.coord_dim(), d * d));
  }

  static BilMap from_function(const BlockAlgebra& domain, const BlockAlgebra& codomain,
                              const std::function<AlgElement(const AlgElement&, const AlgElement&)>& f) {
    const int d = domain.coord_dim();
    std::vector<AlgElement> units;
    units.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) units.push_back(AlgElement::from_coords(domain, Vec::Unit(d, i)));
    Mat t(codomain.coord_dim(), d * d);
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) {
        const AlgElement y = f(units[static_cast<std::size_t>(i)], units[static_cast<std::size_t>(j)]);
        if (!(y.algebra() == codomain)) throw StructuralError("BilMap::from_function: codomain mismatch");
        t.col(i + d * j) = y.coords();
      }
    return BilMap(domain, codomain, std::move(t));
  }

  const BlockAlgebra& domain() const noexcept { return domain_; }
  const BlockAlgebra& codomain() const noexcept { return codomain_; }
  const Mat& tensor() const noexcept { return tensor_; }

  /// The coordinates of B(x, .) as a codomain x domain matrix (column j = B(x, e_j)).
  Mat fix_first(const Vec& x) const {
    const Eigen::Index d = domain_.coord_dim();
    const Eigen::Index c = codomain_.coord_dim();
    Mat out(c, d);
    for (Eigen::Index j = 0; j < d; ++j) out.col(j) = tensor_.middleCols(d * j, d) * x;
    return out;
  }

  /// The coordinates of B(., y) as a codomain x domain matrix (column i = B(e_i, y)).
  Mat fix_second(const Vec& y) const {
    const Eigen::Index d = domain_.coord_dim();
    const Eigen::Index c = codomain_.coord_dim();
    const Eigen::Map<const Mat> stacked(tensor_.data(), c * d, d);
    Vec v = stacked * y;
    return Eigen::Map<Mat>(v.data(), c, d);
  }

  Vec apply_coords(const Vec& x, const Vec& y) const { return fix_second(y) * x; }

  AlgElement apply(const AlgElement& x, const AlgElement& y) const {
    if (!(x.algebra() == domain_) || !(y.algebra() == domain_)) throw StructuralError("BilMap::apply: domain");
    return AlgElement::from_coords(codomain_, apply_coords(x.coords(), y.coords()));
  }
  AlgElement operator()(const AlgElement& x, const AlgElement& y) const { return apply(x, y); }

  friend BilMap operator+(const BilMap& a, const BilMap& b) {
    a.check_same(b);
    return BilMap(a.domain_, a.codomain_, a.tensor_ + b.tensor_);
  }
  friend BilMap operator-(const BilMap& a, const BilMap& b) {
    a.check_same(b);
    return BilMap(a.domain_, a.codomain_, a.tensor_ - b.tensor_);
  }
  friend BilMap operator*(cd s, const BilMap& a) { return BilMap(a.domain_, a.codomain_, s * a.tensor_); }

  void check_same(const BilMap& o) const {
    if (!(domain_ == o.domain_) || !(codomain_ == o.codomain_)) throw StructuralError("BilMap: shape mismatch");
  }

private:
  BlockAlgebra domain_;
  BlockAlgebra codomain_;
  Mat tensor_;
};

inline double coord_norm(const BilMap& b) { return coord_norm(b.tensor()); }

/// Product table of the matrix units: e_i e_j = e_{table[i][j]} or 0 (entry -1).
inline std::vector<std::vector<int>> product_table(const BlockAlgebra& alg) {
  const int d = alg.coord_dim();
  std::vector<std::vector<int>> t(static_cast<std::size_t>(d), std::vector<int>(static_cast<std::size_t>(d), -1));
  for (int b = 0; b < alg.num_blocks(); ++b) {
    const int n = alg.dim(b);
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s)
        for (int q = 0; q < n; ++q)
          t[static_cast<std::size_t>(alg.index(b, r, s))][static_cast<std::size_t>(alg.index(b, s, q))] =
              alg.index(b, r, q);
  }
  return t;
}

/// The algebra's own multiplication m_A as a bilinear map.
inline BilMap native_multiplication(const BlockAlgebra& alg) {
  const int d = alg.coord_dim();
  Mat t = Mat::Zero(d, d * d);
  const auto table = product_table(alg);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (const int k = table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; k >= 0) t(k, i + d * j) = 1.0;
  return BilMap(alg, alg, std::move(t));
}

/// t o B
inline BilMap compose(const LinMap& t, const BilMap& b) {
  if (!(b.codomain() == t.domain())) throw StructuralError("compose: dimensions do not agree");
  return BilMap(b.domain(), t.codomain(), t.matrix() * b.tensor());
}

}  // namespace opalg

#endif  // OPALG_LINMAP_HPP
