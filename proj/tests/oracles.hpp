#ifndef OPALG_TESTS_ORACLES_HPP
#define OPALG_TESTS_ORACLES_HPP

// Reference computations used only by the tests. None of them goes through
// the library routine under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Largest singular value by power iteration on m^* m.
inline double power_norm(const Mat& m, int iters = 2000) {
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  Vec v(m.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cd(nd(rng), nd(rng));
  v.normalize();
  double lam = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vec w = m.adjoint() * (m * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    lam = nw;
    v = w / nw;
  }
  return std::sqrt((m * v).squaredNorm());
}

/// Nelder-Mead minimizer over R^n.
inline std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x0, double step, int iters) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> s(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) s[i + 1][i] += step;
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(s[i]);
  for (int it = 0; it < iters; ++it) {
    std::vector<std::size_t> idx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> ss;
    std::vector<double> ff;
    for (auto i : idx) {
      ss.push_back(s[i]);
      ff.push_back(fv[i]);
    }
    s = ss;
    fv = ff;
    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c[j] += s[i][j] / static_cast<double>(n);
    auto along = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j) p[j] = c[j] + t * (s[n][j] - c[j]);
      return p;
    };
    const auto xr = along(-1.0);
    const double fr = f(xr);
    if (fr < fv[0]) {
      const auto xe = along(-2.0);
      const double fe = f(xe);
      if (fe < fr) { s[n] = xe; fv[n] = fe; } else { s[n] = xr; fv[n] = fr; }
    } else if (fr < fv[n - 1]) {
      s[n] = xr;
      fv[n] = fr;
    } else {
      const auto xc = along(fr < fv[n] ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, fv[n])) {
        s[n] = xc;
        fv[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j) s[i][j] = s[0][j] + 0.5 * (s[i][j] - s[0][j]);
          fv[i] = f(s[i]);
        }
      }
    }
  }
  return s[std::min_element(fv.begin(), fv.end()) - fv.begin()];
}

/// u = exp(iH) for the Hermitian H with the given n^2 real parameters.
inline Mat unitary_from_params(const std::vector<double>& p, int n) {
  Mat h = Mat::Zero(n, n);
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) h(i, i) = p[k++];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      h(i, j) = cd(p[k], p[k + 1]);
      h(j, i) = std::conj(h(i, j));
      k += 2;
    }
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Vec ph(n);
  for (int i = 0; i < n; ++i) ph(i) = std::exp(cd(0.0, es.eigenvalues()(i)));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

inline double spectral(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

/// min over unitaries of ||x - u|| by Nelder-Mead with random restarts
/// (no polar decomposition involved).
inline double nearest_unitary_distance(const Mat& x, int restarts, std::uint64_t seed) {
  const int n = static_cast<int>(x.rows());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(-std::numbers::pi, std::numbers::pi);
  double best = std::numeric_limits<double>::infinity();
  auto f = [&](const std::vector<double>& p) { return spectral(x - unitary_from_params(p, n)); };
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> p(static_cast<std::size_t>(n * n));
    for (auto& v : p) v = ud(rng);
    for (int round = 0; round < 4; ++round) p = nelder_mead(f, p, round == 0 ? 0.5 : 0.05, 600);
    best = std::min(best, f(p));
  }
  return best;
}

/// min over unitaries of ||x - u||: Riemannian gradient ascent of Re tr(x^* u)
/// over U(n) from a Haar-random start (every unitarily invariant distance shares
/// its minimizer), then a Nelder-Mead polish of the operator norm itself in the
/// chart u0 exp(iH). Uses neither SVD-based polar factors nor the library.
inline double nearest_unitary_by_descent(const Mat& x, std::uint64_t seed) {
  const int n = static_cast<int>(x.rows());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = cd(nd(rng), nd(rng));
  Eigen::HouseholderQR<Mat> qr(g);
  Mat u = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) u.col(i) *= r(i, i) / std::abs(r(i, i));

  const double step = 1.0 / std::max(power_norm(x, 200), 1e-3);
  for (int it = 0; it < 20000; ++it) {
    const Mat b = u.adjoint() * x;
    const Mat a = 0.5 * (b - b.adjoint());  // skew-Hermitian, a = iH
    if (a.norm() < 1e-14) break;
    Eigen::SelfAdjointEigenSolver<Mat> es(cd(0.0, -1.0) * a);
    Vec ph(n);
    for (int i = 0; i < n; ++i) ph(i) = std::exp(cd(0.0, step * es.eigenvalues()(i)));
    u = u * (es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint());
  }
  auto f = [&](const std::vector<double>& p) { return spectral(x - u * unitary_from_params(p, n)); };
  std::vector<double> p(static_cast<std::size_t>(n * n), 0.0);
  double best = f(p);
  for (double s0 : {1e-3, 1e-5}) {
    p = nelder_mead(f, p, s0, 300);
    best = std::min(best, f(p));
  }
  return best;
}

/// E|tr U| for Haar U in U(2) by quadrature of the eigenvalue density:
/// (1/pi) int_0^pi 4 |cos t| sin^2 t dt.
inline double haar_abs_trace_u2(int nodes = 20000) {
  const double pi = std::numbers::pi;
  const double h = pi / nodes;
  double s = 0.0;
  for (int i = 0; i <= nodes; ++i) {
    const double t = i * h;
    const double w = (i == 0 || i == nodes) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * 4.0 * std::abs(std::cos(t)) * std::sin(t) * std::sin(t);
  }
  return s * h / 3.0 / pi;
}

}  // namespace oracle

#endif  // OPALG_TESTS_ORACLES_HPP
