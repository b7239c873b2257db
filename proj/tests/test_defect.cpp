#include <gtest/gtest.h>

#include <cmath>

#include "opalg/defect.hpp"
#include "oracles.hpp"

using namespace opalg;

namespace {

AscentOptions quick(std::uint64_t seed = 0) { return {8, 200, 1e-10, seed}; }

const BlockAlgebra kA({2, 3});

LinMap near_isomorphism(double eps, Rng& rng) {
  const LinMap pi = random_star_isomorphism(kA, rng);
  return symmetrize(unitize(perturb_map(pi, eps, rng), quick()).map);
}

}  // namespace

TEST(MultDefect, Homomorphism) {
  Rng rng(1);
  const LinMap pi = random_star_isomorphism(kA, rng);
  EXPECT_LT(coord_norm(mult_defect(pi)), 1e-14);
}

TEST(MultDefect, ScalarMultipleOfIdentity) {
  const BlockAlgebra m2({2});
  const LinMap two(m2, m2, 2.0 * Mat::Identity(4, 4));
  const BilMap d = mult_defect(two);
  Rng rng(2);
  for (int i = 0; i < 10; ++i) {
    const AlgElement a = random_element(m2, rng), b = random_element(m2, rng);
    EXPECT_LT(op_norm(d.apply(a, b) + 2.0 * (a * b)), 1e-13);
  }
}

TEST(MultDefect, PointwiseOracle) {
  Rng rng(3);
  const LinMap t(kA, kA, gaussian_matrix(13, 13, rng));
  const BilMap d = mult_defect(t);
  for (int i = 0; i < 100; ++i) {
    const AlgElement a = random_element(kA, rng), b = random_element(kA, rng);
    const AlgElement direct = t.apply(a * b) - t.apply(a) * t.apply(b);
    EXPECT_LT(op_norm(d.apply(a, b) - direct), 1e-12 * (1.0 + op_norm(direct)));
  }
}

TEST(MultDefect, ZeroIffHomomorphism) {
  Rng rng(4);
  for (int i = 0; i < 5; ++i) {
    const LinMap pi = random_star_isomorphism(kA, rng);
    EXPECT_LT(coord_norm(mult_defect(pi)), 1e-13);
    // a non-multiplicative map: perturb and check the defect is visible
    const LinMap t = perturb_map(pi, 1e-3, rng);
    EXPECT_GT(coord_norm(mult_defect(t)), 1e-5);
  }
  // non-unital homomorphism (x -> p x p with p central) also has zero defect
  const BlockAlgebra a({2, 1});
  const LinMap cut = LinMap::from_function(a, a, [&](const AlgElement& x) {
    return AlgElement(a, {x.block(0), Mat::Zero(1, 1)});
  });
  EXPECT_EQ(coord_norm(mult_defect(cut)), 0.0);
}

TEST(StarMap, Examples) {
  Rng rng(5);
  const LinMap pi = random_star_isomorphism(kA, rng);
  EXPECT_LT(coord_norm(star_map(pi) - pi), 1e-14);

  const AlgElement v = random_element(kA, rng), w = random_element(kA, rng);
  const LinMap t = two_sided_multiplication(v, w);
  const LinMap ts = star_map(t);
  for (int i = 0; i < 20; ++i) {
    const AlgElement x = random_element(kA, rng);
    EXPECT_LT(op_norm(ts.apply(x) - w.adjoint() * x * v.adjoint()), 1e-12);
  }

  const LinMap g(kA, kA, gaussian_matrix(13, 13, rng));
  EXPECT_TRUE(star_map(star_map(g)).matrix() == g.matrix());
}

TEST(StarMap, PreservesCbNorm) {
  Rng rng(6);
  const BlockAlgebra a({2});
  const LinMap g(a, a, gaussian_matrix(4, 4, rng));
  const NormEstimate e = cb_norm(g, quick());
  const NormEstimate es = cb_norm(star_map(g), quick(1));
  EXPECT_NEAR(e.value, es.value, 1e-6);
  // the adjoint of the witness is a witness for T*
  const AlgElement wadj = e.witness[0].adjoint();
  EXPECT_NEAR(op_norm(apply_amplified(star_map(g), e.level, wadj)), e.lower, 1e-9);
}

TEST(Mu, StarIsomorphism) {
  Rng rng(7);
  EXPECT_LT(mu(random_star_isomorphism(kA, rng), quick()), 1e-6);
}

TEST(Mu, FormulaAgainstLongDouble) {
  const double m = mu_from_norms(1.0, 1.1);
  const long double ref = 1.0L - std::sqrt(2.0L / (1.1L * 1.1L) - 1.0L);
  EXPECT_NEAR(m, static_cast<double>(ref), 1e-15);
  EXPECT_NEAR(m, 0.19198, 5e-5);
}

TEST(Mu, Hypothesis) {
  try {
    mu_from_norms(1.2, 1.2);
    FAIL() << "expected HypothesisNotMet";
  } catch (const HypothesisNotMet& e) {
    EXPECT_DOUBLE_EQ(e.value(), 1.44);
  }
  EXPECT_NEAR(mu_from_norms(1.4, 1.0), 0.8, 1e-12);
  // continuous at the edge of the hypothesis
  EXPECT_NEAR(mu_from_norms(std::nextafter(std::sqrt(2.0), 0.0), 1.0), 1.0, 1e-7);
}

TEST(Mu, NormalizedPairVersusTwoDelta) {
  // For ||S|| = (1+d)/sqrt(2-(1+d)^2), ||S^-1|| = 1+d the value of mu is
  // 4d + O(d^2): the 2d majorant does not hold. The certifier flags the same step.
  for (double d : {1e-8, 1e-6, 1e-4, 1e-2, 0.1}) {
    const long double dl = d;
    const long double s = (1 + dl) / std::sqrt(2 - (1 + dl) * (1 + dl));
    const long double ref = std::max(s - 1, 1 - std::sqrt(2 / ((1 + dl) * (1 + dl)) - s * s));
    const double m = mu_from_norms(static_cast<double>(s), 1.0 + d);
    EXPECT_NEAR(m, static_cast<double>(ref), 1e-6 * d + 1e-15);
    EXPECT_GT(m, 2.0 * d);
    if (d <= 1e-4) EXPECT_NEAR(m / d, 4.0, 1e-2);
  }
}

TEST(Unitize, Examples) {
  Rng rng(8);
  const LinMap pi = random_star_isomorphism(kA, rng);
  const UnitizeResult u = unitize(pi, quick());
  EXPECT_LT(coord_norm(u.map - pi), 1e-14);
  EXPECT_TRUE(u.bound_holds);

  // L = c pi, L(1) = c
  const LinMap scaled(kA, kA, cd(0.7, 0.2) * pi.matrix());
  EXPECT_LT(coord_norm(unitize(scaled, quick()).map - pi), 1e-13);
}

TEST(Unitize, ImageUnitBound) {
  Rng rng(9);
  for (int i = 0; i < 4; ++i) {
    const LinMap pi = random_star_isomorphism(kA, rng);
    const LinMap l = perturb_map(pi, 1e-4, rng);
    const UnitizeResult u = unitize(l, quick(i));
    EXPECT_LT(op_norm(u.map.apply(AlgElement::identity(kA)) - AlgElement::identity(kA)), 1e-12);
    EXPECT_TRUE(u.bound_holds);
    // normalized so that ||L||_cb = 1 and ||L^-1||_cb = 1 + delta
    const double delta = u.cb_norm * u.cb_inv_norm - 1.0;
    const double normalized_inv_unit = u.inv_unit_norm * u.cb_norm;
    EXPECT_LE(normalized_inv_unit, (1 + delta) / std::sqrt(2 - (1 + delta) * (1 + delta)) + 1e-6);
  }
}

TEST(Unitize, SingularImageOfUnit) {
  const BlockAlgebra a({1, 1});
  // L(1) = 0
  Mat m(2, 2);
  m << 1.0, -1.0, 1.0, -1.0;
  EXPECT_THROW(unitize(LinMap(a, a, m), quick()), NotInvertible);
}

TEST(Symmetrize, Examples) {
  Rng rng(10);
  const LinMap pi = random_star_isomorphism(kA, rng);
  EXPECT_LT(coord_norm(symmetrize(pi) - pi), 1e-15);
  const LinMap s(kA, kA, gaussian_matrix(13, 13, rng));
  const LinMap t = symmetrize(s);
  EXPECT_TRUE(star_map(t).matrix() == t.matrix());
  const double lhs = cb_norm(t - s, quick()).value;
  const double rhs = 0.5 * cb_norm(s - star_map(s), quick(1)).value;
  EXPECT_NEAR(lhs, rhs, 1e-6);
}

TEST(Symmetrize, FixedPointOfPipeline) {
  Rng rng(11);
  const LinMap pi = random_star_isomorphism(kA, rng);
  EXPECT_LT(coord_norm(symmetrize(unitize(pi, quick()).map) - pi), 1e-12);
}

TEST(Symmetrize, SelfAdjointnessDefectScale) {
  // claimed: ||S - S*||_cb <= 10 sqrt(delta) for unital S with delta <= 1/200
  Rng rng(12);
  for (double eps : {1e-3, 1e-4}) {
    const LinMap pi = random_star_isomorphism(kA, rng);
    const UnitizeResult u = unitize(perturb_map(pi, eps, rng), quick());
    const double delta = u.cb_norm * u.cb_inv_norm - 1.0;
    ASSERT_LE(delta, 1.0 / 200.0);
    EXPECT_LE(cb_norm(u.map - star_map(u.map), quick(2)).value, 10.0 * std::sqrt(delta));
  }
}

TEST(VerifyDefmult, StarIsomorphism) {
  Rng rng(13);
  const DefectReport r = verify_defmult(random_star_isomorphism(kA, rng), {quick(), 0, 1e-9});
  EXPECT_LT(r.mult_defect.value, 1e-9);
  EXPECT_LT(r.sa_defect.value, 1e-9);
  EXPECT_LT(r.mu, 1e-6);
  EXPECT_LT(r.bound_mult, 1e-2);
  EXPECT_TRUE(r.satisfied());
}

TEST(VerifyDefmult, RandomNearIsomorphisms) {
  Rng rng(14);
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    for (int i = 0; i < 2; ++i) {
      const LinMap t = near_isomorphism(eps, rng);
      const DefectReport r = verify_defmult(t, {quick(i), 0, 1e-9});
      EXPECT_TRUE(r.mult_satisfied) << r.mult_defect.value << " vs " << r.bound_mult;
      EXPECT_TRUE(r.sa_satisfied) << r.sa_defect.value << " vs " << r.bound_sa;
      EXPECT_EQ(r.mult_satisfied, r.mult_defect.value <= r.bound_mult + r.tol);
      EXPECT_GE(r.mu, 0.0);
      EXPECT_LE(r.mult_defect.lower, r.mult_defect.value);
    }
  }
}

TEST(VerifyDefmult, RequiresUnital) {
  Rng rng(15);
  const LinMap pi = random_star_isomorphism(kA, rng);
  EXPECT_THROW(verify_defmult(LinMap(kA, kA, 1.1 * pi.matrix()), {quick(), 0, 1e-9}), HypothesisNotMet);
}

TEST(VerifyDefmult, PipelineDefectScale) {
  // claimed: ||T^-1||_cb ||T^v||_cb <= 180 sqrt(delta) for pipeline values with delta <= 1/200
  Rng rng(16);
  const LinMap pi = random_star_isomorphism(kA, rng);
  const LinMap l = perturb_map(pi, 1e-3, rng);
  const UnitizeResult u = unitize(l, quick());
  const double delta = u.cb_norm * u.cb_inv_norm - 1.0;
  ASSERT_LE(delta, 1.0 / 200.0);
  const LinMap t = symmetrize(u.map);
  const DefectReport r = verify_defmult(t, {quick(1), 0, 1e-9});
  EXPECT_LE(r.cb_tinv.value * r.mult_defect.value, 180.0 * std::sqrt(delta));
}

TEST(IteratedDefect, Multiplicative) {
  Rng rng(17);
  const IteratedDefect d = iterated_defect(random_star_isomorphism(kA, rng), 3, quick());
  for (int i = 0; i < 10; ++i) {
    const std::vector<AlgElement> xs{random_element(kA, rng), random_element(kA, rng), random_element(kA, rng)};
    EXPECT_LT(op_norm(d(xs)), 1e-12);
  }
  EXPECT_THROW(iterated_defect(random_star_isomorphism(kA, rng), 1), ArgumentError);
}

TEST(IteratedDefect, OrderTwoIsMultDefect) {
  Rng rng(18);
  const LinMap s = perturb_map(random_star_isomorphism(kA, rng), 1e-2, rng);
  const IteratedDefect d = iterated_defect(s, 2, quick());
  const BilMap md = mult_defect(s);
  for (int i = 0; i < 20; ++i) {
    const std::vector<AlgElement> xs{random_element(kA, rng), random_element(kA, rng)};
    EXPECT_LT(op_norm(d(xs) - md.apply(xs[0], xs[1])), 1e-13);
  }
  EXPECT_DOUBLE_EQ(d.bound, d.cb_defect);
}

TEST(IteratedDefect, ChainedBoundOrderThree) {
  Rng rng(19);
  for (int i = 0; i < 2; ++i) {
    const LinMap s = near_isomorphism(1e-3, rng);
    const IteratedDefect d = iterated_defect(s, 3, quick(i));
    EXPECT_NEAR(d.bound, d.cb_defect * (1.0 + d.cb_s), 1e-15);
    EXPECT_LE(iterated_defect_excess(d, 500, rng), 1e-6);
  }
  EXPECT_DOUBLE_EQ(chained_defect_bound(2.0, 3.0, 4), 2.0 * (1.0 + 3.0 + 9.0));
}
