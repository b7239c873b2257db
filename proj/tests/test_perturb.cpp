#include <gtest/gtest.h>

#include "opalg/perturb.hpp"
#include "oracles.hpp"

using namespace opalg;

namespace {

AscentOptions quick(std::uint64_t seed = 0) { return {8, 200, 1e-10, seed}; }

const BlockAlgebra kA({2, 3});

std::vector<AlgElement> random_elements(int n, Rng& rng, const BlockAlgebra& alg = kA) {
  std::vector<AlgElement> out;
  for (int i = 0; i < n; ++i) out.push_back(random_element(alg, rng));
  return out;
}

double max_coboundary2(const BilMap& d, Rng& rng, int samples) {
  const Coboundary2 c = coboundary_2(d);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const auto x = random_elements(3, rng, d.domain());
    worst = std::max(worst, op_norm(c(x[0], x[1], x[2])));
  }
  return worst;
}

}  // namespace

TEST(Coboundary1, Identity) {
  const BilMap d = coboundary_1(LinMap::identity(kA));
  Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    const auto x = random_elements(2, rng);
    EXPECT_LT(op_norm(d.apply(x[0], x[1]) - x[0] * x[1]), 1e-12);
  }
}

TEST(Coboundary1, InnerDerivation) {
  Rng rng(2);
  const AlgElement a = random_element(kA, rng);
  const LinMap h = LinMap::from_function(kA, kA, [&](const AlgElement& x) { return a * x - x * a; });
  EXPECT_LT(coord_norm(coboundary_1(h)), 1e-13);
}

TEST(Coboundary, ComplexProperty) {
  Rng rng(3);
  for (int i = 0; i < 3; ++i) {
    const LinMap h(kA, kA, gaussian_matrix(13, 13, rng));
    EXPECT_LT(max_coboundary2(coboundary_1(h), rng, 20), 1e-12 * 100);
  }
}

TEST(Coboundary2, Examples) {
  Rng rng(4);
  EXPECT_LT(max_coboundary2(native_multiplication(kA), rng, 20), 1e-12);
  EXPECT_THROW(coboundary_2(BilMap::zero(kA, BlockAlgebra({2}))), StructuralError);
  EXPECT_THROW(coboundary_1(LinMap::zero(kA, BlockAlgebra({2}))), StructuralError);
}

TEST(Coboundary2, QuadraticObstruction) {
  // for associative m = m_A + D:  delta2 D (x,y,z) = D(D(x,y),z) - D(x,D(y,z))
  Rng rng(5);
  const PlantedInstance p = planted_multiplication(kA, 1e-2, rng);
  const BilMap d = p.m.bil - native_multiplication(kA);
  const Coboundary2 c = coboundary_2(d);
  const double nd = bilinear_h_norm(d, 1, {32, 500, 1e-12, 1}).value;
  for (int i = 0; i < 50; ++i) {
    const auto x = random_elements(3, rng);
    const AlgElement lhs = c(x[0], x[1], x[2]);
    const AlgElement rhs = d.apply(d.apply(x[0], x[1]), x[2]) - d.apply(x[0], d.apply(x[1], x[2]));
    EXPECT_LT(op_norm(lhs - rhs), 1e-13);
    const double prod = op_norm(x[0]) * op_norm(x[1]) * op_norm(x[2]);
    EXPECT_LE(op_norm(lhs), 2.0 * nd * nd * prod * (1.0 + 1e-6));
  }
  // quadratic scaling
  Rng r1(6), r2(6);
  const PlantedInstance small = planted_multiplication(kA, 1e-3, r1);
  const PlantedInstance large = planted_multiplication(kA, 1e-2, r2);
  Rng s1(7), s2(7);
  const double o_small = max_coboundary2(small.m.bil - native_multiplication(kA), s1, 20);
  const double o_large = max_coboundary2(large.m.bil - native_multiplication(kA), s2, 20);
  EXPECT_NEAR(o_large / o_small, 100.0, 10.0);
}

TEST(SolveCoboundary, Zero) {
  const CoboundarySolution s = solve_coboundary(BilMap::zero(kA, kA));
  EXPECT_EQ(coord_norm(s.h), 0.0);
  EXPECT_EQ(s.residual, 0.0);
}

TEST(SolveCoboundary, ExactPreimage) {
  Rng rng(8);
  const CoboundarySolver solver(kA);
  for (int i = 0; i < 3; ++i) {
    const LinMap h0(kA, kA, gaussian_matrix(13, 13, rng));
    const BilMap d = coboundary_1(h0);
    const CoboundarySolution s = solver.solve(d);
    EXPECT_LT(s.residual, 1e-10);
    EXPECT_LT(coord_norm(coboundary_1(s.h) - d), 1e-10);
    // h - h0 is a derivation
    EXPECT_LT(coord_norm(coboundary_1(s.h - h0)), 1e-10);
    // minimum norm: the solution is no longer than the planted preimage
    EXPECT_LE(s.h.matrix().norm(), h0.matrix().norm() + 1e-12);
  }
}

TEST(SolveCoboundary, NonCocycle) {
  Rng rng(9);
  const BilMap d(kA, kA, gaussian_matrix(13, 169, rng));
  const CoboundarySolution s = solve_coboundary(d);
  EXPECT_GT(s.residual, 1e-3);
  EXPECT_GT(max_coboundary2(d, rng, 5), 1e-3);
  // residual is the distance to the range: the remainder is orthogonal to delta1 of anything
  const Mat rem = d.tensor() - coboundary_1(s.h).tensor();
  EXPECT_NEAR(rem.norm(), s.residual, 1e-9);
  const LinMap probe(kA, kA, gaussian_matrix(13, 13, rng));
  const Mat c = coboundary_1(probe).tensor();
  EXPECT_LT(std::abs((c.array().conjugate() * rem.array()).sum()), 1e-9 * c.norm() * rem.norm());
}

TEST(SolveCoboundary, RankMatchesDerivationKernel) {
  // kernel of delta1 on (+) M_n is the derivations, all inner: dim = sum (n^2 - 1)
  for (const auto& dims : {std::vector<int>{2}, std::vector<int>{2, 3}, std::vector<int>{1, 2}}) {
    const BlockAlgebra a(dims);
    const CoboundarySolver solver(a);
    int inner = 0;
    for (int n : dims) inner += n * n - 1;
    EXPECT_EQ(solver.rank(), a.coord_dim() * a.coord_dim() - inner);
    EXPECT_GE(solver.sigma_min(), 1.0 - 1e-9);
  }
}

TEST(CorrectMultiplication, Native) {
  const CorrectionResult r = correct_multiplication(Multiplication::native(kA));
  EXPECT_TRUE(r.trace.steps.empty());
  EXPECT_TRUE(r.phi.matrix() == Mat::Identity(13, 13));
  EXPECT_TRUE(r.trace.converged);
}

TEST(CorrectMultiplication, PlantAndRecover) {
  Rng rng(10);
  const CoboundarySolver solver(kA);
  for (int i = 0; i < 5; ++i) {
    const PlantedInstance p = planted_multiplication(kA, 1e-2, rng);
    const CorrectionResult r = correct_multiplication(p.m, solver);
    EXPECT_LE(r.trace.steps.size(), 8u);
    EXPECT_LT(intertwining_residual(r.phi, p.m, 100, i), 1e-10);
    const double eps0 = r.trace.eps0;
    EXPECT_LE(coord_norm(r.phi - LinMap::identity(kA)), 10.0 * eps0 + 1e-8);
    EXPECT_LE(r.trace.max_ratio(), 20.0);
    for (const auto& s : r.trace.steps) EXPECT_TRUE(std::isfinite(s.ratio));
    // Phi Phi0^-1 is an automorphism of the native algebra
    const LinMap auto_map = compose(r.phi, inverse(p.phi0));
    EXPECT_LT(multiplicativity_residual(auto_map, 100, i), 1e-8);
    // epsilon decreases
    const auto e = r.trace.eps_series();
    for (std::size_t j = 1; j < e.size(); ++j) EXPECT_LT(e[j], e[j - 1]);
  }
}

TEST(CorrectMultiplication, StarPreservation) {
  // planted by a *-preserving Phi0 the multiplication satisfies m(x*,y*) = m(y,x)*
  Rng rng(11);
  const Mat g = gaussian_matrix(13, 13, rng);
  const LinMap gl(kA, kA, g / coord_norm(g));
  const LinMap gsym = LinMap::from_function(kA, kA, [&](const AlgElement& x) {
    return 0.5 * (gl.apply(x) + gl.apply(x.adjoint()).adjoint());
  });
  const LinMap phi0(kA, kA, Mat::Identity(13, 13) + 1e-2 * gsym.matrix());
  const Multiplication m = induced_multiplication(phi0);
  ASSERT_LT(star_residual(m), 1e-10);
  const CorrectionResult r = correct_multiplication(m);
  EXPECT_LT(star_preservation_residual(r.phi), 1e-8);
}

TEST(CorrectMultiplication, Errors) {
  Rng rng(12);
  const PlantedInstance far = planted_multiplication(kA, 0.5, rng);
  EXPECT_THROW(correct_multiplication(far.m), HypothesisNotMet);
  // non-associative but small
  Mat t = native_multiplication(kA).tensor();
  t += 1e-3 * gaussian_matrix(13, 169, rng) / 13.0;
  EXPECT_THROW(correct_multiplication(Multiplication(BilMap(kA, kA, t))), HypothesisNotMet);
  CorrectionOptions tight;
  tight.max_iter = 1;
  EXPECT_THROW(correct_multiplication(planted_multiplication(kA, 1e-2, rng).m, tight), NoConvergence);
}

TEST(InducedMultiplication, Examples) {
  Rng rng(13);
  // *-isomorphism: conjugation by a unitary
  const LinMap pi = conjugation(random_unitary(kA, rng));
  EXPECT_LT(induced_multiplication(pi).defect_norm(), 1e-13);
  EXPECT_THROW(induced_multiplication(LinMap::zero(kA, kA)), NotInvertible);
}

TEST(InducedMultiplication, DefectBound) {
  Rng rng(14);
  const LinMap t(kA, kA, Mat::Identity(13, 13) + 1e-3 * gaussian_matrix(13, 13, rng) / 13.0);
  const Multiplication m = induced_multiplication(t);
  const NormEstimate lhs = bilinear_h_norm(m.bil - native_multiplication(kA), 3, quick());
  const double tinv = cb_norm(inverse(t), quick(1)).value;
  BilMap tv = BilMap::from_function(kA, kA, [&](const AlgElement& x, const AlgElement& y) {
    return t.apply(x * y) - t.apply(x) * t.apply(y);
  });
  const double tvee = bilinear_h_norm(tv, 3, quick(2)).value;
  EXPECT_LE(lhs.lower, tinv * tvee * (1.0 + 1e-6));
}

TEST(InducedMultiplication, Associative) {
  Rng rng(15);
  for (int i = 0; i < 100; ++i) {
    const LinMap t(kA, kA, Mat::Identity(13, 13) + 0.1 * gaussian_matrix(13, 13, rng) / 13.0);
    EXPECT_LT(assoc_residual(induced_multiplication(t), 10, i), 1e-10);
  }
}

TEST(InducedMultiplication, StarPreservingInput) {
  Rng rng(16);
  const LinMap s(kA, kA, Mat::Identity(13, 13) + 1e-2 * gaussian_matrix(13, 13, rng) / 13.0);
  const LinMap t(kA, kA, 0.5 * (s.matrix() + LinMap::from_function(kA, kA, [&](const AlgElement& x) {
                                                return s.apply(x.adjoint()).adjoint();
                                              }).matrix()));
  EXPECT_LT(star_residual(induced_multiplication(t)), 1e-10);
}

TEST(Recover, StarIsomorphism) {
  Rng rng(17);
  const LinMap pi = conjugation(random_unitary(kA, rng));
  const RecoveryResult r = recover_isomorphism(pi);
  EXPECT_LT(coord_norm(r.pi - pi), 1e-10);
  EXPECT_LT(r.report.mult_residual, 1e-10);
  EXPECT_LT(r.report.star_residual, 1e-10);
  EXPECT_LT(r.report.unitary_residual, 1e-10);
}

TEST(Recover, PlantedPerturbation) {
  Rng rng(18);
  for (int i = 0; i < 2; ++i) {
    const LinMap pi0 = conjugation(random_unitary(kA, rng));
    Mat g = gaussian_matrix(13, 13, rng);
    g /= coord_norm(g);
    const LinMap l = compose(LinMap(kA, kA, Mat::Identity(13, 13) + 1e-3 * g), pi0);
    RecoveryOptions opt;
    opt.ascent.seed = i;
    const RecoveryResult r = recover_isomorphism(l, opt);
    EXPECT_LT(r.report.mult_residual, 1e-9);
    EXPECT_LT(r.report.sa_residual, 1e-9);
    EXPECT_LT(r.report.unitary_residual, 1e-9);
    EXPECT_LE(r.report.distance_to_input, 1808.0 * std::sqrt(r.report.excess));
    EXPECT_LE(r.report.inv_unit_norm, r.report.imageunit_bound + 1e-6);
  }
}

TEST(Recover, StageTags) {
  Rng rng(19);
  try {
    recover_isomorphism(LinMap(kA, kA, gaussian_matrix(13, 13, rng)));
    FAIL() << "expected a stage error";
  } catch (const StageError& e) {
    EXPECT_FALSE(e.stage().empty());
  }
}

TEST(StabilitySurjectivity, Examples) {
  Rng rng(20);
  const Mat t = gaussian_matrix(4, 6, rng);
  const double k = quotient_inverse_norm(t);
  const SurjectivityReport same = stability_surjectivity(t, t, k);
  EXPECT_DOUBLE_EQ(same.bound, k);
  EXPECT_TRUE(same.holds);

  // ||T - S|| = 1/(2K) by a rank-one perturbation
  Vec u = gaussian_matrix(4, 1, rng).col(0);
  Vec v = gaussian_matrix(6, 1, rng).col(0);
  u.normalize();
  v.normalize();
  const Mat s = t - (1.0 / (2.0 * k)) * u * v.adjoint();
  const SurjectivityReport half = stability_surjectivity(t, s, k);
  EXPECT_NEAR(half.bound, 2.0 * k, 1e-9 * k);
  EXPECT_TRUE(half.holds);

  EXPECT_THROW(stability_surjectivity(t, Mat(t - (2.0 / k) * u * v.adjoint()), k), HypothesisNotMet);
  EXPECT_THROW(stability_surjectivity(t, Mat::Zero(3, 6), k), StructuralError);
}

TEST(StabilitySurjectivity, QuotientNormOracle) {
  // quotient-inverse norm is the norm of the min-norm right inverse T^+
  Rng rng(21);
  for (int i = 0; i < 20; ++i) {
    const Mat t = gaussian_matrix(3, 5, rng);
    const Mat pinv = t.adjoint() * (t * t.adjoint()).inverse();
    EXPECT_NEAR(quotient_inverse_norm(t), oracle::spectral(pinv), 1e-9 * oracle::spectral(pinv));
    const Mat s = t + 0.01 / quotient_inverse_norm(t) * gaussian_matrix(3, 5, rng) / 5.0;
    const SurjectivityReport r = stability_surjectivity(t, s, quotient_inverse_norm(t));
    EXPECT_TRUE(r.surjective);
    EXPECT_LE(r.measured, r.bound + 1e-6);
  }
}

TEST(StabilitySurjectivity, LinMapOverload) {
  Rng rng(22);
  const LinMap t(kA, kA, Mat::Identity(13, 13) + 0.1 * gaussian_matrix(13, 13, rng) / 13.0);
  const LinMap s(kA, kA, t.matrix() + 1e-3 * gaussian_matrix(13, 13, rng) / 13.0);
  const SurjectivityReport r = stability_surjectivity(t, s, quotient_inverse_norm(t.matrix()));
  EXPECT_TRUE(r.holds);
}
