#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tpk/energy.hpp"
#include "tpk/error.hpp"
#include "tpk/parallel.hpp"
#include "tpk/study.hpp"

using namespace tpk;

namespace {

// Straightforward double loop with the unshifted numerator |P(dx)|^q.
double naive_energy(const ClosedCurve& c, double p, double q) {
  const int n = c.size();
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd t = c.first().row(i).transpose() / c.speed()[i];
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Eigen::VectorXd d = (c.samples().row(j) - c.samples().row(i)).transpose();
      Eigen::VectorXd normal = d - d.dot(t) * t;
      sum += std::pow(normal.norm(), q) / std::pow(d.norm(), p) * c.speed()[i] * c.speed()[j];
    }
  }
  return sum / (double(n) * n);
}

ClosedCurve unit_circle(int n) { return make_primitive(Circle{0.5 / oracle::pi}, n); }

}  // namespace

TEST(Params, Classify) {
  EXPECT_EQ(classify(4.5, 2).regime(), Regime::subcritical);
  EXPECT_EQ(classify(4, 2).regime(), Regime::critical);
  EXPECT_EQ(classify(5, 2).regime(), Regime::singular);
  EXPECT_EQ(classify(3, 2).regime(), Regime::non_repulsive);
  EXPECT_EQ(classify(6.0, 3).regime(), Regime::subcritical);
  EXPECT_EQ(classify(7.5, 3).regime(), Regime::singular);
  EXPECT_THROW(classify(0.0, 2), DomainError);
  EXPECT_THROW(classify(4.5, 0.5), DomainError);
  EnergyParams e(4.5, 2);
  EXPECT_DOUBLE_EQ(e.scaling_power(), -0.5);
  EXPECT_DOUBLE_EQ(e.beta_decay(), 0.5 / 6.0);
  EXPECT_EQ(to_string(Regime::critical), "critical");
}

TEST(Oracle, WallisRoutesAgree) {
  for (double m : {0.0, -0.5, 1.0, 2.5}) EXPECT_NEAR(oracle::wallis(m) / oracle::wallis_gamma(m), 1.0, 1e-12);
  EXPECT_NEAR(oracle::circle_energy(0.3, 4.0, 2.0), oracle::pi * oracle::pi, 1e-12);
}

TEST(Energy, UnitCircleCriticalIsPiSquared) {
  const double pi2 = 9.869604401089358;
  double prev = 1.0;
  for (int n : {256, 512, 1024, 2048}) {
    double err = std::abs(tp_energy(unit_circle(n), EnergyParams(4, 2)) / pi2 - 1.0);
    EXPECT_LT(err, prev);
    if (n >= 1024) EXPECT_LT(err, 1e-2);
    prev = err;
  }
}

TEST(Energy, CircleSubcriticalAgainstWallisOracle) {
  const double expected = oracle::circle_energy(1.0, 4.5, 2.0);
  EXPECT_NEAR(expected, 11.64949477083371, 1e-10);
  QuadratureSpec quad{QuadratureRule::trapezoid_richardson, 0, 3};
  double e = tp_energy(make_primitive(Circle{1.0}, 2048), EnergyParams(4.5, 2), quad);
  EXPECT_LT(std::abs(e / expected - 1.0), 1e-2);
  EXPECT_LT(std::abs(e / expected - 1.0), 1e-6);
}

TEST(Energy, MatchesNaiveDoubleLoop) {
  ClosedCurve t = oracle::unit_trefoil(128);
  for (auto [p, q] : {std::pair{4.5, 2.0}, {3.0, 2.0}, {7.0, 3.0}}) {
    EXPECT_NEAR(tp_energy(t, EnergyParams(p, q)) / naive_energy(t, p, q), 1.0, 1e-10);
  }
  ClosedCurve e = make_primitive(Ellipse{}, 96);
  EXPECT_NEAR(tp_energy(e, EnergyParams(4.5, 2)) / naive_energy(e, 4.5, 2), 1.0, 1e-10);
}

TEST(Energy, ExactScaling) {
  EnergyParams params(4.5, 2);
  for (const ClosedCurve& c : {make_primitive(Circle{1.0}, 128), oracle::unit_trefoil(128)}) {
    double base = tp_energy(c, params);
    for (double s : {0.5, 2.0, 10.0})
      EXPECT_NEAR(tp_energy(transform(c, s), params) / (std::pow(s, params.scaling_power()) * base), 1.0, 1e-11);
  }
}

TEST(Energy, MonotoneInExponentsOnUnitLength) {
  ClosedCurve t = oracle::unit_trefoil(128);
  double prev = 0.0;
  for (double p : {3.0, 3.5, 4.0, 4.5, 4.9}) {
    double e = tp_energy(t, EnergyParams(p, 2));
    EXPECT_GT(e, prev);
    prev = e;
  }
  prev = 1e300;
  for (double q : {1.5, 2.0, 2.5, 3.0}) {
    double e = tp_energy(t, EnergyParams(4.5, q));
    EXPECT_LT(e, prev);
    prev = e;
  }
}

TEST(Energy, Nonnegative) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    ClosedCurve c(make_primitive(Circle{}, 64, 3).samples() + 0.1 * oracle::smooth_field(64, 3, rng));
    EXPECT_GE(tp_energy(c, EnergyParams(4.5, 2)), 0.0);
  }
}

TEST(Energy, CollinearStrandsHaveZeroCrossEnergy) {
  SampledArc a = graded_segment(Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 0, 0), 0.5);
  SampledArc b = graded_segment(Eigen::Vector3d(2, 0, 0), Eigen::Vector3d(3, 0, 0), 0.5);
  EXPECT_EQ(cross_energy(a, b, EnergyParams(4.5, 2)), 0.0);
  EXPECT_EQ(cross_energy(b, a, EnergyParams(4.5, 2)), 0.0);
}

TEST(Energy, RefinementConvergesMonotonically) {
  ClosedCurve base = make_primitive(TorusKnot{}, 2048, 3);
  EnergyParams params(4.5, 2);
  std::vector<double> e;
  for (int n : {256, 512, 1024, 2048}) e.push_back(tp_energy(subsample(base, 2048 / n), params));
  for (size_t k = 1; k + 1 < e.size(); ++k) EXPECT_LT(std::abs(e[k + 1] - e[k]), std::abs(e[k] - e[k - 1]));
}

TEST(Energy, SingularRegimeGrowsUnderRefinement) {
  double prev = 0.0;
  for (int n : {128, 256, 512, 1024}) {
    double e = tp_energy(make_primitive(Circle{}, n), EnergyParams(5.5, 2));
    EXPECT_GT(e, prev);
    prev = e;
  }
}

TEST(Energy, RichardsonReducesError) {
  const double expected = oracle::circle_energy(1.0, 4.5, 2.0);
  ClosedCurve c = make_primitive(Circle{1.0}, 1024);
  double plain = std::abs(tp_energy(c, EnergyParams(4.5, 2)) / expected - 1.0);
  double one = std::abs(tp_energy(c, EnergyParams(4.5, 2), {QuadratureRule::trapezoid_richardson, 0, 1}) / expected - 1.0);
  double two = std::abs(tp_energy(c, EnergyParams(4.5, 2), {QuadratureRule::trapezoid_richardson, 0, 2}) / expected - 1.0);
  EXPECT_LT(one, plain / 10.0);
  EXPECT_LT(two, one);
  EXPECT_THROW(tp_energy(c, EnergyParams(5.5, 2), {QuadratureRule::trapezoid_richardson, 0, 1}), DomainError);
}

TEST(Energy, OffsetGridReinterpolates) {
  ClosedCurve c = make_primitive(Ellipse{}, 128);
  double own = tp_energy(c, EnergyParams(4.5, 2));
  double same = tp_energy(c, EnergyParams(4.5, 2), {QuadratureRule::trapezoid_diagonal_excluded, 128, 1});
  EXPECT_EQ(own, same);
  double finer = tp_energy(c, EnergyParams(4.5, 2), {QuadratureRule::trapezoid_diagonal_excluded, 256, 1});
  double direct = tp_energy(make_primitive(Ellipse{}, 256), EnergyParams(4.5, 2));
  EXPECT_NEAR(finer / direct, 1.0, 1e-12);
  EXPECT_THROW(tp_energy(c, EnergyParams(4.5, 2), {QuadratureRule::trapezoid_diagonal_excluded, 127, 1}), DomainError);
}

TEST(Energy, SelfIntersectionIsReported) {
  Points eight = make_primitive(FigureEight{0.1}, 64, 3).samples();
  eight.col(2).setZero();
  try {
    tp_energy(ClosedCurve(eight), EnergyParams(4.5, 2));
    FAIL() << "expected SelfIntersectionError";
  } catch (const SelfIntersectionError& e) {
    EXPECT_EQ(std::min(e.first(), e.second()), 16);
    EXPECT_EQ(std::max(e.first(), e.second()), 48);
  }
}

TEST(Energy, ThreadCountDoesNotChangeBits) {
  ClosedCurve t = oracle::unit_trefoil(256);
  set_thread_count(1);
  double one = tp_energy(t, EnergyParams(4.5, 2));
  set_thread_count(7);
  double seven = tp_energy(t, EnergyParams(4.5, 2));
  set_thread_count(0);
  EXPECT_EQ(one, seven);
}

TEST(Richardson, RecoversPolynomialLimit) {
  // value(h) = 3 + 2 h^0.5 - h^2 sampled at h, 2h, 4h
  auto f = [](double h) { return 3.0 + 2.0 * std::sqrt(h) - h * h; };
  std::vector<double> vals{f(0.01), f(0.02), f(0.04)};
  std::vector<double> exps{0.5, 2.0};
  EXPECT_NEAR(richardson(vals, exps), 3.0, 1e-12);
  std::vector<double> raw{0.5, 0.52, 2.0, -1.0};
  EXPECT_EQ(distinct_exponents(raw), (std::vector<double>{0.5, 2.0}));
}

TEST(PairEnergy, SymmetricAndSeparable) {
  EnergyParams params(4.5, 2);
  ClosedCurve a = make_primitive(Circle{1.0}, 96, 3);
  ClosedCurve b = transform(make_primitive(TorusKnot{}, 96, 3), 0.5, Eigen::Vector3d(4.0, 0.0, 1.0));
  PairEnergy ab = pair_energy(a, b, params), ba = pair_energy(b, a, params);
  EXPECT_NEAR(ab.total / ba.total, 1.0, 1e-12);
  EXPECT_EQ(ab.cross_ab, ba.cross_ba);
  EXPECT_EQ(ab.self_a, tp_energy(a, params));

  // translate by ten diameters
  for (const ClosedCurve& c : {oracle::unit_trefoil(128), make_primitive(Ellipse{}, 128, 3)}) {
    double diam = 0.0;
    for (int i = 0; i < c.size(); ++i)
      for (int j = 0; j < c.size(); ++j) diam = std::max(diam, (c.samples().row(i) - c.samples().row(j)).norm());
    PairEnergy apart = pair_energy(c, transform(c, 1.0, Eigen::Vector3d(10.0 * diam, 0.0, 0.0)), params);
    EXPECT_LT(apart.cross_ab + apart.cross_ba, 1e-3 * (apart.self_a + apart.self_b));
  }

  // touching circles share the sample (1, 0, 0)
  ClosedCurve hit = transform(a, 1.0, Eigen::Vector3d(2.0, 0.0, 0.0));
  EXPECT_THROW(pair_energy(a, hit, params), NumericalError);
}

TEST(Classical, SummandwiseIdentity) {
  std::vector<std::pair<ClosedCurve, double>> cases{
      {make_primitive(Circle{}, 128), 2.0},
      {oracle::unit_trefoil(128), 2.5},
      {make_primitive(Ellipse{}, 128), 3.0},
  };
  for (const auto& [c, q] : cases) {
    ClassicalComparison cmp = classical_equivalence(c, q);
    EXPECT_LT(cmp.max_summand_deviation, 1e-12);
    EXPECT_NEAR(cmp.lhs / cmp.rhs, 1.0, 1e-12);
    EXPECT_NEAR(cmp.rhs / (std::pow(2.0, q) * tp_energy(c, EnergyParams(2 * q, q))), 1.0, 1e-12);
  }
  EXPECT_THROW(classical_equivalence(make_primitive(Circle{}, 64), 1.5), DomainError);
}

TEST(TwoStrand, MatchesHighPrecisionQuadrature) {
  // mpmath quad of the same double integral, 30 digits
  EXPECT_NEAR(two_strand_cross_energy(0.2, EnergyParams(4.5, 2)) / 21.83111952864168, 1.0, 1e-8);
  EXPECT_NEAR(two_strand_cross_energy(0.025, EnergyParams(4.5, 2)) / 83.46350576328287, 1.0, 1e-8);
  EXPECT_NEAR(two_strand_cross_energy(0.2, EnergyParams(3.0, 2)) / 6.940601381408292, 1.0, 1e-8);
}
