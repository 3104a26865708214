#include <gtest/gtest.h>

#include <cmath>

#include "sprayscope/oracle.hpp"
#include "sprayscope/selftest.hpp"

using namespace sprayscope;

namespace {

ScalarEvaluator cube() {
  return [](std::span<const double> x) { return x[0] * x[0] * x[0]; };
}

// exp(a + b/2): every partial is a positive multiple of the value, so the leading stencil error
// terms cannot cancel and the observed order is clean.
double expo(std::span<const double> x) { return std::exp(x[0] + 0.5 * x[1]); }

double expo_exact(const MultiIndex& alpha, std::span<const double> x) {
  return std::pow(0.5, alpha.exponents()[1]) * expo(x);
}

}  // namespace

TEST(Oracle, CubeSecondDerivative) {
  const std::vector<double> x{1.0};
  EXPECT_NEAR(fd_partial(cube(), x, MultiIndex({2})), 6.0, 1e-7);
}

TEST(Oracle, ConstantHasZeroDerivatives) {
  const ScalarEvaluator c = [](std::span<const double>) { return 4.25; };
  const std::vector<double> x{0.3, -1.0};
  for (const MultiIndex& a : {MultiIndex({1, 0}), MultiIndex({1, 1}), MultiIndex({2, 2}), MultiIndex({0, 4})}) {
    EXPECT_NEAR(fd_partial(c, x, a), 0.0, 1e-10);
  }
  EXPECT_EQ(fd_partial(c, x, MultiIndex({0, 0})), 4.25);
}

TEST(Oracle, SphereMixedPartialMatchesJet) {
  const PointFunction f = [](std::span<const Jet> v) {
    const std::size_t n = v.size() / 2;
    return sphere_quadratic(v.first(n), v.subspan(n));
  };
  const std::vector<double> p{0.4, -0.3, 0.8, 1.1, 0.2, -0.6};
  std::vector<Jet> xs;
  for (int i = 0; i < 6; ++i) xs.push_back(Jet::coordinate(p, i, 2));
  const MultiIndex a({1, 0, 0, 1, 0, 0});
  const double jet = f(xs).partial(a);
  const double fd = fd_partial(scalar_evaluator(f), p, a);
  EXPECT_LE(std::abs(jet - fd), 1e-6 * (1.0 + std::abs(jet)));
}

TEST(Oracle, ArgumentErrors) {
  const std::vector<double> x{0.0, 0.0};
  EXPECT_THROW(fd_partial(cube(), x, MultiIndex({1})), std::invalid_argument);
  EXPECT_THROW(fd_partial(cube(), x, MultiIndex({3, 2})), std::invalid_argument);
  EXPECT_THROW(fd_partial(cube(), x, MultiIndex({1, 0}), StencilSpec{0.0, 1}), std::invalid_argument);
  EXPECT_THROW(compare_jet_fd([](std::span<const Jet> v) { return v[0]; }, x, 5), std::invalid_argument);
}

TEST(Oracle, NonFiniteStencilValueIsReported) {
  const ScalarEvaluator f = [](std::span<const double> x) { return 1.0 / x[0]; };
  const std::vector<double> x{0.0};
  EXPECT_THROW(fd_partial(f, x, MultiIndex({2})), std::domain_error);
}

TEST(Oracle, PolynomialBatteryAgreesWithJets) {
  CounterRng rng(99, 0);
  for (int c = 0; c < 10; ++c) {
    const detail::Poly p = detail::random_poly(3, 4, rng);
    const std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const VerificationReport r =
        compare_jet_fd([p](std::span<const Jet> v) { return detail::poly_jet(p, v); }, x, 3, "poly");
    for (const auto& k : r.checks()) EXPECT_TRUE(k.pass) << k.name << " " << k.max_residual;
  }
}

TEST(OracleProperty, RichardsonRaisesObservedOrder) {
  const std::vector<double> x{0.35, -0.55};
  for (const MultiIndex& a : {MultiIndex({1, 0}), MultiIndex({2, 0}), MultiIndex({1, 1})}) {
    const double exact = expo_exact(a, x);
    const auto observed = [&](int levels) {
      const StencilSpec coarse{0.1, levels}, fine{0.05, levels};
      const double e1 = std::abs(fd_partial(expo, x, a, coarse) - exact);
      const double e2 = std::abs(fd_partial(expo, x, a, fine) - exact);
      return std::log2(e1 / e2);
    };
    const double plain = observed(0);
    const double extrapolated = observed(1);
    EXPECT_NEAR(plain, 2.0, 0.3);
    EXPECT_GE(extrapolated - plain, 1.5);
  }
}

TEST(OracleProperty, EvaluatorBatterySubset) {
  const VerificationReport r = evaluator_fd_battery(3, 40);
  ASSERT_FALSE(r.checks().empty());
  for (const auto& c : r.checks()) EXPECT_TRUE(c.pass) << c.name << " " << c.max_residual;
}
