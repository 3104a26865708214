#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sprayscope/jet.hpp"
#include "sprayscope/selftest.hpp"

using namespace sprayscope;

namespace {

std::vector<double> pt(std::initializer_list<double> v) { return v; }

}  // namespace

TEST(Jet, ConstantHasOnlyValueCoefficient) {
  const Jet c = Jet::constant(5.0, 2, 2);
  EXPECT_EQ(c.size(), 6u);
  EXPECT_EQ(c.coefficient(MultiIndex({0, 0})), 5.0);
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_EQ(c.coefficients()[i], 0.0);
}

TEST(Jet, CoordinateSeed) {
  const auto base = pt({3.0, 1.0});
  const Jet x = Jet::coordinate(base, 0, 2);
  EXPECT_EQ(x.coefficient(MultiIndex({0, 0})), 3.0);
  EXPECT_EQ(x.coefficient(MultiIndex({1, 0})), 1.0);
  EXPECT_EQ(x.coefficient(MultiIndex({0, 1})), 0.0);
  EXPECT_EQ(x.coefficient(MultiIndex({2, 0})), 0.0);
}

TEST(Jet, OrderZeroSeed) {
  const auto base = pt({0.0, 0.0});
  const Jet y = Jet::coordinate(base, 1, 0);
  EXPECT_EQ(y.size(), 1u);
  EXPECT_EQ(y.value(), 0.0);
}

TEST(Jet, SeedRejectsBadArguments) {
  const auto base = pt({0.0, 0.0});
  EXPECT_THROW(Jet::coordinate(base, 2, 1), std::invalid_argument);
  EXPECT_THROW(Jet::coordinate(base, -1, 1), std::invalid_argument);
  EXPECT_THROW(Jet::constant(1.0, 2, -1), std::invalid_argument);
}

TEST(Jet, CoefficientCountIsBinomial) {
  for (int m = 1; m <= 6; ++m) {
    for (int d = 0; d <= 5; ++d) {
      const Jet j = Jet::constant(0.0, m, d);
      EXPECT_EQ(static_cast<double>(j.size()), std::round(std::tgamma(m + d + 1) / (std::tgamma(m + 1) * std::tgamma(d + 1))));
    }
  }
}

TEST(Jet, SquareOfCoordinate) {
  const auto base = pt({3.0});
  const Jet x = Jet::coordinate(base, 0, 2);
  const Jet s = x * x;
  EXPECT_EQ(s.coefficient(MultiIndex({0})), 9.0);
  EXPECT_EQ(s.coefficient(MultiIndex({1})), 6.0);
  EXPECT_EQ(s.coefficient(MultiIndex({2})), 1.0);
  EXPECT_EQ(s.partial(MultiIndex({2})), 2.0);
}

TEST(Jet, SqrtBinomialSeries) {
  const auto base = pt({0.0});
  const Jet t = Jet::coordinate(base, 0, 2);
  const Jet r = sqrt(1.0 + t);
  EXPECT_DOUBLE_EQ(r.coefficients()[0], 1.0);
  EXPECT_DOUBLE_EQ(r.coefficients()[1], 0.5);
  EXPECT_DOUBLE_EQ(r.coefficients()[2], -0.125);
}

TEST(Jet, AtanSeries) {
  const auto base = pt({0.0});
  const Jet a = atan(Jet::coordinate(base, 0, 3));
  EXPECT_DOUBLE_EQ(a.coefficients()[0], 0.0);
  EXPECT_DOUBLE_EQ(a.coefficients()[1], 1.0);
  EXPECT_NEAR(a.coefficients()[2], 0.0, 1e-16);
  EXPECT_DOUBLE_EQ(a.coefficients()[3], -1.0 / 3.0);
}

TEST(Jet, LogSeries) {
  const auto base = pt({0.0});
  const Jet l = log(1.0 + Jet::coordinate(base, 0, 3));
  EXPECT_DOUBLE_EQ(l.coefficients()[0], 0.0);
  EXPECT_DOUBLE_EQ(l.coefficients()[1], 1.0);
  EXPECT_DOUBLE_EQ(l.coefficients()[2], -0.5);
  EXPECT_DOUBLE_EQ(l.coefficients()[3], 1.0 / 3.0);
}

TEST(Jet, IntegerPower) {
  const auto base = pt({2.0});
  const Jet p = pow(Jet::coordinate(base, 0, 3), 3);
  EXPECT_DOUBLE_EQ(p.value(), 8.0);
  EXPECT_DOUBLE_EQ(p.partial(MultiIndex({1})), 12.0);
  EXPECT_DOUBLE_EQ(p.partial(MultiIndex({2})), 12.0);
  EXPECT_DOUBLE_EQ(p.partial(MultiIndex({3})), 6.0);
}

TEST(Jet, MixedPartialOfMonomial) {
  const auto base = pt({1.0, 1.0});
  const Jet x = Jet::coordinate(base, 0, 3);
  const Jet y = Jet::coordinate(base, 1, 3);
  const Jet f = x * x * y;
  EXPECT_DOUBLE_EQ(extract_partial(f, MultiIndex({1, 1})), 2.0);
  EXPECT_DOUBLE_EQ(extract_partial(f, MultiIndex({0, 0})), 1.0);
  EXPECT_DOUBLE_EQ(extract_partial(f, MultiIndex({2, 1})), 2.0);
}

TEST(Jet, ReciprocalThirdDerivative) {
  const auto base = pt({0.0});
  const Jet f = 1.0 / (1.0 + Jet::coordinate(base, 0, 3));
  EXPECT_DOUBLE_EQ(f.partial(MultiIndex({3})), -6.0);
}

TEST(Jet, DomainErrorsNameConstantTerm) {
  const auto base = pt({0.0});
  const Jet t = Jet::coordinate(base, 0, 2);
  try {
    (void)(1.0 / t);
    FAIL() << "division by a jet with zero constant term must throw";
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find('0'), std::string::npos);
  }
  EXPECT_THROW((void)sqrt(t - 1.0), std::domain_error);
  EXPECT_THROW((void)log(t), std::domain_error);
  EXPECT_THROW((void)sqrt(t), std::domain_error);
}

TEST(Jet, ExtractionAboveTruncationThrows) {
  const auto base = pt({0.0, 0.0});
  const Jet x = Jet::coordinate(base, 0, 2);
  EXPECT_THROW((void)x.partial(MultiIndex({2, 1})), std::out_of_range);
  EXPECT_THROW((void)x.partial(MultiIndex({1})), std::invalid_argument);
}

TEST(Jet, MismatchedVariableCountsThrow) {
  const Jet a = Jet::coordinate(pt({0.0, 0.0}), 0, 2);
  const Jet b = Jet::coordinate(pt({0.0, 0.0, 0.0}), 0, 2);
  EXPECT_THROW((void)(a + b), std::invalid_argument);
  EXPECT_THROW((void)(a * b), std::invalid_argument);
}

TEST(Jet, MixedOrdersTruncateToTheLower) {
  const auto base = pt({1.0, 2.0});
  const Jet a = Jet::coordinate(base, 0, 2);
  const Jet b = Jet::coordinate(base, 1, 4);
  EXPECT_EQ((a * b).order(), 2);
  EXPECT_EQ((a + b).order(), 2);
}

TEST(Jet, DerivativeLowersOrder) {
  const auto base = pt({0.5, -0.25});
  const Jet x = Jet::coordinate(base, 0, 4);
  const Jet y = Jet::coordinate(base, 1, 4);
  const Jet f = x * x * x * y + sqrt(1.0 + x * x + y * y);
  const Jet fx = f.derivative(0);
  EXPECT_EQ(fx.order(), 3);
  EXPECT_NEAR(fx.partial(MultiIndex({1, 2})), f.partial(MultiIndex({2, 2})), 1e-13);
  EXPECT_NEAR(fx.value(), f.partial(MultiIndex({1, 0})), 1e-14);
}

// Mixed partials are stored once per multi-index, so differentiation order cannot matter;
// checked through repeated single-variable derivatives.
TEST(Jet, DerivativeOrderCommutes) {
  const auto base = pt({0.3, 0.7, -0.2});
  std::vector<Jet> v;
  for (int i = 0; i < 3; ++i) v.push_back(Jet::coordinate(base, i, 4));
  const Jet f = atan(v[0] * v[1]) / (2.0 + v[2] * v[0]) + log(3.0 + v[1] * v[2]);
  const double a = f.derivative(0).derivative(1).derivative(2).value();
  const double b = f.derivative(2).derivative(0).derivative(1).value();
  EXPECT_NEAR(a, b, 1e-13);
  EXPECT_NEAR(a, f.partial(MultiIndex({1, 1, 1})), 1e-13);
}

TEST(JetProperty, PolynomialProductsAndSqrtSquare) {
  const VerificationReport r = jet_algebra_battery(11);
  ASSERT_FALSE(r.checks().empty());
  for (const auto& c : r.checks()) EXPECT_TRUE(c.pass) << c.name << " residual " << c.max_residual;
}

TEST(JetProperty, SmoothFunctionsMatchFiniteDifferences) {
  const VerificationReport r = jet_fd_battery(5, 100);
  for (const auto& c : r.checks()) EXPECT_TRUE(c.pass) << c.name << " residual " << c.max_residual;
}
