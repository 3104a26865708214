#include <gtest/gtest.h>

#include <cmath>

#include "sprayscope/curvature.hpp"
#include "sprayscope/families.hpp"
#include "sprayscope/suites.hpp"

using namespace sprayscope;

namespace {

SampleSpec spec(int count, std::uint64_t seed = 42) {
  SampleSpec s;
  s.seed = seed;
  s.count = count;
  return s;
}

void expect_all_pass(const VerificationReport& r) {
  for (const auto& c : r.checks()) {
    EXPECT_TRUE(c.pass) << c.name << ": " << c.max_residual << " vs " << c.tolerance << " " << c.note;
  }
}

}  // namespace

TEST(Curvature, FlatSprayHasZeroStack) {
  const VolumeForm dV = unit_volume(4);
  const CurvaturePack p = curvature_pack(flat_spray(4), ChartPoint({0.5, 0.1, -0.3, 1.0}),
                                         Direction({1.0, 0.2, 0.3, -0.4}), &dV);
  for (const TensorValue* t : {&p.connection.N, &p.connection.Gamma, &p.berwald.B, &p.berwald.E, &p.berwald.D,
                               &p.riemann.R2, &p.riemann.R4, &p.riemann.R4_alt, &p.riemann.W}) {
    EXPECT_EQ(t->max_abs(), 0.0);
  }
  EXPECT_EQ(p.riemann.R, 0.0);
  EXPECT_EQ(p.s_chi->S, 0.0);
  EXPECT_EQ(p.s_chi->chi_fromR.max_abs(), 0.0);
  EXPECT_EQ(p.s_chi->chi_fromS.max_abs(), 0.0);
}

TEST(Curvature, SphereConnectionVanishesAtOrigin) {
  const ConnectionCoeffs c = connection_coeffs(sphere_spray(3), ChartPoint({0, 0, 0}), Direction({0.4, -1.0, 2.0}));
  EXPECT_LE(c.Gamma.max_abs(), 1e-15);
  EXPECT_LE(c.N.max_abs(), 1e-15);
}

TEST(Curvature, SphereRiemannCurvatureAtOrigin) {
  const int n = 4;
  const Direction y({1.0, 0.0, 0.0, 0.0});
  const RiemannPack r = riemann_pack(sphere_spray(n), ChartPoint({0, 0, 0, 0}), y);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) EXPECT_NEAR(r.R2(i, k), (i == k && i != 0) ? 1.0 : 0.0, 1e-14);
  }
  // R^i_k = |y|^2 delta - y^i y_k for a general y
  const Direction z({0.3, -1.2, 0.5, 2.0});
  const RiemannPack q = riemann_pack(sphere_spray(n), ChartPoint({0, 0, 0, 0}), z);
  const double zz = z.norm() * z.norm();
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) EXPECT_NEAR(q.R2(i, k), (i == k ? zz : 0.0) - z[i] * z[k], 1e-13);
  }
  EXPECT_NEAR(q.R, zz, 1e-13);
  EXPECT_LE(q.tau_residual, 1e-14);
}

TEST(Curvature, EulerIdentityForConnection) {
  const SprayFamily fam = make_spray_family("sphere-cubic", 4);
  for (const auto& s : sample_phase_points(4, spec(32))) {
    const ConnectionCoeffs c = connection_coeffs(fam.spray, s.x, s.y);
    const auto g = fam.spray.values(s.x, s.y);
    for (int i = 0; i < 4; ++i) {
      double ny = 0.0;
      for (int j = 0; j < 4; ++j) ny += c.N(i, j) * s.y[j];
      EXPECT_NEAR(ny, 2.0 * g[i], 1e-10 * (1.0 + std::abs(g[i])));
    }
  }
}

TEST(Curvature, RiemannianSprayHasNoBerwaldCurvature) {
  const SprayField G = riemannian_spray(sphere_metric(4));
  for (const auto& s : sample_phase_points(4, spec(8, 3))) {
    const BerwaldPack b = berwald_pack(G, s.x, s.y);
    EXPECT_LE(b.B.max_abs(), 1e-12);
    EXPECT_LE(b.E.max_abs(), 1e-12);
    EXPECT_LE(b.D.max_abs(), 1e-12);
  }
}

TEST(Curvature, FlatPlusNormIsDouglasNotBerwald) {
  const SprayField G = projective_modify(flat_spray(4), norm_factor(1.0));
  double bmax = 0.0;
  for (const auto& s : sample_phase_points(4, spec(32))) {
    const BerwaldPack b = berwald_pack(G, s.x, s.y);
    EXPECT_LE(relative_magnitude(b.D, b.B.max_abs()), 1e-8);
    bmax = std::max(bmax, b.B.max_abs());
    for (int k = 0; k < 4; ++k) {
      for (int l = 0; l < 4; ++l) {
        double t = 0.0;
        for (int m = 0; m < 4; ++m) t += b.D(m, m, k, l);
        EXPECT_NEAR(t, 0.0, 1e-9 * (1.0 + b.B.max_abs()));
      }
    }
  }
  EXPECT_GT(bmax, 0.1);
}

TEST(Curvature, ExponentialVolumeOnFlatSpray) {
  const int n = 3;
  const VolumeForm dV = make_volume("exp-linear", n);
  for (const auto& s : sample_phase_points(n, spec(32, 5))) {
    const SChiPack p = s_chi_pack(flat_spray(n), dV, s.x, s.y);
    EXPECT_NEAR(p.S, -s.y[0], 1e-14);
    EXPECT_LE(max_abs_diff(p.chi_fromR, p.chi_fromS), 1e-9);
  }
}

TEST(Curvature, SHomogeneousOfDegreeOne) {
  const SprayFamily fam = make_spray_family("randers", 3);
  const VolumeForm dV = make_volume("exp-quadratic", 3);
  const ChartPoint x({0.4, -0.2, 0.9});
  const Direction y({0.7, 0.1, -0.5});
  const double s1 = s_chi_pack(fam.spray, dV, x, y).S;
  const double s2 = s_chi_pack(fam.spray, dV, x, y.scaled(3.0)).S;
  EXPECT_NEAR(s2, 3.0 * s1, 1e-12 * (1.0 + std::abs(s2)));
}

TEST(Curvature, SphereWithMetricVolumeHasNoChi) {
  const int n = 4;
  const VolumeForm dV = sphere_volume(n);
  for (const auto& s : sample_phase_points(n, spec(32, 6))) {
    const SChiPack p = s_chi_pack(sphere_spray(n), dV, s.x, s.y);
    EXPECT_LE(std::abs(p.S), 1e-12);
    EXPECT_LE(p.chi_fromR.max_abs(), 1e-9);
    EXPECT_LE(p.chi_fromS.max_abs(), 1e-9);
  }
}

TEST(Curvature, WeylWithoutSCurvature) {
  const int n = 4;
  const SprayField G = sphere_spray(n);
  const VolumeForm dV = sphere_volume(n);
  for (const auto& s : sample_phase_points(n, spec(8, 7))) {
    const CurvaturePack p = curvature_pack(G, s.x, s.y, &dV);
    ASSERT_LE(std::abs(p.s_chi->S), 1e-12);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        const double rhs = p.riemann.R2(i, k) - (p.riemann.R * (i == k) - 0.5 * p.riemann.R_dot(k) * s.y[i]);
        worst = std::max(worst, std::abs(p.riemann.W(i, k) - rhs));
      }
    }
    EXPECT_LE(worst, 1e-8 * (1.0 + p.riemann.R2.max_abs()));
  }
}

TEST(Curvature, HatOfZeroSIsTheSameSpray) {
  const SprayField G = flat_spray(3);
  const SprayField H = hat_spray(G, unit_volume(3));
  const ChartPoint x({0.1, 0.2, 0.3});
  const Direction y({1.0, -1.0, 0.5});
  EXPECT_EQ(H.values(x, y), G.values(x, y));
  EXPECT_THROW(hat_spray(G, unit_volume(4)), std::invalid_argument);
}

TEST(Curvature, HatLemmaOnSphereFamily) {
  const int n = 4;
  const VolumeForm dV = unit_volume(n);
  for (const std::string name : {"sphere", "sphere-norm", "sphere-cubic"}) {
    const SprayFamily fam = make_spray_family(name, n);
    const SprayField H = hat_spray(fam.spray, dV);
    for (const auto& s : sample_phase_points(n, spec(32, 8))) {
      const SChiPack sh = s_chi_pack(H, dV, s.x, s.y);
      EXPECT_LE(std::abs(sh.S), 1e-9) << name;
      const BerwaldPack b = berwald_pack(fam.spray, s.x, s.y);
      EXPECT_LE(max_abs_diff(berwald_pack(H, s.x, s.y).B, b.D), 1e-8 * (1.0 + b.B.max_abs())) << name;
    }
  }
}

TEST(Curvature, ProjectiveFlatnessTest) {
  const int n = 4;
  for (const std::string name : {"sphere", "sphere-norm", "sphere-cubic"}) {
    expect_all_pass(projective_flatness_test(make_spray_family(name, n).spray, spec(32)));
  }
  const VerificationReport flat = projective_flatness_test(flat_spray(n), spec(16));
  for (const auto& c : flat.checks()) EXPECT_LE(c.max_residual, 1e-12);
  const VerificationReport berwald = projective_flatness_test(make_spray_family("berwald-random", n).spray, spec(16));
  EXPECT_FALSE(berwald.find("weyl_vanishing")->pass);
  EXPECT_THROW(projective_flatness_test(flat_spray(2), spec(4)), std::invalid_argument);
}

TEST(Curvature, RandomBerwaldWeylIsLarge) {
  const SprayField G = make_spray_family("berwald-random", 4).spray;
  double w = 0.0;
  for (const auto& s : sample_phase_points(4, spec(16, 9))) w = std::max(w, riemann_pack(G, s.x, s.y).W.max_abs());
  EXPECT_GT(w, 1e-3);
}

TEST(Curvature, InsufficientExpansionOrderIsAnInternalError) {
  detail::SprayExpansion ex(sphere_spray(3), ChartPoint({0.1, 0.2, 0.3}), Direction({1.0, 0.0, 0.0}), 2);
  EXPECT_NO_THROW((void)connection_coeffs(ex));
  EXPECT_THROW((void)riemann_pack(ex), std::logic_error);
}

class CurvatureBattery : public ::testing::TestWithParam<std::string> {};

TEST_P(CurvatureBattery, AllIdentitiesHold) {
  const int n = 4;
  const SprayFamily fam = make_spray_family(GetParam(), n);
  const VerificationReport r = curvature_battery(fam, make_volume("exp-quadratic", n), spec(6, 21));
  EXPECT_GE(r.checks().size(), 17u);
  expect_all_pass(r);
}

INSTANTIATE_TEST_SUITE_P(AllFamilies, CurvatureBattery, ::testing::ValuesIn(spray_family_names()),
                         [](const auto& info) {
                           std::string s = info.param;
                           for (char& c : s) {
                             if (c == '-') c = '_';
                           }
                           return s;
                         });

TEST(Curvature, BatteryResultsIndependentOfThreads) {
  const SprayFamily fam = make_spray_family("flat-cubic", 3);
  const VolumeForm dV = make_volume("exp-linear", 3);
  const VerificationReport a = curvature_battery(fam, dV, spec(8), {}, {}, 1);
  const VerificationReport b = curvature_battery(fam, dV, spec(8), {}, {}, 3);
  ASSERT_EQ(a.checks().size(), b.checks().size());
  for (std::size_t i = 0; i < a.checks().size(); ++i) {
    EXPECT_EQ(a.checks()[i].max_residual, b.checks()[i].max_residual) << a.checks()[i].name;
  }
}

TEST(Curvature, DumpHasOneRowPerComponent) {
  const int n = 3;
  std::ostringstream os;
  const VerificationReport r =
      curvature_dump(make_spray_family("sphere", n), unit_volume(n), spec(2), &os);
  EXPECT_TRUE(r.all_pass());
  const std::string text = os.str();
  EXPECT_EQ(text.rfind("point,tensor,component,value\r\n", 0), 0u);
  std::size_t rows = 0;
  for (char c : text) rows += c == '\n';
  const std::size_t n2 = n * n, n3 = n2 * n, n4 = n3 * n;
  const std::size_t per_point = 2 * n     // x, y
                                + n2 + n3  // N, Gamma
                                + n4 + n2 + n4  // B, E, D
                                + n2 + 2 * n4 + 1  // R2, R4, R4_alt, R
                                + 2 * n2 + n + 1  // A, W, tau, tau_residual
                                + 1 + 2 * n;  // S, chi from both routes
  EXPECT_EQ(rows, 1 + 2 * per_point);
}
