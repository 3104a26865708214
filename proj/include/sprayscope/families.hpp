#pragma once

/**
 * @file families.hpp
 * @brief Named spray families and volume forms, plus seeded random projective factors.
 */

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bryant.hpp"
#include "sampling.hpp"
#include "spray.hpp"

namespace sprayscope {

// ---------------------------------------------------------------------------
// Projective factors (1-homogeneous in y)
// ---------------------------------------------------------------------------

/// 0.3 |y|.
inline PhaseFunction norm_factor(double c = 0.3) {
  return [c](const PhaseJets& p) { return c * sqrt(detail::dot(p.ys(), p.ys())); };
}

/// sum_i (0.2 + 0.1 x^{i+1}) y^i; linear in y, so G + P y stays quadratic.
inline PhaseFunction linear_factor() {
  return [](const PhaseJets& p) {
    const int n = p.dim();
    Jet s = p.constant(0.0);
    for (int i = 0; i < n; ++i) s += (0.2 + 0.1 * p.x((i + 1) % n)) * p.y(i);
    return s;
  };
}

/// 0.2 ((y^0)^3 + x^0 y^1 (y^2)^2) / |y|^2 + 0.1 sqrt(|y|^2 + (y^0 + y^1)^2).
inline PhaseFunction cubic_factor() {
  return [](const PhaseJets& p) {
    const Jet yy = detail::dot(p.ys(), p.ys());
    const Jet& y0 = p.y(0);
    const Jet& y1 = p.y(1);
    const Jet& y2 = p.y(2 % p.dim());
    const Jet num = y0 * y0 * y0 + p.x(0) * y1 * y2 * y2;
    const Jet w = y0 + y1;
    return 0.2 * num / yy + 0.1 * sqrt(yy + w * w);
  };
}

/// Seeded random admissible P = a_i(x) y^i + b sqrt(y^T M y) + c (w.y)^3 / |y|^2 with a_i affine in x
/// and M symmetric positive definite.
inline PhaseFunction random_factor(int n, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  std::vector<double> a0(n), a1(n * n), w(n), M(n * n);
  for (double& v : a0) v = rng.uniform(-0.3, 0.3);
  for (double& v : a1) v = rng.uniform(-0.1, 0.1);
  for (double& v : w) v = rng.uniform(-0.5, 0.5);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = rng.uniform(-0.2, 0.2);
      M[i * n + j] = M[j * n + i] = v + (i == j ? 1.0 : 0.0);
    }
  }
  const double b = rng.uniform(0.1, 0.4);
  const double c = rng.uniform(-0.3, 0.3);
  return [=](const PhaseJets& p) {
    Jet lin = p.constant(0.0), q = p.constant(0.0), wy = p.constant(0.0);
    for (int i = 0; i < n; ++i) {
      Jet ai = p.constant(a0[i]);
      for (int j = 0; j < n; ++j) ai += a1[i * n + j] * p.x(j);
      lin += ai * p.y(i);
      wy += w[i] * p.y(i);
      for (int j = 0; j < n; ++j) q += M[i * n + j] * p.y(i) * p.y(j);
    }
    return lin + b * sqrt(q) + c * wy * wy * wy / detail::dot(p.ys(), p.ys());
  };
}

// ---------------------------------------------------------------------------
// Named sprays
// ---------------------------------------------------------------------------

/// G^i = 1/2 Gamma^i_jk(x) y^j y^k with Gamma affine in x and seeded symmetric coefficients.
/// An x-independent Gamma would give Omega = omega ^ omega, whose invariant polynomials all vanish.
inline SprayField random_berwald_spray(int n, std::uint64_t seed = 7) {
  CounterRng rng(seed, 0);
  // gamma[((i * n + j) * n + k) * (n + 1) + m]: m = 0 constant term, m = 1 + l coefficient of x^l
  const int w = n + 1;
  std::vector<double> gamma(n * n * n * w);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k <= j; ++k) {
        for (int m = 0; m < w; ++m) {
          gamma[((i * n + j) * n + k) * w + m] = gamma[((i * n + k) * n + j) * w + m] = rng.uniform(-0.5, 0.5);
        }
      }
    }
  }
  return SprayField(
      n,
      [n, w, gamma](const PhaseJets& p) {
        std::vector<Jet> g(n, p.constant(0.0));
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
              const double* c = &gamma[((i * n + j) * n + k) * w];
              Jet gam = p.constant(c[0]);
              for (int l = 0; l < n; ++l) gam += c[1 + l] * p.x(l);
              g[i] += 0.5 * gam * p.y(j) * p.y(k);
            }
          }
        }
        return g;
      },
      "berwald-random");
}

/// f = 0.1 x^0 / sqrt(1 + |x|^2), the potential of the default Randers example.
inline PointFunction randers_potential() {
  return [](std::span<const Jet> x) { return 0.1 * x[0] / sqrt(1.0 + detail::dot(x, x)); };
}

struct SprayFamily {
  std::string name;
  SprayField spray;
  bool projectively_flat = false;
  bool berwald = false;
  bool douglas = false;
  /// Predicted projective factor relative to the sphere spray, when known in closed form.
  std::optional<PhaseFunction> predicted_P;
};

struct FamilyOptions {
  double alpha = std::numbers::pi / 4;
  std::uint64_t seed = 7;
};

inline const std::vector<std::string>& spray_family_names() {
  static const std::vector<std::string> names{
      "flat",   "flat-norm", "flat-linear", "flat-cubic",     "sphere",          "sphere-norm",    "sphere-cubic",
      "randers", "bryant",   "berwald-random", "riemann-sphere", "finsler-sphere",
  };
  return names;
}

inline SprayFamily make_spray_family(const std::string& name, int n, const FamilyOptions& opt = {}) {
  if (n < 2) throw std::invalid_argument("spray family '" + name + "': dimension must be >= 2");
  const auto flat_family = [&](SprayField s, bool berwald) {
    return SprayFamily{name, std::move(s), true, berwald, true, std::nullopt};
  };
  if (name == "flat") return flat_family(flat_spray(n), true);
  if (name == "flat-norm") return flat_family(projective_modify(flat_spray(n), norm_factor(), "0.3|y|"), false);
  if (name == "flat-linear") return flat_family(projective_modify(flat_spray(n), linear_factor(), "linear"), true);
  if (name == "flat-cubic") return flat_family(projective_modify(flat_spray(n), cubic_factor(), "cubic"), false);
  if (name == "sphere") return flat_family(sphere_spray(n), true);
  if (name == "sphere-norm") return flat_family(projective_modify(sphere_spray(n), norm_factor(), "0.3|y|"), false);
  if (name == "sphere-cubic") return flat_family(projective_modify(sphere_spray(n), cubic_factor(), "cubic"), false);
  if (name == "riemann-sphere") return flat_family(riemannian_spray(sphere_metric(n)), true);
  if (name == "finsler-sphere") return flat_family(finsler_spray(sphere_norm(n)), true);
  if (name == "randers") {
    RandersSpray r = randers_sphere_spray(n, randers_potential());
    return SprayFamily{name, std::move(r.spray), true, false, true, std::move(r.predicted_P)};
  }
  if (name == "bryant") return SprayFamily{name, bryant_spray(BryantParams(opt.alpha), n), true, false, true, std::nullopt};
  if (name == "berwald-random") return SprayFamily{name, random_berwald_spray(n, opt.seed), false, true, true, std::nullopt};
  std::string known;
  for (const auto& s : spray_family_names()) known += (known.empty() ? "" : ", ") + s;
  throw std::invalid_argument("unknown spray family '" + name + "' (known: " + known + ")");
}

// ---------------------------------------------------------------------------
// Named volume forms
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& volume_names() {
  static const std::vector<std::string> names{"unit", "sphere", "exp-linear", "exp-quadratic"};
  return names;
}

inline VolumeForm make_volume(const std::string& name, int n) {
  if (name == "unit") return unit_volume(n);
  if (name == "sphere") return sphere_volume(n);
  if (name == "exp-linear") {
    return exponential_volume(n, [](std::span<const Jet> x) { return 1.0 * x[0]; }, "exp-linear");
  }
  if (name == "exp-quadratic") {
    return exponential_volume(
        n,
        [](std::span<const Jet> x) {
          const std::size_t m = x.size();
          return 0.3 * x[0] - 0.2 * x[1 % m] * x[2 % m] + 0.1 * x[m - 1] * x[m - 1];
        },
        "exp-quadratic");
  }
  std::string known;
  for (const auto& s : volume_names()) known += (known.empty() ? "" : ", ") + s;
  throw std::invalid_argument("unknown volume form '" + name + "' (known: " + known + ")");
}

}  // namespace sprayscope
