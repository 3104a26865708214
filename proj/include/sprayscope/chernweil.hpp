#pragma once

/**
 * @file chernweil.hpp
 * @brief Curvature 2-forms of Berwald sprays on the chart and the Pontryagin-form density of Douglas sprays.
 */

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvature.hpp"
#include "forms.hpp"
#include "sampling.hpp"

namespace sprayscope {

/// Thresholds for treating y-dependent data as chart data.
struct FormGate {
  /// max|B| / (1 + max|Gamma|) must stay below this for the Berwald forms to descend.
  double berwald_tol = 1e-8;
  /// spread of the y-independent tensor across the audit sample, relative to 1 + its magnitude.
  double independence_tol = 1e-8;
  int audit_samples = 8;
  std::uint64_t audit_seed = 0x5eed;
};

namespace detail {

/// (1,...,1)/sqrt(n) followed by `count` seeded audit directions.
inline std::vector<Direction> audit_directions(int n, int count, std::uint64_t seed) {
  std::vector<Direction> out;
  out.emplace_back(std::vector<double>(n, 1.0 / std::sqrt(static_cast<double>(n))));
  SampleSpec spec;
  spec.seed = seed;
  for (int i = 0; i < count; ++i) out.push_back(sample_phase_point(n, spec, i).y);
  return out;
}

inline std::string describe(const Direction& y) {
  std::ostringstream os;
  os << "y = (";
  for (int i = 0; i < y.dim(); ++i) os << (i ? ", " : "") << y[i];
  os << ")";
  return os.str();
}

}  // namespace detail

/// Forms together with the audit numbers that certified them.
struct AuditedForms {
  FormMatrix omega;
  double max_berwald = 0.0;  ///< worst relative |B| over the y-sample
  double y_spread = 0.0;     ///< worst relative deviation from the reference-y tensor
};

/// Omega^i_j = 1/2 R^i_jkl dx^k ^ dx^l for a Berwald spray, with the Berwald gate and y-independence audit.
inline AuditedForms berwald_connection_forms_audited(const SprayField& G, const ChartPoint& x,
                                                     const FormGate& gate = {}) {
  const int n = G.dim();
  if (x.dim() != n) throw std::invalid_argument("berwald_connection_forms: point dimension mismatch");
  const auto ys = detail::audit_directions(n, gate.audit_samples, gate.audit_seed);
  AuditedForms out{FormMatrix(n), 0.0, 0.0};
  TensorValue reference;
  for (std::size_t s = 0; s < ys.size(); ++s) {
    detail::SprayExpansion ex(G, x, ys[s], 3);
    const TensorValue B = berwald_tensor(ex);
    const ConnectionCoeffs c = connection_coeffs(ex);
    const double b = relative_magnitude(B, c.Gamma.max_abs());
    out.max_berwald = std::max(out.max_berwald, b);
    if (!(b <= gate.berwald_tol)) {
      std::ostringstream os;
      os << "berwald_connection_forms: spray '" << G.label() << "' is not Berwald at x: max|B| = " << b
         << " (tolerance " << gate.berwald_tol << ") at " << detail::describe(ys[s])
         << "; its curvature forms do not descend to the chart";
      throw std::domain_error(os.str());
    }
    TensorValue R4 = riemann_four_index(ex);
    if (s == 0) {
      reference = std::move(R4);
    } else {
      out.y_spread = std::max(out.y_spread, max_abs_diff(R4, reference) / (1.0 + reference.max_abs()));
    }
  }
  if (!(out.y_spread <= gate.independence_tol)) {
    std::ostringstream os;
    os << "berwald_connection_forms: R^i_jkl varies with y at x by " << out.y_spread << " (tolerance "
       << gate.independence_tol << ")";
    throw std::domain_error(os.str());
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      AltForm& w = out.omega(i, j);
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          if (k != l) w.add_term(std::vector<int>{k, l}, 0.5 * reference(i, j, k, l));
        }
      }
    }
  }
  return out;
}

inline FormMatrix berwald_connection_forms(const SprayField& G, const ChartPoint& x, const FormGate& gate = {}) {
  return berwald_connection_forms_audited(G, x, gate).omega;
}

/// Curvature forms of the hat spray from the y-Hessian H_lj of its scalar R:
/// Omega^i_j = 1/2 H_lj dx^i ^ dx^l. Requires W = 0 and D = 0 at x and n >= 4.
inline AuditedForms hat_curvature_forms_audited(const SprayField& G, const VolumeForm& dV, const ChartPoint& x,
                                                double flatness_tol = 1e-8, const FormGate& gate = {}) {
  const int n = G.dim();
  if (n < 4) {
    throw std::invalid_argument("hat_curvature_forms: the scalar-flag form of the curvature needs n >= 4, got " +
                                std::to_string(n));
  }
  if (x.dim() != n) throw std::invalid_argument("hat_curvature_forms: point dimension mismatch");
  const auto ys = detail::audit_directions(n, gate.audit_samples, gate.audit_seed);
  for (const Direction& y : ys) {
    const FlatnessResiduals r = flatness_residuals(G, x, y);
    if (!(r.weyl <= flatness_tol && r.douglas <= flatness_tol)) {
      std::ostringstream os;
      os << "hat_curvature_forms: spray '" << G.label() << "' is not projectively flat at x: W = " << r.weyl
         << ", D = " << r.douglas << " (tolerance " << flatness_tol << ") at " << detail::describe(y);
      throw std::domain_error(os.str());
    }
  }
  const SprayField hat = hat_spray(G, dV);
  AuditedForms out{FormMatrix(n), 0.0, 0.0};
  TensorValue reference;
  for (std::size_t s = 0; s < ys.size(); ++s) {
    detail::SprayExpansion ex(hat, x, ys[s], 4);
    const Jet& R = ex.Rscalar();
    TensorValue H("dd", n);
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) H(k, l) = detail::ypartial(R, ex, {k, l});
    }
    if (s == 0) {
      reference = std::move(H);
    } else {
      out.y_spread = std::max(out.y_spread, max_abs_diff(H, reference) / (1.0 + reference.max_abs()));
    }
  }
  if (!(out.y_spread <= gate.independence_tol)) {
    std::ostringstream os;
    os << "hat_curvature_forms: the y-Hessian of the hat scalar curvature varies with y by " << out.y_spread
       << " (tolerance " << gate.independence_tol << ")";
    throw std::domain_error(os.str());
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        if (l != i) out.omega(i, j).add_term(std::vector<int>{i, l}, 0.5 * reference(l, j));
      }
    }
  }
  return out;
}

inline FormMatrix hat_curvature_forms(const SprayField& G, const VolumeForm& dV, const ChartPoint& x,
                                      double flatness_tol = 1e-8, const FormGate& gate = {}) {
  return hat_curvature_forms_audited(G, dV, x, flatness_tol, gate).omega;
}

struct PontryaginDensity {
  AltForm form;        ///< sigma_2k(Omega^) / (2 pi)^{2k}
  FormMatrix omega;    ///< curvature forms of the hat spray
  double scale = 0.0;  ///< (max|Omega^|)^{2k} / (2 pi)^{2k}, the natural magnitude of the density
  double max_douglas = 0.0;
};

/// Pontryagin-form density of a Douglas spray via the Berwald curvature forms of its hat spray.
inline PontryaginDensity pontryagin_density(const SprayField& G, const VolumeForm& dV, const ChartPoint& x, int k,
                                            const FormGate& gate = {}) {
  const int n = G.dim();
  if (k < 1 || 4 * k > n) {
    throw std::invalid_argument("pontryagin_density: need 1 <= k and 4k <= n (k = " + std::to_string(k) +
                                ", n = " + std::to_string(n) + ")");
  }
  AuditedForms f;
  try {
    f = berwald_connection_forms_audited(hat_spray(G, dV), x, gate);
  } catch (const std::domain_error& e) {
    // The Berwald curvature of the hat spray is the Douglas curvature of G.
    throw std::domain_error(std::string("pontryagin_density: spray '") + G.label() + "' is not Douglas at x (" +
                            e.what() + ")");
  }
  const double norm = std::pow(2.0 * std::numbers::pi, 2 * k);
  PontryaginDensity out{sigma_r(f.omega, 2 * k), f.omega, std::pow(f.omega.max_abs(), 2 * k) / norm,
                        f.max_berwald};
  out.form *= 1.0 / norm;
  return out;
}

}  // namespace sprayscope
