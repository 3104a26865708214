#pragma once

/**
 * @file suites.hpp
 * @brief Sampled verification batteries: curvature identities, Chern-Weil forms of the hat spray,
 * and the Bryant family. Each battery returns a VerificationReport.
 */

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bryant.hpp"
#include "chernweil.hpp"
#include "curvature.hpp"
#include "families.hpp"
#include "report.hpp"
#include "sampling.hpp"
#include "selftest.hpp"

namespace sprayscope {

struct SuiteTolerances {
  double identity = 1e-8;     ///< cross identities, flatness, projective invariance, hat lemma
  double forced = 1e-9;       ///< identities forced by homogeneity or construction
  double homogeneity = 1e-10;
  double scalar_flag = 1e-7;  ///< hat scalar-flag identity and Chern-Weil vanishing
  double control = 1e-3;      ///< lower bound for control cases
};

struct BatteryParts {
  bool forced = true;
  bool cross = true;
  bool flatness = true;
  bool invariance = true;
  bool hat = true;
  int invariance_factors = 3;
};

namespace detail {

struct PointResiduals {
  double homogeneity = 0, euler = 0, gamma_sym = 0, berwald_sym = 0, berwald_y = 0, riemann_y = 0, r4_antisym = 0,
         weyl_y = 0, weyl_trace = 0, chi_y = 0, douglas_trace = 0;
  double r4_alt = 0, chi_routes = 0, weyl_chi = 0;
  double weyl = 0, douglas = 0, weyl_abs = 0;
  double inv_weyl = 0, inv_douglas = 0;
  double hat_B = 0, hat_S = 0, hat_flag = 0;
};

inline double max_abs_y(const Direction& y) {
  double m = 0.0;
  for (int i = 0; i < y.dim(); ++i) m = std::max(m, std::abs(y[i]));
  return m;
}

inline PointResiduals point_residuals(const SprayFamily& fam, const VolumeForm& dV, const PhaseSample& s,
                                      const BatteryParts& parts, std::uint64_t seed) {
  const SprayField& G = fam.spray;
  const int n = G.dim();
  const Direction& y = s.y;
  const double ym = max_abs_y(y);
  PointResiduals r;

  SprayExpansion ex(G, s.x, y, 4);
  const ConnectionCoeffs c = connection_coeffs(ex);
  const BerwaldPack b = berwald_pack(ex);
  const RiemannPack rp = riemann_pack(ex);
  const SChiPack sc = s_chi_pack(ex, dV);
  const double sR2 = 1.0 + rp.R2.max_abs();
  const double sB = 1.0 + b.B.max_abs();

  if (parts.forced) {
    const auto g = G.values(s.x, y);
    for (double lam : {0.5, 2.0, 7.0}) {
      const auto gl = G.values(s.x, y.scaled(lam));
      double num = 0.0, den = 0.0;
      for (int i = 0; i < n; ++i) {
        num = std::max(num, std::abs(gl[i] - lam * lam * g[i]));
        den = std::max(den, std::abs(gl[i]));
      }
      r.homogeneity = std::max(r.homogeneity, num / (1.0 + den));
    }
    for (int i = 0; i < n; ++i) {
      double ny = 0.0;
      for (int j = 0; j < n; ++j) ny += c.N(i, j) * y[j];
      r.euler = std::max(r.euler, std::abs(ny - 2.0 * g[i]) / (1.0 + c.N.max_abs() * ym));
      double ry = 0.0, wy = 0.0;
      for (int k = 0; k < n; ++k) {
        ry += rp.R2(i, k) * y[k];
        wy += rp.W(i, k) * y[k];
      }
      r.riemann_y = std::max(r.riemann_y, std::abs(ry) / (1.0 + rp.R2.max_abs() * ym));
      r.weyl_y = std::max(r.weyl_y, std::abs(wy) / (1.0 + rp.R2.max_abs() * ym));
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          r.gamma_sym = std::max(r.gamma_sym, std::abs(c.Gamma(i, j, k) - c.Gamma(i, k, j)) / (1.0 + c.Gamma.max_abs()));
          double by = 0.0;
          for (int l = 0; l < n; ++l) {
            by += b.B(i, l, j, k) * y[l];
            const double v = b.B(i, j, k, l);
            r.berwald_sym = std::max({r.berwald_sym, std::abs(v - b.B(i, k, j, l)) / sB, std::abs(v - b.B(i, j, l, k)) / sB});
            r.r4_antisym = std::max(r.r4_antisym, std::abs(rp.R4(i, j, k, l) + rp.R4(i, j, l, k)) / (1.0 + rp.R4.max_abs()));
          }
          r.berwald_y = std::max(r.berwald_y, std::abs(by) / (1.0 + b.B.max_abs() * ym));
        }
      }
    }
    double wt = 0.0;
    for (int m = 0; m < n; ++m) wt += rp.W(m, m);
    r.weyl_trace = std::abs(wt) / sR2;
    double cyR = 0.0, cyS = 0.0;
    for (int k = 0; k < n; ++k) {
      cyR += sc.chi_fromR(k) * y[k];
      cyS += sc.chi_fromS(k) * y[k];
    }
    r.chi_y = std::max(std::abs(cyR) / (1.0 + sc.chi_fromR.max_abs() * ym),
                       std::abs(cyS) / (1.0 + sc.chi_fromS.max_abs() * ym));
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) {
        double t = 0.0;
        for (int m = 0; m < n; ++m) t += b.D(m, m, k, l);
        r.douglas_trace = std::max(r.douglas_trace, std::abs(t) / sB);
      }
    }
  }

  if (parts.cross) {
    r.r4_alt = relative_residual(rp.R4, rp.R4_alt);
    r.chi_routes = relative_residual(sc.chi_fromR, sc.chi_fromS);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        const double rhs = rp.R2(i, k) - (rp.R * delta(i, k) - 0.5 * rp.R_dot(k) * y[i]) +
                           3.0 / (n + 1) * sc.chi_fromR(k) * y[i];
        r.weyl_chi = std::max(r.weyl_chi, std::abs(rp.W(i, k) - rhs) / sR2);
      }
    }
  }

  if (parts.flatness) {
    r.weyl = relative_magnitude(rp.W, rp.R2.max_abs());
    r.douglas = relative_magnitude(b.D, b.B.max_abs());
    r.weyl_abs = rp.W.max_abs();
  }

  if (parts.invariance) {
    for (int p = 0; p < parts.invariance_factors; ++p) {
      const SprayField Gt = projective_modify(G, random_factor(n, seed, 100 + p), "random-P");
      SprayExpansion et(Gt, s.x, y, 4);
      const BerwaldPack bt = berwald_pack(et);
      const RiemannPack rt = riemann_pack(et);
      r.inv_weyl = std::max(r.inv_weyl, max_abs_diff(rt.W, rp.W) / (1.0 + rt.R2.max_abs()));
      r.inv_douglas = std::max(r.inv_douglas, max_abs_diff(bt.D, b.D) / (1.0 + bt.B.max_abs()));
    }
  }

  if (parts.hat && fam.douglas) {
    const SprayField H = hat_spray(G, dV);
    SprayExpansion eh(H, s.x, y, 4);
    const TensorValue Bh = berwald_tensor(eh);
    r.hat_B = max_abs_diff(Bh, b.D) / sB;
    const SChiPack sh = s_chi_pack(eh, dV);
    r.hat_S = std::abs(sh.S) / (1.0 + std::abs(sc.S));
    if (fam.projectively_flat) {
      const TensorValue R4h = riemann_four_index(eh);
      const Jet& Rh = eh.Rscalar();
      TensorValue Hs("dd", n);
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) Hs(k, l) = ypartial(Rh, eh, {k, l});
      }
      const double sH = 1.0 + R4h.max_abs();
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
              const double want = 0.5 * (Hs(l, j) * delta(i, k) - Hs(k, j) * delta(i, l));
              r.hat_flag = std::max(r.hat_flag, std::abs(R4h(i, j, k, l) - want) / sH);
            }
          }
        }
      }
    }
  }
  return r;
}

}  // namespace detail

/// Curvature-module invariant battery at seeded phase points.
inline VerificationReport curvature_battery(const SprayFamily& fam, const VolumeForm& dV, const SampleSpec& spec,
                                            const SuiteTolerances& tol = {}, const BatteryParts& parts = {},
                                            int threads = 1) {
  const int n = fam.spray.dim();
  const auto res = parallel_map(spec.count, threads, [&](int i) {
    return detail::point_residuals(fam, dV, sample_phase_point(n, spec, i), parts, spec.seed);
  });
  const auto worst = [&](double detail::PointResiduals::*field) {
    MaxTracker m;
    for (const auto& r : res) m.update(r.*field);
    return m.value();
  };
  using R = detail::PointResiduals;
  const int N = spec.count;
  VerificationReport rep;
  const std::string p = fam.name + ":";
  if (parts.forced) {
    rep.add_upper(p + "spray_homogeneity", "spray:two_homogeneity", worst(&R::homogeneity), tol.homogeneity, N);
    rep.add_upper(p + "connection_euler", "forced:N_y_equals_2G", worst(&R::euler), tol.forced, N);
    rep.add_upper(p + "gamma_symmetry", "forced:gamma_symmetric", worst(&R::gamma_sym), tol.forced, N);
    rep.add_upper(p + "berwald_symmetry", "forced:berwald_symmetric", worst(&R::berwald_sym), tol.forced, N);
    rep.add_upper(p + "berwald_y_annihilation", "forced:berwald_y_zero", worst(&R::berwald_y), tol.forced, N);
    rep.add_upper(p + "riemann_y_annihilation", "forced:riemann_y_zero", worst(&R::riemann_y), tol.forced, N);
    rep.add_upper(p + "r4_antisymmetry", "forced:riemann_antisymmetric", worst(&R::r4_antisym), tol.forced, N);
    rep.add_upper(p + "weyl_y_annihilation", "forced:weyl_y_zero", worst(&R::weyl_y), tol.forced, N);
    rep.add_upper(p + "weyl_trace", "forced:weyl_trace_free", worst(&R::weyl_trace), tol.forced, N);
    rep.add_upper(p + "chi_y_annihilation", "forced:chi_y_zero", worst(&R::chi_y), tol.forced, N);
    rep.add_upper(p + "douglas_trace", "forced:douglas_trace_free", worst(&R::douglas_trace), tol.forced, N);
  }
  if (parts.cross) {
    rep.add_upper(p + "riemann_one_third_identity", "identity:R4_from_R2_derivatives", worst(&R::r4_alt),
                  tol.identity, N);
    rep.add_upper(p + "chi_two_routes", "identity:chi_from_R_equals_chi_from_S", worst(&R::chi_routes), tol.identity,
                  N);
    rep.add_upper(p + "weyl_chi_relation", "identity:weyl_via_chi", worst(&R::weyl_chi), tol.identity, N);
  }
  if (parts.flatness) {
    if (n < 3) {
      rep.observe(p + "flatness_not_applicable_dim", n);
    } else {
      if (fam.projectively_flat) {
        rep.add_upper(p + "weyl_vanishing", "lemma:flat_iff_W0_D0", worst(&R::weyl), tol.identity, N);
      } else {
        rep.add_lower(p + "weyl_nonzero_control", "lemma:flat_iff_W0_D0", worst(&R::weyl_abs), tol.control, N);
      }
      if (fam.douglas) {
        rep.add_upper(p + "douglas_vanishing", "lemma:flat_iff_W0_D0", worst(&R::douglas), tol.identity, N);
      }
    }
  }
  if (parts.invariance) {
    const int M = N * parts.invariance_factors;
    rep.add_upper(p + "projective_invariance_weyl", "invariance:projective_W_D", worst(&R::inv_weyl), tol.identity, M);
    rep.add_upper(p + "projective_invariance_douglas", "invariance:projective_W_D", worst(&R::inv_douglas),
                  tol.identity, M);
  }
  if (parts.hat && fam.douglas) {
    rep.add_upper(p + "hat_berwald_equals_douglas", "lemma:hat_B_equals_D", worst(&R::hat_B), tol.identity, N);
    rep.add_upper(p + "hat_S_vanishing", "lemma:hat_S_zero", worst(&R::hat_S), tol.identity, N);
    if (fam.projectively_flat) {
      rep.add_upper(p + "hat_scalar_flag_identity", "theorem_proof:hat_scalar_flag", worst(&R::hat_flag),
                    tol.scalar_flag, N);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Curvature dump
// ---------------------------------------------------------------------------

namespace detail {

inline std::string component_label(const std::vector<int>& idx) {
  std::string s;
  for (std::size_t k = 0; k < idx.size(); ++k) s += (k ? "." : "") + std::to_string(idx[k]);
  return s.empty() ? "-" : s;
}

inline void dump_tensor(std::ostream& os, int point, const std::string& name, const TensorValue& t, bool& finite) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double v = t.components()[i];
    finite = finite && std::isfinite(v);
    os << point << ',' << name << ',' << component_label(t.unflatten(i)) << ',' << v << "\r\n";
  }
}

}  // namespace detail

/// Every tensor of the curvature stack at seeded points as CSV rows (point, tensor, component, value).
inline VerificationReport curvature_dump(const SprayFamily& fam, const VolumeForm& dV, const SampleSpec& spec,
                                         std::ostream* csv, int threads = 1) {
  const int n = fam.spray.dim();
  const auto packs = parallel_map(spec.count, threads, [&](int i) {
    const PhaseSample s = sample_phase_point(n, spec, i);
    return curvature_pack(fam.spray, s.x, s.y, &dV);
  });
  std::ostringstream os;
  os << std::setprecision(17) << "point,tensor,component,value\r\n";
  bool finite = true;
  for (int p = 0; p < spec.count; ++p) {
    const CurvaturePack& c = packs[p];
    TensorValue x("u", n), y("u", n);
    for (int i = 0; i < n; ++i) {
      x(i) = c.x[i];
      y(i) = c.y[i];
    }
    detail::dump_tensor(os, p, "x", x, finite);
    detail::dump_tensor(os, p, "y", y, finite);
    detail::dump_tensor(os, p, "N", c.connection.N, finite);
    detail::dump_tensor(os, p, "Gamma", c.connection.Gamma, finite);
    detail::dump_tensor(os, p, "B", c.berwald.B, finite);
    detail::dump_tensor(os, p, "E", c.berwald.E, finite);
    detail::dump_tensor(os, p, "D", c.berwald.D, finite);
    detail::dump_tensor(os, p, "R2", c.riemann.R2, finite);
    detail::dump_tensor(os, p, "R4", c.riemann.R4, finite);
    detail::dump_tensor(os, p, "R4_alt", c.riemann.R4_alt, finite);
    detail::dump_tensor(os, p, "R", TensorValue::scalar(c.riemann.R), finite);
    detail::dump_tensor(os, p, "A", c.riemann.A, finite);
    detail::dump_tensor(os, p, "W", c.riemann.W, finite);
    detail::dump_tensor(os, p, "tau", c.riemann.tau, finite);
    detail::dump_tensor(os, p, "tau_residual", TensorValue::scalar(c.riemann.tau_residual), finite);
    detail::dump_tensor(os, p, "S", TensorValue::scalar(c.s_chi->S), finite);
    detail::dump_tensor(os, p, "chi_fromR", c.s_chi->chi_fromR, finite);
    detail::dump_tensor(os, p, "chi_fromS", c.s_chi->chi_fromS, finite);
  }
  if (csv) *csv << os.str();
  VerificationReport rep;
  rep.add_upper(fam.name + ":curvature_values_finite", "curvature:stack", finite ? 0.0 : 1.0, 0.0, spec.count);
  return rep;
}

// ---------------------------------------------------------------------------
// Chern-Weil forms
// ---------------------------------------------------------------------------

struct PontryaginOptions {
  int k = 1;
  /// Points (from the start of the sample) at which the two hat-form routes are compared.
  int cross_check_points = 4;
};

/// Pontryagin-form density of the hat spray at seeded chart points. Projectively flat families
/// must give sigma_2k = 0; the random Berwald control must give a nonzero sigma_2 of its own forms.
inline VerificationReport pontryagin_battery(const SprayFamily& fam, const VolumeForm& dV, const SampleSpec& spec,
                                             const SuiteTolerances& tol = {}, const PontryaginOptions& opt = {},
                                             int threads = 1) {
  const int n = fam.spray.dim();
  const std::string p = fam.name + ":";
  VerificationReport rep;
  if (opt.k < 1 || 4 * opt.k > n) {
    rep.add_failure(p + "pontryagin_density", "theorem:sigma2k_vanishing",
                    "need 4k <= n (k = " + std::to_string(opt.k) + ", n = " + std::to_string(n) + ")");
    return rep;
  }
  struct PointOut {
    std::string error;
    double vanishing = 0.0;  // max|sigma_2k| / (1 + scale)
    double density_max = 0.0;
    double sigma1 = 0.0;
    double two_route = 0.0;
    bool two_route_done = false;
    double control = 0.0;
    double control_oracle = 0.0;
  };
  const auto out = parallel_map(spec.count, threads, [&](int i) {
    PointOut o;
    const ChartPoint x = sample_phase_point(n, spec, i).x;
    try {
      const PontryaginDensity d = pontryagin_density(fam.spray, dV, x, opt.k);
      o.density_max = d.form.max_abs();
      o.vanishing = o.density_max / (1.0 + d.scale);
      o.sigma1 = sigma_r(d.omega, 1).max_abs();
      if (fam.projectively_flat && i < opt.cross_check_points) {
        const FormMatrix a = hat_curvature_forms(fam.spray, dV, x);
        o.two_route = a.max_abs_diff(d.omega) / (1.0 + d.omega.max_abs());
        o.two_route_done = true;
      }
      if (!fam.projectively_flat && fam.berwald) {
        const FormMatrix om = berwald_connection_forms(fam.spray, x);
        const AltForm s2 = sigma_r(om, 2);
        o.control = s2.max_abs();
        o.control_oracle = (s2 - det_expansion_coefficient(om, 2)).max_abs() / (1.0 + o.control);
      }
    } catch (const std::exception& e) {
      o.error = e.what();
    }
    return o;
  });
  for (int i = 0; i < spec.count; ++i) {
    if (!out[i].error.empty()) {
      rep.add_failure(p + "pontryagin_density", "lemma:pontryagin_representative",
                      "point " + std::to_string(i) + ": " + out[i].error, spec.count);
      return rep;
    }
  }
  MaxTracker van, dens, s1, two, ctrl_or;
  double ctrl_min = std::numeric_limits<double>::infinity();
  int two_count = 0;
  for (const auto& o : out) {
    van.update(o.vanishing);
    dens.update(o.density_max);
    s1.update(o.sigma1);
    if (o.two_route_done) {
      two.update(o.two_route);
      ++two_count;
    }
    ctrl_min = std::min(ctrl_min, o.control);
    ctrl_or.update(o.control_oracle);
  }
  const std::string s2k = "sigma" + std::to_string(2 * opt.k);
  rep.observe(p + s2k + "_max_abs", dens.value());
  rep.observe(p + "sigma1_max_abs", s1.value());
  if (fam.projectively_flat) {
    rep.add_upper(p + s2k + "_vanishing", "theorem:sigma2k_vanishing", van.value(), tol.scalar_flag, spec.count);
    if (two_count > 0 && n >= 4) {
      rep.add_upper(p + "hat_forms_two_routes", "theorem_proof:hat_curvature_forms", two.value(), tol.identity,
                    two_count);
    }
  }
  if (!fam.projectively_flat && fam.berwald && opt.k == 1) {
    rep.add_lower(p + "sigma2_nonzero_control", "theorem:sigma2k_vanishing", ctrl_min, tol.control, spec.count);
    rep.add_upper(p + "sigma2_control_oracle", "chern_weil:sigma_r_expansion", ctrl_or.value(), 1e-12, spec.count);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Bryant family
// ---------------------------------------------------------------------------

struct BryantOptions {
  double alpha = std::numbers::pi / 4;
  int dim = 3;
  double u_max = 3.0;
  double step = 1e-3;
  /// Base step of the step-halving audit (fine steps are roundoff-limited).
  double convergence_step = 0.1;
  double ode_tol = 1e-9;
  double s_tol = 1e-7;
  double limit_tol = 1e-5;
  double fit_tol = 1e-7;
  double flat_tol = 1e-7;
  double relation_tol = 1e-5;
  double min_order = 3.5;
};

inline VerificationReport bryant_battery(const BryantOptions& opt, const SampleSpec& spec, std::ostream* csv = nullptr,
                                         int threads = 1) {
  VerificationReport rep;
  const BryantParams prm(opt.alpha);
  const int n = opt.dim;
  const OdeSolution sol = solve_dep(prm, opt.u_max, opt.step);
  if (csv) sol.write_csv(*csv);
  rep.add_upper("bryant:ode_residual", "bryant:radial_ode", sol.max_residual(), opt.ode_tol,
                static_cast<int>(sol.u().size()));
  rep.add_upper("bryant:ode_even_extension_residual", "bryant:radial_ode_even", sol.reflected_max_residual(),
                opt.ode_tol, static_cast<int>(2 * sol.u().size() - 1));
  const ConvergenceAudit audit = convergence_audit(prm, opt.u_max, opt.convergence_step);
  rep.add_lower("bryant:rk4_observed_order", "bryant:radial_ode", audit.observed_order, opt.min_order, 3);

  // P-relation points need u = 1/|x| on the grid
  SampleSpec ps = spec;
  ps.radius = 1.5;
  ps.min_radius = std::max(0.4, 1.01 / opt.u_max);
  if (ps.min_radius >= ps.radius) {
    rep.add_failure("bryant:p_relation", "bryant:p_relation", "u_max too small for the sampling shell");
    return rep;
  }
  struct PointOut {
    double s_diff = 0, s_chain = 0, limit = 0, fit = 0, weyl = 0, douglas = 0, relation = 0, min_eig = 0, homog = 0;
    std::string error;
  };
  const BryantParams near_zero(1e-6);
  const SprayField G = bryant_spray(prm, n);
  const SprayField G0 = sphere_spray(n);
  const MetricField F = bryant_metric(prm, n);
  const auto out = parallel_map(spec.count, threads, [&](int i) {
    PointOut o;
    try {
      const PhaseSample s = sample_phase_point(n, ps, i);
      double t = 0.0;
      for (int k = 0; k < n; ++k) t += s.x[k] * s.x[k];
      const double u = 1.0 / std::sqrt(t);
      const double st = s_from_t(sol, t);
      o.s_diff = std::abs(s_from_r(sol, u) - st);
      // u-form obtained from the t-form by the chain rule: (3u^3 + u) in place of (3u^3 + 5u)
      const auto v = sol.at(u);
      const double u2 = u * u;
      o.s_chain = std::abs(u2 * (1 + u2) * (1 + u2) * v.d2r + (3 * u2 * u + u) * (u2 + 1) * v.dr - st);
      const PhaseJets ph(s.x, s.y, 0);
      const double sph = std::sqrt(sphere_quadratic(ph.xs(), ph.ys()).value());
      o.limit = std::abs(bryant_F(near_zero, ph.xs(), ph.ys()).value() - sph) / sph;
      const double f1 = bryant_F(prm, ph.xs(), ph.ys()).value();
      const PhaseJets ph2(s.x, s.y.scaled(2.0), 0);
      o.homog = std::abs(bryant_F(prm, ph2.xs(), ph2.ys()).value() - 2.0 * f1) / (1.0 + f1);
      o.min_eig = F.fundamental_tensor(s.x, s.y).selfadjointView<Eigen::Lower>().eigenvalues().minCoeff();
      o.fit = extract_P(G, G0, s.x, s.y, std::numeric_limits<double>::infinity()).residual;
      if (n >= 3) {
        const FlatnessResiduals fr = flatness_residuals(G, s.x, s.y);
        o.weyl = fr.weyl;
        o.douglas = fr.douglas;
      }
      o.relation = verify_P_relation(prm, sol, s.x, s.y).residual;
    } catch (const std::exception& e) {
      o.error = e.what();
    }
    return o;
  });
  for (int i = 0; i < spec.count; ++i) {
    if (!out[i].error.empty()) {
      rep.add_failure("bryant:p_relation", "bryant:p_relation", "point " + std::to_string(i) + ": " + out[i].error,
                      spec.count);
      return rep;
    }
  }
  const auto worst = [&](double PointOut::*f) {
    MaxTracker m;
    for (const auto& o : out) m.update(o.*f);
    return m.value();
  };
  double min_eig = std::numeric_limits<double>::infinity();
  for (const auto& o : out) min_eig = std::min(min_eig, o.min_eig);
  const int N = spec.count;
  rep.add_upper("bryant:s_formula_cross_check", "bryant:s_u_vs_s_t", worst(&PointOut::s_diff), opt.s_tol, N);
  rep.observe("bryant:s_chain_rule_u_form_max_diff", worst(&PointOut::s_chain));
  rep.add_upper("bryant:alpha_zero_sphere_limit", "bryant:alpha_limit", worst(&PointOut::limit), opt.limit_tol, N);
  rep.add_upper("bryant:F_homogeneity", "bryant:metric", worst(&PointOut::homog), 1e-12, N);
  rep.add_lower("bryant:fundamental_tensor_min_eigenvalue", "bryant:metric", min_eig, 0.0, N);
  rep.add_upper("bryant:projective_fit_residual", "bryant:projectively_related_to_sphere", worst(&PointOut::fit),
                opt.fit_tol, N);
  if (n >= 3) {
    rep.add_upper("bryant:weyl_vanishing", "lemma:flat_iff_W0_D0", worst(&PointOut::weyl), opt.flat_tol, N);
    rep.add_upper("bryant:douglas_vanishing", "lemma:flat_iff_W0_D0", worst(&PointOut::douglas), opt.flat_tol, N);
  }
  rep.add_upper("bryant:p_relation", "bryant:p_relation", worst(&PointOut::relation), opt.relation_tol, N);
  return rep;
}

}  // namespace sprayscope
