#pragma once

/**
 * @file selftest.hpp
 * @brief Seeded batteries for the jet kernel, the finite-difference oracle and the exterior-algebra kernel.
 */

#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "families.hpp"
#include "forms.hpp"
#include "oracle.hpp"
#include "report.hpp"
#include "sampling.hpp"

namespace sprayscope {

// ---------------------------------------------------------------------------
// Brute-force determinant expansion
// ---------------------------------------------------------------------------

/// t^r coefficient of det(I + t Omega), expanded by the Leibniz formula over all of S_n with
/// form-valued polynomial entries. Independent of sigma_r's principal-minor enumeration.
inline AltForm det_expansion_coefficient(const FormMatrix& omega, int r) {
  const int n = omega.size();
  const int deg = omega.degree();
  if (r < 0 || r * deg > n) throw std::invalid_argument("det_expansion_coefficient: degree exceeds dimension");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  AltForm total(n, r * deg);
  do {
    int inversions = 0;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) inversions += perm[a] > perm[b];
    }
    // poly[s] = t^s coefficient of prod_{i < row} (delta + t Omega)
    std::vector<std::optional<AltForm>> poly(r + 1);
    poly[0] = AltForm::scalar(n, 1.0);
    for (int i = 0; i < n; ++i) {
      const int j = perm[i];
      std::vector<std::optional<AltForm>> next(r + 1);
      for (int s = 0; s <= r; ++s) {
        if (i == j && poly[s]) next[s] = *poly[s];
        if (s > 0 && poly[s - 1]) {
          AltForm w = wedge(*poly[s - 1], omega(i, j));
          if (next[s]) {
            *next[s] += w;
          } else {
            next[s] = std::move(w);
          }
        }
      }
      poly = std::move(next);
    }
    if (poly[r]) {
      if (inversions & 1) {
        total -= *poly[r];
      } else {
        total += *poly[r];
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

inline AltForm random_form(int n, int p, CounterRng& rng) {
  AltForm f(n, p);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.uniform(-1.0, 1.0);
  return f;
}

/// Integer coefficients in [-5, 5], so that sums of products are exact in double precision.
inline AltForm random_integer_form(int n, int p, CounterRng& rng) {
  AltForm f(n, p);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::floor(rng.uniform(-5.0, 6.0));
  return f;
}

inline FormMatrix random_form_matrix(int n, CounterRng& rng) {
  FormMatrix m(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = random_form(n, 2, rng);
  }
  return m;
}

/// Chern-Weil kernel: graded commutativity, sigma_r against the determinant expansion,
/// sigma_1 = trace, conjugation invariance.
inline VerificationReport forms_battery(std::uint64_t seed, int matrices = 20, int pairs = 100) {
  VerificationReport rep;
  {
    MaxTracker worst;
    for (int t = 0; t < pairs; ++t) {
      CounterRng rng(seed, 1000 + t);
      const int p = 1 + static_cast<int>(rng.uniform() * 3);
      const int q = 1 + static_cast<int>(rng.uniform() * (6 - p));
      const AltForm a = random_integer_form(6, p, rng), b = random_integer_form(6, q, rng);
      const double sign = ((p * q) & 1) ? -1.0 : 1.0;
      worst.update((wedge(a, b) - sign * wedge(b, a)).max_abs());
    }
    rep.add_upper("wedge_graded_commutativity", "forms:graded_commutativity", worst.value(), 0.0, pairs);
  }
  MaxTracker sig, tr, conj;
  for (int t = 0; t < matrices; ++t) {
    CounterRng rng(seed, 2000 + t);
    const int n = 2 + t % 5;  // 2..6
    const FormMatrix om = random_form_matrix(n, rng);
    for (int r = 1; 2 * r <= n && r <= 2; ++r) {
      const AltForm a = sigma_r(om, r);
      const AltForm b = det_expansion_coefficient(om, r);
      sig.update((a - b).max_abs() / (1.0 + b.max_abs()));
    }
    tr.update((sigma_r(om, 1) - om.trace()).max_abs());
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) A(i, j) = rng.uniform(-1.0, 1.0) + (i == j ? 2.0 : 0.0);
    }
    const FormMatrix c = om.conjugated(A);
    for (int r = 1; 2 * r <= n && r <= 2; ++r) {
      const AltForm a = sigma_r(om, r);
      conj.update((sigma_r(c, r) - a).max_abs() / (1.0 + a.max_abs()));
    }
  }
  rep.add_upper("sigma_r_vs_det_expansion", "chern_weil:sigma_r_expansion", sig.value(), 1e-12, matrices);
  rep.add_upper("sigma1_equals_trace", "chern_weil:sigma_r_expansion", tr.value(), 0.0, matrices);
  rep.add_upper("sigma_r_conjugation_invariance", "chern_weil:frame_independence", conj.value(), 1e-9, matrices);
  return rep;
}

// ---------------------------------------------------------------------------
// Jet kernel
// ---------------------------------------------------------------------------

namespace detail {

using Poly = std::map<std::vector<int>, double>;

inline Poly random_poly(int m, int degree, CounterRng& rng) {
  Poly p;
  const auto& lay = *JetLayout::get(m, degree);
  for (std::size_t i = 0; i < lay.size(); ++i) {
    if (rng.uniform() < 0.6) {
      std::vector<int> e(m);
      for (int v = 0; v < m; ++v) e[v] = lay.exponent(i, v);
      p[e] = rng.uniform(-2.0, 2.0);
    }
  }
  return p;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ea, ca] : a) {
    for (const auto& [eb, cb] : b) {
      std::vector<int> e(ea.size());
      for (std::size_t v = 0; v < e.size(); ++v) e[v] = ea[v] + eb[v];
      out[e] += ca * cb;
    }
  }
  return out;
}

/// d^alpha p at x, by differentiating each monomial symbolically.
inline double poly_partial(const Poly& p, const std::vector<int>& alpha, std::span<const double> x) {
  double total = 0.0;
  for (const auto& [e, c] : p) {
    double term = c;
    for (std::size_t v = 0; v < e.size() && term != 0.0; ++v) {
      if (e[v] < alpha[v]) {
        term = 0.0;
        break;
      }
      for (int k = 0; k < alpha[v]; ++k) term *= e[v] - k;
      term *= std::pow(x[v], e[v] - alpha[v]);
    }
    total += term;
  }
  return total;
}

inline Jet poly_jet(const Poly& p, std::span<const Jet> x) {
  Jet out = Jet::constant(0.0, x[0].num_vars(), x[0].order());
  for (const auto& [e, c] : p) {
    Jet term = Jet::constant(c, x[0].num_vars(), x[0].order());
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] > 0) term = term * pow(x[v], e[v]);
    }
    out += term;
  }
  return out;
}

}  // namespace detail

/// Products of random polynomials against symbolic expansion, and sqrt(j)^2 = j.
inline VerificationReport jet_algebra_battery(std::uint64_t seed, int cases = 30) {
  MaxTracker prod, root;
  for (int t = 0; t < cases; ++t) {
    CounterRng rng(seed, 3000 + t);
    const int m = 1 + t % 8;
    const int d = 2 + t % 3;
    const auto p = detail::random_poly(m, d, rng);
    const auto q = detail::random_poly(m, d, rng);
    std::vector<double> x0(m);
    for (double& v : x0) v = rng.uniform(-1.0, 1.0);
    std::vector<Jet> xs;
    for (int v = 0; v < m; ++v) xs.push_back(Jet::coordinate(x0, v, d));
    const Jet pj = detail::poly_jet(p, xs), qj = detail::poly_jet(q, xs);
    const Jet pq = pj * qj;
    const auto exact = detail::poly_mul(p, q);
    const auto& lay = *detail::JetLayout::get(m, d);
    for (std::size_t i = 0; i < lay.size(); ++i) {
      std::vector<int> e(m);
      for (int v = 0; v < m; ++v) e[v] = lay.exponent(i, v);
      const double want = detail::poly_partial(exact, e, x0);
      const double got = pq.partial(MultiIndex(e));
      prod.update(std::abs(got - want) / (1.0 + std::abs(want)));
    }
    const Jet pos = pj * pj + 1.0;
    const Jet s = sqrt(pos);
    const Jet back = s * s;
    for (std::size_t i = 0; i < lay.size(); ++i) {
      root.update(std::abs(back.coefficients()[i] - pos.coefficients()[i]) / (1.0 + std::abs(pos.coefficients()[i])));
    }
  }
  VerificationReport rep;
  rep.add_upper("jet_polynomial_product", "jets:polynomial_exactness", prod.value(), 1e-12, cases);
  rep.add_upper("jet_sqrt_square", "jets:sqrt_roundtrip", root.value(), 1e-12, cases);
  return rep;
}

/// Seeded smooth test function mixing rational, sqrt, log and atan pieces.
inline PointFunction random_smooth_function(int m, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  std::vector<double> a(m), b(m), c(m), d(m);
  for (int v = 0; v < m; ++v) {
    a[v] = rng.uniform(-1.0, 1.0);
    b[v] = rng.uniform(-1.0, 1.0);
    c[v] = rng.uniform(-1.0, 1.0);
    d[v] = rng.uniform(-1.0, 1.0);
  }
  return [=](std::span<const Jet> x) {
    Jet la = x[0] * 0.0, lb = la, lc = la, ld = la;
    for (int v = 0; v < m; ++v) {
      la += a[v] * x[v];
      lb += b[v] * x[v];
      lc += c[v] * x[v];
      ld += d[v] * x[v];
    }
    return atan(la) * sqrt(1.0 + lb * lb) + log(2.0 + lc * lc) / (1.0 + 0.5 * ld * ld);
  };
}

/// Jet partials of random smooth functions against the finite-difference oracle, orders <= 4.
inline VerificationReport jet_fd_battery(std::uint64_t seed, int cases = 100) {
  std::vector<MaxTracker> worst(5);
  std::vector<int> counts(5, 0);
  for (int t = 0; t < cases; ++t) {
    const int m = 1 + t % 3;
    const PointFunction f = random_smooth_function(m, seed, 4000 + t);
    CounterRng rng(seed, 5000 + t);
    std::vector<double> x0(m);
    for (double& v : x0) v = rng.uniform(-1.0, 1.0);
    const VerificationReport r = compare_jet_fd(f, x0, 4, "smooth");
    for (int k = 1; k <= 4; ++k) {
      const CheckResult* c = r.find("smooth:jet_fd_order" + std::to_string(k));
      worst[k].update(c->max_residual);
      counts[k] += c->samples;
    }
  }
  VerificationReport rep;
  for (int k = 1; k <= 4; ++k) {
    rep.add_upper("jet_fd_smooth_order" + std::to_string(k), "oracle:jet_vs_fd", worst[k].value(),
                  k == 4 ? 1e-4 : 1e-6, counts[k]);
  }
  return rep;
}

/// One metric or spray evaluator audited by the oracle, as a function of (x, y).
struct EvaluatorCase {
  std::string name;
  int vars;
  int max_order;
  PointFunction f;
};

inline std::vector<EvaluatorCase> evaluator_cases() {
  std::vector<EvaluatorCase> out;
  const auto phase_fn = [](int n, std::function<Jet(const PhaseJets&)> g) {
    // evaluates g on the phase jets built from arbitrary coordinate jets
    return [n, g = std::move(g)](std::span<const Jet> z) {
      const int m = z[0].num_vars(), d = z[0].order();
      std::vector<double> base(2 * n);
      for (int i = 0; i < 2 * n; ++i) base[i] = z[i].value();
      const PhaseJets ph(ChartPoint(std::vector<double>(base.begin(), base.begin() + n)),
                         Direction(std::vector<double>(base.begin() + n, base.end())), d);
      if (m != 2 * n) throw std::logic_error("evaluator case: variable count mismatch");
      return g(ph);
    };
  };
  const auto squared = [](const MetricField& F) {
    return [F](const PhaseJets& p) {
      const Jet f = F.norm(p);
      return f * f;
    };
  };
  const auto component = [](SprayField G, int i) {
    return [G = std::move(G), i](const PhaseJets& p) { return G.coefficients(p)[i]; };
  };
  out.push_back({"sphere_F2", 6, 4, phase_fn(3, squared(sphere_norm(3)))});
  for (double a : {std::numbers::pi / 8, std::numbers::pi / 4, 3 * std::numbers::pi / 8}) {
    out.push_back({"bryant_F2(" + std::to_string(a) + ")", 6, 4, phase_fn(3, squared(bryant_metric(BryantParams(a), 3)))});
  }
  out.push_back({"randers_F2", 6, 4, phase_fn(3, squared(randers_sphere_spray(3, randers_potential()).metric))});
  {
    const MetricField g = sphere_metric(3);
    out.push_back({"sphere_metric_g01", 3, 4, [g](std::span<const Jet> x) { return g.metric(x)[1]; }});
  }
  out.push_back({"sphere_spray_G0", 6, 4, phase_fn(3, component(sphere_spray(3), 0))});
  out.push_back({"flat_cubic_G0", 6, 4, phase_fn(3, component(make_spray_family("flat-cubic", 3).spray, 0))});
  out.push_back({"riemann_sphere_G1", 4, 3, phase_fn(2, component(riemannian_spray(sphere_metric(2)), 1))});
  out.push_back({"finsler_sphere_G1", 4, 3, phase_fn(2, component(finsler_spray(sphere_norm(2)), 1))});
  out.push_back({"randers_G0", 4, 3, phase_fn(2, component(randers_sphere_spray(2, randers_potential()).spray, 0))});
  out.push_back({"bryant_G0", 4, 3, phase_fn(2, component(bryant_spray(BryantParams(std::numbers::pi / 4), 2), 0))});
  return out;
}

/// Metric and spray evaluators against the oracle at seeded phase points.
inline VerificationReport evaluator_fd_battery(std::uint64_t seed, int cases = 200) {
  const auto evals = evaluator_cases();
  std::vector<MaxTracker> worst(5);
  std::vector<int> counts(5, 0);
  for (int t = 0; t < cases; ++t) {
    const auto& ev = evals[t % evals.size()];
    CounterRng rng(seed, 6000 + t);
    std::vector<double> z(ev.vars);
    for (double& v : z) v = rng.uniform(-0.8, 0.8);
    if (ev.vars % 2 == 0) {
      // keep y away from the origin
      const int n = ev.vars / 2;
      double yy = 0.0;
      for (int i = n; i < 2 * n; ++i) yy += z[i] * z[i];
      if (yy < 0.25) z[n] += 1.0;
    }
    const VerificationReport r = compare_jet_fd(ev.f, z, ev.max_order, ev.name);
    for (int k = 1; k <= ev.max_order; ++k) {
      const CheckResult* c = r.find(ev.name + ":jet_fd_order" + std::to_string(k));
      worst[k].update(c->max_residual);
      counts[k] += c->samples;
    }
  }
  VerificationReport rep;
  for (int k = 1; k <= 4; ++k) {
    rep.add_upper("jet_fd_evaluators_order" + std::to_string(k), "oracle:jet_vs_fd", worst[k].value(),
                  k == 4 ? 1e-4 : 1e-6, counts[k]);
  }
  return rep;
}

}  // namespace sprayscope
