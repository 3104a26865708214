#pragma once

/**
 * @file oracle.hpp
 * @brief Central finite differences with Richardson extrapolation, used only to audit jet derivatives.
 */

#include <cmath>
#include <functional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "jet.hpp"
#include "report.hpp"
#include "spray.hpp"

namespace sprayscope {

using ScalarEvaluator = std::function<double(std::span<const double>)>;

struct StencilSpec {
  /// Base step for a first derivative; the effective step is h (1 + |coordinate|) times
  /// 10^{(k-1)/3} for total order k, which balances truncation against roundoff up to k = 4.
  double h = 2e-3;
  int richardson_levels = 2;
};

namespace detail {

/// Second-order central stencil weights for a k-th derivative, offsets centred on 0.
inline const std::vector<double>& central_weights(int k) {
  static const std::vector<std::vector<double>> w{
      {1.0},
      {-0.5, 0.0, 0.5},
      {1.0, -2.0, 1.0},
      {-0.5, 1.0, 0.0, -1.0, 0.5},
      {1.0, -4.0, 6.0, -4.0, 1.0},
  };
  if (k < 0 || k > 4) throw std::invalid_argument("fd_partial: per-variable order must be <= 4");
  return w[k];
}

inline double fd_once(const ScalarEvaluator& f, std::span<const double> point, const MultiIndex& alpha,
                      std::span<const double> steps) {
  const int m = static_cast<int>(point.size());
  std::vector<int> vars;
  for (int v = 0; v < m; ++v) {
    if (alpha[v] > 0) vars.push_back(v);
  }
  std::vector<double> x(point.begin(), point.end());
  double total = 0.0;
  // odometer over the tensor-product stencil
  std::vector<int> pos(vars.size(), 0);
  for (;;) {
    double w = 1.0;
    for (std::size_t a = 0; a < vars.size(); ++a) {
      const int v = vars[a];
      const auto& cw = central_weights(alpha[v]);
      const int half = static_cast<int>(cw.size()) / 2;
      w *= cw[pos[a]] / std::pow(steps[v], alpha[v]);
      x[v] = point[v] + (pos[a] - half) * steps[v];
    }
    if (w != 0.0) total += w * f(x);
    std::size_t a = 0;
    while (a < vars.size()) {
      if (++pos[a] < static_cast<int>(central_weights(alpha[vars[a]]).size())) break;
      pos[a] = 0;
      ++a;
    }
    if (a == vars.size()) break;
  }
  return total;
}

}  // namespace detail

/// Central-difference estimate of d^alpha f at `point` with Richardson extrapolation.
inline double fd_partial(const ScalarEvaluator& f, std::span<const double> point, const MultiIndex& alpha,
                         const StencilSpec& spec = {}) {
  if (static_cast<int>(point.size()) != alpha.size()) throw std::invalid_argument("fd_partial: arity mismatch");
  if (alpha.order() > 4) throw std::invalid_argument("fd_partial: total order must be <= 4");
  if (!(spec.h > 0.0) || spec.richardson_levels < 0) throw std::invalid_argument("fd_partial: invalid stencil spec");
  if (alpha.order() == 0) return f(point);
  const double grow = std::pow(10.0, (alpha.order() - 1) / 3.0);
  const int levels = spec.richardson_levels;
  std::vector<double> table(levels + 1);
  std::vector<double> steps(point.size());
  for (int l = 0; l <= levels; ++l) {
    for (std::size_t v = 0; v < point.size(); ++v) {
      steps[v] = spec.h * grow * (1.0 + std::abs(point[v])) / std::pow(2.0, l);
    }
    table[l] = detail::fd_once(f, point, alpha, steps);
  }
  // error expansion in even powers of the step
  for (int l = 1; l <= levels; ++l) {
    const double factor = std::pow(4.0, l);
    for (int i = levels; i >= l; --i) table[i] = (factor * table[i] - table[i - 1]) / (factor - 1.0);
  }
  const double v = table[levels];
  if (!std::isfinite(v)) throw std::domain_error("fd_partial: evaluator returned a non-finite value on the stencil");
  return v;
}

/// Scalar evaluator from a jet-capable point function.
inline ScalarEvaluator scalar_evaluator(PointFunction f) {
  return [f = std::move(f)](std::span<const double> x) {
    std::vector<Jet> xs;
    xs.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xs.push_back(Jet::coordinate(x, static_cast<int>(i), 0));
    return f(xs).value();
  };
}

struct JetFdTolerances {
  double low_order = 1e-6;  ///< orders 1..3
  double order4 = 1e-4;
};

/// Worst discrepancy |jet - fd| / (1 + |jet|) per derivative order 0..max_order, one check per order.
inline VerificationReport compare_jet_fd(const PointFunction& f, std::span<const double> point, int max_order,
                                         const std::string& label = "f", const JetFdTolerances& tol = {},
                                         const StencilSpec& spec = {}) {
  if (max_order < 0 || max_order > 4) throw std::invalid_argument("compare_jet_fd: max_order must be in [0, 4]");
  const int m = static_cast<int>(point.size());
  std::vector<Jet> xs;
  for (int i = 0; i < m; ++i) xs.push_back(Jet::coordinate(point, i, max_order));
  const Jet j = f(xs);
  const ScalarEvaluator fe = scalar_evaluator(f);
  std::vector<MaxTracker> worst(max_order + 1);
  std::vector<int> counts(max_order + 1, 0);
  const auto& lay = *detail::JetLayout::get(m, max_order);
  for (std::size_t i = 0; i < lay.count_upto(max_order); ++i) {
    std::vector<int> e(m);
    for (int v = 0; v < m; ++v) e[v] = lay.exponent(i, v);
    const MultiIndex a(std::move(e));
    const double exact = j.partial(a);
    const double approx = fd_partial(fe, point, a, spec);
    worst[a.order()].update(std::abs(exact - approx) / (1.0 + std::abs(exact)));
    ++counts[a.order()];
  }
  VerificationReport r;
  for (int k = 0; k <= max_order; ++k) {
    r.add_upper(label + ":jet_fd_order" + std::to_string(k), "oracle:jet_vs_fd", worst[k].value(),
                k == 4 ? tol.order4 : tol.low_order, counts[k]);
  }
  return r;
}

}  // namespace sprayscope
