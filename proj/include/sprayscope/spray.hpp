#pragma once

/**
 * @file spray.hpp
 * @brief Sprays, metrics and volume forms on an n-dimensional coordinate chart.
 *
 * Phase-space variables are ordered (x^0..x^{n-1}, y^0..y^{n-1}); every
 * evaluator returns jets in exactly these 2n variables, expanded at the
 * PhaseJets base point and truncated at the PhaseJets order.
 */

#include <cmath>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jet.hpp"

namespace sprayscope {

/// Chart coordinates x; finite entries.
class ChartPoint {
 public:
  ChartPoint() = default;
  explicit ChartPoint(std::vector<double> x) : x_(std::move(x)) {
    if (x_.empty()) throw std::invalid_argument("ChartPoint: empty coordinate vector");
    for (double v : x_) {
      if (!std::isfinite(v)) throw std::invalid_argument("ChartPoint: non-finite coordinate");
    }
  }
  [[nodiscard]] int dim() const { return static_cast<int>(x_.size()); }
  [[nodiscard]] std::span<const double> coords() const { return x_; }
  double operator[](int i) const { return x_.at(i); }
  [[nodiscard]] double norm() const {
    double s = 0.0;
    for (double v : x_) s += v * v;
    return std::sqrt(s);
  }

 private:
  std::vector<double> x_;
};

/// Tangent direction y on the slit tangent bundle.
class Direction {
 public:
  static constexpr double min_norm = 1e-9;

  Direction() = default;
  explicit Direction(std::vector<double> y) : y_(std::move(y)) {
    if (y_.empty()) throw std::invalid_argument("Direction: empty vector");
    for (double v : y_) {
      if (!std::isfinite(v)) throw std::invalid_argument("Direction: non-finite component");
    }
    if (norm() < min_norm) throw std::invalid_argument("Direction: y = 0 is not on the slit tangent bundle");
  }
  [[nodiscard]] int dim() const { return static_cast<int>(y_.size()); }
  [[nodiscard]] std::span<const double> coords() const { return y_; }
  double operator[](int i) const { return y_.at(i); }
  [[nodiscard]] double norm() const {
    double s = 0.0;
    for (double v : y_) s += v * v;
    return std::sqrt(s);
  }
  [[nodiscard]] Direction scaled(double lambda) const {
    std::vector<double> y = y_;
    for (double& v : y) v *= lambda;
    return Direction(std::move(y));
  }

 private:
  std::vector<double> y_;
};

/// Seeded coordinate jets x^i, y^i at a phase point.
class PhaseJets {
 public:
  PhaseJets(ChartPoint x, Direction y, int order) : x_(std::move(x)), y_(std::move(y)), order_(order) {
    if (x_.dim() != y_.dim()) throw std::invalid_argument("PhaseJets: x and y dimensions differ");
    if (order < 0) throw std::invalid_argument("PhaseJets: negative order");
    const int n = x_.dim();
    base_.reserve(2 * n);
    for (double v : x_.coords()) base_.push_back(v);
    for (double v : y_.coords()) base_.push_back(v);
    for (int i = 0; i < 2 * n; ++i) seeds_.push_back(Jet::coordinate(base_, i, order));
  }

  [[nodiscard]] int dim() const { return x_.dim(); }
  [[nodiscard]] int order() const { return order_; }
  [[nodiscard]] int num_vars() const { return 2 * dim(); }
  [[nodiscard]] const ChartPoint& point() const { return x_; }
  [[nodiscard]] const Direction& direction() const { return y_; }

  [[nodiscard]] const Jet& x(int i) const { return seeds_.at(i); }
  [[nodiscard]] const Jet& y(int i) const { return seeds_.at(dim() + i); }
  [[nodiscard]] std::span<const Jet> xs() const { return std::span<const Jet>(seeds_).first(dim()); }
  [[nodiscard]] std::span<const Jet> ys() const { return std::span<const Jet>(seeds_).subspan(dim()); }

  [[nodiscard]] int x_var(int i) const { return i; }
  [[nodiscard]] int y_var(int i) const { return dim() + i; }

  [[nodiscard]] Jet constant(double v) const { return Jet::constant(v, num_vars(), order_); }
  [[nodiscard]] PhaseJets with_order(int order) const { return PhaseJets(x_, y_, order); }

 private:
  ChartPoint x_;
  Direction y_;
  int order_;
  std::vector<double> base_;
  std::vector<Jet> seeds_;
};

using SprayEvaluator = std::function<std::vector<Jet>(const PhaseJets&)>;
/// Scalar function on the slit tangent bundle (F, P, ...).
using PhaseFunction = std::function<Jet(const PhaseJets&)>;
/// Scalar function of chart coordinates; accepts arbitrary coordinate jets.
using PointFunction = std::function<Jet(std::span<const Jet>)>;
/// Row-major n x n metric components g_ij(x).
using MetricEvaluator = std::function<std::vector<Jet>(std::span<const Jet>)>;

/// n spray coefficients G^i(x, y), 2-homogeneous in y.
class SprayField {
 public:
  SprayField(int dim, SprayEvaluator evaluator, std::string label)
      : dim_(dim), eval_(std::move(evaluator)), label_(std::move(label)) {
    if (dim < 2) throw std::invalid_argument("SprayField: dimension must be >= 2, got " + std::to_string(dim));
  }

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const std::string& label() const { return label_; }

  [[nodiscard]] std::vector<Jet> coefficients(const PhaseJets& phase) const {
    if (phase.dim() != dim_) throw std::invalid_argument("SprayField '" + label_ + "': phase dimension mismatch");
    auto g = eval_(phase);
    if (static_cast<int>(g.size()) != dim_) {
      throw std::logic_error("SprayField '" + label_ + "': evaluator returned wrong component count");
    }
    for (const Jet& j : g) {
      if (j.num_vars() != phase.num_vars() || j.order() < phase.order()) {
        throw std::logic_error("SprayField '" + label_ + "': evaluator returned jets of insufficient order");
      }
    }
    for (Jet& j : g) j = j.truncated(phase.order());
    return g;
  }

  [[nodiscard]] std::vector<double> values(const ChartPoint& x, const Direction& y) const {
    auto g = coefficients(PhaseJets(x, y, 0));
    std::vector<double> out;
    out.reserve(g.size());
    for (const Jet& j : g) out.push_back(j.value());
    return out;
  }

 private:
  int dim_;
  SprayEvaluator eval_;
  std::string label_;
};

/// Positive volume density sigma(x) of dV = sigma dx^1 ^ ... ^ dx^n.
class VolumeForm {
 public:
  VolumeForm(int dim, PointFunction sigma, std::string label)
      : dim_(dim), sigma_(std::move(sigma)), label_(std::move(label)) {}

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const std::string& label() const { return label_; }

  [[nodiscard]] Jet density(std::span<const Jet> x) const {
    Jet s = sigma_(x);
    if (!(s.value() > 0.0)) {
      std::ostringstream os;
      os << "VolumeForm '" << label_ << "': sigma = " << s.value() << " is not positive";
      throw std::domain_error(os.str());
    }
    return s;
  }

  [[nodiscard]] Jet log_density(std::span<const Jet> x) const { return log(density(x)); }

 private:
  int dim_;
  PointFunction sigma_;
  std::string label_;
};

/// Riemannian g_ij(x) or Finsler F(x, y).
class MetricField {
 public:
  static MetricField riemannian(int dim, MetricEvaluator g, std::string label) {
    MetricField m(dim, std::move(label));
    m.metric_ = std::move(g);
    return m;
  }
  static MetricField finsler(int dim, PhaseFunction F, std::string label) {
    MetricField m(dim, std::move(label));
    m.norm_ = std::move(F);
    return m;
  }

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const std::string& label() const { return label_; }
  [[nodiscard]] bool is_riemannian() const { return static_cast<bool>(metric_); }

  [[nodiscard]] std::vector<Jet> metric(std::span<const Jet> x) const {
    if (!metric_) throw std::logic_error("MetricField '" + label_ + "' is not Riemannian");
    auto g = metric_(x);
    if (static_cast<int>(g.size()) != dim_ * dim_) throw std::logic_error("MetricField: wrong component count");
    return g;
  }

  /// F(x, y); for a Riemannian metric F = sqrt(g_ij y^i y^j).
  [[nodiscard]] Jet norm(const PhaseJets& phase) const {
    if (norm_) return norm_(phase);
    auto g = metric(phase.xs());
    Jet q = phase.constant(0.0);
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) q += g[i * dim_ + j] * phase.y(i) * phase.y(j);
    }
    return sqrt(q);
  }

  /// g_ij(x, y) = 1/2 [F^2]_{y^i y^j} as a dense matrix.
  [[nodiscard]] Eigen::MatrixXd fundamental_tensor(const ChartPoint& x, const Direction& y) const {
    PhaseJets phase(x, y, 2);
    Jet f = norm(phase);
    Jet h = f * f;
    Eigen::MatrixXd g(dim_, dim_);
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) {
        g(i, j) = 0.5 * h.partial(MultiIndex::unit(2 * dim_, phase.y_var(i)).raised(phase.y_var(j)));
      }
    }
    return g;
  }

 private:
  MetricField(int dim, std::string label) : dim_(dim), label_(std::move(label)) {}

  int dim_;
  std::string label_;
  MetricEvaluator metric_;
  PhaseFunction norm_;
};

namespace detail {

inline void warn(const std::string& msg) {
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  std::clog << "sprayscope: warning: " << msg << '\n';
}

inline std::string eigen_summary(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()));
  std::ostringstream os;
  os.precision(6);
  os << "smallest eigenvalue " << es.eigenvalues().minCoeff() << ", largest " << es.eigenvalues().maxCoeff();
  return os.str();
}

/// Solves A z = b over jets by Gaussian elimination, pivoting on constant terms.
inline std::vector<Jet> solve(std::vector<Jet> a, std::vector<Jet> b, const std::string& what) {
  const int n = static_cast<int>(b.size());
  Eigen::MatrixXd a0(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a0(i, j) = a[i * n + j].value();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a0);
  const auto& sv = svd.singularValues();
  const double cond = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
  if (!(cond < 1e14)) throw std::domain_error(what + " is singular (" + eigen_summary(a0) + ")");
  if (cond > 1e8) {
    std::ostringstream os;
    os << what << " is ill-conditioned (condition estimate " << cond << ")";
    warn(os.str());
  }
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int r = k + 1; r < n; ++r) {
      if (std::abs(a[r * n + k].value()) > std::abs(a[p * n + k].value())) p = r;
    }
    if (p != k) {
      for (int c = 0; c < n; ++c) std::swap(a[k * n + c], a[p * n + c]);
      std::swap(b[k], b[p]);
    }
    const Jet inv = reciprocal(a[k * n + k]);
    for (int r = k + 1; r < n; ++r) {
      const Jet factor = a[r * n + k] * inv;
      for (int c = k + 1; c < n; ++c) a[r * n + c] -= factor * a[k * n + c];
      b[r] -= factor * b[k];
    }
  }
  std::vector<Jet> z(n);
  for (int k = n - 1; k >= 0; --k) {
    Jet acc = b[k];
    for (int c = k + 1; c < n; ++c) acc -= a[k * n + c] * z[c];
    z[k] = acc / a[k * n + k];
  }
  return z;
}

inline Jet dot(std::span<const Jet> a, std::span<const Jet> b) {
  Jet s = a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Gnomonic sphere building blocks
// ---------------------------------------------------------------------------

/// g_{S^n} in gnomonic coordinates: ((1+|x|^2) delta_ij - x_i x_j) / (1+|x|^2)^2.
inline MetricField sphere_metric(int n) {
  return MetricField::riemannian(
      n,
      [n](std::span<const Jet> x) {
        const Jet w = 1.0 + detail::dot(x, x);
        const Jet inv2 = reciprocal(w * w);
        std::vector<Jet> g(n * n);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            Jet e = -(x[i] * x[j]);
            if (i == j) e += w;
            g[i * n + j] = e * inv2;
          }
        }
        return g;
      },
      "sphere-metric");
}

/// g_{S^n}(y, y) = ((1+|x|^2)|y|^2 - <x,y>^2) / (1+|x|^2)^2.
inline Jet sphere_quadratic(std::span<const Jet> x, std::span<const Jet> y) {
  const Jet w = 1.0 + detail::dot(x, x);
  const Jet xy = detail::dot(x, y);
  return (w * detail::dot(y, y) - xy * xy) / (w * w);
}

/// The gnomonic sphere norm as a Finsler function.
inline MetricField sphere_norm(int n) {
  return MetricField::finsler(
      n, [](const PhaseJets& p) { return sqrt(sphere_quadratic(p.xs(), p.ys())); }, "sphere-norm");
}

/// P0(x, y) = -<x,y> / (1 + |x|^2), so that G_0^i = P0 y^i.
inline Jet sphere_projective_factor(std::span<const Jet> x, std::span<const Jet> y) {
  return -detail::dot(x, y) / (1.0 + detail::dot(x, x));
}

/// g_{S^n}-covariant Hessian Hess f(y, y) = f_jk y^j y^k - 2 G_0^i f_i.
inline Jet sphere_hessian(const PointFunction& f, const PhaseJets& phase) {
  const int n = phase.dim();
  const PhaseJets up = phase.with_order(phase.order() + 2);
  const Jet fj = f(up.xs());
  const Jet p0 = sphere_projective_factor(phase.xs(), phase.ys());
  Jet out = phase.constant(0.0);
  for (int j = 0; j < n; ++j) {
    const Jet dj = fj.derivative(up.x_var(j));
    for (int k = 0; k < n; ++k) out += dj.derivative(up.x_var(k)) * phase.y(j) * phase.y(k);
    out -= 2.0 * p0 * phase.y(j) * dj;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Volume forms
// ---------------------------------------------------------------------------

inline VolumeForm unit_volume(int n) {
  return VolumeForm(
      n, [](std::span<const Jet> x) { return Jet::constant(1.0, x[0].num_vars(), x[0].order()); }, "unit");
}

/// Riemannian volume of the gnomonic sphere metric: (1 + |x|^2)^{-(n+1)/2}.
inline VolumeForm sphere_volume(int n) {
  return VolumeForm(
      n,
      [n](std::span<const Jet> x) { return exp(-0.5 * (n + 1) * log(1.0 + detail::dot(x, x))); },
      "sphere");
}

/// sigma = exp(phi(x)).
inline VolumeForm exponential_volume(int n, PointFunction phi, std::string label) {
  return VolumeForm(n, [phi = std::move(phi)](std::span<const Jet> x) { return exp(phi(x)); }, std::move(label));
}

// ---------------------------------------------------------------------------
// Spray constructors
// ---------------------------------------------------------------------------

inline SprayField flat_spray(int n) {
  if (n < 2) throw std::invalid_argument("flat_spray: dimension must be >= 2");
  return SprayField(
      n, [n](const PhaseJets& p) { return std::vector<Jet>(n, p.constant(0.0)); }, "flat");
}

/// Geodesic spray G^i = 1/2 Gamma^i_jk(x) y^j y^k of a Riemannian metric.
inline SprayField riemannian_spray(MetricField g) {
  if (!g.is_riemannian()) throw std::invalid_argument("riemannian_spray: metric is not Riemannian");
  const int n = g.dim();
  std::string label = "riemannian(" + g.label() + ")";
  return SprayField(
      n,
      [n, g = std::move(g)](const PhaseJets& phase) {
        const PhaseJets up = phase.with_order(phase.order() + 1);
        const auto gj = g.metric(up.xs());
        // dg[(l*n + j)*n + k] = d g_lj / d x^k
        std::vector<Jet> dg(n * n * n);
        for (int l = 0; l < n; ++l) {
          for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) dg[(l * n + j) * n + k] = gj[l * n + j].derivative(up.x_var(k));
          }
        }
        std::vector<Jet> rhs(n, phase.constant(0.0));
        for (int l = 0; l < n; ++l) {
          for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
              rhs[l] += (2.0 * dg[(l * n + j) * n + k] - dg[(j * n + k) * n + l]) * phase.y(j) * phase.y(k);
            }
          }
        }
        std::vector<Jet> gm(n * n);
        for (int i = 0; i < n * n; ++i) gm[i] = gj[i].truncated(phase.order());
        auto z = detail::solve(std::move(gm), std::move(rhs), "metric tensor of '" + g.label() + "'");
        for (Jet& v : z) v *= 0.25;
        return z;
      },
      std::move(label));
}

/// Geodesic spray G^i = 1/4 g^il ([F^2]_{x^m y^l} y^m - [F^2]_{x^l}) of a Finsler metric.
inline SprayField finsler_spray(MetricField F) {
  const int n = F.dim();
  std::string label = "finsler(" + F.label() + ")";
  return SprayField(
      n,
      [n, F = std::move(F)](const PhaseJets& phase) {
        const PhaseJets up = phase.with_order(phase.order() + 2);
        const Jet f = F.norm(up);
        if (!(f.value() > 0.0)) throw std::domain_error("finsler_spray: F <= 0 at the evaluation point");
        const Jet h = f * f;
        std::vector<Jet> hy(n);
        for (int l = 0; l < n; ++l) hy[l] = h.derivative(up.y_var(l));
        std::vector<Jet> g(n * n);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) g[i * n + j] = 0.5 * hy[i].derivative(up.y_var(j));
        }
        std::vector<Jet> rhs(n);
        for (int l = 0; l < n; ++l) {
          Jet r = -h.derivative(up.x_var(l));
          for (int m = 0; m < n; ++m) r += hy[l].derivative(up.x_var(m)) * phase.y(m);
          rhs[l] = r;
        }
        auto z = detail::solve(std::move(g), std::move(rhs), "fundamental tensor of '" + F.label() + "'");
        for (Jet& v : z) v *= 0.25;
        return z;
      },
      std::move(label));
}

/// G~^i = G^i + P y^i for a 1-homogeneous P.
inline SprayField projective_modify(SprayField G, PhaseFunction P, const std::string& p_label = "P") {
  const int n = G.dim();
  std::string label = G.label() + "+" + p_label;
  return SprayField(
      n,
      [n, G = std::move(G), P = std::move(P)](const PhaseJets& phase) {
        auto g = G.coefficients(phase);
        const Jet p = P(phase);
        for (int i = 0; i < n; ++i) g[i] += p * phase.y(i);
        return g;
      },
      std::move(label));
}

/// Spray of g_{S^n} in gnomonic coordinates: G_0^i = P0 y^i.
inline SprayField sphere_spray(int n) {
  if (n < 2) throw std::invalid_argument("sphere_spray: dimension must be >= 2");
  return SprayField(
      n,
      [n](const PhaseJets& phase) {
        const Jet p0 = sphere_projective_factor(phase.xs(), phase.ys());
        std::vector<Jet> g(n);
        for (int i = 0; i < n; ++i) g[i] = p0 * phase.y(i);
        return g;
      },
      "sphere");
}

/// Randers metric F = sqrt(g_{S^n}(y,y)) + eps df(y) with its spray and predicted projective factor.
struct RandersSpray {
  MetricField metric;
  SprayField spray;
  /// eps Hess f(y,y) / (2F), with Hess the g_{S^n}-covariant Hessian.
  PhaseFunction predicted_P;
};

inline RandersSpray randers_sphere_spray(int n, PointFunction f, double eps = 1.0) {
  auto norm = [n, f, eps](const PhaseJets& phase) {
    const PhaseJets up = phase.with_order(phase.order() + 1);
    const Jet fj = f(up.xs());
    Jet beta = phase.constant(0.0);
    std::vector<double> grad(n);
    for (int k = 0; k < n; ++k) {
      const Jet dk = fj.derivative(up.x_var(k));
      grad[k] = eps * dk.value();
      beta += dk * phase.y(k);
    }
    // Randers positivity: |eps df|^2 in g^{ij} = (1+|x|^2)(delta_ij + x_i x_j).
    const auto x = phase.point().coords();
    double xx = 0.0, xg = 0.0, gg = 0.0;
    for (int k = 0; k < n; ++k) {
      xx += x[k] * x[k];
      xg += x[k] * grad[k];
      gg += grad[k] * grad[k];
    }
    const double b2 = (1.0 + xx) * (gg + xg * xg);
    if (!(b2 < 1.0)) {
      std::ostringstream os;
      os << "randers_sphere_spray: |df| = " << std::sqrt(b2) << " >= 1 at x = (";
      for (int k = 0; k < n; ++k) os << (k ? ", " : "") << x[k];
      os << ")";
      throw std::domain_error(os.str());
    }
    return sqrt(sphere_quadratic(phase.xs(), phase.ys())) + eps * beta;
  };
  MetricField metric = MetricField::finsler(n, norm, "randers");
  SprayField spray = finsler_spray(metric);
  PhaseFunction predicted = [f, eps, norm](const PhaseJets& phase) {
    return eps * sphere_hessian(f, phase) / (2.0 * norm(phase));
  };
  return RandersSpray{std::move(metric), std::move(spray), std::move(predicted)};
}

}  // namespace sprayscope
