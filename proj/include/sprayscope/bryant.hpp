#pragma once

/**
 * @file bryant.hpp
 * @brief Bryant metrics on the sphere in gnomonic coordinates, the radial ODE for r, and the implicit
 * equation relating their projective factor P to the auxiliary functions p, q, r, s.
 *
 * r is carried in the variable u = 1/|x|, so t = |x|^2 = 1/u^2 and u = 0 is the equator of the chart.
 */

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spray.hpp"

namespace sprayscope {

struct BryantParams {
  double alpha;
  double cos2a;
  double sin2a;

  explicit BryantParams(double a) : alpha(a), cos2a(std::cos(2 * a)), sin2a(std::sin(2 * a)) {
    if (!(a > 0.0 && a < std::numbers::pi / 2)) {
      throw std::invalid_argument("BryantParams: alpha must lie in (0, pi/2)");
    }
  }
};

/// F = sqrt((sqrt(A) + B) / (2D) + (C/D)^2) + C/D.
inline Jet bryant_F(const BryantParams& prm, std::span<const Jet> x, std::span<const Jet> y) {
  const Jet xx = detail::dot(x, x);
  const Jet yy = detail::dot(y, y);
  const Jet xy = detail::dot(x, y);
  const Jet B = prm.cos2a * yy + (xx * yy - xy * xy);
  const Jet s = prm.sin2a * yy;
  const Jet A = B * B + s * s;
  const Jet C = prm.sin2a * xy;
  const Jet D = xx * xx + 2.0 * prm.cos2a * xx + 1.0;
  const Jet cd = C / D;
  return sqrt((sqrt(A) + B) / (2.0 * D) + cd * cd) + cd;
}

inline MetricField bryant_metric(const BryantParams& prm, int n) {
  std::ostringstream label;
  label << "bryant(alpha=" << prm.alpha << ")";
  return MetricField::finsler(
      n, [prm](const PhaseJets& p) { return bryant_F(prm, p.xs(), p.ys()); }, label.str());
}

inline SprayField bryant_spray(const BryantParams& prm, int n) { return finsler_spray(bryant_metric(prm, n)); }

/// p = 1/4 ln((1 + 2cos2a t + t^2) / (1 + 2t + t^2)) with t = |x|^2.
inline Jet bryant_p(const BryantParams& prm, std::span<const Jet> x) {
  const Jet t = detail::dot(x, x);
  return 0.25 * log((1.0 + 2.0 * prm.cos2a * t + t * t) / (1.0 + 2.0 * t + t * t));
}

/// q = 1/2 atan((t + cos2a) / sin2a).
inline Jet bryant_q(const BryantParams& prm, std::span<const Jet> x) {
  const Jet t = detail::dot(x, x);
  return 0.5 * atan((t + prm.cos2a) / prm.sin2a);
}

struct PQ {
  Jet p;
  Jet q;
};

inline PQ pq_eval(const BryantParams& prm, std::span<const Jet> x) { return {bryant_p(prm, x), bryant_q(prm, x)}; }

// ---------------------------------------------------------------------------
// Radial ODE  (1 + u^2) r'' + 3u r' = sin2a / (2 (1 + 2cos2a u^2 + u^4))
// ---------------------------------------------------------------------------

namespace detail {

inline double dep_forcing(const BryantParams& prm, double u) {
  const double u2 = u * u;
  return prm.sin2a / (2.0 * (1.0 + 2.0 * prm.cos2a * u2 + u2 * u2));
}

/// r'' from the ODE given u and r'.
inline double dep_second(const BryantParams& prm, double u, double dr) {
  return (dep_forcing(prm, u) - 3.0 * u * dr) / (1.0 + u * u);
}

/// Fourth-order first derivative of samples v on a uniform grid (one-sided at the ends).
inline std::vector<double> five_point_derivative(const std::vector<double>& v, double h) {
  const std::size_t n = v.size();
  if (n < 5) throw std::invalid_argument("five_point_derivative: need at least 5 samples");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      d[i] = (v[i - 2] - 8 * v[i - 1] + 8 * v[i + 1] - v[i + 2]) / (12 * h);
    } else if (i < 2) {
      const double* w = &v[i];
      if (i == 0) {
        d[i] = (-25 * w[0] + 48 * w[1] - 36 * w[2] + 16 * w[3] - 3 * w[4]) / (12 * h);
      } else {
        d[i] = (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12 * h);
      }
    } else if (i + 1 == n) {
      d[i] = (25 * v[i] - 48 * v[i - 1] + 36 * v[i - 2] - 16 * v[i - 3] + 3 * v[i - 4]) / (12 * h);
    } else {
      d[i] = (3 * v[i + 1] + 10 * v[i] - 18 * v[i - 1] + 6 * v[i - 2] - v[i - 3]) / (12 * h);
    }
  }
  return d;
}

}  // namespace detail

/// Solution of the radial ODE with r(0) = r'(0) = 0 on a uniform grid 0 = u_0 < ... < u_N = u_max.
class OdeSolution {
 public:
  OdeSolution(BryantParams prm, std::vector<double> u, std::vector<double> r, std::vector<double> dr)
      : prm_(prm), u_(std::move(u)), r_(std::move(r)), dr_(std::move(dr)) {
    h_ = u_[1] - u_[0];
    const auto d2 = detail::five_point_derivative(dr_, h_);
    residual_.resize(u_.size());
    for (std::size_t i = 0; i < u_.size(); ++i) {
      const double uu = u_[i];
      residual_[i] = (1.0 + uu * uu) * d2[i] + 3.0 * uu * dr_[i] - detail::dep_forcing(prm_, uu);
    }
  }

  [[nodiscard]] const BryantParams& params() const { return prm_; }
  [[nodiscard]] const std::vector<double>& u() const { return u_; }
  [[nodiscard]] const std::vector<double>& r() const { return r_; }
  [[nodiscard]] const std::vector<double>& dr_du() const { return dr_; }
  /// ODE residual at each node, with r'' taken by a 5-point stencil on the stored r'.
  [[nodiscard]] const std::vector<double>& residual() const { return residual_; }
  [[nodiscard]] double step() const { return h_; }
  [[nodiscard]] double u_max() const { return u_.back(); }

  [[nodiscard]] double max_residual() const {
    double m = 0.0;
    for (double v : residual_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Same residual on (-u_max, u_max) for the even extension r(-u) = r(u).
  [[nodiscard]] double reflected_max_residual() const {
    const std::size_t n = u_.size();
    std::vector<double> uu(2 * n - 1), dr(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      uu[n - 1 + i] = u_[i];
      dr[n - 1 + i] = dr_[i];
      uu[n - 1 - i] = -u_[i];
      dr[n - 1 - i] = -dr_[i];
    }
    const auto d2 = detail::five_point_derivative(dr, h_);
    double m = 0.0;
    for (std::size_t i = 0; i < uu.size(); ++i) {
      m = std::max(m, std::abs((1.0 + uu[i] * uu[i]) * d2[i] + 3.0 * uu[i] * dr[i] -
                               detail::dep_forcing(prm_, uu[i])));
    }
    return m;
  }

  struct Value {
    double r, dr, d2r;
  };

  /// r, dr/du (cubic Hermite) and d2r/du2 (from the ODE) at u in [0, u_max].
  [[nodiscard]] Value at(double u) const {
    if (!(u >= 0.0 && u <= u_max())) {
      std::ostringstream os;
      os << "OdeSolution: u = " << u << " outside the grid [0, " << u_max() << "]";
      throw std::out_of_range(os.str());
    }
    const std::size_t i = std::min(u_.size() - 2, static_cast<std::size_t>(u / h_));
    const double s = (u - u_[i]) / h_;
    const double r0 = r_[i], r1 = r_[i + 1];
    const double m0 = dr_[i] * h_, m1 = dr_[i + 1] * h_;
    const double s2 = s * s, s3 = s2 * s;
    const double r = (2 * s3 - 3 * s2 + 1) * r0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * r1 + (s3 - s2) * m1;
    const double dr = ((6 * s2 - 6 * s) * r0 + (3 * s2 - 4 * s + 1) * m0 + (-6 * s2 + 6 * s) * r1 +
                       (3 * s2 - 2 * s) * m1) / h_;
    return {r, dr, detail::dep_second(prm_, u, dr)};
  }

  /// RFC-4180 table with columns u, r, dr_du, residual.
  void write_csv(std::ostream& os) const {
    os << "u,r,dr_du,residual\r\n" << std::setprecision(17);
    for (std::size_t i = 0; i < u_.size(); ++i) {
      os << u_[i] << ',' << r_[i] << ',' << dr_[i] << ',' << residual_[i] << "\r\n";
    }
  }

 private:
  BryantParams prm_;
  std::vector<double> u_, r_, dr_, residual_;
  double h_ = 0.0;
};

/// Classical RK4 from u = 0 with r(0) = r'(0) = 0; the step is shrunk so that it divides u_max.
inline OdeSolution solve_dep(const BryantParams& prm, double u_max, double step) {
  if (!(u_max > 0.0) || !(step > 0.0)) throw std::invalid_argument("solve_dep: u_max and step must be positive");
  const auto n = static_cast<std::size_t>(std::max(4.0, std::ceil(u_max / step - 1e-9)));
  const double h = u_max / static_cast<double>(n);
  std::vector<double> u(n + 1), r(n + 1), dr(n + 1);
  const auto f = [&](double uu, double v) { return detail::dep_second(prm, uu, v); };
  for (std::size_t i = 0; i < n; ++i) {
    const double uu = h * static_cast<double>(i);
    const double k1r = dr[i], k1v = f(uu, dr[i]);
    const double k2r = dr[i] + 0.5 * h * k1v, k2v = f(uu + 0.5 * h, k2r);
    const double k3r = dr[i] + 0.5 * h * k2v, k3v = f(uu + 0.5 * h, k3r);
    const double k4r = dr[i] + h * k3v, k4v = f(uu + h, k4r);
    r[i + 1] = r[i] + h / 6.0 * (k1r + 2 * k2r + 2 * k3r + k4r);
    dr[i + 1] = dr[i] + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    u[i + 1] = h * static_cast<double>(i + 1);
  }
  u[n] = u_max;
  return OdeSolution(prm, std::move(u), std::move(r), std::move(dr));
}

struct ConvergenceAudit {
  std::vector<double> steps;
  std::vector<double> r_end;  ///< r(u_max) per step
  double observed_order = 0.0;
};

/// r(u_max) at step, step/2, step/4 and the observed order log2(|e_1| / |e_2|) of the successive changes.
inline ConvergenceAudit convergence_audit(const BryantParams& prm, double u_max, double step) {
  ConvergenceAudit a;
  for (int k = 0; k < 3; ++k) {
    const double h = step / std::pow(2.0, k);
    a.steps.push_back(h);
    a.r_end.push_back(solve_dep(prm, u_max, h).r().back());
  }
  const double e1 = std::abs(a.r_end[0] - a.r_end[1]);
  const double e2 = std::abs(a.r_end[1] - a.r_end[2]);
  a.observed_order = std::log2(e1 / e2);
  return a;
}

/// s(u) = u^2 (1+u^2)^2 r'' + (3u^3 + 5u)(u^2 + 1) r', the u-variable expression as printed.
inline double s_from_r(const OdeSolution& sol, double u) {
  const auto v = sol.at(u);
  const double u2 = u * u;
  return u2 * (1 + u2) * (1 + u2) * v.d2r + (3 * u2 * u + 5 * u) * (u2 + 1) * v.dr;
}

/// Derivatives of r as a function of t = |x|^2 = 1/u^2.
struct RadialT {
  double r, dr, d2r;
};

inline RadialT radial_t(const OdeSolution& sol, double t) {
  if (!(t > 0.0)) throw std::domain_error("radial_t: t = |x|^2 must be positive (u = 1/|x|)");
  const double u = 1.0 / std::sqrt(t);
  const auto v = sol.at(u);
  const double u3 = u * u * u;
  return {v.r, -0.5 * u3 * v.dr, 0.75 * u3 * u * u * v.dr + 0.25 * u3 * u3 * v.d2r};
}

/// s = 4(1+t)^2 r''(t) + 4(1+t) r'(t).
inline double s_from_t(const OdeSolution& sol, double t) {
  const RadialT v = radial_t(sol, t);
  return 4 * (1 + t) * (1 + t) * v.d2r + 4 * (1 + t) * v.dr;
}

// ---------------------------------------------------------------------------
// Projective factor and the implicit relation
// ---------------------------------------------------------------------------

struct ProjectiveFit {
  double P = 0.0;
  double residual = 0.0;  ///< max_i |G^i - G_ref^i - P y^i| / (1 + max|G|)
};

/// Least-squares P with G^i - G_ref^i = P y^i; throws if the fit residual exceeds `tol`.
inline ProjectiveFit extract_P(const SprayField& G, const SprayField& G_ref, const ChartPoint& x, const Direction& y,
                               double tol = 1e-7) {
  if (G.dim() != G_ref.dim()) throw std::invalid_argument("extract_P: sprays have different dimensions");
  const auto g = G.values(x, y);
  const auto g0 = G_ref.values(x, y);
  const int n = G.dim();
  double dy = 0.0, yy = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i) {
    dy += (g[i] - g0[i]) * y[i];
    yy += y[i] * y[i];
    scale = std::max(scale, std::abs(g[i]));
  }
  ProjectiveFit fit{dy / yy, 0.0};
  for (int i = 0; i < n; ++i) {
    fit.residual = std::max(fit.residual, std::abs(g[i] - g0[i] - fit.P * y[i]));
  }
  fit.residual /= 1.0 + scale;
  if (!(fit.residual <= tol)) {
    std::ostringstream os;
    os << "extract_P: '" << G.label() << "' and '" << G_ref.label() << "' are not projectively related at x (fit residual "
       << fit.residual << " > " << tol << ")";
    throw std::domain_error(os.str());
  }
  return fit;
}

struct PRelation {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  ///< |lhs - rhs| / (1 + |rhs|)
  double P = 0.0;
};

/// [(P + dp(y))^2 + dq(y)^2][(F - dq(y))^2 - dq(y)^2] against (Hess r(y,y) + s g_{S^n}(y,y))^2,
/// with P extracted from the Bryant and sphere sprays.
inline PRelation verify_P_relation(const BryantParams& prm, const OdeSolution& sol, const ChartPoint& x,
                                   const Direction& y) {
  const int n = x.dim();
  const PhaseJets phase(x, y, 0);
  const PhaseJets first(x, y, 1);
  double t = 0.0;
  for (int i = 0; i < n; ++i) t += x[i] * x[i];
  const RadialT rt = radial_t(sol, t);
  const std::vector<double> series{rt.r, rt.dr, 0.5 * rt.d2r};
  const PointFunction r_of_x = [series](std::span<const Jet> xs) {
    if (xs[0].order() > 2) throw std::logic_error("verify_P_relation: r is only known to second order");
    return detail::dot(xs, xs).compose(series);
  };

  const ProjectiveFit fit = extract_P(bryant_spray(prm, n), sphere_spray(n), x, y);
  const PQ pq = pq_eval(prm, first.xs());
  double dp = 0.0, dq = 0.0;
  for (int i = 0; i < n; ++i) {
    dp += pq.p.partial(MultiIndex::unit(2 * n, first.x_var(i))) * y[i];
    dq += pq.q.partial(MultiIndex::unit(2 * n, first.x_var(i))) * y[i];
  }
  const double F = bryant_F(prm, phase.xs(), phase.ys()).value();
  const double hess = sphere_hessian(r_of_x, phase).value();
  const double gyy = sphere_quadratic(phase.xs(), phase.ys()).value();
  const double s = s_from_t(sol, t);

  PRelation out;
  out.P = fit.P;
  out.lhs = ((fit.P + dp) * (fit.P + dp) + dq * dq) * ((F - dq) * (F - dq) - dq * dq);
  const double root = hess + s * gyy;
  out.rhs = root * root;
  out.residual = std::abs(out.lhs - out.rhs) / (1.0 + std::abs(out.rhs));
  return out;
}

}  // namespace sprayscope
