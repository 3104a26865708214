#pragma once

/**
 * @file curvature.hpp
 * @brief Berwald connection, Riemann/Weyl/Douglas curvature, S- and chi-curvature of a spray.
 *
 * All derivatives come from jets of the spray coefficients in the 2n phase
 * variables. Each operation evaluates the spray at the minimal jet order it
 * needs: 2 for N and Gamma, 3 for B, the four-index R and chi, 4 for D, W and
 * the y-Hessians used by the scalar-flag identities.
 */

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "report.hpp"
#include "sampling.hpp"
#include "spray.hpp"
#include "tensor.hpp"

namespace sprayscope {

namespace detail {

/// Jets of a spray at one phase point together with the derived jets the
/// curvature formulas are assembled from.
class SprayExpansion {
 public:
  SprayExpansion(const SprayField& G, const ChartPoint& x, const Direction& y, int order)
      : phase_(x, y, order), n_(G.dim()) {
    if (x.dim() != n_ || y.dim() != n_) throw std::invalid_argument("curvature: point dimension does not match spray");
    g_ = G.coefficients(phase_);
  }

  [[nodiscard]] int dim() const { return n_; }
  [[nodiscard]] int order() const { return phase_.order(); }
  [[nodiscard]] const PhaseJets& phase() const { return phase_; }
  [[nodiscard]] const Jet& G(int i) const { return g_[i]; }
  [[nodiscard]] double y(int i) const { return phase_.direction()[i]; }
  [[nodiscard]] int xv(int i) const { return phase_.x_var(i); }
  [[nodiscard]] int yv(int i) const { return phase_.y_var(i); }

  void require(int min_order, const char* what) const {
    if (order() < min_order) {
      throw std::logic_error(std::string("curvature: jet order ") + std::to_string(order()) +
                             " insufficient for " + what + " (needs " + std::to_string(min_order) + ")");
    }
  }

  /// d^|a| G^i for the variables listed (x via xv, y via yv).
  [[nodiscard]] double dG(int i, std::initializer_list<int> vars) const {
    MultiIndex a = MultiIndex::zero(2 * n_);
    for (int v : vars) a = a.raised(v);
    return g_[i].partial(a);
  }

  const Jet& N(int i, int j) {
    if (N_.empty()) {
      require(1, "N");
      N_.reserve(n_ * n_);
      for (int a = 0; a < n_; ++a) {
        for (int b = 0; b < n_; ++b) N_.push_back(g_[a].derivative(yv(b)));
      }
    }
    return N_[i * n_ + j];
  }

  const Jet& Gamma(int i, int j, int k) {
    if (Gamma_.empty()) {
      require(2, "Gamma");
      Gamma_.reserve(n_ * n_ * n_);
      for (int a = 0; a < n_; ++a) {
        for (int b = 0; b < n_; ++b) {
          for (int c = 0; c < n_; ++c) Gamma_.push_back(N(a, b).derivative(yv(c)));
        }
      }
    }
    return Gamma_[(i * n_ + j) * n_ + k];
  }

  /// R^i_k = 2 G^i_{x^k} - y^j G^i_{x^j y^k} + 2 G^j G^i_{y^j y^k} - G^i_{y^j} G^j_{y^k}.
  const Jet& R2(int i, int k) {
    if (R2_.empty()) {
      require(2, "R^i_k");
      const PhaseJets& p = phase_;
      R2_.reserve(n_ * n_);
      for (int a = 0; a < n_; ++a) {
        for (int c = 0; c < n_; ++c) {
          Jet r = 2.0 * g_[a].derivative(xv(c));
          for (int j = 0; j < n_; ++j) {
            r -= p.y(j) * N(a, c).derivative(xv(j));
            r += 2.0 * g_[j] * Gamma(a, j, c);
            r -= N(a, j) * N(j, c);
          }
          R2_.push_back(std::move(r));
        }
      }
    }
    return R2_[i * n_ + k];
  }

  /// R = R^m_m / (n - 1).
  const Jet& Rscalar() {
    if (R_.empty()) {
      Jet t = R2(0, 0);
      for (int m = 1; m < n_; ++m) t += R2(m, m);
      R_ = t / static_cast<double>(n_ - 1);
    }
    return R_;
  }

 private:
  PhaseJets phase_;
  int n_;
  std::vector<Jet> g_;
  std::vector<Jet> N_;
  std::vector<Jet> Gamma_;
  std::vector<Jet> R2_;
  Jet R_;
};

inline double ypartial(const Jet& j, const SprayExpansion& ex, std::initializer_list<int> ys) {
  MultiIndex a = MultiIndex::zero(2 * ex.dim());
  for (int k : ys) a = a.raised(ex.yv(k));
  return j.partial(a);
}

inline double delta(int i, int j) { return i == j ? 1.0 : 0.0; }

}  // namespace detail

struct ConnectionCoeffs {
  TensorValue N;      ///< N^i_j, "ud"
  TensorValue Gamma;  ///< Gamma^i_jk, "udd"
};

struct BerwaldPack {
  TensorValue B;  ///< B^i_jkl, "uddd"
  TensorValue E;  ///< E_jk, "dd"
  TensorValue D;  ///< D^i_jkl, "uddd"
};

struct RiemannPack {
  TensorValue R2;      ///< R^i_k, "ud"
  TensorValue R4;      ///< R^i_jkl from the horizontal derivative of Gamma, "uddd"
  TensorValue R4_alt;  ///< (R^i_{k.l.j} - R^i_{l.k.j}) / 3, "uddd"
  double R = 0.0;      ///< R^m_m / (n - 1)
  TensorValue A;       ///< R^i_k - R delta^i_k
  TensorValue W;       ///< Weyl tensor
  TensorValue tau;     ///< least-squares fit of R^i_k - R delta^i_k = -tau_k y^i
  double tau_residual = 0.0;
  TensorValue R_dot;   ///< R_{.k}
  TensorValue R_hess;  ///< R_{.k.l}
  TensorValue Rmk_m;   ///< R^m_{k.m}
};

struct SChiPack {
  double S = 0.0;
  TensorValue chi_fromR;
  TensorValue chi_fromS;
};

struct CurvaturePack {
  ChartPoint x;
  Direction y;
  ConnectionCoeffs connection;
  BerwaldPack berwald;
  RiemannPack riemann;
  std::optional<SChiPack> s_chi;
};

// ---------------------------------------------------------------------------
// Pack assembly from an expansion
// ---------------------------------------------------------------------------

inline ConnectionCoeffs connection_coeffs(detail::SprayExpansion& ex) {
  ex.require(2, "connection coefficients");
  const int n = ex.dim();
  ConnectionCoeffs c{TensorValue("ud", n), TensorValue("udd", n)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      c.N(i, j) = ex.dG(i, {ex.yv(j)});
      for (int k = 0; k < n; ++k) c.Gamma(i, j, k) = ex.dG(i, {ex.yv(j), ex.yv(k)});
    }
  }
  return c;
}

inline TensorValue berwald_tensor(detail::SprayExpansion& ex) {
  ex.require(3, "Berwald curvature");
  const int n = ex.dim();
  TensorValue B("uddd", n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) B(i, j, k, l) = ex.dG(i, {ex.yv(j), ex.yv(k), ex.yv(l)});
      }
    }
  }
  return B;
}

inline BerwaldPack berwald_pack(detail::SprayExpansion& ex) {
  ex.require(4, "Douglas curvature");
  const int n = ex.dim();
  BerwaldPack p{berwald_tensor(ex), TensorValue("dd", n), TensorValue("uddd", n)};
  // dE[(j*n+k)*n+l] = dE_jk / dy^l
  std::vector<double> dE(n * n * n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double e = 0.0;
      for (int m = 0; m < n; ++m) {
        e += p.B(m, m, j, k);
        for (int l = 0; l < n; ++l) dE[(j * n + k) * n + l] += ex.dG(m, {ex.yv(m), ex.yv(j), ex.yv(k), ex.yv(l)});
      }
      p.E(j, k) = 0.5 * e;
    }
  }
  for (double& v : dE) v *= 0.5;
  const double c = 2.0 / (n + 1);
  using detail::delta;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          p.D(i, j, k, l) = p.B(i, j, k, l) - c * (p.E(j, k) * delta(i, l) + p.E(j, l) * delta(i, k) +
                                                  p.E(k, l) * delta(i, j) + dE[(j * n + k) * n + l] * ex.y(i));
        }
      }
    }
  }
  return p;
}

/// R^i_jkl = dGamma^i_jl/dx^k - dGamma^i_jk/dx^l + Gamma^i_km Gamma^m_jl - Gamma^i_lm Gamma^m_jk,
/// with d/dx the horizontal derivative d/dx^k - N^m_k d/dy^m.
inline TensorValue riemann_four_index(detail::SprayExpansion& ex) {
  ex.require(3, "four-index Riemann curvature");
  const int n = ex.dim();
  const ConnectionCoeffs c = connection_coeffs(ex);
  const TensorValue B = berwald_tensor(ex);
  // dx[((i*n+j)*n+l)*n+k] = delta Gamma^i_jl / delta x^k
  std::vector<double> hd(n * n * n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        for (int k = 0; k < n; ++k) {
          double v = ex.dG(i, {ex.yv(j), ex.yv(l), ex.xv(k)});
          for (int m = 0; m < n; ++m) v -= c.N(m, k) * B(i, j, l, m);
          hd[((i * n + j) * n + l) * n + k] = v;
        }
      }
    }
  }
  TensorValue R4("uddd", n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          double v = hd[((i * n + j) * n + l) * n + k] - hd[((i * n + j) * n + k) * n + l];
          for (int m = 0; m < n; ++m) v += c.Gamma(i, k, m) * c.Gamma(m, j, l) - c.Gamma(i, l, m) * c.Gamma(m, j, k);
          R4(i, j, k, l) = v;
        }
      }
    }
  }
  return R4;
}

inline RiemannPack riemann_pack(detail::SprayExpansion& ex) {
  ex.require(4, "Riemann pack");
  const int n = ex.dim();
  using detail::delta;
  using detail::ypartial;
  RiemannPack p;
  p.R2 = TensorValue("ud", n);
  p.R4_alt = TensorValue("uddd", n);
  p.A = TensorValue("ud", n);
  p.W = TensorValue("ud", n);
  p.tau = TensorValue("d", n);
  p.R_dot = TensorValue("d", n);
  p.R_hess = TensorValue("dd", n);
  p.Rmk_m = TensorValue("d", n);

  p.R4 = riemann_four_index(ex);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) p.R2(i, k) = ex.R2(i, k).value();
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          p.R4_alt(i, j, k, l) = (ypartial(ex.R2(i, k), ex, {l, j}) - ypartial(ex.R2(i, l), ex, {k, j})) / 3.0;
        }
      }
    }
  }
  const Jet& R = ex.Rscalar();
  p.R = R.value();
  for (int k = 0; k < n; ++k) {
    p.R_dot(k) = ypartial(R, ex, {k});
    for (int l = 0; l < n; ++l) p.R_hess(k, l) = ypartial(R, ex, {k, l});
    double s = 0.0;
    for (int m = 0; m < n; ++m) s += ypartial(ex.R2(m, k), ex, {m});
    p.Rmk_m(k) = s;
  }
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) p.A(i, k) = p.R2(i, k) - p.R * delta(i, k);
  }
  // A^m_{k.m} = R^m_{k.m} - R_{.k}
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) p.W(i, k) = p.A(i, k) - (p.Rmk_m(k) - p.R_dot(k)) * ex.y(i) / (n + 1);
  }
  double yy = 0.0;
  for (int i = 0; i < n; ++i) yy += ex.y(i) * ex.y(i);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += p.A(i, k) * ex.y(i);
    p.tau(k) = -s / yy;
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(p.A(i, k) + p.tau(k) * ex.y(i)));
  }
  p.tau_residual = worst / (1.0 + p.A.max_abs());
  return p;
}

/// S = dG^m/dy^m - y^m d(ln sigma)/dx^m and the two chi-curvature routes:
/// chi_k = -(2 R^m_{k.m} + R^m_{m.k}) / 6 and chi_k = (S_{.k|m} y^m - S_{|k}) / 2,
/// where | is the Berwald horizontal covariant derivative.
inline SChiPack s_chi_pack(detail::SprayExpansion& ex, const VolumeForm& dV) {
  ex.require(3, "S and chi curvature");
  const int n = ex.dim();
  if (dV.dim() != n) throw std::invalid_argument("s_chi_pack: volume form dimension mismatch");
  using detail::ypartial;
  const PhaseJets& ph = ex.phase();
  const Jet lns = dV.log_density(ph.xs());
  Jet S = ex.N(0, 0);
  for (int m = 1; m < n; ++m) S += ex.N(m, m);
  for (int m = 0; m < n; ++m) S -= ph.y(m) * lns.derivative(ex.xv(m));

  SChiPack p{S.value(), TensorValue("d", n), TensorValue("d", n)};
  std::vector<Jet> Sk(n);
  std::vector<double> Sk0(n);
  for (int k = 0; k < n; ++k) {
    Sk[k] = S.derivative(ex.yv(k));
    Sk0[k] = Sk[k].value();
  }
  std::vector<double> N0(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) N0[i * n + j] = ex.N(i, j).value();
  }
  const auto dx = [&](const Jet& j, int k) { return j.partial(MultiIndex::unit(2 * n, ex.xv(k))); };
  const auto dy = [&](const Jet& j, int k) { return j.partial(MultiIndex::unit(2 * n, ex.yv(k))); };
  for (int k = 0; k < n; ++k) {
    // S_{.k|m} y^m = y^m (delta S_{.k} / delta x^m) - S_{.j} N^j_k
    double a = 0.0;
    for (int m = 0; m < n; ++m) {
      double h = dx(Sk[k], m);
      for (int j = 0; j < n; ++j) h -= N0[j * n + m] * dy(Sk[k], j);
      a += ex.y(m) * h;
    }
    for (int j = 0; j < n; ++j) a -= Sk0[j] * N0[j * n + k];
    double b = dx(S, k);
    for (int j = 0; j < n; ++j) b -= N0[j * n + k] * Sk0[j];
    p.chi_fromS(k) = 0.5 * (a - b);

    double r1 = 0.0, r2 = 0.0;
    for (int m = 0; m < n; ++m) {
      r1 += ypartial(ex.R2(m, k), ex, {m});
      r2 += ypartial(ex.R2(m, m), ex, {k});
    }
    p.chi_fromR(k) = -(2.0 * r1 + r2) / 6.0;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Point-level operations
// ---------------------------------------------------------------------------

inline ConnectionCoeffs connection_coeffs(const SprayField& G, const ChartPoint& x, const Direction& y) {
  detail::SprayExpansion ex(G, x, y, 2);
  return connection_coeffs(ex);
}

inline BerwaldPack berwald_pack(const SprayField& G, const ChartPoint& x, const Direction& y) {
  detail::SprayExpansion ex(G, x, y, 4);
  return berwald_pack(ex);
}

inline RiemannPack riemann_pack(const SprayField& G, const ChartPoint& x, const Direction& y) {
  detail::SprayExpansion ex(G, x, y, 4);
  return riemann_pack(ex);
}

inline SChiPack s_chi_pack(const SprayField& G, const VolumeForm& dV, const ChartPoint& x, const Direction& y) {
  detail::SprayExpansion ex(G, x, y, 3);
  return s_chi_pack(ex, dV);
}

/// Every tensor of the stack from one order-4 expansion.
inline CurvaturePack curvature_pack(const SprayField& G, const ChartPoint& x, const Direction& y,
                                    const VolumeForm* dV = nullptr) {
  detail::SprayExpansion ex(G, x, y, 4);
  CurvaturePack pack{x, y, connection_coeffs(ex), berwald_pack(ex), riemann_pack(ex), std::nullopt};
  if (dV) pack.s_chi = s_chi_pack(ex, *dV);
  return pack;
}

/// G^i - S y^i / (n + 1): the projective change by the S-curvature of (G, dV).
inline SprayField hat_spray(SprayField G, VolumeForm dV) {
  const int n = G.dim();
  if (dV.dim() != n) throw std::invalid_argument("hat_spray: volume form dimension mismatch");
  std::string label = "hat(" + G.label() + "," + dV.label() + ")";
  return SprayField(
      n,
      [n, G = std::move(G), dV = std::move(dV)](const PhaseJets& phase) {
        const PhaseJets up = phase.with_order(phase.order() + 1);
        auto g = G.coefficients(up);
        const Jet lns = dV.log_density(up.xs());
        Jet S = g[0].derivative(up.y_var(0));
        for (int m = 1; m < n; ++m) S += g[m].derivative(up.y_var(m));
        for (int m = 0; m < n; ++m) S -= phase.y(m) * lns.derivative(up.x_var(m));
        const Jet c = S / static_cast<double>(n + 1);
        std::vector<Jet> out(n);
        for (int i = 0; i < n; ++i) out[i] = g[i] - c * phase.y(i);
        return out;
      },
      std::move(label));
}

// ---------------------------------------------------------------------------
// Projective flatness
// ---------------------------------------------------------------------------

struct FlatnessResiduals {
  double weyl = 0.0;     ///< max|W| / (1 + max|R^i_k|)
  double douglas = 0.0;  ///< max|D| / (1 + max|B|)
};

inline FlatnessResiduals flatness_residuals(const SprayField& G, const ChartPoint& x, const Direction& y) {
  detail::SprayExpansion ex(G, x, y, 4);
  const BerwaldPack b = berwald_pack(ex);
  const RiemannPack r = riemann_pack(ex);
  return {relative_magnitude(r.W, r.R2.max_abs()), relative_magnitude(b.D, b.B.max_abs())};
}

/// Samples W and D; passes iff both stay within tolerance. Requires n >= 3.
inline VerificationReport projective_flatness_test(const SprayField& G, const SampleSpec& spec,
                                                   double tolerance = 1e-8, int threads = 1) {
  if (G.dim() < 3) {
    throw std::invalid_argument("projective_flatness_test: the W = 0 and D = 0 characterization needs dimension >= 3, got " +
                                std::to_string(G.dim()));
  }
  const auto residuals = parallel_map(spec.count, threads, [&](int i) {
    const PhaseSample s = sample_phase_point(G.dim(), spec, i);
    return flatness_residuals(G, s.x, s.y);
  });
  MaxTracker w, d;
  for (const auto& r : residuals) {
    w.update(r.weyl);
    d.update(r.douglas);
  }
  VerificationReport report;
  report.add_upper("weyl_vanishing", "lemma:flat_iff_W0_D0", w.value(), tolerance, spec.count);
  report.add_upper("douglas_vanishing", "lemma:flat_iff_W0_D0", d.value(), tolerance, spec.count);
  return report;
}

}  // namespace sprayscope
