#pragma once

/**
 * @file forms.hpp
 * @brief Alternating forms on an n-dimensional chart and the sigma_r polynomials of a curvature-form matrix.
 *
 * A p-form is stored by its coefficients on dx^{i_1} ^ ... ^ dx^{i_p} with
 * i_1 < ... < i_p; basis elements are identified by bitmasks.
 */

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sprayscope {

namespace detail {

class FormBasis {
 public:
  static constexpr int max_dim = 16;

  static std::shared_ptr<const FormBasis> get(int dim, int degree) {
    if (dim < 1 || dim > max_dim) throw std::invalid_argument("AltForm: dimension must be in [1, 16]");
    if (degree < 0 || degree > dim) {
      throw std::invalid_argument("AltForm: degree " + std::to_string(degree) + " exceeds chart dimension " +
                                  std::to_string(dim));
    }
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const FormBasis>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{dim, degree}];
    if (!slot) slot = std::shared_ptr<const FormBasis>(new FormBasis(dim, degree));
    return slot;
  }

  [[nodiscard]] std::size_t size() const { return masks_.size(); }
  [[nodiscard]] std::uint32_t mask(std::size_t i) const { return masks_[i]; }
  [[nodiscard]] int index(std::uint32_t mask) const { return index_[mask]; }

 private:
  FormBasis(int dim, int degree) : index_(std::size_t{1} << dim, -1) {
    for (std::uint32_t m = 0; m < (1u << dim); ++m) {
      if (std::popcount(m) == degree) masks_.push_back(m);
    }
    // lexicographic order of the increasing index tuples
    std::sort(masks_.begin(), masks_.end(), [](std::uint32_t a, std::uint32_t b) {
      while (a && b) {
        const int la = std::countr_zero(a), lb = std::countr_zero(b);
        if (la != lb) return la < lb;
        a &= a - 1;
        b &= b - 1;
      }
      return false;
    });
    for (std::size_t i = 0; i < masks_.size(); ++i) index_[masks_[i]] = static_cast<int>(i);
  }

  std::vector<std::uint32_t> masks_;
  std::vector<int> index_;
};

/// Sign of the permutation sorting the concatenation (a, b) of two disjoint increasing tuples.
inline int merge_sign(std::uint32_t a, std::uint32_t b) {
  int inversions = 0;
  for (std::uint32_t r = b; r; r &= r - 1) {
    const int j = std::countr_zero(r);
    inversions += std::popcount(a >> (j + 1));
  }
  return (inversions & 1) ? -1 : 1;
}

}  // namespace detail

/// Alternating p-form with constant coefficients at a point.
class AltForm {
 public:
  AltForm() = default;
  AltForm(int dim, int degree) : basis_(detail::FormBasis::get(dim, degree)), dim_(dim), degree_(degree) {
    c_.assign(basis_->size(), 0.0);
  }

  static AltForm scalar(int dim, double v) {
    AltForm f(dim, 0);
    f.c_[0] = v;
    return f;
  }

  /// value * dx^{i_1} ^ ... ^ dx^{i_p} for an arbitrary index tuple.
  static AltForm monomial(int dim, std::span<const int> indices, double value = 1.0) {
    AltForm f(dim, static_cast<int>(indices.size()));
    f.add_term(indices, value);
    return f;
  }
  static AltForm monomial(int dim, std::initializer_list<int> indices, double value = 1.0) {
    return monomial(dim, std::span<const int>(indices.begin(), indices.size()), value);
  }

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] std::size_t size() const { return c_.size(); }
  [[nodiscard]] std::span<const double> components() const { return c_; }

  /// Increasing index tuple of basis element `i`.
  [[nodiscard]] std::vector<int> basis_indices(std::size_t i) const {
    std::vector<int> out;
    for (std::uint32_t m = basis_->mask(i); m; m &= m - 1) out.push_back(std::countr_zero(m));
    return out;
  }
  [[nodiscard]] std::uint32_t basis_mask(std::size_t i) const { return basis_->mask(i); }

  /// Adds value * dx^{i_1} ^ ... ^ dx^{i_p}; repeated indices contribute nothing.
  AltForm& add_term(std::span<const int> indices, double value) {
    if (static_cast<int>(indices.size()) != degree_) throw std::invalid_argument("AltForm: term degree mismatch");
    std::vector<int> idx(indices.begin(), indices.end());
    std::uint32_t mask = 0;
    for (int i : idx) {
      if (i < 0 || i >= dim_) throw std::out_of_range("AltForm: index out of range");
      if (mask & (1u << i)) return *this;
      mask |= 1u << i;
    }
    int inversions = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = a + 1; b < idx.size(); ++b) inversions += idx[a] > idx[b];
    }
    c_[basis_->index(mask)] += (inversions & 1) ? -value : value;
    return *this;
  }

  /// Coefficient on dx^{i_1} ^ ... ^ dx^{i_p} (any order; sign-adjusted).
  [[nodiscard]] double coefficient(std::initializer_list<int> indices) const {
    AltForm probe(dim_, degree_);
    probe.add_term(std::span<const int>(indices.begin(), indices.size()), 1.0);
    for (std::size_t i = 0; i < probe.c_.size(); ++i) {
      if (probe.c_[i] != 0.0) return probe.c_[i] * c_[i];
    }
    return 0.0;
  }

  [[nodiscard]] double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }

  AltForm& operator+=(const AltForm& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  AltForm& operator-=(const AltForm& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  AltForm& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  friend AltForm operator+(AltForm a, const AltForm& b) { return a += b; }
  friend AltForm operator-(AltForm a, const AltForm& b) { return a -= b; }
  friend AltForm operator*(AltForm a, double s) { return a *= s; }
  friend AltForm operator*(double s, AltForm a) { return a *= s; }

  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
  }

  friend AltForm wedge(const AltForm& a, const AltForm& b);

 private:
  void check_same(const AltForm& o) const {
    if (o.dim_ != dim_ || o.degree_ != degree_) throw std::invalid_argument("AltForm: dimension or degree mismatch");
  }

  std::shared_ptr<const detail::FormBasis> basis_;
  int dim_ = 0;
  int degree_ = 0;
  std::vector<double> c_;
};

/// Exterior product.
inline AltForm wedge(const AltForm& a, const AltForm& b) {
  if (a.dim_ != b.dim_) {
    throw std::invalid_argument("form_wedge: dimension mismatch (" + std::to_string(a.dim_) + " vs " +
                                std::to_string(b.dim_) + ")");
  }
  AltForm out(a.dim_, a.degree_ + b.degree_);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i] == 0.0) continue;
    const std::uint32_t ma = a.basis_->mask(i);
    for (std::size_t j = 0; j < b.c_.size(); ++j) {
      const std::uint32_t mb = b.basis_->mask(j);
      if ((ma & mb) || b.c_[j] == 0.0) continue;
      out.c_[out.basis_->index(ma | mb)] += detail::merge_sign(ma, mb) * a.c_[i] * b.c_[j];
    }
  }
  return out;
}

inline AltForm form_wedge(const AltForm& a, const AltForm& b) { return wedge(a, b); }

/// n x n matrix of 2-forms; entry (i, j) is Omega_j^i (row = upper index).
class FormMatrix {
 public:
  FormMatrix() = default;
  explicit FormMatrix(int n, int degree = 2) : n_(n), degree_(degree), entries_(n * n, AltForm(n, degree)) {}

  [[nodiscard]] int size() const { return n_; }
  [[nodiscard]] int degree() const { return degree_; }
  AltForm& operator()(int i, int j) { return entries_.at(i * n_ + j); }
  [[nodiscard]] const AltForm& operator()(int i, int j) const { return entries_.at(i * n_ + j); }

  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, e.max_abs());
    return m;
  }

  [[nodiscard]] AltForm trace() const {
    AltForm t(n_, degree_);
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  /// A Omega A^{-1} for a constant invertible frame change A.
  [[nodiscard]] FormMatrix conjugated(const Eigen::MatrixXd& a) const {
    if (a.rows() != n_ || a.cols() != n_) throw std::invalid_argument("FormMatrix: frame change has wrong size");
    const Eigen::MatrixXd ainv = a.inverse();
    FormMatrix out(n_, degree_);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        for (int p = 0; p < n_; ++p) {
          for (int q = 0; q < n_; ++q) {
            const double w = a(i, p) * ainv(q, j);
            if (w != 0.0) out(i, j) += (*this)(p, q) * w;
          }
        }
      }
    }
    return out;
  }

  [[nodiscard]] double max_abs_diff(const FormMatrix& o) const {
    double m = 0.0;
    for (std::size_t e = 0; e < entries_.size(); ++e) {
      const auto a = entries_[e].components();
      const auto b = o.entries_.at(e).components();
      for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
  }

 private:
  int n_ = 0;
  int degree_ = 2;
  std::vector<AltForm> entries_;
};

/// sigma_r(Omega) = sum_{i_1 < ... < i_r} sum_{s in S_r} sign(s) Omega_{i_1}^{i_s(1)} ^ ... ^ Omega_{i_r}^{i_s(r)},
/// the t^r coefficient of det(I + t Omega) for even-degree entries.
inline AltForm sigma_r(const FormMatrix& omega, int r) {
  const int n = omega.size();
  if (r < 1 || r > n) throw std::invalid_argument("sigma_r: r must be in [1, n]");
  if (r * omega.degree() > n) {
    throw std::invalid_argument("sigma_r: degree " + std::to_string(r * omega.degree()) +
                                " exceeds chart dimension " + std::to_string(n));
  }
  AltForm out(n, r * omega.degree());
  std::vector<int> perm(r);
  std::vector<int> subset(r);
  std::iota(subset.begin(), subset.end(), 0);
  for (;;) {
    std::iota(perm.begin(), perm.end(), 0);
    do {
      int inversions = 0;
      for (int a = 0; a < r; ++a) {
        for (int b = a + 1; b < r; ++b) inversions += perm[a] > perm[b];
      }
      AltForm term = omega(subset[perm[0]], subset[0]);
      for (int s = 1; s < r; ++s) term = wedge(term, omega(subset[perm[s]], subset[s]));
      if (inversions & 1) {
        out -= term;
      } else {
        out += term;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    // next r-subset of {0..n-1}
    int k = r - 1;
    while (k >= 0 && subset[k] == n - r + k) --k;
    if (k < 0) break;
    ++subset[k];
    for (int j = k + 1; j < r; ++j) subset[j] = subset[j - 1] + 1;
  }
  return out;
}

}  // namespace sprayscope
