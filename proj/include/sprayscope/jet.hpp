#pragma once

/**
 * @file jet.hpp
 * @brief Truncated multivariate Taylor arithmetic (forward-mode jets).
 *
 * A Jet stores the Taylor coefficients c_a = d^a f / a! of a scalar function of
 * m variables up to total order d, in a dense graded-lexicographic layout.
 * Layouts for the same m are prefix-compatible: the coefficients of order
 * <= d' < d occupy the first entries of the order-d array, so truncation is a
 * prefix copy and operands of different order combine without reshuffling.
 *
 * @code
 * std::vector<double> base{3.0, 1.0};
 * auto x = Jet::coordinate(base, 0, 2);
 * auto y = Jet::coordinate(base, 1, 2);
 * auto f = x * x * y;
 * f.partial(MultiIndex{{1, 1}});   // d^2 f / dx dy = 2 x = 6
 * @endcode
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace sprayscope {

/// Exponent vector of a partial derivative; unordered by construction.
class MultiIndex {
 public:
  MultiIndex() = default;

  explicit MultiIndex(std::vector<int> exponents) : exps_(std::move(exponents)) {
    for (int e : exps_) {
      if (e < 0) throw std::invalid_argument("MultiIndex: negative exponent");
    }
  }

  static MultiIndex zero(int num_vars) { return MultiIndex(std::vector<int>(num_vars, 0)); }

  static MultiIndex unit(int num_vars, int var, int power = 1) {
    MultiIndex a = zero(num_vars);
    return a.raised(var, power);
  }

  [[nodiscard]] int size() const { return static_cast<int>(exps_.size()); }
  [[nodiscard]] int order() const {
    int s = 0;
    for (int e : exps_) s += e;
    return s;
  }
  int operator[](int i) const { return exps_.at(i); }
  [[nodiscard]] const std::vector<int>& exponents() const { return exps_; }

  /// Copy with `count` more derivatives in variable `var`.
  [[nodiscard]] MultiIndex raised(int var, int count = 1) const {
    if (var < 0 || var >= size()) throw std::invalid_argument("MultiIndex: variable out of range");
    MultiIndex out = *this;
    out.exps_[var] += count;
    if (out.exps_[var] < 0) throw std::invalid_argument("MultiIndex: negative exponent");
    return out;
  }

  /// a! = prod a_i!
  [[nodiscard]] double factorial() const {
    double f = 1.0;
    for (int e : exps_) {
      for (int k = 2; k <= e; ++k) f *= k;
    }
    return f;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> exps_;
};

namespace detail {

/// Index tables for jets of m variables truncated at order d.
class JetLayout {
 public:
  static constexpr std::uint32_t npos = std::numeric_limits<std::uint32_t>::max();
  static constexpr int max_vars = 16;
  static constexpr int max_order = 15;

  static std::shared_ptr<const JetLayout> get(int num_vars, int order) {
    if (num_vars < 1 || num_vars > max_vars) {
      throw std::invalid_argument("Jet: number of variables must be in [1, 16], got " +
                                  std::to_string(num_vars));
    }
    if (order < 0 || order > max_order) {
      throw std::invalid_argument("Jet: truncation order must be in [0, 15], got " +
                                  std::to_string(order));
    }
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{num_vars, order}];
    if (!slot) slot = std::shared_ptr<const JetLayout>(new JetLayout(num_vars, order));
    return slot;
  }

  [[nodiscard]] int num_vars() const { return m_; }
  [[nodiscard]] int order() const { return d_; }
  [[nodiscard]] std::size_t size() const { return degree_begin_.back(); }

  /// Number of coefficients of total degree <= p (p may exceed the order).
  [[nodiscard]] std::size_t count_upto(int p) const {
    if (p < 0) return 0;
    return degree_begin_[std::min(p, d_) + 1];
  }
  [[nodiscard]] std::size_t degree_begin(int p) const { return degree_begin_[p]; }
  [[nodiscard]] int degree(std::size_t i) const { return degree_[i]; }
  [[nodiscard]] int exponent(std::size_t i, int var) const { return exps_[i * m_ + var]; }

  [[nodiscard]] std::uint32_t index_of(const MultiIndex& a) const {
    if (a.size() != m_) throw std::invalid_argument("MultiIndex length does not match jet variables");
    if (a.order() > d_) return npos;
    auto it = lookup_.find(pack(a.exponents().data()));
    return it == lookup_.end() ? npos : it->second;
  }

  /// Index of a + e_var, for entries of degree < d.
  [[nodiscard]] std::uint32_t raise(std::size_t i, int var) const { return raise_[i * m_ + var]; }

  /// Row i of the product table: targets of a_i * b_j for j < count_upto(d - deg i).
  [[nodiscard]] const std::uint32_t* product_row(std::size_t i) const {
    std::call_once(product_once_, [this] { build_product_table(); });
    return product_targets_.data() + product_offsets_[i];
  }

  [[nodiscard]] double factorial(std::size_t i) const { return factorial_[i]; }

 private:
  JetLayout(int m, int d) : m_(m), d_(d) {
    std::vector<int> current(m, 0);
    degree_begin_.push_back(0);
    for (int p = 0; p <= d; ++p) {
      enumerate(p, 0, current);
      degree_begin_.push_back(degree_.size());
    }
    const std::size_t n = degree_.size();
    lookup_.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) lookup_.emplace(pack(&exps_[i * m]), static_cast<std::uint32_t>(i));
    raise_.assign(n * m, npos);
    std::vector<int> e(m);
    for (std::size_t i = 0; i < n; ++i) {
      if (degree_[i] == d) continue;
      for (int v = 0; v < m; ++v) {
        for (int k = 0; k < m; ++k) e[k] = exps_[i * m + k];
        ++e[v];
        raise_[i * m + v] = lookup_.at(pack(e.data()));
      }
    }
    factorial_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double f = 1.0;
      for (int k = 0; k < m; ++k) {
        for (int j = 2; j <= exps_[i * m + k]; ++j) f *= j;
      }
      factorial_[i] = f;
    }
  }

  void enumerate(int remaining, int var, std::vector<int>& current) {
    if (var == m_ - 1) {
      current[var] = remaining;
      for (int k = 0; k < m_; ++k) exps_.push_back(static_cast<std::uint8_t>(current[k]));
      int deg = 0;
      for (int k = 0; k < m_; ++k) deg += current[k];
      degree_.push_back(deg);
      current[var] = 0;
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      current[var] = e;
      enumerate(remaining - e, var + 1, current);
    }
    current[var] = 0;
  }

  template <class T>
  std::uint64_t pack(const T* e) const {
    std::uint64_t key = 0;
    for (int k = 0; k < m_; ++k) key |= static_cast<std::uint64_t>(e[k]) << (4 * k);
    return key;
  }

  void build_product_table() const {
    const std::size_t n = size();
    product_offsets_.resize(n + 1);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      product_offsets_[i] = total;
      total += count_upto(d_ - degree_[i]);
    }
    product_offsets_[n] = total;
    product_targets_.resize(total);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t ki = pack(&exps_[i * m_]);
      const std::size_t len = count_upto(d_ - degree_[i]);
      std::uint32_t* row = product_targets_.data() + product_offsets_[i];
      for (std::size_t j = 0; j < len; ++j) row[j] = lookup_.at(ki + pack(&exps_[j * m_]));
    }
  }

  int m_;
  int d_;
  std::vector<std::uint8_t> exps_;
  std::vector<int> degree_;
  std::vector<std::size_t> degree_begin_;
  std::unordered_map<std::uint64_t, std::uint32_t> lookup_;
  std::vector<std::uint32_t> raise_;
  std::vector<double> factorial_;
  mutable std::once_flag product_once_;
  mutable std::vector<std::size_t> product_offsets_;
  mutable std::vector<std::uint32_t> product_targets_;
};

}  // namespace detail

/// Truncated Taylor expansion of a scalar function of m variables at a base point.
class Jet {
 public:
  Jet() = default;

  static Jet constant(double value, int num_vars, int order) {
    Jet j(detail::JetLayout::get(num_vars, order));
    j.c_[0] = value;
    return j;
  }

  /// Jet of x -> x[var] expanded at `base`; m = base.size().
  static Jet coordinate(std::span<const double> base, int var, int order) {
    const int m = static_cast<int>(base.size());
    if (var < 0 || var >= m) {
      throw std::invalid_argument("Jet::coordinate: variable index " + std::to_string(var) +
                                  " out of range for " + std::to_string(m) + " variables");
    }
    Jet j = constant(base[var], m, order);
    if (order >= 1) j.c_[j.layout_->raise(0, var)] = 1.0;
    return j;
  }

  [[nodiscard]] bool empty() const { return !layout_; }
  [[nodiscard]] int num_vars() const { return layout().num_vars(); }
  [[nodiscard]] int order() const { return layout().order(); }
  [[nodiscard]] std::size_t size() const { return c_.size(); }
  [[nodiscard]] double value() const { return c_.at(0); }
  [[nodiscard]] std::span<const double> coefficients() const { return c_; }

  /// Taylor coefficient c_a (zero-initialized storage is exact for a beyond the data).
  [[nodiscard]] double coefficient(const MultiIndex& a) const {
    const auto idx = checked_index(a);
    return c_[idx];
  }

  /// d^a f at the base point, i.e. a! * c_a.
  [[nodiscard]] double partial(const MultiIndex& a) const {
    const auto idx = checked_index(a);
    return layout_->factorial(idx) * c_[idx];
  }

  /// Jet of d f / d x_var, truncated at order - 1.
  [[nodiscard]] Jet derivative(int var) const {
    if (var < 0 || var >= num_vars()) throw std::invalid_argument("Jet::derivative: variable out of range");
    if (order() == 0) throw std::invalid_argument("Jet::derivative: order-0 jet carries no derivative data");
    Jet out(detail::JetLayout::get(num_vars(), order() - 1));
    const auto& lay = *layout_;
    for (std::size_t i = 0; i < out.c_.size(); ++i) {
      out.c_[i] = (lay.exponent(i, var) + 1) * c_[lay.raise(i, var)];
    }
    return out;
  }

  [[nodiscard]] Jet truncated(int new_order) const {
    if (new_order > order()) throw std::invalid_argument("Jet::truncated: cannot raise truncation order");
    if (new_order == order()) return *this;
    Jet out(detail::JetLayout::get(num_vars(), new_order));
    std::copy_n(c_.begin(), out.c_.size(), out.c_.begin());
    return out;
  }

  /// Same layout, all coefficients zero.
  [[nodiscard]] Jet zero_like() const { return Jet(layout_); }

  Jet operator-() const {
    Jet out = *this;
    for (double& v : out.c_) v = -v;
    return out;
  }

  Jet& operator+=(const Jet& b) { return accumulate(b, 1.0); }
  Jet& operator-=(const Jet& b) { return accumulate(b, -1.0); }
  Jet& operator+=(double s) {
    c_.at(0) += s;
    return *this;
  }
  Jet& operator-=(double s) { return *this += -s; }
  Jet& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  Jet& operator/=(double s) { return *this *= 1.0 / s; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return (-a) += s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }
  friend Jet operator/(double s, const Jet& a);
  friend Jet operator*(const Jet& a, const Jet& b) { return multiply(a, b); }
  friend Jet operator/(const Jet& a, const Jet& b);

  /// Cauchy product truncated at min(order(a), order(b)).
  static Jet multiply(const Jet& a, const Jet& b) {
    check_compatible(a, b);
    const int d = std::min(a.order(), b.order());
    Jet out(detail::JetLayout::get(a.num_vars(), d));
    const auto& lay = *out.layout_;
    const int la = a.lowest_degree(d);
    const int lb = b.lowest_degree(d);
    if (la < 0 || lb < 0 || la + lb > d) return out;
    const double* pa = a.c_.data();
    const double* pb = b.c_.data();
    double* po = out.c_.data();
    const std::size_t i_end = lay.count_upto(d - lb);
    const std::size_t j_begin = lay.degree_begin(lb);
    for (std::size_t i = lay.degree_begin(la); i < i_end; ++i) {
      const double ai = pa[i];
      if (ai == 0.0) continue;
      const std::uint32_t* row = lay.product_row(i);
      const std::size_t j_end = lay.count_upto(d - lay.degree(i));
      for (std::size_t j = j_begin; j < j_end; ++j) po[row[j]] += ai * pb[j];
    }
    return out;
  }

  /// sum_k coeffs[k] (a - a(0))^k, the composition of a univariate Taylor series with a.
  [[nodiscard]] Jet compose(std::span<const double> series) const {
    Jet shift = *this;
    shift.c_[0] = 0.0;
    const int top = std::min<int>(order(), static_cast<int>(series.size()) - 1);
    Jet out = constant(top >= 0 ? series[top] : 0.0, num_vars(), order());
    for (int k = top - 1; k >= 0; --k) {
      out = multiply(out, shift);
      out.c_[0] += series[k];
    }
    return out;
  }

 private:
  explicit Jet(std::shared_ptr<const detail::JetLayout> layout)
      : layout_(std::move(layout)), c_(layout_->size(), 0.0) {}

  [[nodiscard]] const detail::JetLayout& layout() const {
    if (!layout_) throw std::logic_error("Jet: use of an empty jet");
    return *layout_;
  }

  [[nodiscard]] std::uint32_t checked_index(const MultiIndex& a) const {
    if (a.order() > order()) {
      throw std::out_of_range("Jet: derivative order " + std::to_string(a.order()) +
                              " exceeds truncation order " + std::to_string(order()));
    }
    return layout().index_of(a);
  }

  /// Lowest total degree with a nonzero coefficient (<= d), or -1.
  [[nodiscard]] int lowest_degree(int d) const {
    const auto& lay = *layout_;
    for (int p = 0; p <= d; ++p) {
      for (std::size_t i = lay.degree_begin(p); i < lay.degree_begin(p + 1); ++i) {
        if (c_[i] != 0.0) return p;
      }
    }
    return -1;
  }

  static void check_compatible(const Jet& a, const Jet& b) {
    if (a.num_vars() != b.num_vars()) {
      throw std::invalid_argument("Jet: operands have different variable counts (" +
                                  std::to_string(a.num_vars()) + " vs " + std::to_string(b.num_vars()) + ")");
    }
  }

  Jet& accumulate(const Jet& b, double sign) {
    check_compatible(*this, b);
    if (b.order() < order()) *this = truncated(b.order());
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += sign * b.c_[i];
    return *this;
  }

  std::shared_ptr<const detail::JetLayout> layout_;
  std::vector<double> c_;
};

namespace detail {

inline std::string constant_term_message(const char* op, double c0) {
  std::ostringstream os;
  os.precision(17);
  os << op << ": constant term " << c0 << " outside the domain";
  return os.str();
}

}  // namespace detail

inline Jet reciprocal(const Jet& a) {
  const double a0 = a.value();
  if (a0 == 0.0 || !std::isfinite(a0)) throw std::domain_error(detail::constant_term_message("division", a0));
  std::vector<double> s(a.order() + 1);
  double p = 1.0 / a0;
  for (int k = 0; k <= a.order(); ++k) {
    s[k] = (k % 2 == 0 ? p : -p);
    p /= a0;
  }
  return a.compose(s);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
inline Jet operator/(double s, const Jet& a) { return reciprocal(a) * s; }

inline Jet sqrt(const Jet& a) {
  const double a0 = a.value();
  if (!(a0 > 0.0)) throw std::domain_error(detail::constant_term_message("sqrt", a0));
  std::vector<double> s(a.order() + 1);
  s[0] = std::sqrt(a0);
  for (int k = 1; k <= a.order(); ++k) s[k] = s[k - 1] * (0.5 - (k - 1)) / (k * a0);
  return a.compose(s);
}

inline Jet log(const Jet& a) {
  const double a0 = a.value();
  if (!(a0 > 0.0)) throw std::domain_error(detail::constant_term_message("ln", a0));
  std::vector<double> s(a.order() + 1);
  s[0] = std::log(a0);
  double p = 1.0;
  for (int k = 1; k <= a.order(); ++k) {
    p /= a0;
    s[k] = (k % 2 == 1 ? p : -p) / k;
  }
  return a.compose(s);
}

inline Jet exp(const Jet& a) {
  std::vector<double> s(a.order() + 1);
  s[0] = std::exp(a.value());
  for (int k = 1; k <= a.order(); ++k) s[k] = s[k - 1] / k;
  return a.compose(s);
}

inline Jet atan(const Jet& a) {
  const double a0 = a.value();
  const int d = a.order();
  // h(t) = 1 / (q0 + q1 t + t^2) is the derivative of atan(a0 + t).
  const double q0 = 1.0 + a0 * a0;
  const double q1 = 2.0 * a0;
  std::vector<double> h(d + 1, 0.0);
  for (int k = 0; k <= d; ++k) {
    double v = (k == 0 ? 1.0 : 0.0);
    if (k >= 1) v -= q1 * h[k - 1];
    if (k >= 2) v -= h[k - 2];
    h[k] = v / q0;
  }
  std::vector<double> s(d + 1);
  s[0] = std::atan(a0);
  for (int k = 1; k <= d; ++k) s[k] = h[k - 1] / k;
  return a.compose(s);
}

inline Jet pow(const Jet& a, int power) {
  if (power < 0) return reciprocal(pow(a, -power));
  Jet result = Jet::constant(1.0, a.num_vars(), a.order());
  Jet base = a;
  while (power > 0) {
    if (power & 1) result = result * base;
    power >>= 1;
    if (power > 0) base = base * base;
  }
  return result;
}

/// d^a f at the base point.
inline double extract_partial(const Jet& j, const MultiIndex& a) { return j.partial(a); }

}  // namespace sprayscope
