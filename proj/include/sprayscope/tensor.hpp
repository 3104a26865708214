#pragma once

/**
 * @file tensor.hpp
 * @brief Component arrays with declared index valence at a fixed point (x, y).
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sprayscope {

/// Multi-index array of real components; valence is a string over {'u', 'd'}.
class TensorValue {
 public:
  TensorValue() = default;

  TensorValue(std::string valence, int dim) : valence_(std::move(valence)), dim_(dim) {
    if (dim < 1) throw std::invalid_argument("TensorValue: dimension must be positive");
    for (char c : valence_) {
      if (c != 'u' && c != 'd') throw std::invalid_argument("TensorValue: valence must use 'u'/'d'");
    }
    std::size_t n = 1;
    for (std::size_t k = 0; k < valence_.size(); ++k) n *= static_cast<std::size_t>(dim_);
    data_.assign(n, 0.0);
  }

  static TensorValue scalar(double v) {
    TensorValue t("", 1);
    t.data_[0] = v;
    return t;
  }

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] int rank() const { return static_cast<int>(valence_.size()); }
  [[nodiscard]] const std::string& valence() const { return valence_; }
  [[nodiscard]] std::span<const double> components() const { return data_; }
  [[nodiscard]] std::span<double> components() { return data_; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }

  template <class... I>
  double& operator()(I... idx) {
    return data_[flat({static_cast<int>(idx)...})];
  }
  template <class... I>
  double operator()(I... idx) const {
    return data_[flat({static_cast<int>(idx)...})];
  }

  /// Row-major multi-index of flat position `pos`.
  [[nodiscard]] std::vector<int> unflatten(std::size_t pos) const {
    std::vector<int> idx(valence_.size());
    for (int k = rank() - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(pos % dim_);
      pos /= dim_;
    }
    return idx;
  }

  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  [[nodiscard]] bool same_shape(const TensorValue& o) const {
    return valence_ == o.valence_ && dim_ == o.dim_;
  }

 private:
  [[nodiscard]] std::size_t flat(std::initializer_list<int> idx) const {
    if (idx.size() != valence_.size()) throw std::invalid_argument("TensorValue: wrong number of indices");
    std::size_t pos = 0;
    for (int i : idx) {
      if (i < 0 || i >= dim_) throw std::out_of_range("TensorValue: index out of range");
      pos = pos * dim_ + static_cast<std::size_t>(i);
    }
    return pos;
  }

  std::string valence_;
  int dim_ = 0;
  std::vector<double> data_{0.0};
};

inline double max_abs_diff(const TensorValue& a, const TensorValue& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("TensorValue: shape mismatch in comparison");
  double m = 0.0;
  auto ca = a.components();
  auto cb = b.components();
  for (std::size_t i = 0; i < ca.size(); ++i) m = std::max(m, std::abs(ca[i] - cb[i]));
  return m;
}

/// max |a - b| / (1 + max component magnitude of a and b).
inline double relative_residual(const TensorValue& a, const TensorValue& b) {
  return max_abs_diff(a, b) / (1.0 + std::max(a.max_abs(), b.max_abs()));
}

/// max |a| / (1 + scale).
inline double relative_magnitude(const TensorValue& a, double scale) { return a.max_abs() / (1.0 + scale); }

}  // namespace sprayscope
