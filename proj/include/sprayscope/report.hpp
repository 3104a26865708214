#pragma once

/**
 * @file report.hpp
 * @brief Named verification checks and their aggregation.
 */

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace sprayscope {

/// Upper bounds pass when max_residual <= tolerance; lower bounds (control cases)
/// pass when the observed magnitude exceeds the threshold.
enum class Bound { upper, lower };

struct CheckResult {
  std::string name;
  std::string anchor;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  int samples = 0;
  Bound bound = Bound::upper;
  std::string note;
};

class VerificationReport {
 public:
  CheckResult& add_upper(std::string name, std::string anchor, double max_residual, double tolerance, int samples) {
    CheckResult c{std::move(name), std::move(anchor), max_residual, tolerance,
                  std::isfinite(max_residual) && max_residual <= tolerance, samples, Bound::upper, {}};
    checks_.push_back(std::move(c));
    return checks_.back();
  }

  CheckResult& add_lower(std::string name, std::string anchor, double magnitude, double threshold, int samples) {
    CheckResult c{std::move(name), std::move(anchor), magnitude, threshold,
                  std::isfinite(magnitude) && magnitude > threshold, samples, Bound::lower, {}};
    checks_.push_back(std::move(c));
    return checks_.back();
  }

  /// A check that could not be evaluated (precondition failure); always fails.
  CheckResult& add_failure(std::string name, std::string anchor, std::string why, int samples = 0) {
    CheckResult c{std::move(name), std::move(anchor), std::nan(""), 0.0, false, samples, Bound::upper, std::move(why)};
    checks_.push_back(std::move(c));
    return checks_.back();
  }

  /// A reported quantity that is not asserted.
  void observe(const std::string& name, double value) { observations_[name] = value; }

  void append(const VerificationReport& other) {
    checks_.insert(checks_.end(), other.checks_.begin(), other.checks_.end());
    for (const auto& [k, v] : other.observations_) observations_[k] = v;
  }

  [[nodiscard]] const std::vector<CheckResult>& checks() const { return checks_; }
  [[nodiscard]] const std::map<std::string, double>& observations() const { return observations_; }
  [[nodiscard]] bool all_pass() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const CheckResult& c) { return c.pass; });
  }
  [[nodiscard]] const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks_) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }

 private:
  std::vector<CheckResult> checks_;
  std::map<std::string, double> observations_;
};

/// Running maximum that keeps NaN visible.
class MaxTracker {
 public:
  void update(double v) {
    if (std::isnan(v)) {
      nan_ = true;
      return;
    }
    max_ = std::max(max_, v);
  }
  [[nodiscard]] double value() const { return nan_ ? std::nan("") : max_; }

 private:
  double max_ = 0.0;
  bool nan_ = false;
};

}  // namespace sprayscope
