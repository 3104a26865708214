#pragma once

/**
 * @file sampling.hpp
 * @brief Counter-based seeded sampling of phase points, and an order-preserving parallel map.
 *
 * Every sample is drawn from a generator keyed by (seed, sample index), so a
 * sample does not depend on how many other samples were drawn or on which
 * thread evaluated it.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

#include "spray.hpp"

namespace sprayscope {

/// SplitMix64 stream keyed by (seed, stream id).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : state_(mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL))) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

struct SampleSpec {
  std::uint64_t seed = 42;
  int count = 32;
  /// x uniform in the shell min_radius <= |x| <= radius.
  double radius = 2.0;
  double min_radius = 0.0;
  /// y uniform on the unit sphere, scaled by lambda uniform in [lambda_min, lambda_max].
  double lambda_min = 0.5;
  double lambda_max = 2.0;
};

struct PhaseSample {
  int index;
  ChartPoint x;
  Direction y;
};

inline PhaseSample sample_phase_point(int n, const SampleSpec& spec, int index) {
  CounterRng rng(spec.seed, static_cast<std::uint64_t>(index));
  std::vector<double> x(n);
  for (;;) {
    double r2 = 0.0;
    for (double& v : x) {
      v = rng.uniform(-spec.radius, spec.radius);
      r2 += v * v;
    }
    if (r2 <= spec.radius * spec.radius && r2 >= spec.min_radius * spec.min_radius) break;
  }
  std::vector<double> y(n);
  for (;;) {
    double r2 = 0.0;
    for (double& v : y) {
      v = rng.uniform(-1.0, 1.0);
      r2 += v * v;
    }
    if (r2 <= 1.0 && r2 > 1e-4) {
      const double scale = rng.uniform(spec.lambda_min, spec.lambda_max) / std::sqrt(r2);
      for (double& v : y) v *= scale;
      break;
    }
  }
  return PhaseSample{index, ChartPoint(std::move(x)), Direction(std::move(y))};
}

inline std::vector<PhaseSample> sample_phase_points(int n, const SampleSpec& spec) {
  std::vector<PhaseSample> out;
  out.reserve(spec.count);
  for (int i = 0; i < spec.count; ++i) out.push_back(sample_phase_point(n, spec, i));
  return out;
}

/// Evaluates fn(i) for i in [0, count) on `threads` workers; results are ordered by index.
/// The first exception by index is rethrown after all workers finish.
template <class Fn>
auto parallel_map(int count, int threads, Fn fn) -> std::vector<decltype(fn(0))> {
  using R = decltype(fn(0));
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<int> cursor{0};
  auto worker = [&] {
    for (int i = cursor++; i < count; i = cursor++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int nthreads = std::clamp(threads, 1, std::max(1, count));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace sprayscope
