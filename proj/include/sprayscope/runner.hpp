#pragma once

/**
 * @file runner.hpp
 * @brief Command orchestration behind the sprayscope CLI: config validation, dispatch, JSON report.
 */

#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "families.hpp"
#include "oracle.hpp"
#include "selftest.hpp"
#include "suites.hpp"

namespace sprayscope {

inline constexpr const char* kReportVersion = "1.0.0";

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"curvature", "verify", "pontryagin", "bryant", "selftest"};
  return names;
}

struct RunConfig {
  std::string command = "verify";
  std::string spray = "sphere";
  int dim = 4;
  double alpha = std::numbers::pi / 4;
  int k = 1;
  std::uint64_t seed = 42;
  /// Unset: 16 for pontryagin and bryant, 32 otherwise.
  std::optional<int> samples;
  /// Identity-class tolerance (cross identities, flatness, invariance, hat lemma).
  double tol = 1e-8;
  double umax = 3.0;
  double step = 1e-3;
  std::string volume = "unit";
  /// Worker count; not part of the report, which is identical for every value.
  int threads = 1;

  [[nodiscard]] int sample_count() const {
    if (samples) return *samples;
    return (command == "pontryagin" || command == "bryant") ? 16 : 32;
  }
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void validate(const RunConfig& c) {
  const auto fail = [](const std::string& m) { throw ConfigError(m); };
  const auto& cmds = command_names();
  if (std::find(cmds.begin(), cmds.end(), c.command) == cmds.end()) fail("unknown command '" + c.command + "'");
  if (c.sample_count() < 1) fail("--samples must be >= 1");
  if (!(c.tol > 0.0)) fail("--tol must be positive");
  if (c.threads < 1) fail("--threads must be >= 1");
  if (c.command == "selftest") return;
  if (!(c.alpha > 0.0 && c.alpha < std::numbers::pi / 2)) fail("--alpha must lie in (0, pi/2)");
  if (c.command == "bryant") {
    if (c.dim < 2) fail("bryant: --dim must be >= 2");
    if (!(c.umax > 0.0) || !(c.step > 0.0) || c.step >= c.umax) fail("bryant: need 0 < --step < --umax");
    if (c.umax * 1.5 <= 1.01) fail("bryant: --umax too small for the sampling shell (need umax > 0.68)");
    return;
  }
  const auto& fams = spray_family_names();
  if (std::find(fams.begin(), fams.end(), c.spray) == fams.end()) {
    std::string known;
    for (const auto& s : fams) known += (known.empty() ? "" : ", ") + s;
    fail("unknown spray family '" + c.spray + "' (known: " + known + ")");
  }
  const auto& vols = volume_names();
  if (std::find(vols.begin(), vols.end(), c.volume) == vols.end()) fail("unknown volume form '" + c.volume + "'");
  if (c.dim < 2 || c.dim > 7) fail("--dim must lie in [2, 7]");
  if (c.command == "verify" && c.dim < 3) fail("verify: flatness tests need --dim >= 3");
  if (c.command == "pontryagin") {
    if (c.k < 1) fail("pontryagin: --k must be >= 1");
    if (4 * c.k > c.dim) fail("pontryagin: need 4k <= dim (got k = " + std::to_string(c.k) + ", dim = " +
                              std::to_string(c.dim) + ")");
  }
}

struct RunResult {
  VerificationReport report;
  std::string csv;  ///< ODE table or curvature dump, empty for other commands
  double wall_ms = 0.0;
};

/// Runs one command. Throws ConfigError for an invalid config; precondition failures of the
/// mathematics are reported as failed checks.
inline RunResult run(const RunConfig& c) {
  validate(c);
  const auto t0 = std::chrono::steady_clock::now();
  RunResult out;
  SampleSpec spec;
  spec.seed = c.seed;
  spec.count = c.sample_count();
  SuiteTolerances tol;
  tol.identity = c.tol;
  std::ostringstream csv;

  if (c.command == "selftest") {
    out.report.append(forms_battery(c.seed));
    out.report.append(jet_algebra_battery(c.seed));
    out.report.append(jet_fd_battery(c.seed));
    out.report.append(evaluator_fd_battery(c.seed));
  } else if (c.command == "bryant") {
    BryantOptions opt;
    opt.alpha = c.alpha;
    opt.dim = c.dim;
    opt.u_max = c.umax;
    opt.step = c.step;
    out.report = bryant_battery(opt, spec, &csv, c.threads);
  } else {
    FamilyOptions fo;
    fo.alpha = c.alpha;
    const SprayFamily fam = make_spray_family(c.spray, c.dim, fo);
    const VolumeForm dV = make_volume(c.volume, c.dim);
    if (c.command == "verify") {
      out.report = curvature_battery(fam, dV, spec, tol, {}, c.threads);
    } else if (c.command == "curvature") {
      out.report = curvature_dump(fam, dV, spec, &csv, c.threads);
    } else {
      PontryaginOptions po;
      po.k = c.k;
      out.report = pontryagin_battery(fam, dV, spec, tol, po, c.threads);
    }
  }
  out.csv = csv.str();
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

inline nlohmann::json config_json(const RunConfig& c) {
  return nlohmann::json{{"command", c.command}, {"spray", c.spray},   {"dim", c.dim},
                        {"alpha", c.alpha},     {"k", c.k},           {"seed", c.seed},
                        {"samples", c.sample_count()}, {"tol", c.tol}, {"umax", c.umax},
                        {"step", c.step},       {"volume", c.volume}};
}

/// JSON report with sorted keys; NaN residuals become null.
inline nlohmann::json report_json(const RunConfig& c, const RunResult& r, bool timing = true) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& k : r.report.checks()) {
    checks.push_back({{"name", k.name},
                      {"anchor", k.anchor},
                      {"max_residual", k.max_residual},
                      {"tolerance", k.tolerance},
                      {"pass", k.pass},
                      {"samples", k.samples},
                      {"bound", k.bound == Bound::upper ? "upper" : "lower"},
                      {"note", k.note}});
  }
  nlohmann::json j{{"version", kReportVersion},
                   {"config", config_json(c)},
                   {"checks", std::move(checks)},
                   {"observations", r.report.observations()}};
  if (timing) j["wall_ms"] = std::round(r.wall_ms * 1000.0) / 1000.0;
  return j;
}

}  // namespace sprayscope
