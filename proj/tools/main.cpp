#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "sprayscope/runner.hpp"

namespace {

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  return static_cast<bool>(f);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace sprayscope;
  CLI::App app{"sprayscope: curvature and characteristic-form verification for sprays"};
  app.require_subcommand(1, 1);

  RunConfig cfg;
  int samples = 0;
  std::string out_path, csv_path;
  bool no_timing = false;

  const std::map<std::string, std::string> blurbs{
      {"curvature", "evaluate the curvature stack at sample points (tensor dump via --csv)"},
      {"verify", "run the identity, flatness, invariance and hat-spray checks"},
      {"pontryagin", "check sigma_2k of the hat curvature forms"},
      {"bryant", "Bryant metric: ODE, projective relation and P identity"},
      {"selftest", "jet, form and finite-difference oracle batteries"},
  };
  for (const auto& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, blurbs.at(name));
    sub->add_option("--spray", cfg.spray, "spray family")->capture_default_str();
    sub->add_option("--dim", cfg.dim, "manifold dimension")->capture_default_str();
    sub->add_option("--alpha", cfg.alpha, "Bryant angle in (0, pi/2)")->capture_default_str();
    sub->add_option("--k", cfg.k, "Pontryagin degree: checks sigma_2k")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();
    sub->add_option("--samples", samples, "sample points (default 16 for pontryagin/bryant, else 32)");
    sub->add_option("--tol", cfg.tol, "identity tolerance")->capture_default_str();
    sub->add_option("--umax", cfg.umax, "ODE interval end")->capture_default_str();
    sub->add_option("--step", cfg.step, "RK4 step")->capture_default_str();
    sub->add_option("--volume", cfg.volume, "volume form: unit, sphere, exp-linear, exp-quadratic")
        ->capture_default_str();
    sub->add_option("--threads", cfg.threads, "worker threads")->capture_default_str();
    sub->add_option("--out", out_path, "JSON report path (default: stdout)");
    sub->add_option("--csv", csv_path, "CSV output for curvature and bryant");
    sub->add_flag("--no-timing", no_timing, "omit wall_ms from the report");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // help and version requests come through here too and exit 0
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (samples != 0) cfg.samples = samples;
  if (cfg.command == "bryant" && app.get_subcommands().front()->count("--dim") == 0) cfg.dim = 3;

  RunResult res;
  try {
    res = run(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "sprayscope: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "sprayscope: error: " << e.what() << "\n";
    return 3;
  }

  const std::string json = report_json(cfg, res, !no_timing).dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << json;
  } else {
    if (!write_file(out_path, json)) {
      std::cerr << "sprayscope: cannot write " << out_path << "\n";
      return 2;
    }
    for (const auto& c : res.report.checks()) {
      std::printf("%-4s %-52s %.3e %s %.1e\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.max_residual,
                  c.max_residual <= c.tolerance ? "<=" : ">", c.tolerance);
    }
  }
  if (!csv_path.empty()) {
    if (res.csv.empty()) {
      std::cerr << "sprayscope: --csv is only produced by curvature and bryant\n";
    } else if (!write_file(csv_path, res.csv)) {
      std::cerr << "sprayscope: cannot write " << csv_path << "\n";
      return 2;
    }
  }
  return res.report.all_pass() ? 0 : 1;
}
