// Acceptance driver: one PASS/FAIL line per criterion, with its wall time.
// A criterion passes only if every check in it passes and it finishes within its time budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "sprayscope/families.hpp"
#include "sprayscope/runner.hpp"
#include "sprayscope/selftest.hpp"
#include "sprayscope/suites.hpp"

using namespace sprayscope;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> failures;

  void absorb(const VerificationReport& r) {
    for (const auto& c : r.checks()) {
      if (c.pass) continue;
      pass = false;
      char buf[512];
      std::snprintf(buf, sizeof buf, "%s: %.3e %s %.1e%s%s", c.name.c_str(), c.max_residual,
                    c.bound == Bound::upper ? ">" : "<=", c.tolerance, c.note.empty() ? "" : "  ", c.note.c_str());
      failures.emplace_back(buf);
    }
  }
  void fail(std::string why) {
    pass = false;
    failures.push_back(std::move(why));
  }
};

SampleSpec seeded(int count, std::uint64_t seed = 42) {
  SampleSpec s;
  s.seed = seed;
  s.count = count;
  return s;
}

BatteryParts only(bool forced, bool cross, bool flatness, bool invariance, bool hat) {
  BatteryParts p;
  p.forced = forced;
  p.cross = cross;
  p.flatness = flatness;
  p.invariance = invariance;
  p.hat = hat;
  return p;
}

Outcome criterion1() {
  Outcome o;
  const std::vector<std::string> sprays{"flat-norm", "flat-linear", "flat-cubic", "sphere",
                                        "sphere-norm", "sphere-cubic", "randers"};
  for (int n : {4, 5}) {
    for (const auto& name : sprays) {
      o.absorb(pontryagin_battery(make_spray_family(name, n), sphere_volume(n), seeded(16), {}, {1, 4}));
    }
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  const int n = 4;
  for (const std::string name : {"sphere-cubic", "randers", "berwald-random"}) {
    const SprayFamily fam = make_spray_family(name, n);
    if (!fam.douglas) o.fail(name + " is not flagged Douglas");
    o.absorb(curvature_battery(fam, make_volume("exp-quadratic", n), seeded(32), {}, only(false, false, false, false, true)));
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  const int n = 4;
  for (const auto& name : spray_family_names()) {
    const SprayFamily fam = make_spray_family(name, n);
    const VerificationReport r =
        curvature_battery(fam, make_volume("exp-linear", n), seeded(32), {}, only(false, true, true, false, false));
    o.absorb(r);
    if (!fam.projectively_flat && r.find(name + ":weyl_nonzero_control") == nullptr) {
      o.fail(name + ": missing nonflat control");
    }
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  for (int n : {3, 4}) {
    for (const auto& name : spray_family_names()) {
      o.absorb(curvature_battery(make_spray_family(name, n), sphere_volume(n), seeded(8, 7), {},
                                 only(true, false, false, false, false)));
    }
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  const int n = 4;
  for (const auto& name : spray_family_names()) {
    o.absorb(curvature_battery(make_spray_family(name, n), unit_volume(n), seeded(8, 11), {},
                               only(false, false, false, true, false)));
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  o.absorb(evaluator_fd_battery(2024, 200));
  return o;
}

Outcome criterion7() {
  Outcome o;
  for (double alpha : {std::numbers::pi / 8, std::numbers::pi / 4, 3 * std::numbers::pi / 8}) {
    BryantOptions opt;
    opt.alpha = alpha;
    SampleSpec s = seeded(16);
    s.radius = 1.5;
    s.min_radius = std::max(0.4, 1.01 / opt.u_max);
    o.absorb(bryant_battery(opt, s));
  }
  return o;
}

Outcome criterion8() {
  Outcome o;
  o.absorb(forms_battery(99, 20, 100));
  return o;
}

Outcome criterion9() {
  Outcome o;
  const auto compare = [&](RunConfig c) {
    c.threads = 1;
    const std::string a = report_json(c, run(c), false).dump(2);
    c.threads = 4;
    const std::string b = report_json(c, run(c), false).dump(2);
    if (a != b) o.fail(c.command + " " + c.spray + ": reports differ across thread counts");
  };
  RunConfig v;
  v.command = "verify";
  v.spray = "sphere-cubic";
  v.volume = "exp-quadratic";
  v.samples = 12;
  compare(v);
  RunConfig p;
  p.command = "pontryagin";
  p.spray = "randers";
  p.samples = 6;
  compare(p);
  RunConfig b;
  b.command = "bryant";
  b.dim = 3;
  b.samples = 6;
  compare(b);
  return o;
}

struct Criterion {
  int id;
  double budget_s;
  std::function<Outcome()> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> all{
      {1, 60, criterion1}, {2, 20, criterion2}, {3, 30, criterion3}, {4, 10, criterion4}, {5, 15, criterion5},
      {6, 20, criterion6}, {7, 90, criterion7}, {8, 10, criterion8}, {9, 60, criterion9},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "runtime %.2f s exceeds %.0f s", secs, c.budget_s);
      o.fail(buf);
    }
    std::printf("%s criterion %d (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, secs);
    for (const auto& f : o.failures) std::printf("    %s\n", f.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
