// Prints one PASS/FAIL line per acceptance criterion and exits non-zero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "vppfreq/allocator.hpp"
#include "vppfreq/commands.hpp"
#include "vppfreq/errors.hpp"
#include "vppfreq/freq_model.hpp"
#include "vppfreq/ode_oracle.hpp"
#include "vppfreq/requirements.hpp"
#include "vppfreq/scenario.hpp"

using namespace vppfreq;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances and budgets.
constexpr double kDampingTarget = 12.109;
constexpr double kDampingTol = 1e-3;
constexpr double kRocofTarget = 0.2146;
constexpr double kRocofTol = 5e-5;  // matches the 4-decimal figure
constexpr double kHreTarget = 19.125;
constexpr double kHreTol = 0.5;
constexpr double kNadirTarget = 0.50;
constexpr double kNadirTol = 0.01;
constexpr double kQssTarget = 0.35;
constexpr double kQssTol = 1e-3;
constexpr double kOdeDeviation = 0.05;
constexpr double kGreedyTol = 1e-6;
constexpr double kEqualityTol = 1e-9;

constexpr double kFastBudgetS = 1e-3;
constexpr double kRequirementBudgetS = 1.0;
constexpr double kOdeBudgetS = 60.0;
constexpr double kGreedyBudgetS = 30.0;
constexpr double kNashBudgetS = 10.0;

int failures = 0;

void report(const char* name, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Mean wall time per call over `reps` calls.
template <typename F>
double per_call_seconds(int reps, F&& f) {
  volatile double sink = 0.0;
  const auto start = Clock::now();
  for (int i = 0; i < reps; ++i) sink = sink + f();
  return seconds_since(start) / reps;
}

void qss_damping() {
  const auto g = oracle::reference_grid();
  const auto dist = oracle::reference_disturbance();
  const auto l = oracle::case_study_limits();
  const double d = min_damping_for_qss(g, dist, l);
  const double t = per_call_seconds(1000, [&] { return min_damping_for_qss(g, dist, l); });
  report("qss-damping", std::abs(d - kDampingTarget) <= kDampingTol && t < kFastBudgetS,
         fmt("d_re=%.6f (target %.3f +/- %.0e), %.2e s/call", d, kDampingTarget,
             kDampingTol, t));
}

void rocof_metric() {
  const auto g = oracle::reference_grid();
  const auto dist = oracle::reference_disturbance();
  const VppParams vpp{19.125, 12.109};
  const double r = rocof_max(g, vpp, dist);
  const double t = per_call_seconds(1000, [&] { return rocof_max(g, vpp, dist); });
  report("rocof-metric", std::abs(r - kRocofTarget) <= kRocofTol && t < kFastBudgetS,
         fmt("rocof=%.6f Hz/s (target %.4f, rounds to %.2f), %.2e s/call", r,
             kRocofTarget, std::round(r * 100) / 100, t));
}

void requirement() {
  const auto g = oracle::reference_grid();
  const auto dist = oracle::reference_disturbance();
  const auto l = oracle::case_study_limits();
  const auto start = Clock::now();
  const auto req = determine_requirement(g, dist, l);
  const double t = seconds_since(start);
  const auto m = metrics(g, {req.h_re, req.d_re}, dist);
  const double ode_nadir =
      trajectory_nadir(simulate(g, {req.h_re, req.d_re}, dist)).nadir;
  const bool pass = std::abs(req.h_re - kHreTarget) <= kHreTol &&
                    std::abs(m.nadir - kNadirTarget) <= kNadirTol &&
                    std::abs(m.qss - kQssTarget) <= kQssTol && t < kRequirementBudgetS;
  report("requirement", pass,
         fmt("h_re=%.4f s, d_re=%.6f, nadir=%.5f Hz (ODE %.5f), qss=%.5f Hz, %.3f s",
             req.h_re, req.d_re, m.nadir, ode_nadir, m.qss, t));
}

void closed_form_vs_ode() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> scale(0.5, 1.5);
  SimConfig cfg;
  cfg.t_end = 30.0;
  const auto start = Clock::now();
  int accepted = 0;
  int drawn = 0;
  double worst = 0.0;
  while (accepted < 100 && drawn < 10000) {
    ++drawn;
    auto g = oracle::reference_grid();
    g.d0 *= scale(rng);
    g.h0 *= scale(rng);
    g.r *= scale(rng);
    g.t_sg *= scale(rng);
    const Disturbance dist{0.25 * scale(rng)};
    const VppParams vpp{19.125 * scale(rng), 12.109 * scale(rng)};
    std::optional<FrequencyResponse> resp;
    try {
      resp.emplace(g, vpp, dist);
    } catch (const Error&) {
      continue;  // overdamped or never activating
    }
    ++accepted;
    const auto tr = simulate(g, vpp, dist, cfg);
    double peak = 0.0;
    double dev = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      peak = std::max(peak, std::abs(tr.delta_f[i]));
      dev = std::max(dev, std::abs(resp->at(tr.times[i]) - tr.delta_f[i]));
    }
    worst = std::max(worst, dev / peak);
  }
  const double t = seconds_since(start);
  report("closed-form-vs-ode", accepted == 100 && worst <= kOdeDeviation && t < kOdeBudgetS,
         fmt("%d scenarios, worst deviation %.3f%% of peak (limit %.0f%%), %.2f s",
             accepted, 100 * worst, 100 * kOdeDeviation, t));
}

void greedy_vs_brute_force() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> n_dist(1, 3);
  std::uniform_int_distribution<int> milli(0, 1000);
  std::uniform_real_distribution<double> cost(0.5, 4.0);
  const auto start = Clock::now();
  double worst = 0.0;
  int cases = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = n_dist(rng);
    std::vector<IbrSpec> ibrs(n);
    double h_lo = 0, h_hi = 0, d_lo = 0, d_hi = 0;
    for (auto& ibr : ibrs) {
      ibr.alpha = cost(rng);
      ibr.beta = cost(rng);
      ibr.p_rated = 0.05 + 0.001 * milli(rng);
      ibr.h_min = 0.001 * milli(rng);
      ibr.h_max = ibr.h_min + 0.002 * milli(rng);
      ibr.d_min = 0.001 * milli(rng);
      ibr.d_max = ibr.d_min + 0.002 * milli(rng);
      h_lo += ibr.h_min;
      h_hi += *ibr.h_max;
      d_lo += ibr.d_min;
      d_hi += *ibr.d_max;
    }
    auto on_grid = [&](double lo, double hi) {
      const double v = std::round((lo + (hi - lo) * 0.001 * milli(rng)) * 1e3) / 1e3;
      return std::clamp(v, lo, hi);
    };
    const AllocationProblem pb(ibrs, on_grid(h_lo, h_hi), on_grid(d_lo, d_hi), 0.25);
    const auto w = sample_simplex(n + 1, 1, 1000 + trial).front();
    const auto a = solve_scalarized(pb, w);
    const auto o = evaluate_objectives(pb, a);
    double value = w[0] * o.f_vpp;
    double constant = 0.0;
    std::vector<double> hc, dc;
    for (int k = 0; k < n; ++k) {
      value += w[k + 1] * o.f_ibr[k];
      constant += w[k + 1] * pb.ideal_damping()[k];
      hc.push_back(w[0] * ibrs[k].alpha);
      dc.push_back(w[0] * ibrs[k].beta - w[k + 1]);
    }
    const double brute = oracle::brute_force_fill(hc, pb.h_boxes(), pb.h_re(), 1e-3) +
                         oracle::brute_force_fill(dc, pb.d_boxes(), pb.d_re(), 1e-3) +
                         constant;
    worst = std::max(worst, std::abs(value - brute));
    ++cases;
  }
  const double t = seconds_since(start);
  report("greedy-vs-brute-force", worst <= kGreedyTol && t < kGreedyBudgetS,
         fmt("%d problems, worst |greedy - brute| = %.2e (limit %.0e), %.2f s", cases,
             worst, kGreedyTol, t));
}

void nash_properties() {
  const AllocationProblem pb(oracle::reference_ibrs(), kHreTarget, 12.109375, 0.25);
  const auto start = Clock::now();
  const auto rep = compare_single_objective(pb, 200, 42);
  const double t = seconds_since(start);
  const auto& b = rep.bargaining;

  const bool a = b.nash_value >= rep.economic_nash_value &&
                 (!b.degenerate || b.positive_factors > rep.economic_positive_factors ||
                  (b.positive_factors == rep.economic_positive_factors &&
                   b.positive_product >= rep.economic_positive_product));
  const bool bb = b.chosen.objectives.f_vpp >= rep.economic.objectives.f_vpp;
  const bool c = rep.nash_gain_pct && *rep.nash_gain_pct > 0.0 &&
                 rep.cost_increase_pct > 0.0;
  bool d = true;
  for (const auto& p : b.front) {
    for (const auto& q : b.front) d = d && !dominates(q.objectives, p.objectives);
  }
  double eq = 0.0;
  for (const auto& p : b.front) {
    double hs = 0.0, ds = 0.0;
    for (double v : p.allocation.h) hs += v;
    for (double v : p.allocation.d) ds += v;
    eq = std::max({eq, std::abs(hs - pb.h_re()), std::abs(ds - pb.d_re())});
  }
  const bool e = eq <= kEqualityTol;
  report("nash-properties", a && bb && c && d && e && t < kNashBudgetS,
         fmt("(a)%s (b)%s (c)%s gain=%.2f%% cost+%.2f%% (d)%s front=%zu (e)%s "
             "max eq err=%.1e, degenerate=%s, %.3f s",
             a ? "ok" : "no", bb ? "ok" : "no", c ? "ok" : "no",
             rep.nash_gain_pct.value_or(std::nan("")), rep.cost_increase_pct,
             d ? "ok" : "no", b.front.size(), e ? "ok" : "no", eq,
             b.degenerate ? "yes" : "no", t));
}

void determinism() {
  std::ifstream in(VPPFREQ_SCENARIO_DIR "/reference_case.json");
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto scenario = parse_scenario(ss.str());
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(VPPFREQ_TEST_WORKDIR) / "acceptance";
  fs::create_directories(dir);
  auto write = [&](const fs::path& p, unsigned threads) {
    std::ofstream(p, std::ios::binary) << cmd_allocate(scenario, OutputFormat::Json, threads);
    std::ifstream back(p, std::ios::binary);
    std::ostringstream bytes;
    bytes << back.rdbuf();
    return bytes.str();
  };
  const auto first = write(dir / "allocate_1.json", 1);
  const auto second = write(dir / "allocate_2.json", 0);
  report("determinism", !first.empty() && first == second,
         fmt("two cmd_allocate runs (1 thread, hardware threads): %zu vs %zu bytes, %s",
             first.size(), second.size(), first == second ? "identical" : "different"));
}

}  // namespace

int main() {
  qss_damping();
  rocof_metric();
  requirement();
  closed_form_vs_ode();
  greedy_vs_brute_force();
  nash_properties();
  determinism();
  return failures == 0 ? 0 : 1;
}
