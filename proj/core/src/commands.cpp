#include "vppfreq/commands.hpp"

#include <charconv>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "vppfreq/allocator.hpp"
#include "vppfreq/freq_model.hpp"
#include "vppfreq/ode_oracle.hpp"
#include "vppfreq/requirements.hpp"

namespace vppfreq {
namespace {

using nlohmann::json;

// Numbers are rounded to 12 significant digits before they reach the JSON
// writer, which then emits the shortest round-trip form of the rounded value.
json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  if (v == 0.0) v = 0.0;
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  double rounded = 0.0;
  std::from_chars(buf, res.ptr, rounded);
  return rounded;
}

json num_array(const std::vector<double>& values) {
  json out = json::array();
  for (double v : values) out.push_back(num(v));
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct MetricsReport {
  FreqMetrics metrics;
  bool closed_form = true;
};

MetricsReport metrics_with_fallback(const Scenario& s, const VppParams& vpp) {
  MetricsReport out;
  try {
    out.metrics = metrics(s.grid, vpp, s.disturbance);
    return out;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Overdamped &&
        e.code() != ErrorCode::NeverActivates) {
      throw;
    }
  }
  out.closed_form = false;
  out.metrics.rocof_max = rocof_max(s.grid, vpp, s.disturbance);
  out.metrics.qss = qss(s.grid, vpp, s.disturbance);
  const auto low = trajectory_nadir(simulate(s.grid, vpp, s.disturbance, s.sim));
  out.metrics.nadir = low.nadir;
  out.metrics.t_nadir = low.t_nadir;
  out.metrics.t_db1 = std::nan("");
  out.metrics.t_db2 = std::nan("");
  return out;
}

json requirement_json(const Requirement& r) {
  return {{"h_re_s", num(r.h_re)},
          {"d_re_pu", num(r.d_re)},
          {"h_binding", to_string(r.h_binding)},
          {"d_binding", to_string(r.d_binding)},
          {"monotone_probe_ok", r.monotone_probe_ok}};
}

json metrics_json(const MetricsReport& m) {
  return {{"rocof_max_hz_per_s", num(m.metrics.rocof_max)},
          {"nadir_hz", num(m.metrics.nadir)},
          {"qss_hz", num(m.metrics.qss)},
          {"t_nadir_s", num(m.metrics.t_nadir)},
          {"t_db1_s", num(m.metrics.t_db1)},
          {"t_db2_s", num(m.metrics.t_db2)},
          {"nadir_source", m.closed_form ? "closed_form" : "ode"}};
}

json violations_json(const FeasibilityReport& f) {
  json out = json::array();
  for (auto c : f.violated) out.push_back(to_string(c));
  return out;
}

json objectives_json(const ObjectiveVector& o) {
  return {{"f_vpp", num(o.f_vpp)}, {"f_ibr", num_array(o.f_ibr)}};
}

json point_json(const ParetoPoint& p) {
  return {{"sample_index", p.sample_index},
          {"weights", num_array(p.weights)},
          {"h_s", num_array(p.allocation.h)},
          {"d_pu", num_array(p.allocation.d)},
          {"objectives", objectives_json(p.objectives)}};
}

json front_json(const std::vector<ParetoPoint>& front) {
  json out = json::array();
  for (const auto& p : front) out.push_back(point_json(p));
  return out;
}

std::string front_csv(const std::vector<ParetoPoint>& front, std::size_t n) {
  std::ostringstream os;
  os << "f_vpp";
  for (std::size_t k = 1; k <= n; ++k) os << ",f_ibr_" << k;
  os << '\n';
  for (const auto& p : front) {
    os << format_number(p.objectives.f_vpp);
    for (double v : p.objectives.f_ibr) os << ',' << format_number(v);
    os << '\n';
  }
  return os.str();
}

VppParams vpp_for(const Scenario& s) {
  if (s.vpp) return *s.vpp;
  const auto req = determine_requirement(s.grid, s.disturbance, s.limits);
  return {req.h_re, req.d_re};
}

AllocationProblem problem_for(const Scenario& s, const Requirement& req) {
  if (s.ibrs.empty()) {
    throw Error(ErrorCode::InvalidInput, "allocation needs a non-empty ibrs list");
  }
  return AllocationProblem(s.ibrs, req.h_re, req.d_re, s.disturbance.delta_p,
                           s.compensation, s.allocation);
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value,
                                 std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput:
    case ErrorCode::MissingCompensation:
      return 2;
    case ErrorCode::Overdamped:
    case ErrorCode::NeverActivates:
    case ErrorCode::NonFinite:
      return 3;
    case ErrorCode::DeadbandExceedsLimit:
    case ErrorCode::Unsatisfiable:
    case ErrorCode::Infeasible:
    case ErrorCode::EmptyFront:
      return 4;
  }
  return 1;
}

std::string error_json(std::string_view error, std::string_view message) {
  return json{{"error", error}, {"message", message}}.dump();
}

std::string cmd_simulate(const Scenario& s, SimulateMode mode) {
  const VppParams vpp = vpp_for(s);
  std::ostringstream os;

  if (mode == SimulateMode::ClosedForm) {
    const FrequencyResponse response(s.grid, vpp, s.disturbance);
    validate(s.sim);
    const auto steps = static_cast<std::size_t>(std::llround(s.sim.t_end / s.sim.dt));
    os << "t,delta_f_hz\n";
    for (std::size_t i = 0; i <= steps; i += s.sim.record_every) {
      const double t = static_cast<double>(i) * s.sim.dt;
      os << format_number(t) << ',' << format_number(response.at(t)) << '\n';
    }
    return os.str();
  }

  const auto traj = simulate(s.grid, vpp, s.disturbance, s.sim);
  if (mode == SimulateMode::Ode) {
    os << "t,delta_f_hz,p_sg_pu,p_vpp_pu\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
      os << format_number(traj.times[i]) << ',' << format_number(traj.delta_f[i])
         << ',' << format_number(traj.p_sg[i]) << ','
         << format_number(traj.p_vpp[i]) << '\n';
    }
    return os.str();
  }

  const FrequencyResponse response(s.grid, vpp, s.disturbance);
  os << "t,delta_f_closed_hz,delta_f_ode_hz,p_sg_pu,p_vpp_pu\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    os << format_number(traj.times[i]) << ','
       << format_number(response.at(traj.times[i])) << ','
       << format_number(traj.delta_f[i]) << ',' << format_number(traj.p_sg[i])
       << ',' << format_number(traj.p_vpp[i]) << '\n';
  }
  return os.str();
}

std::string cmd_requirements(const Scenario& s) {
  const auto req = determine_requirement(s.grid, s.disturbance, s.limits);
  const VppParams vpp{req.h_re, req.d_re};
  const auto feas = in_feasible_region(s.grid, s.disturbance, s.limits, vpp);
  json out = {{"requirement", requirement_json(req)},
              {"metrics", metrics_json(metrics_with_fallback(s, vpp))},
              {"feasibility",
               {{"feasible", feas.feasible}, {"violated", violations_json(feas)}}}};
  return dump(out);
}

std::string cmd_allocate(const Scenario& s, OutputFormat format,
                         unsigned threads) {
  const auto req = determine_requirement(s.grid, s.disturbance, s.limits);
  const auto problem = problem_for(s, req);
  const auto report = compare_single_objective(problem, s.sampling.n_samples,
                                               s.sampling.seed, threads);
  const auto& b = report.bargaining;
  if (format == OutputFormat::Csv) return front_csv(b.front, problem.size());

  json bounds_h = json::array();
  json bounds_d = json::array();
  for (std::size_t k = 0; k < problem.size(); ++k) {
    bounds_h.push_back({num(problem.h_boxes()[k].lo), num(problem.h_boxes()[k].hi)});
    bounds_d.push_back({num(problem.d_boxes()[k].lo), num(problem.d_boxes()[k].hi)});
  }

  json comparison = {
      {"economic", point_json(report.economic)},
      {"economic_nash_value", num(report.economic_nash_value)},
      {"economic_positive_factors", report.economic_positive_factors},
      {"economic_positive_product", num(report.economic_positive_product)},
      {"nash_gain_pct",
       report.nash_gain_pct ? num(*report.nash_gain_pct) : json(nullptr)},
      {"cost_increase_pct", num(report.cost_increase_pct)}};
  if (problem.compensation()) {
    comparison["vpp_profit_bargaining"] =
        num(vpp_profit(problem, b.chosen.allocation));
    comparison["vpp_profit_economic"] =
        num(vpp_profit(problem, report.economic.allocation));
  }

  json out = {
      {"requirement", requirement_json(req)},
      {"problem",
       {{"n_ibrs", problem.size()},
        {"n_samples", s.sampling.n_samples},
        {"seed", s.sampling.seed},
        {"h_bounds_s", bounds_h},
        {"d_bounds_pu", bounds_d},
        {"ideal_damping_pu", num_array(problem.ideal_damping())}}},
      {"bargaining",
       {{"chosen", point_json(b.chosen)},
        {"chosen_index", b.chosen_index},
        {"disagreement", objectives_json(b.disagreement)},
        {"nash_value", num(b.nash_value)},
        {"degenerate", b.degenerate},
        {"positive_factors", b.positive_factors},
        {"positive_product", num(b.positive_product)},
        {"front", front_json(b.front)}}},
      {"comparison", comparison}};
  return dump(out);
}

std::string cmd_pareto(const Scenario& s, OutputFormat format,
                       unsigned threads) {
  const auto req = determine_requirement(s.grid, s.disturbance, s.limits);
  const auto problem = problem_for(s, req);
  const auto front =
      pareto_front(problem, s.sampling.n_samples, s.sampling.seed, threads);
  if (format == OutputFormat::Csv) return front_csv(front, problem.size());
  return dump({{"requirement", requirement_json(req)},
               {"front", front_json(front)}});
}

std::string cmd_region(const Scenario& s, std::size_t n_h, std::size_t n_d,
                       bool include_required) {
  if (n_h == 0 || n_d == 0) {
    throw Error(ErrorCode::InvalidInput, "region resolution must be >= 1");
  }
  auto axis = [](double max, std::size_t n, std::size_t i) {
    return n == 1 ? 0.0 : max * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  std::ostringstream os;
  os << "h_vpp_s,d_vpp_pu,feasible,violated\n";
  auto row = [&](const VppParams& vpp) {
    const auto f = in_feasible_region(s.grid, s.disturbance, s.limits, vpp);
    os << format_number(vpp.h_vpp) << ',' << format_number(vpp.d_vpp) << ','
       << (f.feasible ? "true" : "false") << ',';
    for (std::size_t i = 0; i < f.violated.size(); ++i) {
      os << (i ? ";" : "") << to_string(f.violated[i]);
    }
    os << '\n';
  };
  for (std::size_t i = 0; i < n_h; ++i) {
    for (std::size_t j = 0; j < n_d; ++j) {
      row({axis(s.limits.h_vpp_max, n_h, i), axis(s.limits.d_vpp_max, n_d, j)});
    }
  }
  if (include_required) {
    const auto req = determine_requirement(s.grid, s.disturbance, s.limits);
    row({req.h_re, req.d_re});
  }
  return os.str();
}

}  // namespace vppfreq
