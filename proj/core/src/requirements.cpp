#include "vppfreq/requirements.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vppfreq/errors.hpp"

namespace vppfreq {
namespace {

// Slack on metric-vs-limit comparisons so that points computed exactly on a
// constraint boundary are accepted.
constexpr double kLimitSlack = 1e-9;

constexpr double kInertiaTolerance = 1e-3;
constexpr int kProbePoints = 50;

[[noreturn]] void unsatisfiable(const std::string& what) {
  throw Error(ErrorCode::Unsatisfiable, what);
}

}  // namespace

std::string_view to_string(Constraint c) noexcept {
  switch (c) {
    case Constraint::Rocof: return "rocof";
    case Constraint::Nadir: return "nadir";
    case Constraint::Qss: return "qss";
    case Constraint::InertiaBox: return "h_box";
    case Constraint::DampingBox: return "d_box";
  }
  return "unknown";
}

std::string_view to_string(Binding b) noexcept {
  switch (b) {
    case Binding::Rocof: return "rocof";
    case Binding::Nadir: return "nadir";
    case Binding::Qss: return "qss";
    case Binding::LowerBound: return "lower-bound";
  }
  return "unknown";
}

void validate(const SecurityLimits& limits) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(limits.rocof_lim) || !positive(limits.nadir_lim) ||
      !positive(limits.qss_lim)) {
    throw Error(ErrorCode::InvalidInput, "security limits must be > 0");
  }
  if (!positive(limits.h_vpp_max) || !positive(limits.d_vpp_max)) {
    throw Error(ErrorCode::InvalidInput, "VPP parameter maxima must be > 0");
  }
  if (limits.qss_lim > limits.nadir_lim) {
    throw Error(ErrorCode::InvalidInput, "qss limit must not exceed nadir limit");
  }
}

double nadir_with_fallback(const GridParams& grid, const VppParams& vpp,
                           const Disturbance& dist, bool* from_ode) {
  try {
    const double value = nadir(grid, vpp, dist).nadir;
    if (from_ode) *from_ode = false;
    return value;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Overdamped &&
        e.code() != ErrorCode::NeverActivates) {
      throw;
    }
  }
  SimConfig cfg;
  cfg.t_end = std::max(60.0, 20.0 * grid.t_sg);
  if (from_ode) *from_ode = true;
  return trajectory_nadir(simulate(grid, vpp, dist, cfg)).nadir;
}

FeasibilityReport in_feasible_region(const GridParams& grid,
                                     const Disturbance& dist,
                                     const SecurityLimits& limits,
                                     const VppParams& vpp) {
  FeasibilityReport report;
  if (rocof_max(grid, vpp, dist) > limits.rocof_lim + kLimitSlack) {
    report.violated.push_back(Constraint::Rocof);
  }
  report.nadir = nadir_with_fallback(grid, vpp, dist, &report.nadir_from_ode);
  if (report.nadir > limits.nadir_lim + kLimitSlack) {
    report.violated.push_back(Constraint::Nadir);
  }
  if (qss(grid, vpp, dist) > limits.qss_lim + kLimitSlack) {
    report.violated.push_back(Constraint::Qss);
  }
  if (vpp.h_vpp < 0.0 || vpp.h_vpp > limits.h_vpp_max) {
    report.violated.push_back(Constraint::InertiaBox);
  }
  if (vpp.d_vpp < 0.0 || vpp.d_vpp > limits.d_vpp_max) {
    report.violated.push_back(Constraint::DampingBox);
  }
  report.feasible = report.violated.empty();
  return report;
}

double min_damping_for_qss(const GridParams& grid, const Disturbance& dist,
                           const SecurityLimits& limits) {
  const double q = hz_to_pu(limits.qss_lim, grid.f0);
  const double db1 = grid.f_db1_pu();
  if (!(q > db1)) {
    std::ostringstream os;
    os << "qss limit " << limits.qss_lim << " Hz does not exceed the VPP dead "
       << "band " << grid.f_db1 << " Hz";
    throw Error(ErrorCode::DeadbandExceedsLimit, os.str());
  }
  const double d = (dist.delta_p + grid.r * grid.f_db2_pu() -
                    q * (grid.d0 + grid.r)) /
                   (q - db1);
  return std::max(0.0, d);
}

double min_inertia_for_rocof(const GridParams& grid, const Disturbance& dist,
                             const SecurityLimits& limits) {
  const double rocof_pu = hz_to_pu(limits.rocof_lim, grid.f0);
  return std::max(0.0, dist.delta_p / (2.0 * rocof_pu) - grid.h0);
}

Requirement determine_requirement(const GridParams& grid,
                                  const Disturbance& dist,
                                  const SecurityLimits& limits) {
  Requirement req;

  // Stage 1: the quasi-steady-state limit fixes the damping.
  req.d_re = min_damping_for_qss(grid, dist, limits);
  req.d_binding = req.d_re > 0.0 ? Binding::Qss : Binding::LowerBound;
  if (req.d_re > limits.d_vpp_max) {
    std::ostringstream os;
    os << "required damping " << req.d_re << " exceeds d_vpp_max "
       << limits.d_vpp_max;
    unsatisfiable(os.str());
  }

  // Stage 2: smallest inertia above the RoCoF bound that meets the nadir.
  const double h_lo = min_inertia_for_rocof(grid, dist, limits);
  const double h_hi = limits.h_vpp_max;
  if (h_lo > h_hi) {
    std::ostringstream os;
    os << "RoCoF needs H_VPP >= " << h_lo << " s, above h_vpp_max " << h_hi;
    unsatisfiable(os.str());
  }
  auto nadir_at = [&](double h) {
    return nadir_with_fallback(grid, {h, req.d_re}, dist);
  };
  auto meets = [&](double h) { return nadir_at(h) <= limits.nadir_lim; };

  if (meets(h_lo)) {
    req.h_re = h_lo;
    req.h_binding = h_lo > 0.0 ? Binding::Rocof : Binding::LowerBound;
    return req;
  }
  if (!meets(h_hi)) {
    std::ostringstream os;
    os << "nadir " << nadir_at(h_hi) << " Hz at h_vpp_max still exceeds "
       << limits.nadir_lim << " Hz";
    unsatisfiable(os.str());
  }
  req.h_binding = Binding::Nadir;

  double previous = nadir_at(h_lo);
  for (int i = 1; i < kProbePoints; ++i) {
    const double h = h_lo + (h_hi - h_lo) * i / (kProbePoints - 1);
    const double current = nadir_at(h);
    if (current > previous + 1e-12) {
      req.monotone_probe_ok = false;
      break;
    }
    previous = current;
  }

  if (!req.monotone_probe_ok) {
    for (double h = h_lo; h < h_hi; h += kInertiaTolerance) {
      if (meets(h)) {
        req.h_re = h;
        return req;
      }
    }
    req.h_re = h_hi;
    return req;
  }

  double lo = h_lo;
  double hi = h_hi;
  while (hi - lo > kInertiaTolerance) {
    const double mid = 0.5 * (lo + hi);
    (meets(mid) ? hi : lo) = mid;
  }
  req.h_re = hi;
  return req;
}

}  // namespace vppfreq
