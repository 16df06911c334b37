#pragma once

#include <string_view>
#include <vector>

#include "vppfreq/freq_model.hpp"
#include "vppfreq/ode_oracle.hpp"

namespace vppfreq {

/// Frequency security limits and the VPP parameter box. Limits are in Hz.
struct SecurityLimits {
  double rocof_lim = 0.0;    ///< [Hz/s]
  double nadir_lim = 0.0;    ///< [Hz]
  double qss_lim = 0.0;      ///< [Hz]
  double h_vpp_max = 50.0;   ///< [s]
  double d_vpp_max = 50.0;   ///< [p.u.]

  bool operator==(const SecurityLimits&) const = default;
};

void validate(const SecurityLimits& limits);

enum class Constraint { Rocof, Nadir, Qss, InertiaBox, DampingBox };

std::string_view to_string(Constraint c) noexcept;

/// Which constraint fixed a required value.
enum class Binding { Rocof, Nadir, Qss, LowerBound };

std::string_view to_string(Binding b) noexcept;

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Constraint> violated;
  /// Nadir used for the check and whether it came from the ODE fallback.
  double nadir = 0.0;
  bool nadir_from_ode = false;
};

struct Requirement {
  double h_re = 0.0;  ///< [s]
  double d_re = 0.0;  ///< [p.u.]
  Binding h_binding = Binding::LowerBound;
  Binding d_binding = Binding::LowerBound;
  /// False when the 50-point probe found nadir(H) non-monotone and the
  /// inertia was located by a full scan instead of bisection.
  bool monotone_probe_ok = true;
};

/// Nadir magnitude [Hz] from the closed form, falling back to the ODE oracle
/// when the closed form is not applicable (overdamped, or the SG dead band is
/// never left). `from_ode`, when given, reports which route was used.
double nadir_with_fallback(const GridParams& grid, const VppParams& vpp,
                           const Disturbance& dist, bool* from_ode = nullptr);

FeasibilityReport in_feasible_region(const GridParams& grid,
                                     const Disturbance& dist,
                                     const SecurityLimits& limits,
                                     const VppParams& vpp);

/// Smallest D_VPP meeting the quasi-steady-state limit, clamped at 0.
/// Throws Error(DeadbandExceedsLimit) when qss_lim <= f_db1.
double min_damping_for_qss(const GridParams& grid, const Disturbance& dist,
                           const SecurityLimits& limits);

/// Smallest H_VPP meeting the RoCoF limit, clamped at 0.
double min_inertia_for_rocof(const GridParams& grid, const Disturbance& dist,
                             const SecurityLimits& limits);

/// Two-stage procedure: damping from the Qss limit, then the smallest inertia
/// satisfying both RoCoF and nadir limits at that damping (bisection to
/// 1e-3 s). Throws Error(Unsatisfiable) if the box cannot meet the limits.
Requirement determine_requirement(const GridParams& grid,
                                  const Disturbance& dist,
                                  const SecurityLimits& limits);

}  // namespace vppfreq
