#pragma once

#include <cstddef>
#include <vector>

#include "vppfreq/freq_model.hpp"

namespace vppfreq {

/// Fixed-step RK4 settings for the block-diagram simulation.
struct SimConfig {
  double dt = 1e-3;     ///< integration step [s]
  double t_end = 60.0;  ///< horizon [s]
  /// Optional first-order lag on the VPP droop path [s]; 0 disables it.
  double t_vpp = 0.0;
  /// Keep every n-th integration step in the returned trajectory.
  std::size_t record_every = 1;

  bool operator==(const SimConfig&) const = default;
};

void validate(const SimConfig& cfg);

struct Trajectory {
  std::vector<double> times;     ///< [s]
  std::vector<double> delta_f;   ///< [Hz]
  std::vector<double> p_sg;      ///< SG regulation power [p.u.]
  std::vector<double> p_vpp;     ///< VPP injected power [p.u.]

  std::size_t size() const { return times.size(); }
};

/// Symmetric dead band: zero inside [-width, width], shifted identity outside.
double deadband(double x, double width);

/// Integrates the swing equation with SG droop (first-order lag, dead band)
/// and VPP virtual inertia plus droop (dead band). VPP inertia is lumped into
/// the total inertia. Throws Error(NonFinite) if the state diverges.
Trajectory simulate(const GridParams& grid, const VppParams& vpp,
                    const Disturbance& dist, const SimConfig& cfg = {});

/// Largest |Δf| over a trajectory and the time it occurs.
NadirPoint trajectory_nadir(const Trajectory& traj);

}  // namespace vppfreq
