#include "vppfreq/ode_oracle.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "vppfreq/errors.hpp"

namespace vppfreq {
namespace {

// State: frequency deviation [p.u.], SG power [p.u.], lagged VPP droop power
// [p.u.] (unused when t_vpp == 0).
using State = std::array<double, 3>;

struct Plant {
  double two_h;
  double d0;
  double r;
  double t_sg;
  double t_vpp;
  double d_vpp;
  double delta_p;
  double db1;
  double db2;

  double droop_vpp(const State& x) const {
    return t_vpp > 0.0 ? x[2] : -d_vpp * deadband(x[0], db1);
  }

  // Swing-equation acceleration without the VPP inertia injection.
  double df_dt(const State& x) const {
    return (-delta_p - d0 * x[0] + droop_vpp(x) + x[1]) / two_h;
  }

  State derivative(const State& x) const {
    State dx{};
    dx[0] = df_dt(x);
    dx[1] = (-x[1] - r * deadband(x[0], db2)) / t_sg;
    if (t_vpp > 0.0) dx[2] = (-x[2] - d_vpp * deadband(x[0], db1)) / t_vpp;
    return dx;
  }
};

State axpy(const State& x, double a, const State& y) {
  return {x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2]};
}

}  // namespace

double deadband(double x, double width) {
  if (x < -width) return x + width;
  if (x > width) return x - width;
  return 0.0;
}

void validate(const SimConfig& cfg) {
  if (!(std::isfinite(cfg.dt) && cfg.dt > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "sim.dt must be > 0");
  }
  if (!(std::isfinite(cfg.t_end) && cfg.t_end >= 0.0)) {
    throw Error(ErrorCode::InvalidInput, "sim.t_end must be >= 0");
  }
  if (!(std::isfinite(cfg.t_vpp) && cfg.t_vpp >= 0.0)) {
    throw Error(ErrorCode::InvalidInput, "sim.t_vpp must be >= 0");
  }
  if (cfg.record_every == 0) {
    throw Error(ErrorCode::InvalidInput, "sim.record_every must be >= 1");
  }
}

Trajectory simulate(const GridParams& grid, const VppParams& vpp,
                    const Disturbance& dist, const SimConfig& cfg) {
  validate(cfg);
  const Plant plant{2.0 * (grid.h0 + vpp.h_vpp),
                    grid.d0,
                    grid.r,
                    grid.t_sg,
                    cfg.t_vpp,
                    vpp.d_vpp,
                    dist.delta_p,
                    grid.f_db1_pu(),
                    grid.f_db2_pu()};

  const auto steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
  Trajectory traj;
  const std::size_t samples = steps / cfg.record_every + 1;
  traj.times.reserve(samples);
  traj.delta_f.reserve(samples);
  traj.p_sg.reserve(samples);
  traj.p_vpp.reserve(samples);

  auto record = [&](std::size_t step, const State& x) {
    traj.times.push_back(static_cast<double>(step) * cfg.dt);
    traj.delta_f.push_back(pu_to_hz(x[0], grid.f0));
    traj.p_sg.push_back(x[1]);
    traj.p_vpp.push_back(plant.droop_vpp(x) -
                         2.0 * vpp.h_vpp * plant.df_dt(x));
  };

  State x{};
  record(0, x);
  const double h = cfg.dt;
  for (std::size_t i = 1; i <= steps; ++i) {
    const State k1 = plant.derivative(x);
    const State k2 = plant.derivative(axpy(x, 0.5 * h, k1));
    const State k3 = plant.derivative(axpy(x, 0.5 * h, k2));
    const State k4 = plant.derivative(axpy(x, h, k3));
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || !std::isfinite(x[2])) {
      std::ostringstream os;
      os << "state diverged at t = " << static_cast<double>(i) * h << " s";
      throw Error(ErrorCode::NonFinite, os.str());
    }
    if (i % cfg.record_every == 0) record(i, x);
  }
  return traj;
}

NadirPoint trajectory_nadir(const Trajectory& traj) {
  NadirPoint out;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double mag = std::abs(traj.delta_f[i]);
    if (mag > out.nadir) out = {mag, traj.times[i]};
  }
  return out;
}

}  // namespace vppfreq
