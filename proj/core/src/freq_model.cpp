#include "vppfreq/freq_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "vppfreq/errors.hpp"

namespace vppfreq {
namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }
bool nonnegative_finite(double v) { return std::isfinite(v) && v >= 0.0; }

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidInput, what);
}

// Time for the pre-regulation response -ΔP/D0 (1 - exp(-D0 t / 2H)) to reach
// the dead band edge `band_pu`.
double crossing_time(double h_total, double d0, double delta_p,
                     double band_pu) {
  return -(2.0 * h_total / d0) * std::log1p(-band_pu * d0 / delta_p);
}

}  // namespace

void validate(const GridParams& grid) {
  if (!positive_finite(grid.d0)) invalid("grid.d0 must be > 0");
  if (!positive_finite(grid.h0)) invalid("grid.h0 must be > 0");
  if (!positive_finite(grid.r)) invalid("grid.r must be > 0");
  if (!positive_finite(grid.t_sg)) invalid("grid.t_sg must be > 0");
  if (!positive_finite(grid.f0)) invalid("grid.f0 must be > 0");
  if (!nonnegative_finite(grid.f_db1) || !nonnegative_finite(grid.f_db2)) {
    invalid("dead bands must be >= 0");
  }
  bool both_zero = grid.f_db1 == 0.0 && grid.f_db2 == 0.0;
  if (!both_zero && !(grid.f_db1 < grid.f_db2)) {
    invalid("VPP dead band must be narrower than the SG dead band");
  }
}

void validate(const Disturbance& dist) {
  if (!positive_finite(dist.delta_p)) {
    invalid("disturbance.delta_p must be > 0 (frequency drop)");
  }
}

void validate(const VppParams& vpp) {
  if (!nonnegative_finite(vpp.h_vpp)) invalid("vpp.h_vpp must be >= 0");
  if (!nonnegative_finite(vpp.d_vpp)) invalid("vpp.d_vpp must be >= 0");
}

bool activates(const GridParams& grid, const Disturbance& dist,
               double f_db_hz) {
  return dist.delta_p / grid.d0 > hz_to_pu(f_db_hz, grid.f0);
}

SecondOrderCoeffs derive_coeffs(const GridParams& grid, const VppParams& vpp,
                                const Disturbance& dist) {
  SecondOrderCoeffs c;
  c.h_total = grid.h0 + vpp.h_vpp;
  c.d_total = grid.d0 + vpp.d_vpp;
  const double h = c.h_total;
  const double d = c.d_total;
  const double t = grid.t_sg;

  c.omega_n = std::sqrt((d + grid.r) / (2.0 * h * t));
  c.zeta = (2.0 * h + d * t) / (2.0 * std::sqrt(2.0 * t * h * (grid.r + d)));
  if (!(c.zeta < 1.0)) {
    std::ostringstream os;
    os << "damping ratio " << c.zeta << " >= 1; closed form needs zeta < 1";
    throw Error(ErrorCode::Overdamped, os.str());
  }
  const double root = std::sqrt(1.0 - c.zeta * c.zeta);
  const double sigma = c.zeta * c.omega_n;
  c.omega_d = c.omega_n * root;

  c.eta1 = std::sqrt((1.0 - 2.0 * t * c.omega_n * c.zeta +
                      t * t * c.omega_n * c.omega_n) /
                     (1.0 - c.zeta * c.zeta));
  // tan(phi1) = omega_d / (sigma - T omega_n^2); the quadrant is fixed by the
  // zero initial condition (eta1 sin(phi1) = -1).
  c.phi1 = std::atan2(-c.omega_d, t * c.omega_n * c.omega_n - sigma);
  c.eta2 = 1.0 / root;
  c.phi2 = std::atan2(root, c.zeta);

  c.m = grid.r * grid.f_db2_pu() /
        (dist.delta_p + vpp.d_vpp * grid.f_db1_pu()) * (c.eta2 / c.eta1);
  return c;
}

CrossingTimes deadband_crossing_times(const GridParams& grid,
                                      const VppParams& vpp,
                                      const Disturbance& dist) {
  for (double band : {grid.f_db1, grid.f_db2}) {
    if (!activates(grid, dist, band)) {
      std::ostringstream os;
      os << "asymptote " << pu_to_hz(dist.delta_p / grid.d0, grid.f0)
         << " Hz never leaves the " << band << " Hz dead band";
      throw Error(ErrorCode::NeverActivates, os.str());
    }
  }
  const double h = grid.h0 + vpp.h_vpp;
  return {crossing_time(h, grid.d0, dist.delta_p, grid.f_db1_pu()),
          crossing_time(h, grid.d0, dist.delta_p, grid.f_db2_pu())};
}

FrequencyResponse::FrequencyResponse(const GridParams& grid,
                                     const VppParams& vpp,
                                     const Disturbance& dist)
    : grid_(grid),
      vpp_(vpp),
      dist_(dist),
      coeffs_(derive_coeffs(grid, vpp, dist)),
      crossings_(deadband_crossing_times(grid, vpp, dist)) {
  const double denom = vpp.d_vpp + grid.d0 + grid.r;
  amp_disturbance_ = -(dist.delta_p + vpp.d_vpp * grid.f_db1_pu()) / denom;
  amp_deadband_ = -(grid.r * grid.f_db2_pu()) / denom;
}

double FrequencyResponse::first_branch_pu(double t) const {
  return -(dist_.delta_p / grid_.d0) *
         -std::expm1(-grid_.d0 / (2.0 * coeffs_.h_total) * t);
}

double FrequencyResponse::at(double t) const {
  if (t <= crossings_.t_db1) return pu_to_hz(first_branch_pu(t), grid_.f0);
  if (t < crossings_.t_db2) {
    return pu_to_hz(first_branch_pu(crossings_.t_db1), grid_.f0);
  }
  return second_branch(t);
}

// Each oscillatory term has the form e^{-σt} sin(ω_d t + φ); the helpers
// below give that term and its first two derivatives.
double FrequencyResponse::second_branch(double t) const {
  const auto& c = coeffs_;
  const double decay = std::exp(-c.zeta * c.omega_n * t);
  const double pu =
      amp_disturbance_ *
          (1.0 + decay * c.eta1 * std::sin(c.omega_d * t + c.phi1)) +
      amp_deadband_ * (1.0 - decay * c.eta2 * std::sin(c.omega_d * t + c.phi2));
  return pu_to_hz(pu, grid_.f0);
}

double FrequencyResponse::second_branch_rate(double t) const {
  const auto& c = coeffs_;
  const double sigma = c.zeta * c.omega_n;
  const double decay = std::exp(-sigma * t);
  auto term = [&](double phi) {
    const double theta = c.omega_d * t + phi;
    return decay * (c.omega_d * std::cos(theta) - sigma * std::sin(theta));
  };
  const double pu = amp_disturbance_ * c.eta1 * term(c.phi1) -
                    amp_deadband_ * c.eta2 * term(c.phi2);
  return pu_to_hz(pu, grid_.f0);
}

double FrequencyResponse::second_branch_accel(double t) const {
  const auto& c = coeffs_;
  const double sigma = c.zeta * c.omega_n;
  const double decay = std::exp(-sigma * t);
  auto term = [&](double phi) {
    const double theta = c.omega_d * t + phi;
    return decay * ((sigma * sigma - c.omega_d * c.omega_d) * std::sin(theta) -
                    2.0 * sigma * c.omega_d * std::cos(theta));
  };
  const double pu = amp_disturbance_ * c.eta1 * term(c.phi1) -
                    amp_deadband_ * c.eta2 * term(c.phi2);
  return pu_to_hz(pu, grid_.f0);
}

double freq_response(const GridParams& grid, const VppParams& vpp,
                     const Disturbance& dist, double t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::InvalidInput, "t must be >= 0");
  return FrequencyResponse(grid, vpp, dist).at(t);
}

double rocof_max(const GridParams& grid, const VppParams& vpp,
                 const Disturbance& dist) {
  return pu_to_hz(dist.delta_p / (2.0 * (grid.h0 + vpp.h_vpp)), grid.f0);
}

NadirPoint nadir(const GridParams& grid, const VppParams& vpp,
                 const Disturbance& dist) {
  const FrequencyResponse response(grid, vpp, dist);
  const auto& c = response.coeffs();
  const double sigma = c.zeta * c.omega_n;

  // Stationary point of the second-order branch: tan(ω_d t) = N.
  const double dc = c.m * std::cos(c.phi2) - std::cos(c.phi1);
  const double ds = c.m * std::sin(c.phi2) - std::sin(c.phi1);
  const double n_ratio =
      (c.omega_d * dc - sigma * ds) / (sigma * dc + c.omega_d * ds);

  const double half_period = std::numbers::pi / c.omega_d;
  double t_n = std::atan(n_ratio) / c.omega_d;
  // Successive stationary points alternate max/min; at most two steps past
  // the principal value reach the first minimum after onset.
  for (int i = 0; i < 4 && (t_n <= 0.0 || response.second_branch_accel(t_n) <= 0.0);
       ++i) {
    t_n += half_period;
  }
  return {std::abs(response.second_branch(t_n)), t_n};
}

double qss(const GridParams& grid, const VppParams& vpp,
           const Disturbance& dist) {
  const double pu = (dist.delta_p + vpp.d_vpp * grid.f_db1_pu() +
                     grid.r * grid.f_db2_pu()) /
                    (vpp.d_vpp + grid.d0 + grid.r);
  return pu_to_hz(pu, grid.f0);
}

FreqMetrics metrics(const GridParams& grid, const VppParams& vpp,
                    const Disturbance& dist) {
  const auto times = deadband_crossing_times(grid, vpp, dist);
  const auto low = nadir(grid, vpp, dist);
  FreqMetrics out;
  out.rocof_max = rocof_max(grid, vpp, dist);
  out.nadir = low.nadir;
  out.t_nadir = low.t_nadir;
  out.qss = qss(grid, vpp, dist);
  out.t_db1 = times.t_db1;
  out.t_db2 = times.t_db2;
  return out;
}

}  // namespace vppfreq
