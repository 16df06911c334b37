#pragma once

// Closed-form frequency response of a grid with aggregated synchronous
// generation and a virtual power plant providing virtual inertia and droop.
//
// Conventions:
//  - Power, damping and droop are per-unit on the system base.
//  - Dead bands and every reported frequency quantity are in Hz. Internally
//    all frequency deviations are per-unit (Hz / f0).
//  - Only frequency-drop events are modelled; deviations are negative and the
//    metrics are reported as magnitudes.

namespace vppfreq {

/// Aggregated grid and synchronous generator constants.
struct GridParams {
  double d0 = 0.0;       ///< load damping [p.u./p.u.]
  double h0 = 0.0;       ///< aggregated SG inertia constant [s]
  double r = 0.0;        ///< aggregated SG droop gain [p.u./p.u.]
  double t_sg = 0.0;     ///< SG governor/turbine time constant [s]
  double f0 = 50.0;      ///< nominal frequency [Hz]
  double f_db1 = 0.0;    ///< VPP dead band [Hz]
  double f_db2 = 0.0;    ///< SG dead band [Hz]

  double f_db1_pu() const { return f_db1 / f0; }
  double f_db2_pu() const { return f_db2 / f0; }

  bool operator==(const GridParams&) const = default;
};

/// Step power deficit (frequency drop).
struct Disturbance {
  double delta_p = 0.0;  ///< [p.u.], strictly positive

  bool operator==(const Disturbance&) const = default;
};

/// Aggregated VPP control parameters.
struct VppParams {
  double h_vpp = 0.0;  ///< virtual inertia [s]
  double d_vpp = 0.0;  ///< virtual damping [p.u./p.u.]

  bool operator==(const VppParams&) const = default;
};

struct SecondOrderCoeffs {
  double omega_n = 0.0;  ///< natural frequency [rad/s]
  double zeta = 0.0;     ///< damping ratio
  double omega_d = 0.0;  ///< damped frequency [rad/s]
  double eta1 = 0.0;
  double phi1 = 0.0;  ///< [rad]
  double eta2 = 0.0;
  double phi2 = 0.0;  ///< [rad]
  double h_total = 0.0;
  double d_total = 0.0;
  double m = 0.0;  ///< relative weight of the SG dead-band term
};

struct CrossingTimes {
  double t_db1 = 0.0;  ///< VPP dead band reached [s]
  double t_db2 = 0.0;  ///< SG dead band reached [s]
};

struct NadirPoint {
  double nadir = 0.0;    ///< |max deviation| [Hz]
  double t_nadir = 0.0;  ///< time since disturbance onset [s]
};

struct FreqMetrics {
  double rocof_max = 0.0;  ///< [Hz/s]
  double nadir = 0.0;      ///< [Hz]
  double qss = 0.0;        ///< [Hz]
  double t_nadir = 0.0;    ///< [s]
  double t_db1 = 0.0;      ///< [s]
  double t_db2 = 0.0;      ///< [s]
};

inline double hz_to_pu(double hz, double f0) { return hz / f0; }
inline double pu_to_hz(double pu, double f0) { return pu * f0; }

/// Throws Error(InvalidInput) unless every field is finite and strictly
/// positive (dead bands may be zero) and f_db1 < f_db2, or both are zero.
void validate(const GridParams& grid);
void validate(const Disturbance& dist);
void validate(const VppParams& vpp);

/// True when the pre-regulation asymptote ΔP/D0 lies strictly beyond the dead
/// band `f_db_hz`, i.e. the corresponding loop eventually activates.
bool activates(const GridParams& grid, const Disturbance& dist, double f_db_hz);

/// Throws Error(Overdamped) when zeta >= 1.
SecondOrderCoeffs derive_coeffs(const GridParams& grid, const VppParams& vpp,
                                const Disturbance& dist);

/// Throws Error(NeverActivates) if either dead band is never left.
CrossingTimes deadband_crossing_times(const GridParams& grid,
                                      const VppParams& vpp,
                                      const Disturbance& dist);

/// Precomputed closed-form piecewise response.
///
/// For t <= t_db1 only inertia and load damping act. On (t_db1, t_db2) the
/// value at t_db1 is held. From t_db2 on the second-order expression with both
/// dead-band offsets superimposed is evaluated at absolute time t.
class FrequencyResponse {
 public:
  FrequencyResponse(const GridParams& grid, const VppParams& vpp,
                    const Disturbance& dist);

  /// Signed deviation in Hz (negative for a drop). Requires t >= 0.
  double at(double t) const;

  /// Second-order branch [Hz] and its first two time derivatives, valid
  /// for any t >= 0.
  double second_branch(double t) const;
  double second_branch_rate(double t) const;
  double second_branch_accel(double t) const;

  const SecondOrderCoeffs& coeffs() const { return coeffs_; }
  const CrossingTimes& crossings() const { return crossings_; }

 private:
  double first_branch_pu(double t) const;

  GridParams grid_;
  VppParams vpp_;
  Disturbance dist_;
  SecondOrderCoeffs coeffs_;
  CrossingTimes crossings_;
  double amp_disturbance_ = 0.0;  // -(ΔP + D_VPP f_db1) / (D + R), p.u.
  double amp_deadband_ = 0.0;     // -R f_db2 / (D + R), p.u.
};

double freq_response(const GridParams& grid, const VppParams& vpp,
                     const Disturbance& dist, double t);

double rocof_max(const GridParams& grid, const VppParams& vpp,
                 const Disturbance& dist);

/// First minimum of the second-order branch after onset.
NadirPoint nadir(const GridParams& grid, const VppParams& vpp,
                 const Disturbance& dist);

double qss(const GridParams& grid, const VppParams& vpp,
           const Disturbance& dist);

FreqMetrics metrics(const GridParams& grid, const VppParams& vpp,
                    const Disturbance& dist);

}  // namespace vppfreq
