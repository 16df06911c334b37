#pragma once

// Command implementations behind the `vppfreq` executable. Each returns the
// full output document as a string and signals failure by throwing Error;
// exit_code() maps an error to the process exit status.

#include <cstddef>
#include <string>
#include <string_view>

#include "vppfreq/errors.hpp"
#include "vppfreq/scenario.hpp"

namespace vppfreq {

enum class SimulateMode { ClosedForm, Ode, Both };
enum class OutputFormat { Json, Csv };

/// Shortest decimal of `value` rounded to 12 significant digits. Locale
/// independent; non-finite values render as "nan"/"inf".
std::string format_number(double value);

/// Exit status for a failure class: 2 invalid input, 3 numeric failure,
/// 4 unsatisfiable or infeasible request.
int exit_code(ErrorCode code);

/// One-line JSON object {"error": ..., "message": ...}.
std::string error_json(std::string_view error, std::string_view message);

/// CSV time series. Columns: t plus delta_f_hz (closed form), or
/// delta_f_hz,p_sg_pu,p_vpp_pu (ODE), or
/// delta_f_closed_hz,delta_f_ode_hz,p_sg_pu,p_vpp_pu (both).
std::string cmd_simulate(const Scenario& scenario, SimulateMode mode);

/// JSON with the required (H, D), binding constraints and achieved metrics.
std::string cmd_requirements(const Scenario& scenario);

/// JSON bargaining result with the economic comparison, or the front
/// objective matrix as CSV.
std::string cmd_allocate(const Scenario& scenario, OutputFormat format,
                         unsigned threads = 0);

/// Pareto front as JSON points or as the CSV objective matrix.
std::string cmd_pareto(const Scenario& scenario, OutputFormat format,
                       unsigned threads = 0);

/// Feasibility sweep over [0, h_vpp_max] x [0, d_vpp_max] with `n_h` x `n_d`
/// points (a single point sits at 0). With `include_required`, one extra row
/// is appended for the determined requirement.
std::string cmd_region(const Scenario& scenario, std::size_t n_h,
                       std::size_t n_d, bool include_required = false);

}  // namespace vppfreq
