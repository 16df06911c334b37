#pragma once

// Allocation of the VPP inertia/damping requirement across inverter-based
// resources: a multi-objective linear model (VPP regulation cost plus one
// reserve-utilization objective per IBR), a Pareto front from weighted-sum
// scalarization, and Nash-bargaining selection on that front.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace vppfreq {

struct IbrSpec {
  double alpha = 0.0;    ///< inertia cost [cost/s]
  double beta = 0.0;     ///< damping cost [cost/p.u.]
  double p_rated = 0.0;  ///< reserve power [p.u.]
  /// Maximum regulation injection used by the utilization objective;
  /// defaults to p_rated.
  std::optional<double> p_avail;
  double h_min = 0.0;
  std::optional<double> h_max;  ///< default h_re * p_rated / ΔP
  double d_min = 0.0;
  std::optional<double> d_max;  ///< default: ideal damping (see options)

  bool operator==(const IbrSpec&) const = default;
};

struct Compensation {
  double a = 0.0;  ///< [cost/s]
  double b = 0.0;  ///< [cost/p.u.]

  bool operator==(const Compensation&) const = default;
};

struct AllocationOptions {
  /// When set, a missing d_max defaults to the IBR's ideal damping
  /// d_re * p_avail / ΔP, which keeps every utilization objective >= 0.
  /// Otherwise a missing d_max defaults to d_re.
  bool cap_damping_at_ideal = true;
  /// Scale each objective by its attainable range before scalarizing.
  bool normalize = false;

  bool operator==(const AllocationOptions&) const = default;
};

struct Box {
  double lo = 0.0;
  double hi = 0.0;
};

/// A validated allocation instance with every default bound resolved.
/// Construction throws Error(Infeasible) when the equality targets cannot be
/// met within the boxes and Error(InvalidInput) on malformed IBR data.
class AllocationProblem {
 public:
  AllocationProblem(std::vector<IbrSpec> ibrs, double h_re, double d_re,
                    double delta_p,
                    std::optional<Compensation> compensation = std::nullopt,
                    AllocationOptions options = {});

  std::size_t size() const { return ibrs_.size(); }
  /// Number of objectives, N + 1.
  std::size_t objective_count() const { return ibrs_.size() + 1; }

  const std::vector<IbrSpec>& ibrs() const { return ibrs_; }
  double h_re() const { return h_re_; }
  double d_re() const { return d_re_; }
  double delta_p() const { return delta_p_; }
  const std::optional<Compensation>& compensation() const {
    return compensation_;
  }
  const AllocationOptions& options() const { return options_; }

  const std::vector<Box>& h_boxes() const { return h_boxes_; }
  const std::vector<Box>& d_boxes() const { return d_boxes_; }
  /// d_re * p_avail_k / ΔP.
  const std::vector<double>& ideal_damping() const { return ideal_; }
  /// Per-objective multipliers applied to the weights (all 1 unless
  /// normalization is enabled).
  const std::vector<double>& objective_scales() const { return scales_; }

 private:
  std::vector<IbrSpec> ibrs_;
  double h_re_;
  double d_re_;
  double delta_p_;
  std::optional<Compensation> compensation_;
  AllocationOptions options_;
  std::vector<Box> h_boxes_;
  std::vector<Box> d_boxes_;
  std::vector<double> ideal_;
  std::vector<double> scales_;
};

struct Allocation {
  std::vector<double> h;  ///< [s]
  std::vector<double> d;  ///< [p.u.]

  bool operator==(const Allocation&) const = default;
};

struct ObjectiveVector {
  double f_vpp = 0.0;
  std::vector<double> f_ibr;

  std::size_t size() const { return f_ibr.size() + 1; }
  /// Index 0 is the VPP cost, index k the k-th IBR objective.
  double operator[](std::size_t i) const { return i == 0 ? f_vpp : f_ibr[i - 1]; }

  bool operator==(const ObjectiveVector&) const = default;
};

struct ParetoPoint {
  std::size_t sample_index = 0;
  std::vector<double> weights;
  Allocation allocation;
  ObjectiveVector objectives;

  bool operator==(const ParetoPoint&) const = default;
};

struct BargainResult {
  ParetoPoint chosen;
  std::size_t chosen_index = 0;  ///< position of `chosen` in `front`
  ObjectiveVector disagreement;
  /// Product of (F^u_j - F_j) over all objectives; 0 when any factor is 0.
  double nash_value = 0.0;
  /// Every front member had a zero factor; selection fell back to the most
  /// positive factors, then the largest product of positive factors.
  bool degenerate = false;
  std::size_t positive_factors = 0;
  double positive_product = 0.0;
  std::vector<ParetoPoint> front;
};

struct NashScore {
  bool admissible = true;  ///< no negative factor
  std::size_t positive_factors = 0;
  double log_positive_product = 0.0;

  bool all_positive(std::size_t objectives) const {
    return positive_factors == objectives;
  }
  double positive_product() const;
};

/// Continuous fill: minimize sum(cost_k x_k) s.t. sum(x_k) = target,
/// lo_k <= x_k <= hi_k. Variables start at their lower bounds and are raised in
/// ascending cost order, ties by ascending index. Throws Error(Infeasible).
std::vector<double> fill_to_target(std::span<const double> costs,
                                   std::span<const Box> boxes, double target);

/// Exact minimizer of the weighted-sum objective. `weights` has N + 1
/// non-negative entries (VPP first) with a positive sum; they need not be
/// normalized.
Allocation solve_scalarized(const AllocationProblem& problem,
                            std::span<const double> weights);

ObjectiveVector evaluate_objectives(const AllocationProblem& problem,
                                    const Allocation& allocation);

/// `n` weight vectors drawn uniformly on the (dim - 1)-simplex.
std::vector<std::vector<double>> sample_simplex(std::size_t dim, std::size_t n,
                                                std::uint64_t seed);

/// a dominates b: no worse everywhere (within tol), strictly better somewhere.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b,
               double tol = 1e-9);

/// Non-dominated members in input order; later duplicates (equal within tol)
/// of a kept point are dropped.
std::vector<ParetoPoint> non_dominated(const std::vector<ParetoPoint>& points,
                                       double tol = 1e-9);

/// Samples `n_samples` weight vectors, solves each (over `threads` workers;
/// 0 picks the hardware concurrency) and returns the non-dominated set in
/// sample order. The result does not depend on the thread count.
std::vector<ParetoPoint> pareto_front(const AllocationProblem& problem,
                                      std::size_t n_samples,
                                      std::uint64_t seed,
                                      unsigned threads = 0);

NashScore nash_score(const ObjectiveVector& point,
                     const ObjectiveVector& disagreement);

/// Throws Error(EmptyFront).
BargainResult nash_bargain(std::vector<ParetoPoint> front);

struct ComparisonReport {
  BargainResult bargaining;
  ParetoPoint economic;  ///< pure cost minimizer (VPP weight 1)
  double economic_nash_value = 0.0;
  std::size_t economic_positive_factors = 0;
  double economic_positive_product = 0.0;
  /// Relative Nash gain of the bargaining point over the economic point [%].
  /// Uses positive-factor products when the selection was degenerate; empty
  /// when those products are not comparable (different factor counts).
  std::optional<double> nash_gain_pct;
  /// Relative VPP cost increase of the bargaining point [%].
  double cost_increase_pct = 0.0;
};

/// Bargaining over the sampled front with the economic point added, compared
/// against the economic point under the same disagreement point.
ComparisonReport compare_single_objective(const AllocationProblem& problem,
                                          std::size_t n_samples,
                                          std::uint64_t seed,
                                          unsigned threads = 0);

/// a h_re + b d_re - f_vpp. Throws Error(MissingCompensation).
double vpp_profit(const AllocationProblem& problem,
                  const Allocation& allocation);

}  // namespace vppfreq
