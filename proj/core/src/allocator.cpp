#include "vppfreq/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "vppfreq/errors.hpp"

namespace vppfreq {
namespace {

constexpr double kSumTolerance = 1e-9;
constexpr double kFactorEpsilon = 1e-12;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidInput, what);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

double box_sum(const std::vector<Box>& boxes, double Box::*end) {
  double s = 0.0;
  for (const auto& b : boxes) s += b.*end;
  return s;
}

void check_reachable(const std::vector<Box>& boxes, double target,
                     const char* what) {
  const double lo = box_sum(boxes, &Box::lo);
  const double hi = box_sum(boxes, &Box::hi);
  if (target < lo - kSumTolerance || target > hi + kSumTolerance) {
    std::ostringstream os;
    os << what << " target " << target << " outside [" << lo << ", " << hi
       << "] reachable within the IBR bounds";
    throw Error(ErrorCode::Infeasible, os.str());
  }
}

double linear_cost(std::span<const double> costs, std::span<const double> x) {
  return std::inner_product(costs.begin(), costs.end(), x.begin(), 0.0);
}

}  // namespace

double NashScore::positive_product() const {
  return positive_factors == 0 ? 0.0 : std::exp(log_positive_product);
}

AllocationProblem::AllocationProblem(std::vector<IbrSpec> ibrs, double h_re,
                                     double d_re, double delta_p,
                                     std::optional<Compensation> compensation,
                                     AllocationOptions options)
    : ibrs_(std::move(ibrs)),
      h_re_(h_re),
      d_re_(d_re),
      delta_p_(delta_p),
      compensation_(compensation),
      options_(options) {
  if (ibrs_.empty()) invalid("allocation needs at least one IBR");
  if (!finite_nonneg(h_re_) || !finite_nonneg(d_re_)) {
    invalid("required inertia and damping must be >= 0");
  }
  if (!(std::isfinite(delta_p_) && delta_p_ > 0.0)) {
    invalid("delta_p must be > 0");
  }

  for (std::size_t k = 0; k < ibrs_.size(); ++k) {
    const auto& ibr = ibrs_[k];
    std::ostringstream tag;
    tag << "ibr[" << k << "]";
    if (!(ibr.alpha > 0.0) || !(ibr.beta > 0.0) || !std::isfinite(ibr.alpha) ||
        !std::isfinite(ibr.beta)) {
      invalid(tag.str() + ": cost coefficients must be > 0");
    }
    if (!(ibr.p_rated > 0.0) || !std::isfinite(ibr.p_rated)) {
      invalid(tag.str() + ": p_rated must be > 0");
    }
    if (ibr.p_avail && !(*ibr.p_avail > 0.0)) {
      invalid(tag.str() + ": p_avail must be > 0");
    }
    if (!finite_nonneg(ibr.h_min) || !finite_nonneg(ibr.d_min)) {
      invalid(tag.str() + ": lower bounds must be >= 0");
    }
    if ((ibr.h_max && *ibr.h_max < ibr.h_min) ||
        (ibr.d_max && *ibr.d_max < ibr.d_min)) {
      invalid(tag.str() + ": upper bound below lower bound");
    }

    const double p_avail = ibr.p_avail.value_or(ibr.p_rated);
    ideal_.push_back(d_re_ * p_avail / delta_p_);

    const double h_default = h_re_ * ibr.p_rated / delta_p_;
    const double d_default =
        options_.cap_damping_at_ideal ? ideal_.back() : d_re_;
    h_boxes_.push_back(
        {ibr.h_min, ibr.h_max.value_or(std::max(ibr.h_min, h_default))});
    d_boxes_.push_back(
        {ibr.d_min, ibr.d_max.value_or(std::max(ibr.d_min, d_default))});
  }
  check_reachable(h_boxes_, h_re_, "inertia");
  check_reachable(d_boxes_, d_re_, "damping");

  scales_.assign(objective_count(), 1.0);
  if (options_.normalize) {
    // Attainable range of each objective over the feasible set.
    std::vector<double> alpha, beta;
    for (const auto& ibr : ibrs_) {
      alpha.push_back(ibr.alpha);
      beta.push_back(ibr.beta);
    }
    auto cost_at = [&](double sign) {
      std::vector<double> a = alpha, b = beta;
      for (auto& v : a) v *= sign;
      for (auto& v : b) v *= sign;
      const auto h = fill_to_target(a, h_boxes_, h_re_);
      const auto d = fill_to_target(b, d_boxes_, d_re_);
      return linear_cost(alpha, h) + linear_cost(beta, d);
    };
    auto set_scale = [&](std::size_t i, double range) {
      if (range > kFactorEpsilon) scales_[i] = 1.0 / range;
    };
    set_scale(0, cost_at(-1.0) - cost_at(1.0));

    const double d_lo_sum = box_sum(d_boxes_, &Box::lo);
    const double d_hi_sum = box_sum(d_boxes_, &Box::hi);
    for (std::size_t k = 0; k < size(); ++k) {
      const auto& b = d_boxes_[k];
      const double lo = std::max(b.lo, d_re_ - (d_hi_sum - b.hi));
      const double hi = std::min(b.hi, d_re_ - (d_lo_sum - b.lo));
      set_scale(k + 1, hi - lo);
    }
  }
}

std::vector<double> fill_to_target(std::span<const double> costs,
                                   std::span<const Box> boxes, double target) {
  const std::size_t n = costs.size();
  if (boxes.size() != n) invalid("fill_to_target: size mismatch");

  std::vector<double> x(n);
  double lo_sum = 0.0;
  double width_sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = boxes[k].lo;
    lo_sum += boxes[k].lo;
    width_sum += boxes[k].hi - boxes[k].lo;
  }
  double remaining = target - lo_sum;
  if (remaining < -kSumTolerance || remaining > width_sum + kSumTolerance) {
    std::ostringstream os;
    os << "equality target " << target << " unreachable within bounds";
    throw Error(ErrorCode::Infeasible, os.str());
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
  for (std::size_t k : order) {
    if (remaining <= 0.0) break;
    const double raise = std::min(boxes[k].hi - boxes[k].lo, remaining);
    x[k] = boxes[k].lo + raise;
    remaining -= raise;
  }
  return x;
}

Allocation solve_scalarized(const AllocationProblem& problem,
                            std::span<const double> weights) {
  const std::size_t n = problem.size();
  if (weights.size() != problem.objective_count()) {
    invalid("weight vector must have N + 1 entries");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!finite_nonneg(w)) invalid("weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) invalid("weights must not all be zero");

  const auto& scales = problem.objective_scales();
  const double w_vpp = weights[0] * scales[0];
  std::vector<double> h_cost(n), d_cost(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& ibr = problem.ibrs()[k];
    h_cost[k] = w_vpp * ibr.alpha;
    // The IBR objective (ideal_k - d_k) contributes -w_k per unit of d_k.
    d_cost[k] = w_vpp * ibr.beta - weights[k + 1] * scales[k + 1];
  }
  return {fill_to_target(h_cost, problem.h_boxes(), problem.h_re()),
          fill_to_target(d_cost, problem.d_boxes(), problem.d_re())};
}

ObjectiveVector evaluate_objectives(const AllocationProblem& problem,
                                    const Allocation& allocation) {
  ObjectiveVector out;
  for (std::size_t k = 0; k < problem.size(); ++k) {
    const auto& ibr = problem.ibrs()[k];
    out.f_vpp += ibr.alpha * allocation.h[k] + ibr.beta * allocation.d[k];
    const double ideal = problem.ideal_damping()[k];
    double gap = ideal - allocation.d[k];
    // Rounding left over from filling exactly to the ideal cap.
    if (std::abs(gap) <= 1e-12 * std::max(1.0, std::abs(ideal))) gap = 0.0;
    out.f_ibr.push_back(gap);
  }
  return out;
}

std::vector<std::vector<double>> sample_simplex(std::size_t dim, std::size_t n,
                                                std::uint64_t seed) {
  // Normalized unit exponentials are Dirichlet(1, ..., 1). The uniform draw is
  // built from raw engine bits so the stream is identical across standard
  // library implementations.
  std::mt19937_64 engine(seed);
  std::vector<std::vector<double>> out(n, std::vector<double>(dim));
  for (auto& w : out) {
    double sum = 0.0;
    for (auto& v : w) {
      const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
      v = -std::log1p(-u);
      sum += v;
    }
    if (sum > 0.0) {
      for (auto& v : w) v /= sum;
    } else {
      std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(dim));
    }
  }
  return out;
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b, double tol) {
  bool strictly = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i] + tol) return false;
    if (a[i] < b[i] - tol) strictly = true;
  }
  return strictly;
}

std::vector<ParetoPoint> non_dominated(const std::vector<ParetoPoint>& points,
                                       double tol) {
  auto same = [tol](const ObjectiveVector& a, const ObjectiveVector& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::abs(a[i] - b[i]) > tol) return false;
    }
    return true;
  };
  std::vector<ParetoPoint> out;
  for (const auto& candidate : points) {
    const bool dominated = std::any_of(
        points.begin(), points.end(), [&](const ParetoPoint& other) {
          return dominates(other.objectives, candidate.objectives, tol);
        });
    if (dominated) continue;
    const bool duplicate =
        std::any_of(out.begin(), out.end(), [&](const ParetoPoint& kept) {
          return same(kept.objectives, candidate.objectives);
        });
    if (!duplicate) out.push_back(candidate);
  }
  return out;
}

std::vector<ParetoPoint> pareto_front(const AllocationProblem& problem,
                                      std::size_t n_samples,
                                      std::uint64_t seed, unsigned threads) {
  if (n_samples == 0) invalid("n_samples must be >= 1");
  auto weights = sample_simplex(problem.objective_count(), n_samples, seed);

  std::vector<ParetoPoint> points(n_samples);
  auto solve_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto& p = points[i];
      p.sample_index = i;
      p.weights = weights[i];
      p.allocation = solve_scalarized(problem, p.weights);
      p.objectives = evaluate_objectives(problem, p.allocation);
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, n_samples));
  if (threads <= 1) {
    solve_range(0, n_samples);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    {
      std::vector<std::jthread> workers;
      const std::size_t chunk = (n_samples + threads - 1) / threads;
      for (unsigned w = 0; w < threads; ++w) {
        const std::size_t begin = std::min(n_samples, w * chunk);
        const std::size_t end = std::min(n_samples, begin + chunk);
        workers.emplace_back([&, w, begin, end] {
          try {
            solve_range(begin, end);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return non_dominated(points);
}

NashScore nash_score(const ObjectiveVector& point,
                     const ObjectiveVector& disagreement) {
  NashScore score;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double factor = disagreement[i] - point[i];
    if (factor < -kFactorEpsilon) {
      score.admissible = false;
    } else if (factor > kFactorEpsilon) {
      ++score.positive_factors;
      score.log_positive_product += std::log(factor);
    }
  }
  return score;
}

BargainResult nash_bargain(std::vector<ParetoPoint> front) {
  if (front.empty()) throw Error(ErrorCode::EmptyFront, "empty Pareto front");

  BargainResult result;
  result.disagreement = front.front().objectives;
  for (const auto& p : front) {
    result.disagreement.f_vpp =
        std::max(result.disagreement.f_vpp, p.objectives.f_vpp);
    for (std::size_t k = 0; k < p.objectives.f_ibr.size(); ++k) {
      result.disagreement.f_ibr[k] =
          std::max(result.disagreement.f_ibr[k], p.objectives.f_ibr[k]);
    }
  }

  const std::size_t dims = result.disagreement.size();
  std::vector<NashScore> scores;
  scores.reserve(front.size());
  bool any_full = false;
  for (const auto& p : front) {
    scores.push_back(nash_score(p.objectives, result.disagreement));
    any_full = any_full ||
               (scores.back().admissible && scores.back().all_positive(dims));
  }
  result.degenerate = !any_full;

  auto better = [&](const NashScore& a, const NashScore& b) {
    if (result.degenerate && a.positive_factors != b.positive_factors) {
      return a.positive_factors > b.positive_factors;
    }
    return a.log_positive_product > b.log_positive_product;
  };
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < front.size(); ++i) {
    const auto& s = scores[i];
    if (!s.admissible) continue;
    if (!result.degenerate && !s.all_positive(dims)) continue;
    if (!best || better(s, scores[*best])) best = i;
  }
  if (!best) {
    throw Error(ErrorCode::EmptyFront, "no front member is admissible");
  }

  const auto& s = scores[*best];
  result.chosen_index = *best;
  result.chosen = front[*best];
  result.positive_factors = s.positive_factors;
  result.positive_product = s.positive_product();
  result.nash_value = result.degenerate ? 0.0 : s.positive_product();
  result.front = std::move(front);
  return result;
}

ComparisonReport compare_single_objective(const AllocationProblem& problem,
                                          std::size_t n_samples,
                                          std::uint64_t seed,
                                          unsigned threads) {
  ComparisonReport report;

  std::vector<double> economic_weights(problem.objective_count(), 0.0);
  economic_weights[0] = 1.0;
  report.economic.sample_index = n_samples;
  report.economic.weights = economic_weights;
  report.economic.allocation = solve_scalarized(problem, economic_weights);
  report.economic.objectives =
      evaluate_objectives(problem, report.economic.allocation);

  auto candidates = pareto_front(problem, n_samples, seed, threads);
  candidates.push_back(report.economic);
  report.bargaining = nash_bargain(non_dominated(candidates));

  const auto econ =
      nash_score(report.economic.objectives, report.bargaining.disagreement);
  const std::size_t dims = problem.objective_count();
  report.economic_positive_factors = econ.positive_factors;
  report.economic_positive_product = econ.positive_product();
  report.economic_nash_value =
      econ.all_positive(dims) ? econ.positive_product() : 0.0;

  const auto& bargain = report.bargaining;
  if (!bargain.degenerate && report.economic_nash_value > 0.0) {
    report.nash_gain_pct =
        100.0 * (bargain.nash_value / report.economic_nash_value - 1.0);
  } else if (bargain.degenerate && econ.positive_factors > 0 &&
             econ.positive_factors == bargain.positive_factors) {
    report.nash_gain_pct =
        100.0 * (bargain.positive_product / econ.positive_product() - 1.0);
  }
  const double econ_cost = report.economic.objectives.f_vpp;
  report.cost_increase_pct =
      100.0 * (bargain.chosen.objectives.f_vpp - econ_cost) / econ_cost;
  return report;
}

double vpp_profit(const AllocationProblem& problem,
                  const Allocation& allocation) {
  if (!problem.compensation()) {
    throw Error(ErrorCode::MissingCompensation,
                "compensation (a, b) is required for profit reporting");
  }
  const auto& c = *problem.compensation();
  return c.a * problem.h_re() + c.b * problem.d_re() -
         evaluate_objectives(problem, allocation).f_vpp;
}

}  // namespace vppfreq
