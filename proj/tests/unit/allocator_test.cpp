#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "vppfreq/allocator.hpp"
#include "vppfreq/errors.hpp"

using namespace vppfreq;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

AllocationProblem reference_problem(std::optional<Compensation> comp = std::nullopt) {
  return AllocationProblem(oracle::reference_ibrs(), 19.125, 12.109, 0.25, comp);
}

ObjectiveVector ov(double f_vpp, std::vector<double> f_ibr) {
  return {f_vpp, std::move(f_ibr)};
}

ParetoPoint pt(double a, double b, std::size_t idx = 0) {
  ParetoPoint p;
  p.sample_index = idx;
  p.objectives = ov(a, {b});
  return p;
}

double sum(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

double scalarized_value(const AllocationProblem& pb, const std::vector<double>& w,
                        const Allocation& a) {
  const auto o = evaluate_objectives(pb, a);
  double v = w[0] * o.f_vpp;
  for (std::size_t k = 0; k < o.f_ibr.size(); ++k) v += w[k + 1] * o.f_ibr[k];
  return v;
}

void expect_feasible(const AllocationProblem& pb, const Allocation& a) {
  EXPECT_NEAR(sum(a.h), pb.h_re(), 1e-9);
  EXPECT_NEAR(sum(a.d), pb.d_re(), 1e-9);
  for (std::size_t k = 0; k < pb.size(); ++k) {
    EXPECT_GE(a.h[k], pb.h_boxes()[k].lo);
    EXPECT_LE(a.h[k], pb.h_boxes()[k].hi);
    EXPECT_GE(a.d[k], pb.d_boxes()[k].lo);
    EXPECT_LE(a.d[k], pb.d_boxes()[k].hi);
  }
}

}  // namespace

TEST(Fill, TwoVariableExample) {
  const std::vector<double> c{1.0, 2.0};
  const std::vector<Box> b{{0, 2}, {0, 2}};
  const auto x = fill_to_target(c, b, 3.0);
  EXPECT_EQ(x, (std::vector<double>{2.0, 1.0}));
  EXPECT_NEAR(c[0] * x[0] + c[1] * x[1], oracle::brute_force_fill(c, b, 3.0, 0.01),
              1e-12);
}

TEST(Fill, TiesFollowIndexOrder) {
  const std::vector<double> c{1.0, 1.0, 1.0};
  const std::vector<Box> b{{0, 1}, {0, 1}, {0, 1}};
  EXPECT_EQ(fill_to_target(c, b, 1.5), (std::vector<double>{1.0, 0.5, 0.0}));
}

TEST(Fill, UnreachableTargetIsInfeasible) {
  const std::vector<double> c{1.0, 2.0};
  const std::vector<Box> b{{0, 1}, {0, 1}};
  try {
    fill_to_target(c, b, 2.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Infeasible);
  }
}

TEST(Problem, DefaultBoundsAndConstructionChecks) {
  const auto pb = reference_problem();
  EXPECT_EQ(pb.size(), 8u);
  EXPECT_NEAR(pb.h_boxes()[0].hi, 19.125 * 0.13 / 0.25, 1e-12);
  EXPECT_NEAR(pb.d_boxes()[0].hi, 12.109 * 0.13 / 0.25, 1e-12);
  EXPECT_NEAR(pb.ideal_damping()[0], oracle::frozen::f_ibr1_at_zero, 1e-12);

  auto ibrs = oracle::reference_ibrs();
  EXPECT_THROW(AllocationProblem(ibrs, 0.5, 12.0, 0.25), Error);  // below Σ h_min
  ibrs[0].alpha = 0.0;
  EXPECT_THROW(AllocationProblem(ibrs, 19.0, 12.0, 0.25), Error);
}

TEST(Objectives, FrozenReferenceValues) {
  const auto pb = reference_problem();
  Allocation zero_first{std::vector<double>(8, 0.1), std::vector<double>(8, 0.1)};
  EXPECT_NEAR(evaluate_objectives(pb, zero_first).f_vpp, oracle::frozen::f_vpp_lower,
              1e-12);
  zero_first.d[0] = 0.0;
  EXPECT_NEAR(evaluate_objectives(pb, zero_first).f_ibr[0],
              oracle::frozen::f_ibr1_at_zero, 1e-12);
  Allocation ideal{std::vector<double>(8, 0.1), pb.ideal_damping()};
  for (double f : evaluate_objectives(pb, ideal).f_ibr) EXPECT_EQ(f, 0.0);
}

TEST(Scalarized, PureCostPutsMassOnCheapest) {
  std::vector<IbrSpec> ibrs(3);
  const double alpha[] = {3.0, 1.0, 2.0};
  const double beta[] = {1.0, 2.0, 0.5};
  for (int k = 0; k < 3; ++k) {
    ibrs[k].alpha = alpha[k];
    ibrs[k].beta = beta[k];
    ibrs[k].p_rated = 0.1;
    ibrs[k].h_max = kInf;
    ibrs[k].d_max = kInf;
  }
  const AllocationProblem pb(ibrs, 6.0, 4.0, 0.25);
  const std::vector<double> w{1.0, 0.0, 0.0, 0.0};
  const auto a = solve_scalarized(pb, w);
  EXPECT_EQ(a.h, (std::vector<double>{0.0, 6.0, 0.0}));
  EXPECT_EQ(a.d, (std::vector<double>{0.0, 0.0, 4.0}));
}

TEST(Scalarized, SingleIbrTakesEverything) {
  IbrSpec one;
  one.alpha = 2.0;
  one.beta = 1.0;
  one.p_rated = 0.25;
  const AllocationProblem pb({one}, 19.125, 12.109375, 0.25);
  const std::vector<double> w{0.3, 0.7};
  const auto a = solve_scalarized(pb, w);
  EXPECT_EQ(a.h, (std::vector<double>{19.125}));
  EXPECT_EQ(a.d, (std::vector<double>{12.109375}));
}

TEST(Scalarized, ArgminInvariantUnderWeightScaling) {
  const auto pb = reference_problem();
  const auto weights = sample_simplex(9, 50, 3);
  for (const auto& w : weights) {
    auto scaled = w;
    for (auto& v : scaled) v *= 7.5;
    EXPECT_EQ(solve_scalarized(pb, w), solve_scalarized(pb, scaled));
  }
}

TEST(Scalarized, RejectsBadWeights) {
  const auto pb = reference_problem();
  EXPECT_THROW(solve_scalarized(pb, std::vector<double>(9, 0.0)), Error);
  EXPECT_THROW(solve_scalarized(pb, std::vector<double>(3, 1.0)), Error);
  auto w = std::vector<double>(9, 0.1);
  w[2] = -0.1;
  EXPECT_THROW(solve_scalarized(pb, w), Error);
}

// Property: greedy fill equals brute force on small random instances.
TEST(Properties, GreedyMatchesBruteForce) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> n_dist(1, 3);
  std::uniform_int_distribution<int> milli(0, 1000);
  std::uniform_real_distribution<double> cost(0.5, 4.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = n_dist(rng);
    std::vector<IbrSpec> ibrs(n);
    double h_lo = 0, h_hi = 0, d_lo = 0, d_hi = 0;
    for (auto& ibr : ibrs) {
      ibr.alpha = cost(rng);
      ibr.beta = cost(rng);
      ibr.p_rated = 0.05 + 0.001 * milli(rng);
      ibr.h_min = 0.001 * milli(rng);
      ibr.h_max = ibr.h_min + 0.002 * milli(rng);
      ibr.d_min = 0.001 * milli(rng);
      ibr.d_max = ibr.d_min + 0.002 * milli(rng);
      h_lo += ibr.h_min;
      h_hi += *ibr.h_max;
      d_lo += ibr.d_min;
      d_hi += *ibr.d_max;
    }
    const double h_re = std::round((h_lo + (h_hi - h_lo) * 0.001 * milli(rng)) * 1e3) / 1e3;
    const double d_re = std::round((d_lo + (d_hi - d_lo) * 0.001 * milli(rng)) * 1e3) / 1e3;
    const AllocationProblem pb(ibrs, std::clamp(h_re, h_lo, h_hi),
                               std::clamp(d_re, d_lo, d_hi), 0.25);
    const auto w = sample_simplex(n + 1, 1, 100 + trial).front();
    const auto a = solve_scalarized(pb, w);
    expect_feasible(pb, a);

    std::vector<double> hc, dc;
    for (int k = 0; k < n; ++k) {
      hc.push_back(w[0] * ibrs[k].alpha);
      dc.push_back(w[0] * ibrs[k].beta - w[k + 1]);
    }
    double constant = 0.0;
    for (int k = 0; k < n; ++k) constant += w[k + 1] * pb.ideal_damping()[k];
    const double brute = oracle::brute_force_fill(hc, pb.h_boxes(), pb.h_re(), 1e-3) +
                         oracle::brute_force_fill(dc, pb.d_boxes(), pb.d_re(), 1e-3) +
                         constant;
    EXPECT_NEAR(scalarized_value(pb, w, a), brute, 1e-6) << "trial " << trial;
  }
}

TEST(Simplex, UniformWeightsAreValidAndSeeded) {
  const auto a = sample_simplex(9, 200, 42);
  const auto b = sample_simplex(9, 200, 42);
  const auto c = sample_simplex(9, 200, 43);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  std::vector<double> mean(9, 0.0);
  for (const auto& w : a) {
    ASSERT_EQ(w.size(), 9u);
    for (std::size_t i = 0; i < w.size(); ++i) {
      EXPECT_GE(w[i], 0.0);
      mean[i] += w[i] / 200.0;
    }
    EXPECT_NEAR(sum(w), 1.0, 1e-12);
  }
  for (double m : mean) EXPECT_NEAR(m, 1.0 / 9.0, 0.04);
}

TEST(Dominance, Basics) {
  EXPECT_TRUE(dominates(ov(1, {1}), ov(2, {1})));
  EXPECT_FALSE(dominates(ov(1, {1}), ov(1, {1})));
  EXPECT_FALSE(dominates(ov(1, {3}), ov(2, {1})));
  const auto kept = non_dominated({pt(1, 3, 0), pt(2, 2, 1), pt(3, 3, 2), pt(1, 3, 3)});
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].sample_index, 0u);
  EXPECT_EQ(kept[1].sample_index, 1u);
}

TEST(Front, SingleSampleAndNonDominance) {
  const auto pb = reference_problem();
  EXPECT_EQ(pareto_front(pb, 1, 9).size(), 1u);
  const auto front = pareto_front(pb, 200, 42);
  for (const auto& p : front) {
    expect_feasible(pb, p.allocation);
    EXPECT_NEAR(sum(p.weights), 1.0, 1e-12);
    for (const auto& q : front) EXPECT_FALSE(dominates(q.objectives, p.objectives));
  }
}

TEST(Front, IndependentOfThreadCount) {
  const auto pb = reference_problem();
  const auto one = pareto_front(pb, 200, 42, 1);
  EXPECT_EQ(one, pareto_front(pb, 200, 42, 3));
  EXPECT_EQ(one, pareto_front(pb, 200, 42, 8));
}

// Property: with strictly positive weights, the minimizer is not dominated by
// any other point produced in the same run.
TEST(Properties, ScalarizationSoundness) {
  const auto pb = reference_problem();
  const auto weights = sample_simplex(9, 200, 42);
  std::vector<ObjectiveVector> all;
  for (const auto& w : weights) all.push_back(evaluate_objectives(pb, solve_scalarized(pb, w)));
  for (std::size_t i = 0; i < all.size(); ++i) {
    bool positive = true;
    for (double v : weights[i]) positive = positive && v > 0.0;
    if (!positive) continue;
    for (const auto& other : all) EXPECT_FALSE(dominates(other, all[i]));
  }
}

TEST(Nash, Singleton) {
  const auto r = nash_bargain({pt(1, 1)});
  EXPECT_EQ(r.chosen_index, 0u);
  EXPECT_EQ(r.nash_value, 0.0);
}

TEST(Nash, TwoPointFrontIsDegenerate) {
  const auto r = nash_bargain({pt(1, 3), pt(2, 1)});
  EXPECT_EQ(r.disagreement, ov(2, {3}));
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.nash_value, 0.0);
  EXPECT_EQ(r.positive_factors, 1u);
  // Products of positives are 2 vs 1: the second point wins.
  EXPECT_EQ(r.chosen_index, 1u);
}

TEST(Nash, ThreePointFrontPicksMiddle) {
  const auto r = nash_bargain({pt(1, 3), pt(1.5, 1.5), pt(2, 1)});
  EXPECT_FALSE(r.degenerate);
  EXPECT_EQ(r.chosen_index, 1u);
  EXPECT_NEAR(r.nash_value, 0.75, 1e-12);
}

TEST(Nash, EmptyFront) {
  try {
    nash_bargain({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyFront);
  }
}

TEST(Nash, ChosenMaximizesProductOverFront) {
  const auto pb = reference_problem();
  const auto r = nash_bargain(pareto_front(pb, 200, 42));
  const auto best = nash_score(r.chosen.objectives, r.disagreement);
  for (const auto& p : r.front) {
    const auto s = nash_score(p.objectives, r.disagreement);
    EXPECT_TRUE(s.admissible);
    if (r.degenerate) {
      EXPECT_LE(s.positive_factors, best.positive_factors);
      if (s.positive_factors == best.positive_factors) {
        EXPECT_LE(s.log_positive_product, best.log_positive_product + 1e-12);
      }
    } else {
      EXPECT_LE(s.positive_product(), r.nash_value * (1 + 1e-12));
    }
  }
  for (std::size_t i = 0; i < r.chosen.objectives.size(); ++i) {
    EXPECT_LE(r.chosen.objectives[i], r.disagreement[i]);
  }
}

TEST(Comparison, ReferenceScenarioDirection) {
  const auto rep = compare_single_objective(reference_problem(), 200, 42);
  EXPECT_GE(rep.bargaining.nash_value, rep.economic_nash_value);
  EXPECT_GE(rep.bargaining.chosen.objectives.f_vpp, rep.economic.objectives.f_vpp);
  ASSERT_TRUE(rep.nash_gain_pct.has_value());
  EXPECT_GT(*rep.nash_gain_pct, 0.0);
  EXPECT_GT(rep.cost_increase_pct, 0.0);
}

TEST(Profit, Identities) {
  const auto pb0 = reference_problem(Compensation{0.0, 0.0});
  const auto front = pareto_front(pb0, 20, 1);
  ASSERT_GE(front.size(), 2u);
  const auto& a = front[0].allocation;
  const auto& b = front[1].allocation;
  EXPECT_NEAR(vpp_profit(pb0, a), -evaluate_objectives(pb0, a).f_vpp, 1e-12);

  const auto pb = reference_problem(Compensation{3.0, 2.0});
  EXPECT_NEAR(vpp_profit(pb, a) - vpp_profit(pb, b),
              -(evaluate_objectives(pb, a).f_vpp - evaluate_objectives(pb, b).f_vpp),
              1e-9);

  std::vector<IbrSpec> free(2);
  for (auto& f : free) {
    f.alpha = 1.0;
    f.beta = 1.0;
    f.p_rated = 0.2;
  }
  const AllocationProblem zero(free, 0.0, 0.0, 0.25, Compensation{3.0, 2.0});
  const Allocation none{{0.0, 0.0}, {0.0, 0.0}};
  EXPECT_EQ(vpp_profit(zero, none), 0.0);

  try {
    vpp_profit(reference_problem(), a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingCompensation);
  }
}
