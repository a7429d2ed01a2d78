#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <gtest/gtest.h>

#include "rbl/asymptotics.hpp"
#include "rbl/bundling.hpp"
#include "rbl/error.hpp"
#include "rbl/opt_oracle.hpp"
#include "rbl/sum_law.hpp"

namespace {

using rbl::ErrorKind;
using rbl::MeanMadSpec;

const MeanMadSpec kSpec(1.0, 0.5);

template <class F>
void expect_error(ErrorKind kind, F&& f) {
  try {
    f();
    FAIL() << "expected " << rbl::to_string(kind);
  } catch (const rbl::Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

rbl::SolverOptions small_grids() {
  rbl::SolverOptions o;
  o.alpha_grid = 512;
  o.price_grid = 256;
  return o;
}

TEST(Targets, Identity) {
  for (double d : {0.3, 1.0, 1.7}) {
    const auto t = rbl::asymptotic_targets(MeanMadSpec(1.0, d));
    EXPECT_EQ(t.minimax_upper, std::max(t.maximin_limit, t.regret_limit));
    EXPECT_DOUBLE_EQ(t.ratio_limit, 1.0 - d / 2.0);
  }
}

TEST(GLambda, ValuesAndLimits) {
  EXPECT_NEAR(rbl::g_lambda(kSpec, 1.0), 1.0 - std::exp(-1.0), 1e-15);
  for (double d : {0.5, 1.5}) {
    const MeanMadSpec spec(1.0, d);
    EXPECT_LE(std::abs(rbl::g_lambda(spec, 1e-3) - (1.0 - d / 2.0)), 1e-2);
    EXPECT_LE(std::abs(rbl::g_lambda(spec, 1e3) - d / 2.0), 1e-3);
    for (int i = -40; i <= 40; ++i) EXPECT_GT(rbl::g_lambda(spec, std::pow(10.0, i / 10.0)), 0.0);
  }
  expect_error(ErrorKind::LambdaOutOfRange, [] { rbl::g_lambda(kSpec, 0.0); });
}

TEST(ZeroLowVariance, HandValue) { EXPECT_NEAR(rbl::zero_low_variance(kSpec), 1.0 / 3.0, 1e-15); }

TEST(XiGap, HandConstants) {
  const MeanMadSpec spec(1.0, 1.5);
  const auto xi = rbl::xi_gap(spec);
  EXPECT_DOUBLE_EQ(xi.xi0, 0.5);
  EXPECT_NEAR(xi.gamma, 1.0 - 1.5 / 1.98, 1e-15);
  EXPECT_NEAR(xi.tau0, 0.01 * std::pow(2.0 * xi.gamma / 1.5, 2), 1e-15);
  EXPECT_NEAR(xi.tau0, 1.0447e-3, 1e-7);
  EXPECT_GT(xi.xi, 0.0);
  EXPECT_LE(xi.xi, rbl::g_lambda(spec, xi.tau0) - 0.25);
  EXPECT_NEAR(xi.xi, 7.8e-4, 1e-4);
  // The scan value is a true lower bound on a fine independent sweep.
  for (int i = 0; i <= 2000; ++i) {
    const double lambda = xi.tau0 * std::pow(1e9 / xi.tau0, i / 2000.0);
    EXPECT_GE(rbl::g_lambda(spec, lambda) - 0.25, xi.xi1 - 1e-12) << lambda;
  }
}

TEST(XiGap, PositiveAcrossRangeAndGuard) {
  for (double d : {1.05, 1.3, 1.7, 1.95}) EXPECT_GT(rbl::xi_gap(MeanMadSpec(1.0, d)).xi, 0.0) << d;
  expect_error(ErrorKind::RangeError, [] { rbl::xi_gap(MeanMadSpec(1.0, 1.0)); });
  expect_error(ErrorKind::RangeError, [] { rbl::xi_gap(kSpec); });
}

TEST(RatioChain, VarianceAndLimits) {
  const auto small = rbl::ratio_bound_chain(kSpec, 10000, 0.1);
  EXPECT_NEAR(small.g, 1.0 / 3.0, 1e-15);
  EXPECT_LE(small.lower, small.upper);
  // Both brackets close in on 1 - d/(2 mu) as m grows and eps shrinks.
  double last = 1.0;
  for (const auto& [m, eps] : {std::pair{1000000, 0.05}, std::pair{100000000, 0.02}, std::pair{2000000000, 0.01}}) {
    const auto b = rbl::ratio_bound_chain(kSpec, m, eps);
    const double gap = std::max(0.75 - b.lower, b.upper - 0.75);
    EXPECT_LT(gap, last) << m;
    last = gap;
  }
  EXPECT_LT(last, 0.02);
  // g = 19 for d = 1.9, so no gamma < 1 gives a positive bracket at m = 10.
  EXPECT_EQ(rbl::ratio_bound_chain(MeanMadSpec(1.0, 1.9), 10, 0.01).upper, std::numeric_limits<double>::infinity());
  expect_error(ErrorKind::EpsOutOfRange, [] { rbl::ratio_bound_chain(kSpec, 100, 0.9); });
}

TEST(RegretChain, OrderingAndLimits) {
  const auto r = rbl::regret_bound_chain(kSpec, 10000, 0.05, 0.1);
  EXPECT_GE(r.upper, r.lower);
  double last = 1.0;
  for (const auto& [m, s] : {std::pair{1000000, 0.05}, std::pair{100000000, 0.02}, std::pair{2000000000, 0.01}}) {
    const auto b = rbl::regret_bound_chain(kSpec, m, s, s);
    const double gap = std::max(std::abs(b.upper - 0.25), std::abs(b.lower - 0.25));
    EXPECT_LT(gap, last) << m;
    last = gap;
  }
  EXPECT_LT(last, 0.02);
  for (int m : {100, 10000, 1000000}) {
    const double s = rbl::schedule_parameter(m);
    const auto b = rbl::regret_bound_chain(kSpec, m, s, s);
    EXPECT_LE(b.lower, b.upper) << m;
  }
  expect_error(ErrorKind::ParamOutOfRange, [] { rbl::regret_bound_chain(kSpec, 100, 0.1, 1.0); });
  expect_error(ErrorKind::ParamOutOfRange, [] { rbl::regret_bound_chain(kSpec, 100, 0.1, 0.0); });
}

TEST(Schedule, QuarterPower) {
  EXPECT_DOUBLE_EQ(rbl::schedule_parameter(10000), 0.1);
  EXPECT_DOUBLE_EQ(rbl::schedule_parameter(1), 1.0);
}

TEST(OptLowerBound, BelowExactAndAboveBaselines) {
  for (double alpha : {0.3, 0.5, 0.9}) {
    const auto dist = rbl::make_two_point(kSpec, alpha);
    for (int m = 1; m <= 3; ++m) {
      const std::vector<rbl::TwoPointDist> one = {dist};
      const double exact = rbl::opt_deterministic(one, m).revenue;
      const double lower = rbl::opt_lower_bound(dist, m, 0.2);
      EXPECT_LE(lower, exact * (1 + 1e-12));
      EXPECT_GE(lower, rbl::best_bundle_price(rbl::iid_two_point_sum(dist, m)).revenue);
      EXPECT_GE(lower, rbl::separate_sale_revenue(dist, m));
    }
  }
}

TEST(RatioEmpirical, SingleGoodAgainstDenseGrid) {
  // sup_p inf_alpha p P(X >= p) / max(x, (1 - alpha) y) on a fine (p, alpha) grid.
  // The inner infimum sits just past x(alpha) = p, so that point joins the grid.
  double oracle = 0.0;
  for (int i = 1; i <= 5000; ++i) {
    const double p = 1.25 * i / 5000.0;
    double inner = std::numeric_limits<double>::infinity();
    const auto probe = [&](double q) {
      if (q <= 0.0 || q > 0.75) return;
      const auto dist = rbl::make_two_point_complement(kSpec, q);
      const double tail = dist.x() >= p ? 1.0 : (dist.y() >= p ? q : 0.0);
      inner = std::min(inner, p * tail / std::max(dist.x(), q * dist.y()));
    };
    for (int j = 0; j < 2000; ++j) probe(0.75 * std::pow(1e-12 / 0.75, j / 1999.0));
    if (p < 0.75) probe((1.0 - 0.5 / (2.0 * (1.0 - p))) * (1.0 + 1e-12));
    oracle = std::max(oracle, inner);
  }
  const auto r = rbl::ratio_empirical(kSpec, 1, small_grids(), 0.5);
  EXPECT_EQ(r.mode, rbl::OptHandling::Exact);
  EXPECT_EQ(r.lower, r.value);
  EXPECT_NEAR(r.value, oracle, 1e-6);
}

TEST(RegretEmpirical, ExactSmallM) {
  const auto r = rbl::regret_empirical(kSpec, 2, small_grids(), 0.5);
  EXPECT_EQ(r.mode, rbl::OptHandling::Exact);
  EXPECT_GE(r.value, 0.0);
  EXPECT_LE(r.value, 1.0);
}

TEST(Empirical, LargeMRespectsTheChains) {
  const int m = 10000;
  const double eps = rbl::schedule_parameter(m);
  const auto ratio = rbl::ratio_empirical(kSpec, m, small_grids(), eps);
  EXPECT_EQ(ratio.mode, rbl::OptHandling::Bracketed);
  EXPECT_LE(ratio.lower, ratio.upper);
  EXPECT_GE(ratio.lower, rbl::ratio_bound_chain(kSpec, m, eps).lower);

  const double price = rbl::epsilon_star_price(kSpec, m, eps);
  const auto regret = rbl::regret_empirical(kSpec, m, small_grids(), eps, price);
  EXPECT_LE(regret.value, rbl::regret_bound_chain(kSpec, m, eps, eps).upper);
}

}  // namespace
