#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "rbl/ambiguity.hpp"
#include "rbl/error.hpp"
#include "rbl/sum_law.hpp"

namespace {

using rbl::MeanMadSpec;

const MeanMadSpec kSpec(1.0, 0.5);

rbl::SumLaw law123() {
  rbl::SumLaw law;
  law.m = 2;
  law.support = {1.0, 2.0, 3.0};
  law.probs = {0.25, 0.5, 0.25};
  return law;
}

TEST(IidSum, HandConvolution) {
  const auto law = rbl::iid_two_point_sum(rbl::make_two_point(kSpec, 0.5), 2);
  ASSERT_EQ(law.size(), 3U);
  EXPECT_DOUBLE_EQ(law.support[0], 1.0);
  EXPECT_DOUBLE_EQ(law.support[1], 2.0);
  EXPECT_DOUBLE_EQ(law.support[2], 3.0);
  EXPECT_DOUBLE_EQ(law.probs[0], 0.25);
  EXPECT_DOUBLE_EQ(law.probs[1], 0.5);
  EXPECT_DOUBLE_EQ(law.probs[2], 0.25);
}

TEST(IidSum, SingleGoodIsTheMarginal) {
  const auto dist = rbl::make_two_point(kSpec, 0.7);
  const auto law = rbl::iid_two_point_sum(dist, 1);
  EXPECT_EQ(law.support, (std::vector<double>{dist.x(), dist.y()}));
  EXPECT_DOUBLE_EQ(law.probs[0], 0.7);
  EXPECT_DOUBLE_EQ(law.probs[1], dist.one_minus_alpha());
  // MAD of the single factor recovered from the law.
  double mad = 0.0;
  for (std::size_t k = 0; k < law.size(); ++k) mad += law.probs[k] * std::abs(law.support[k] - 1.0);
  EXPECT_NEAR(mad, 0.5, 1e-12);
}

TEST(IidSum, ZeroLowPoint) {
  const auto law = rbl::iid_two_point_sum(rbl::make_two_point(kSpec, 0.25), 3);
  EXPECT_EQ(law.support[0], 0.0);
  EXPECT_NEAR(law.probs[0], 0.015625, 1e-15);
}

TEST(IidSum, LargeMAndExtremeAlpha) {
  for (int m : {1000, 100000, 1000000}) {
    const auto law = rbl::iid_two_point_sum(rbl::make_two_point(kSpec, 0.5), m);
    EXPECT_NEAR(law.mean(), m, 1e-9 * m);
    EXPECT_EQ(law.log_probs.size(), law.size());
  }
  const auto tiny = rbl::iid_two_point_sum(rbl::make_two_point_complement(kSpec, std::exp(-3 * std::log(2.0) - 2)), 2);
  EXPECT_NEAR(tiny.mean(), 2.0, 1e-9);
}

TEST(ProductSum, MatchesHandConvolution) {
  const std::vector<rbl::TwoPointDist> dists = {rbl::make_two_point(kSpec, 0.5), rbl::make_two_point(kSpec, 0.25)};
  const auto law = rbl::product_sum(dists);
  // {0.5, 1.5} + {0, 4/3}
  const std::vector<double> support = {0.5, 1.5, 11.0 / 6.0, 17.0 / 6.0};
  const std::vector<double> probs = {0.125, 0.125, 0.375, 0.375};
  ASSERT_EQ(law.size(), 4U);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(law.support[i], support[i], 1e-15);
    EXPECT_NEAR(law.probs[i], probs[i], 1e-15);
  }
}

TEST(ProductSum, AgreesWithIidForIdenticalFactors) {
  for (int m = 1; m <= 12; ++m) {
    for (double alpha : {0.25, 0.4, 0.5, 0.77, 0.99}) {
      const auto dist = rbl::make_two_point(kSpec, alpha);
      const std::vector<rbl::TwoPointDist> dists(static_cast<std::size_t>(m), dist);
      const auto a = rbl::product_sum(dists);
      const auto b = rbl::iid_two_point_sum(dist, m);
      ASSERT_EQ(a.size(), b.size()) << m << ' ' << alpha;
      for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_NEAR(a.support[k], b.support[k], 1e-12);
        EXPECT_NEAR(a.probs[k], b.probs[k], 1e-13);
      }
    }
  }
}

TEST(ProductSum, FactorCap) {
  const std::vector<rbl::TwoPointDist> dists(21, rbl::make_two_point(kSpec, 0.5));
  try {
    rbl::product_sum(dists, 20);
    FAIL();
  } catch (const rbl::Error& e) {
    EXPECT_EQ(e.kind(), rbl::ErrorKind::TooManyFactors);
  }
}

TEST(TailProb, InclusiveAndStepwise) {
  const auto law = law123();
  EXPECT_DOUBLE_EQ(rbl::tail_prob(law, 2.0), 0.75);
  EXPECT_DOUBLE_EQ(rbl::tail_prob(law, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(rbl::tail_prob(law, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(rbl::tail_prob(law, 3.5), 0.0);
  for (std::size_t k = 0; k < law.size(); ++k) {
    const double s = law.support[k];
    EXPECT_NEAR(rbl::tail_prob(law, s) - rbl::tail_prob(law, std::nextafter(s, 10.0)), law.probs[k], 1e-15);
  }
}

TEST(TailProb, IidRouteMatchesMaterializedLaw) {
  for (int m : {1, 7, 50, 400}) {
    for (double alpha : {0.25, 0.5, 0.9, 0.999}) {
      const auto dist = rbl::make_two_point(kSpec, alpha);
      const auto law = rbl::iid_two_point_sum(dist, m);
      for (double frac : {0.0, 0.3, 0.6, 0.74, 0.75, 0.9, 1.2}) {
        const double p = frac * m;
        const double a = rbl::tail_prob(law, p);
        const double b = rbl::iid_tail_prob(dist, m, p);
        EXPECT_NEAR(a, b, 1e-12 + 1e-10 * a) << m << ' ' << alpha << ' ' << p;
      }
    }
  }
}

TEST(Sampling, SeededAndThreadIndependent) {
  const std::vector<rbl::MemberDist> members = {rbl::make_pareto_member(kSpec, 2.0)};
  const auto a = rbl::sample_sum(members, 5, 42, 2000, 1);
  const auto b = rbl::sample_sum(members, 5, 42, 2000, 1);
  const auto c = rbl::sample_sum(members, 5, 42, 2000, 4);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_NE(a, rbl::sample_sum(members, 5, 43, 2000, 1));
}

// Empirical mean (or MAD) within 3 standard errors of its target.
void expect_moment(const std::vector<double>& values, double target, double mu, bool mad) {
  std::vector<double> z(values.size());
  std::transform(values.begin(), values.end(), z.begin(), [&](double v) { return mad ? std::abs(v - mu) : v; });
  const double n = static_cast<double>(z.size());
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : z) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / (n - 1.0) / n);
  EXPECT_LE(std::abs(mean - target), 3.0 * se) << mean << " vs " << target;
}

TEST(Sampling, TwoPointMeanConverges) {
  const std::vector<rbl::MemberDist> members = {rbl::make_member(rbl::make_two_point(kSpec, 0.5))};
  expect_moment(rbl::sample_sum(members, 1, 7, 1000000), 1.0, 1.0, false);
}

TEST(Sampling, HeavyTailMad) {
  const MeanMadSpec heavy(1.0, rbl::pareto_induced_mad(1.0, 1.5));
  const std::vector<rbl::MemberDist> members = {rbl::make_pareto_member(heavy, 1.5)};
  expect_moment(rbl::sample_sum(members, 1, 11, 1000000), heavy.d(), 1.0, true);
}

}  // namespace
