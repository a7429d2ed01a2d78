#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "rbl/ambiguity.hpp"
#include "rbl/error.hpp"

namespace {

using rbl::ErrorKind;
using rbl::MeanMadSpec;

template <class F>
void expect_error(ErrorKind kind, F&& f) {
  try {
    f();
    FAIL() << "expected " << rbl::to_string(kind);
  } catch (const rbl::Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

// E|X - mu| = 2 E[(mu - X)^+] for a Pareto with mean mu, by quadrature on [scale, mu].
double pareto_mad_quadrature(double mu, double a) {
  const double scale = mu * (a - 1.0) / a;
  auto density_term = [&](double x) { return (mu - x) * a * std::pow(scale, a) / std::pow(x, a + 1.0); };
  return 2.0 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(density_term, scale, mu, 15, 1e-14);
}

TEST(MeanMadSpec, RejectsInfeasible) {
  expect_error(ErrorKind::InfeasibleSpec, [] { MeanMadSpec(1.0, 0.0); });
  expect_error(ErrorKind::InfeasibleSpec, [] { MeanMadSpec(1.0, 2.0); });
  expect_error(ErrorKind::InfeasibleSpec, [] { MeanMadSpec(-1.0, 0.5); });
}

TEST(TwoPoint, HandValues) {
  const MeanMadSpec spec(1.0, 0.5);
  const auto half = rbl::make_two_point(spec, 0.5);
  EXPECT_DOUBLE_EQ(half.x(), 0.5);
  EXPECT_DOUBLE_EQ(half.y(), 1.5);
  EXPECT_DOUBLE_EQ(half.one_minus_alpha(), 0.5);
  const auto edge = rbl::make_two_point(spec, 0.25);
  EXPECT_EQ(edge.x(), 0.0);
  EXPECT_DOUBLE_EQ(edge.y(), 4.0 / 3.0);
  expect_error(ErrorKind::AlphaOutOfRange, [&] { rbl::make_two_point(spec, 0.2); });
  expect_error(ErrorKind::AlphaOutOfRange, [&] { rbl::make_two_point(spec, 1.0); });
}

TEST(TwoPoint, ComplementKeepsTinyMass) {
  const MeanMadSpec spec(1.0, 0.5);
  const auto far = rbl::make_two_point_complement(spec, 1e-14);
  EXPECT_EQ(far.one_minus_alpha(), 1e-14);
  EXPECT_NEAR(far.mean(), 1.0, 1e-9);
  EXPECT_NEAR(far.mad(), 0.5, 1e-9);
}

TEST(TwoPoint, GridMembershipAndMonotonicity) {
  for (double d : {0.2, 0.5, 1.0, 1.5, 1.9}) {
    const MeanMadSpec spec(1.0, d);
    double last_x = -1.0;
    double last_y = -1.0;
    for (int i = 0; i < 400; ++i) {
      const double alpha = spec.min_alpha() + (1.0 - spec.min_alpha()) * i / 400.0;
      const auto dist = rbl::make_two_point(spec, alpha);
      EXPECT_TRUE(rbl::verify_membership(rbl::make_member(dist), spec).ok) << d << ' ' << alpha;
      EXPECT_GT(dist.x(), last_x);
      EXPECT_GT(dist.y(), last_y);
      last_x = dist.x();
      last_y = dist.y();
    }
  }
}

TEST(Pareto, InducedMadMatchesQuadrature) {
  EXPECT_NEAR(pareto_mad_quadrature(1.0, 2.0), 0.5, 1e-10);
  EXPECT_NEAR(pareto_mad_quadrature(1.0, 1.5), 2.0 * std::sqrt(0.5) / std::pow(1.5, 1.5), 1e-10);
  double last = 2.0;
  for (int i = 1; i <= 20; ++i) {
    const double a = 1.0 + i / 20.0;
    const double closed = rbl::pareto_induced_mad(1.0, a);
    EXPECT_NEAR(closed, pareto_mad_quadrature(1.0, a), 1e-6) << a;
    EXPECT_LT(closed, last);
    last = closed;
  }
  EXPECT_DOUBLE_EQ(rbl::pareto_induced_mad(1.0, 2.0), 0.5);
  EXPECT_NEAR(rbl::pareto_induced_mad(1.0, 1.0 + 1e-9), 2.0, 1e-6);
}

TEST(Pareto, MemberConstruction) {
  const auto m2 = rbl::make_pareto_member(MeanMadSpec(1.0, 0.5), 2.0);
  const auto& law = std::get<rbl::ParetoDist>(m2.law);
  EXPECT_DOUBLE_EQ(law.scale, 0.5);
  EXPECT_NEAR(m2.mad(), 0.5, 1e-12);
  const MeanMadSpec heavy(1.0, rbl::pareto_induced_mad(1.0, 1.5));
  EXPECT_NEAR(heavy.d(), 0.7698, 1e-4);
  EXPECT_TRUE(rbl::verify_membership(rbl::make_pareto_member(heavy, 1.5), heavy).ok);
  expect_error(ErrorKind::MadMismatch, [] { rbl::make_pareto_member(MeanMadSpec(1.0, 0.3), 2.0); });
  expect_error(ErrorKind::IndexOutOfRange, [] { rbl::make_pareto_member(MeanMadSpec(1.0, 0.5), 2.5); });
  expect_error(ErrorKind::IndexOutOfRange, [] { rbl::make_pareto_member(MeanMadSpec(1.0, 0.5), 1.0); });
}

TEST(ThreePoint, HandMembership) {
  const MeanMadSpec spec(1.0, 0.5);
  EXPECT_TRUE(rbl::verify_membership(rbl::make_three_point_member(spec, {0, 1, 2}, {.25, .5, .25}), spec).ok);
  const auto off = rbl::verify_membership(rbl::make_three_point_member(spec, {0, 1, 2}, {.3, .4, .3}), spec);
  EXPECT_FALSE(off.ok);
  EXPECT_NEAR(off.mad_error, 0.1, 1e-12);
}

TEST(Json, RoundTripsEveryFamily) {
  const MeanMadSpec spec(1.0, 0.5);
  const std::vector<rbl::MemberDist> members = {
      rbl::make_member(rbl::make_two_point(spec, 0.1 + 0.3)),
      rbl::make_three_point_member(spec, {0, 1, 2}, {.25, .5, .25}),
      rbl::make_pareto_member(spec, 2.0),
  };
  for (const auto& member : members) {
    const nlohmann::json j = member;
    const auto back = rbl::member_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(back.spec, member.spec);
    EXPECT_EQ(back.mean(), member.mean());
    EXPECT_EQ(back.mad(), member.mad());
    EXPECT_EQ(back.law.index(), member.law.index());
  }
}

}  // namespace
