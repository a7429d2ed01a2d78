#pragma once

#include "rbl/ambiguity.hpp"
#include "rbl/sum_law.hpp"

namespace rbl {

/// Outcome of posting a single grand-bundle price: revenue == price * sell_prob.
struct PricedOutcome {
  double price;
  double revenue;
  double sell_prob;
};

/// Sells everything iff the valuation sum is >= p. Throws NegativePrice for p < 0.
PricedOutcome bundling_revenue(double p, const SumLaw& law);

/// Same as bundling_revenue on the i.i.d. law, via the binomial tail.
PricedOutcome iid_bundling_revenue(double p, const TwoPointDist& dist, int m);

/// Revenue-maximizing bundle price against a known law. Under the inclusive
/// sale rule the optimum sits on a support point; ties go to the lowest price.
PricedOutcome best_bundle_price(const SumLaw& law);

/// Robust bundle price (1-eps)^2 m (mu - d/(2(1-eps))) for 0 < eps < 1 - d/(2 mu).
double epsilon_star_price(const MeanMadSpec& spec, int m, double eps);

/// Best posted price per good for a known two-point marginal, times m.
double separate_sale_revenue(const TwoPointDist& dist, int m);

/// Per-good revenue of pricing the bundle at the second-lowest support point
/// (m-1) x + y, which sells with probability 1 - alpha^m.
double second_point_revenue(const MeanMadSpec& spec, double alpha, int m);
double second_point_revenue(const TwoPointDist& dist, int m);

/// 1 - (1 - q)^m without cancellation.
double one_minus_pow_complement(double q, int m);

}  // namespace rbl
