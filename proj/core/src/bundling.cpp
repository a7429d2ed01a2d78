#include "rbl/bundling.hpp"

#include <cmath>
#include <string>

#include "rbl/error.hpp"

namespace rbl {

PricedOutcome bundling_revenue(double p, const SumLaw& law) {
  if (p < 0.0) throw Error(ErrorKind::NegativePrice, "price " + std::to_string(p) + " < 0");
  const double sell = tail_prob(law, p);
  return {p, p * sell, sell};
}

PricedOutcome iid_bundling_revenue(double p, const TwoPointDist& dist, int m) {
  if (p < 0.0) throw Error(ErrorKind::NegativePrice, "price " + std::to_string(p) + " < 0");
  const double sell = iid_tail_prob(dist, m, p);
  return {p, p * sell, sell};
}

PricedOutcome best_bundle_price(const SumLaw& law) {
  const std::size_t n = law.size();
  // tail[j] = P(Y >= support[j]), accumulated from the top.
  std::vector<double> tail(n);
  double acc = 0.0;
  for (std::size_t j = n; j-- > 0;) {
    acc += law.probs[j];
    tail[j] = std::min(acc, 1.0);
  }
  PricedOutcome best{0.0, 0.0, 1.0};
  bool found = false;
  for (std::size_t j = 0; j < n; ++j) {
    const double price = std::max(law.support[j], 0.0);
    const double revenue = price * tail[j];
    if (!found || revenue > best.revenue) {
      best = {price, revenue, tail[j]};
      found = true;
    }
  }
  return best;
}

double epsilon_star_price(const MeanMadSpec& spec, int m, double eps) {
  const double limit = 1.0 - spec.min_alpha();
  if (!(eps > 0.0) || !(eps < limit)) {
    throw Error(ErrorKind::EpsOutOfRange,
                "eps=" + std::to_string(eps) + " outside (0, " + std::to_string(limit) + ")");
  }
  const double keep = 1.0 - eps;
  return keep * keep * m * (spec.mu() - spec.d() / (2.0 * keep));
}

double separate_sale_revenue(const TwoPointDist& dist, int m) {
  return m * std::max(dist.x(), dist.y() * dist.one_minus_alpha());
}

double one_minus_pow_complement(double q, int m) {
  return -std::expm1(static_cast<double>(m) * std::log1p(-q));
}

double second_point_revenue(const TwoPointDist& dist, int m) {
  const double point = (m - 1.0) * dist.x() + dist.y();
  return point * one_minus_pow_complement(dist.one_minus_alpha(), m) / m;
}

double second_point_revenue(const MeanMadSpec& spec, double alpha, int m) {
  return second_point_revenue(make_two_point(spec, alpha), m);
}

}  // namespace rbl
