#include "rbl/binomial.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>

namespace rbl {

namespace detail {

double stirling_error(double n) {
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  if (n <= 15.0) {
    if (n == 0.0) return 0.0;
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  const double nn = n * n;
  if (n > 500.0) return (s0 - s1 / nn) / n;
  if (n > 80.0) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35.0) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

double deviance_term(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

}  // namespace detail

double log_binomial_pmf(std::int64_t n, std::int64_t k, double p, double q) {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  if (k < 0 || k > n) return neg_inf;
  const double nd = static_cast<double>(n);
  if (p == 0.0) return k == 0 ? 0.0 : neg_inf;
  if (q == 0.0) return k == n ? 0.0 : neg_inf;
  if (k == 0) {
    if (n == 0) return 0.0;
    return p < 0.1 ? -detail::deviance_term(nd, nd * q) - nd * p : nd * std::log(q);
  }
  if (k == n) {
    return q < 0.1 ? -detail::deviance_term(nd, nd * p) - nd * q : nd * std::log(p);
  }
  const double kd = static_cast<double>(k);
  const double lc = detail::stirling_error(nd) - detail::stirling_error(kd) -
                    detail::stirling_error(nd - kd) - detail::deviance_term(kd, nd * p) -
                    detail::deviance_term(nd - kd, nd * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(kd) + std::log1p(-kd / nd);
  return lc - 0.5 * lf;
}

double binomial_upper_tail(std::int64_t n, std::int64_t k, double p) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  return boost::math::ibeta(static_cast<double>(k), static_cast<double>(n - k + 1), p);
}

}  // namespace rbl
