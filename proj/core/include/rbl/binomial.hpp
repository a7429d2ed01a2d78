#pragma once

#include <cstdint>

namespace rbl {

/// log P(K = k) for K ~ Binomial(n, p), with q = 1 - p passed explicitly so
/// that p or q can sit far below machine epsilon. Saddle-point form (Loader
/// 2000): relative accuracy near 1e-15 for n up to 1e9, no overflow.
double log_binomial_pmf(std::int64_t n, std::int64_t k, double p, double q);

/// P(K >= k) for K ~ Binomial(n, p); regularized incomplete beta.
double binomial_upper_tail(std::int64_t n, std::int64_t k, double p);

namespace detail {
/// log(n!) - log(sqrt(2 pi n) (n/e)^n)
double stirling_error(double n);
/// x log(x/np) + np - x, without cancellation when x ~ np.
double deviance_term(double x, double np);
}  // namespace detail

}  // namespace rbl
