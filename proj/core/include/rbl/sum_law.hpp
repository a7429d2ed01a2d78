#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "rbl/ambiguity.hpp"

namespace rbl {

/// Exact finite law of Y = X_1 + ... + X_m: strictly ascending support with
/// matching probabilities. `log_probs` is filled by the i.i.d. constructor
/// (where individual masses can underflow) and left empty otherwise.
struct SumLaw {
  int m = 0;
  std::vector<double> support;
  std::vector<double> probs;
  std::vector<double> log_probs;

  [[nodiscard]] double mean() const;
  [[nodiscard]] std::size_t size() const noexcept { return support.size(); }
};

/// Law of m i.i.d. copies: support[k] = (m-k) x + k y with binomial weights
/// evaluated in log space. Throws NumericalInstability when the weights fail
/// to sum to 1 within 1e-10.
SumLaw iid_two_point_sum(const TwoPointDist& dist, int m);

inline constexpr std::size_t kDefaultFactorCap = 20;

/// Exact convolution of heterogeneous two-point factors sharing one spec.
/// Support points closer than 1e-12 are merged.
SumLaw product_sum(std::span<const TwoPointDist> dists, std::size_t cap = kDefaultFactorCap);

/// P(Y >= p), inclusive.
double tail_prob(const SumLaw& law, double p);

/// Index of the lowest support point of the i.i.d. law that is >= p, i.e. the
/// number of high draws needed to reach p; m + 1 when p exceeds every point.
std::int64_t iid_threshold_index(const TwoPointDist& dist, int m, double p);

/// P(Y >= p) for m i.i.d. copies without materializing the law. Agrees with
/// tail_prob(iid_two_point_sum(dist, m), p) up to rounding.
double iid_tail_prob(const TwoPointDist& dist, int m, double p);

/// Deterministic 64-bit engine for sample index `index` under `seed`.
std::mt19937_64 sample_engine(std::uint64_t seed, std::uint64_t index);

/// Uniform on [0, 1) with 53 random bits.
double uniform01(std::mt19937_64& engine);

double sample_member(const MemberDist& member, std::mt19937_64& engine);

/// n seeded realizations of the sum over m slots. `members` has length 1
/// (i.i.d.) or m. Sample j uses its own engine derived from (seed, j), so the
/// output does not depend on `threads`.
std::vector<double> sample_sum(std::span<const MemberDist> members, int m, std::uint64_t seed,
                               std::size_t n, unsigned threads = 0);

/// `support,prob` header, ascending support, 17 significant digits.
void write_csv(std::ostream& out, const SumLaw& law);

}  // namespace rbl
