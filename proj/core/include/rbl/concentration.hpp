#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rbl/ambiguity.hpp"

namespace rbl {

/// sup over P(mu, d) of E[X 1{X >= t}] as d mu / (2 (t - mu)) + d/2.
/// Throws TruncationTooLow for t < mu + d/2.
double tail_truncation_sup(const MeanMadSpec& spec, double t);

/// Smallest t at which the closed form is attained inside the two-point
/// family: mu + d mu / (2 mu - d). Below it the closed form is only an upper
/// bound (it exceeds mu near t = mu + d/2).
double tail_truncation_attained_from(const MeanMadSpec& spec);

/// Two-point member with 1 - alpha = d / (2 (t - mu)), so y == t. Throws
/// TruncationTooLow when t < tail_truncation_attained_from(spec).
TwoPointDist tail_truncation_attainer(const MeanMadSpec& spec, double t);

/// sigma2 / ((gamma mu)^2 m), not clipped. Throws GammaOutOfRange unless
/// 0 < gamma < 1.
double chebyshev_lower_tail(double mu, double sigma2, int m, double gamma);

struct ConcentrationCertificate {
  double mu = 0.0;
  double d = 0.0;
  double eps = 0.0;
  double t = 0.0;
  double f = 0.0;
  /// Per-good event boundary (1-eps)^2 (mu - d/(2(1-eps))); multiply by m.
  double threshold_per_good = 0.0;
  int m = 0;
  double bound = 0.0;

  [[nodiscard]] double threshold() const { return threshold_per_good * m; }
};

/// Constant f(mu, d, eps) with t = mu + d/(2 eps). With `optimize_t` the
/// conditional-mean bound is taken at the actual level t, (1 - d/(2(t-mu))) mu
/// - d/2, and f is minimized over t >= mu + d/(2 eps). Throws EpsOutOfRange
/// unless 0 < eps < 1 - d/(2 mu). `m` stays 0 and `bound` unset.
ConcentrationCertificate concentration_constant(const MeanMadSpec& spec, double eps,
                                                bool optimize_t = false);

/// f evaluated at a given truncation level t >= mu + d/(2 eps).
double concentration_f_at(const MeanMadSpec& spec, double eps, double t);

/// Fills m and bound = max(0, 1 - f/m).
ConcentrationCertificate with_m(ConcentrationCertificate cert, int m);

struct ConcentrationReport {
  ConcentrationCertificate certificate;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double empirical = 0.0;
  double standard_error = 0.0;
  bool pass = false;
};

inline constexpr double kMcMembershipTolerance = 1e-6;

/// Monte Carlo estimate of P(sum >= threshold) over n seeded draws, members
/// cycled across the m slots. Passes iff empirical >= bound - 3 SE. Throws
/// MembershipViolation if a member misses its spec at tolerance 1e-6 and
/// ParamOutOfRange if n < 1e4.
ConcentrationReport concentration_check_mc(std::span<const MemberDist> members, int m, double eps,
                                           std::size_t n, std::uint64_t seed, unsigned threads = 0,
                                           bool optimize_t = false);

void to_json(nlohmann::json& j, const ConcentrationCertificate& cert);
void to_json(nlohmann::json& j, const ConcentrationReport& report);

}  // namespace rbl
