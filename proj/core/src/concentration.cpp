#include "rbl/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "rbl/error.hpp"
#include "rbl/numeric.hpp"
#include "rbl/sum_law.hpp"

namespace rbl {

double tail_truncation_sup(const MeanMadSpec& spec, double t) {
  const double mu = spec.mu();
  const double d = spec.d();
  if (!(t >= mu + 0.5 * d)) {
    throw Error(ErrorKind::TruncationTooLow,
                "t=" + format_double(t) + " below mu + d/2 = " + format_double(mu + 0.5 * d));
  }
  return d * mu / (2.0 * (t - mu)) + 0.5 * d;
}

double tail_truncation_attained_from(const MeanMadSpec& spec) {
  const double mu = spec.mu();
  const double d = spec.d();
  return mu + d * mu / (2.0 * mu - d);
}

TwoPointDist tail_truncation_attainer(const MeanMadSpec& spec, double t) {
  const double from = tail_truncation_attained_from(spec);
  if (!(t >= from)) {
    throw Error(ErrorKind::TruncationTooLow,
                "supremum not attained by a two-point member for t=" + format_double(t) + " < " +
                    format_double(from));
  }
  const double q = std::min(spec.d() / (2.0 * (t - spec.mu())), 1.0 - spec.min_alpha());
  return make_two_point_complement(spec, q);
}

double chebyshev_lower_tail(double mu, double sigma2, int m, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorKind::GammaOutOfRange, "gamma=" + format_double(gamma) + " outside (0, 1)");
  }
  if (sigma2 < 0.0 || m < 1 || !(mu > 0.0)) {
    throw Error(ErrorKind::ParamOutOfRange, "need sigma2 >= 0, m >= 1, mu > 0");
  }
  const double gm = gamma * mu;
  return sigma2 / (gm * gm * m);
}

namespace {

void check_eps(const MeanMadSpec& spec, double eps) {
  const double limit = 1.0 - spec.min_alpha();
  if (!(eps > 0.0 && eps < limit)) {
    throw Error(ErrorKind::EpsOutOfRange,
                "eps=" + format_double(eps) + " outside (0, " + format_double(limit) + ")");
  }
}

}  // namespace

double concentration_f_at(const MeanMadSpec& spec, double eps, double t) {
  check_eps(spec, eps);
  const double mu = spec.mu();
  const double d = spec.d();
  const double t_min = mu + d / (2.0 * eps);
  if (!(t >= t_min)) {
    throw Error(ErrorKind::TruncationTooLow,
                "t=" + format_double(t) + " below mu + d/(2 eps) = " + format_double(t_min));
  }
  // Conditional mean below t is at least (1 - eps_t) mu - d/2, eps_t <= eps.
  const double eps_t = t == t_min ? eps : d / (2.0 * (t - mu));
  const double cond_mean = (1.0 - eps_t) * mu - 0.5 * d;
  const double den = eps * cond_mean;
  return t * t / (4.0 * den * den);
}

ConcentrationCertificate concentration_constant(const MeanMadSpec& spec, double eps,
                                                bool optimize_t) {
  check_eps(spec, eps);
  const double mu = spec.mu();
  const double d = spec.d();
  ConcentrationCertificate cert;
  cert.mu = mu;
  cert.d = d;
  cert.eps = eps;
  cert.t = mu + d / (2.0 * eps);
  cert.f = concentration_f_at(spec, eps, cert.t);
  const double keep = 1.0 - eps;
  cert.threshold_per_good = keep * keep * (mu - d / (2.0 * keep));
  if (optimize_t) {
    // f(t) is smooth on [t0, inf) and grows like t^2 far out; scan in log t
    // then polish the best bracket.
    const double t0 = cert.t;
    const auto grid = log_spaced(t0, 1e3 * t0, 2001);
    std::size_t best = 0;
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      values[i] = concentration_f_at(spec, eps, grid[i]);
      if (values[i] < values[best]) best = i;
    }
    const double lo = grid[best == 0 ? 0 : best - 1];
    const double hi = grid[std::min(best + 1, grid.size() - 1)];
    const auto polished = golden_section_minimize(
        [&](double t) { return concentration_f_at(spec, eps, t); }, lo, hi, 1e-12 * hi);
    if (polished.value < values[best]) {
      cert.t = polished.argmin;
      cert.f = polished.value;
    } else {
      cert.t = grid[best];
      cert.f = values[best];
    }
  }
  return cert;
}

ConcentrationCertificate with_m(ConcentrationCertificate cert, int m) {
  if (m < 1) throw Error(ErrorKind::ParamOutOfRange, "m must be >= 1");
  cert.m = m;
  cert.bound = std::clamp(1.0 - cert.f / m, 0.0, 1.0);
  return cert;
}

ConcentrationReport concentration_check_mc(std::span<const MemberDist> members, int m, double eps,
                                           std::size_t n, std::uint64_t seed, unsigned threads,
                                           bool optimize_t) {
  if (members.empty()) throw Error(ErrorKind::LengthMismatch, "no members given");
  if (n < 10000) throw Error(ErrorKind::ParamOutOfRange, "need n >= 10000 samples");
  if (m < 1) throw Error(ErrorKind::ParamOutOfRange, "m must be >= 1");
  const MeanMadSpec& spec = members.front().spec;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto check = verify_membership(members[i], spec, kMcMembershipTolerance);
    if (!check.ok) {
      throw Error(ErrorKind::MembershipViolation,
                  "member " + std::to_string(i) + " misses (mu, d): mean error " +
                      format_double(check.mean_error) + ", mad error " + format_double(check.mad_error));
    }
  }
  ConcentrationReport report;
  report.certificate = with_m(concentration_constant(spec, eps, optimize_t), m);
  report.n = n;
  report.seed = seed;

  std::vector<MemberDist> slots;
  if (members.size() == 1 || members.size() == static_cast<std::size_t>(m)) {
    slots.assign(members.begin(), members.end());
  } else {
    slots.reserve(m);
    for (int i = 0; i < m; ++i) slots.push_back(members[i % members.size()]);
  }
  const auto sums = sample_sum(slots, m, seed, n, threads);
  const double threshold = report.certificate.threshold();
  const auto hits = std::count_if(sums.begin(), sums.end(), [&](double s) { return s >= threshold; });
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  report.empirical = p;
  report.standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  report.pass = p >= report.certificate.bound - 3.0 * report.standard_error;
  return report;
}

void to_json(nlohmann::json& j, const ConcentrationCertificate& cert) {
  j = {{"mu", cert.mu},          {"d", cert.d},     {"eps", cert.eps},
       {"t", cert.t},            {"f", cert.f},     {"m", cert.m},
       {"threshold", cert.threshold()}, {"bound", cert.bound}};
}

void to_json(nlohmann::json& j, const ConcentrationReport& report) {
  j = {{"certificate", report.certificate},
       {"n", report.n},
       {"seed", report.seed},
       {"empirical", report.empirical},
       {"standard_error", report.standard_error},
       {"pass", report.pass}};
}

}  // namespace rbl
