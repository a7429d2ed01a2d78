#include "rbl/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "rbl/bundling.hpp"
#include "rbl/concentration.hpp"
#include "rbl/error.hpp"
#include "rbl/numeric.hpp"
#include "rbl/opt_oracle.hpp"
#include "rbl/parallel.hpp"
#include "rbl/sum_law.hpp"

namespace rbl {

AsymptoticTargets asymptotic_targets(const MeanMadSpec& spec) {
  const double half = 0.5 * spec.d();
  const double gap = spec.half_gap();
  return {gap, 1.0 - spec.d() / (2.0 * spec.mu()), half, std::max(gap, half)};
}

double g_lambda(const MeanMadSpec& spec, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::LambdaOutOfRange, "lambda=" + format_double(lambda) + " must be positive");
  }
  return -std::expm1(-1.0 / lambda) * (spec.mu() + (lambda - 1.0) * 0.5 * spec.d());
}

double zero_low_variance(const MeanMadSpec& spec) {
  const double mu = spec.mu();
  const double d = spec.d();
  const double a = d / (2.0 * mu);
  const double dev = d * mu / (2.0 * mu - d);
  return a * mu * mu + (1.0 - a) * dev * dev;
}

XiGap xi_gap(const MeanMadSpec& spec, std::size_t grid, double lambda_max) {
  const double mu = spec.mu();
  const double d = spec.d();
  if (!(d > mu)) {
    throw Error(ErrorKind::RangeError, "xi gap needs mu < d < 2 mu; got d=" + format_double(d));
  }
  XiGap out{};
  out.gamma = 1.0 - d / (1.98 * mu);
  if (!(out.gamma > 0.0)) {
    throw Error(ErrorKind::RangeError, "no gamma in (0, 1) satisfies 0.99 (1 - gamma) mu >= d/2 for d=" +
                                           format_double(d));
  }
  const double r = 2.0 * out.gamma * mu / d;
  out.tau0 = 0.01 * r * r;
  out.xi0 = d - mu;
  out.lambda_max = lambda_max;
  const double base = spec.half_gap();
  const auto lambdas = log_spaced(out.tau0, lambda_max, std::max<std::size_t>(grid, 2));
  std::size_t best = 0;
  std::vector<double> gaps(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    gaps[i] = g_lambda(spec, lambdas[i]) - base;
    if (gaps[i] < gaps[best]) best = i;
  }
  double scan_min = gaps[best];
  out.lambda_argmin = lambdas[best];
  if (best > 0 && best + 1 < lambdas.size()) {
    const auto polished = golden_section_minimize(
        [&](double u) { return g_lambda(spec, std::exp(u)) - base; }, std::log(lambdas[best - 1]),
        std::log(lambdas[best + 1]), 1e-12);
    if (polished.value < scan_min) {
      scan_min = polished.value;
      out.lambda_argmin = std::exp(polished.argmin);
    }
  }
  // Beyond lambda_max: 1 - e^{-u} >= u - u^2/2 and mu + (lambda-1) d/2 >= lambda d/2,
  // so g >= (d/2)(1 - 1/(2 lambda_max)).
  out.tail_bound = 0.5 * d * (1.0 - 1.0 / (2.0 * lambda_max)) - base;
  out.xi1 = std::min(scan_min, out.tail_bound);
  out.xi = std::min(out.xi0, out.xi1);
  return out;
}

RatioBounds ratio_bound_chain(const MeanMadSpec& spec, int m, double eps, std::size_t gamma_grid) {
  if (m < 1) throw Error(ErrorKind::ParamOutOfRange, "m must be >= 1");
  const double mu = spec.mu();
  const double d = spec.d();
  const auto cert = with_m(concentration_constant(spec, eps), m);
  RatioBounds out{};
  out.g = zero_low_variance(spec);
  out.lower = std::max(0.0, epsilon_star_price(spec, m, eps) * cert.bound / (m * mu));

  const double head = (2.0 * mu - d) / (2.0 * mu);
  const auto upper_at = [&](double gamma) {
    const double gm = gamma * mu;
    const double bracket = 1.0 - out.g / (gm * gm * m);
    if (!(bracket > 0.0)) return std::numeric_limits<double>::infinity();
    return head / ((1.0 - gamma) * bracket);
  };
  const std::size_t n = std::max<std::size_t>(gamma_grid, 3);
  std::size_t best = 0;
  std::vector<double> gammas(n);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    gammas[i] = static_cast<double>(i + 1) / static_cast<double>(n + 1);
    values[i] = upper_at(gammas[i]);
    if (values[i] < values[best]) best = i;
  }
  out.upper = values[best];
  out.gamma = gammas[best];
  if (std::isfinite(out.upper)) {
    const double lo = best == 0 ? gammas[0] * 0.5 : gammas[best - 1];
    const double hi = best + 1 < n ? gammas[best + 1] : 0.5 * (1.0 + gammas[best]);
    const auto polished = golden_section_minimize(upper_at, lo, hi, 1e-12);
    if (polished.value < out.upper) {
      out.upper = polished.value;
      out.gamma = polished.argmin;
    }
  } else {
    out.gamma = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

RegretBounds regret_bound_chain(const MeanMadSpec& spec, int m, double eps, double gamma) {
  const double mu = spec.mu();
  const double d = spec.d();
  const double limit = 1.0 - spec.min_alpha();
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorKind::ParamOutOfRange, "gamma=" + format_double(gamma) + " outside (0, 1)");
  }
  if (!(eps > 0.0 && eps < limit)) {
    throw Error(ErrorKind::ParamOutOfRange,
                "eps=" + format_double(eps) + " outside (0, " + format_double(limit) + ")");
  }
  if (m < 1) throw Error(ErrorKind::ParamOutOfRange, "m must be >= 1");
  const auto cert = with_m(concentration_constant(spec, eps), m);
  RegretBounds out{};
  out.upper = mu - epsilon_star_price(spec, m, eps) / m * cert.bound;
  const double cheb = 1.0 - chebyshev_lower_tail(mu, zero_low_variance(spec), m, gamma);
  const double case_one = (1.0 - gamma) * mu * cheb - spec.half_gap();
  out.lower = std::min(case_one, std::max(spec.half_gap(), 0.5 * d));
  return out;
}

double schedule_parameter(int m) {
  if (m < 1) throw Error(ErrorKind::ParamOutOfRange, "m must be >= 1");
  return std::pow(static_cast<double>(m), -0.25);
}

std::string to_string(OptHandling mode) { return mode == OptHandling::Exact ? "exact" : "bracketed"; }

double opt_lower_bound(const TwoPointDist& dist, int m, double gamma) {
  double best = best_bundle_price(iid_two_point_sum(dist, m)).revenue;
  best = std::max(best, m * second_point_revenue(dist, m));
  best = std::max(best, separate_sale_revenue(dist, m));
  if (gamma > 0.0 && gamma < 1.0) {
    best = std::max(best, iid_bundling_revenue((1.0 - gamma) * m * dist.spec().mu(), dist, m).revenue);
  }
  return best;
}

namespace {

/// Per-alpha OPT values on nature's grid, with on-demand evaluation between
/// grid points. Read-only after construction, so safe across threads.
class OptTable {
 public:
  OptTable(const MeanMadSpec& spec, int m, std::vector<double> grid, bool exact, double gamma,
           unsigned threads)
      : spec_(spec), m_(m), exact_(exact), gamma_(gamma), grid_(std::move(grid)), values_(grid_.size()) {
    parallel_for(grid_.size(), threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) values_[i] = compute(grid_[i]);
    });
  }

  double operator()(double q) const {
    // Grid is descending.
    const auto it = std::lower_bound(grid_.begin(), grid_.end(), q, std::greater<>());
    if (it != grid_.end() && *it == q) return values_[static_cast<std::size_t>(it - grid_.begin())];
    return compute(q);
  }

  [[nodiscard]] const std::vector<double>& grid() const { return grid_; }

 private:
  [[nodiscard]] double compute(double q) const {
    const auto dist = make_two_point_complement(spec_, q);
    if (exact_) {
      const TwoPointDist one[] = {dist};
      return opt_deterministic(one, m_, OptMode::Full).revenue;
    }
    return opt_lower_bound(dist, m_, gamma_);
  }

  MeanMadSpec spec_;
  int m_;
  bool exact_;
  double gamma_;
  std::vector<double> grid_;
  std::vector<double> values_;
};

double bund(const MeanMadSpec& spec, int m, double p, double q) {
  return iid_bundling_revenue(p, make_two_point_complement(spec, q), m).revenue;
}

}  // namespace

EmpiricalObjective ratio_empirical(const MeanMadSpec& spec, int m, const SolverOptions& options,
                                   double gamma) {
  if (m < 1) throw Error(ErrorKind::ParamOutOfRange, "m must be >= 1");
  const double mu = spec.mu();
  const auto prices = lin_spaced(0.0, m * mu, options.price_grid);
  const bool exact = m <= kExactOptMaxM;
  const OptTable opt(spec, m, nature_grid(spec, options), exact, gamma, options.threads);
  const auto& grid = opt.grid();
  const auto ratio_at = [&](double p, bool refine) {
    if (p == 0.0) return 0.0;
    return minimize_over_alpha(spec, grid, options.refine_width,
                               [&](double q) { return bund(spec, m, p, q) / opt(q); }, refine)
        .value;
  };
  EmpiricalObjective out{};
  if (exact) {
    const auto best = maximize_over_price(prices, options.refine_width, options.threads,
                                          [&](double p) { return ratio_at(p, true); });
    out = {best.value, best.value, best.value, best.price, OptHandling::Exact};
    return out;
  }
  // OPT <= m mu gives the lower end; the constructive OPT bound the upper end.
  // Nature stays on the grid for the upper end, which can only raise it.
  const auto low = maximin_bundling_value(spec, m, options);
  const auto high = maximize_over_price(prices, options.refine_width, options.threads,
                                        [&](double p) { return ratio_at(p, false); });
  out = {low.value / mu, low.value / mu, high.value, low.price, OptHandling::Bracketed};
  return out;
}

EmpiricalObjective regret_empirical(const MeanMadSpec& spec, int m, const SolverOptions& options,
                                    double gamma, double price) {
  if (m < 1) throw Error(ErrorKind::ParamOutOfRange, "m must be >= 1");
  const double mu = spec.mu();
  const bool exact = m <= kExactOptMaxM;
  const OptTable opt(spec, m, nature_grid(spec, options), exact, gamma, options.threads);
  const auto& grid = opt.grid();
  // Worst-case regret at price p; maximized over alpha by minimizing its negative.
  const auto regret_at = [&](double p, bool refine) {
    return -minimize_over_alpha(spec, grid, options.refine_width,
                                [&](double q) { return (bund(spec, m, p, q) - opt(q)) / m; }, refine)
                .value;
  };
  const auto prices = price >= 0.0 ? std::vector<double>{price} : lin_spaced(0.0, m * mu, options.price_grid);
  const auto seller_best = [&](bool refine) {
    return maximize_over_price(prices, options.refine_width, options.threads,
                               [&](double p) { return -regret_at(p, refine); });
  };
  if (exact) {
    const auto best = seller_best(true);
    return {-best.value, -best.value, -best.value, best.price, OptHandling::Exact};
  }
  // OPT <= m mu: regret <= mu - inf_alpha BUND/m.
  double upper = 0.0;
  double at = price;
  if (price >= 0.0) {
    upper = mu - worst_case_alpha(spec, m, price, options).value;
  } else {
    const auto low = maximin_bundling_value(spec, m, options);
    upper = mu - low.value;
    at = low.price;
  }
  // Constructive OPT with nature on the grid can only lower this end.
  const auto lower = seller_best(false);
  return {upper, -lower.value, upper, at, OptHandling::Bracketed};
}

void write_study_csv_header(std::ostream& out) {
  out << "mu,d,m,eps,gamma,objective,mode,value,lower,upper\n";
}

void write_study_csv_row(std::ostream& out, const MeanMadSpec& spec, int m, double eps, double gamma,
                         const std::string& objective, const std::string& mode, double value,
                         double lower, double upper) {
  out << format_double(spec.mu()) << ',' << format_double(spec.d()) << ',' << m << ','
      << format_double(eps) << ',' << format_double(gamma) << ',' << objective << ',' << mode << ','
      << format_double(value) << ',' << format_double(lower) << ',' << format_double(upper) << '\n';
}

void to_json(nlohmann::json& j, const XiGap& xi) {
  j = {{"gamma", xi.gamma},       {"tau0", xi.tau0},
       {"xi0", xi.xi0},           {"xi1", xi.xi1},
       {"xi", xi.xi},             {"lambda_argmin", xi.lambda_argmin},
       {"tail_bound", xi.tail_bound}, {"lambda_max", xi.lambda_max}};
}

}  // namespace rbl
