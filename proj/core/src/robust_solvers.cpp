#include "rbl/robust_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "rbl/bundling.hpp"
#include "rbl/concentration.hpp"
#include "rbl/error.hpp"
#include "rbl/numeric.hpp"
#include "rbl/parallel.hpp"
#include "rbl/sum_law.hpp"

namespace rbl {

namespace {

void check_m(int m) {
  if (m < 1) throw Error(ErrorKind::ParamOutOfRange, "m must be >= 1");
}

double q_max(const MeanMadSpec& spec) { return 1.0 - spec.min_alpha(); }

/// Given h on a descending q grid, polishes in log q around the best grid
/// point. The grid minimum is kept when the polish does worse.
template <class H>
AlphaMin refine_over_q(const MeanMadSpec& spec, const std::vector<double>& grid,
                       const std::vector<double>& values, double width, H&& h) {
  const std::size_t best =
      static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  AlphaMin out{1.0 - grid[best], grid[best], values[best]};
  if (grid.size() < 3) return out;
  const double qmax = q_max(spec);
  const double u_hi = std::log(grid[best == 0 ? 0 : best - 1]);
  const double u_lo = std::log(grid[std::min(best + 1, grid.size() - 1)]);
  const auto polished = golden_section_minimize(
      [&](double u) { return h(std::min(std::exp(u), qmax)); }, u_lo, u_hi, width);
  if (polished.value < out.value) {
    const double q = std::min(std::exp(polished.argmin), qmax);
    out = {1.0 - q, q, polished.value};
  }
  return out;
}

AlphaMin inner_min(const MeanMadSpec& spec, int m, double p, const std::vector<double>& grid,
                   double width) {
  if (p == 0.0) return {1.0 - grid.front(), grid.front(), 0.0};
  const auto h = [&](double q) { return p * iid_tail_prob(make_two_point_complement(spec, q), m, p) / m; };
  std::vector<double> values(grid.size());
  std::transform(grid.begin(), grid.end(), values.begin(), h);
  return refine_over_q(spec, grid, values, width, h);
}

}  // namespace

AlphaMin minimize_over_alpha(const MeanMadSpec& spec, const std::vector<double>& q_grid, double width,
                             const std::function<double(double)>& h, bool refine) {
  if (q_grid.empty()) throw Error(ErrorKind::ParamOutOfRange, "empty alpha grid");
  std::vector<double> values(q_grid.size());
  std::transform(q_grid.begin(), q_grid.end(), values.begin(), h);
  if (!refine) {
    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    return {1.0 - q_grid[best], q_grid[best], values[best]};
  }
  return refine_over_q(spec, q_grid, values, width, h);
}

PriceMax maximize_over_price(const std::vector<double>& prices, double width, unsigned threads,
                             const std::function<double(double)>& f) {
  if (prices.empty()) throw Error(ErrorKind::ParamOutOfRange, "empty price grid");
  std::vector<double> values(prices.size());
  parallel_for(prices.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) values[i] = f(prices[i]);
  });
  const auto best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  PriceMax out{prices[best], values[best], values[best]};
  if (prices.size() < 3) return out;
  const double lo = prices[best == 0 ? 0 : best - 1];
  const double hi = prices[std::min(best + 1, prices.size() - 1)];
  const auto polished = golden_section_minimize([&](double p) { return -f(p); }, lo, hi, width);
  if (-polished.value > out.value) {
    out.price = polished.argmin;
    out.value = -polished.value;
  }
  return out;
}

std::vector<double> nature_grid(const MeanMadSpec& spec, const SolverOptions& options) {
  const double top = q_max(spec);
  if (options.alpha_grid < 2) throw Error(ErrorKind::ParamOutOfRange, "alpha grid needs >= 2 points");
  if (!(options.q_floor > 0.0 && options.q_floor < top)) {
    throw Error(ErrorKind::ParamOutOfRange, "q floor must lie in (0, 1 - d/(2 mu))");
  }
  auto grid = log_spaced(top, options.q_floor, options.alpha_grid);
  for (double q : options.extra_q) {
    if (q > 0.0 && q <= top) grid.push_back(q);
  }
  std::sort(grid.begin(), grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

AlphaMin worst_case_alpha(const MeanMadSpec& spec, int m, double p, const SolverOptions& options) {
  check_m(m);
  if (p < 0.0) throw Error(ErrorKind::NegativePrice, "price " + format_double(p) + " < 0");
  return inner_min(spec, m, p, nature_grid(spec, options), options.refine_width);
}

RobustPriceCertificate maximin_certificate(const MeanMadSpec& spec, int m, std::size_t eps_grid) {
  check_m(m);
  const double limit = q_max(spec);
  RobustPriceCertificate best{0.0, 0.0, -1.0};
  for (double eps : log_spaced(1e-4 * limit, 0.999 * limit, std::max<std::size_t>(eps_grid, 2))) {
    const auto cert = with_m(concentration_constant(spec, eps), m);
    const double price = epsilon_star_price(spec, m, eps);
    const double value = std::max(price / m * cert.bound, 0.0);
    if (value > best.value) best = {eps, price, value};
  }
  return best;
}

SaddleReport maximin_bundling_value(const MeanMadSpec& spec, int m, const SolverOptions& options) {
  check_m(m);
  if (options.price_grid < 2) throw Error(ErrorKind::ParamOutOfRange, "price grid needs >= 2 points");
  const auto q_grid = nature_grid(spec, options);
  const double width = options.refine_width;
  const auto cert = maximin_certificate(spec, m, options.eps_grid);

  const auto prices = lin_spaced(0.0, m * spec.mu(), options.price_grid);
  std::vector<AlphaMin> inner(prices.size());
  parallel_for(prices.size(), options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) inner[i] = inner_min(spec, m, prices[i], q_grid, width);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < prices.size(); ++i) {
    if (inner[i].value > inner[best].value) best = i;
  }
  SaddleReport report;
  report.m = m;
  report.grid_value = inner[best].value;
  double best_price = prices[best];
  AlphaMin best_inner = inner[best];

  const auto consider = [&](double p) {
    const auto v = inner_min(spec, m, p, q_grid, width);
    if (v.value > best_inner.value) {
      best_inner = v;
      best_price = p;
    }
    return v.value;
  };
  const double lo = prices[best == 0 ? 0 : best - 1];
  const double hi = prices[std::min(best + 1, prices.size() - 1)];
  golden_section_minimize([&](double p) { return -consider(p); }, lo, hi, width);
  if (cert.price > 0.0) consider(cert.price);

  report.value = best_inner.value;
  report.price = best_price;
  report.alpha = best_inner.alpha;
  report.one_minus_alpha = best_inner.one_minus_alpha;
  report.lower = cert.value;
  report.upper = spec.half_gap();
  return report;
}

SaddleReport minimax_bundling_value(const MeanMadSpec& spec, int m, const SolverOptions& options) {
  check_m(m);
  const auto q_grid = nature_grid(spec, options);
  const auto seller = [&](double q) {
    return best_bundle_price(iid_two_point_sum(make_two_point_complement(spec, q), m));
  };
  std::vector<double> values(q_grid.size());
  parallel_for(q_grid.size(), options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) values[i] = seller(q_grid[i]).revenue / m;
  });
  const double grid_min = *std::min_element(values.begin(), values.end());
  const auto found = refine_over_q(spec, q_grid, values, options.refine_width,
                                   [&](double q) { return seller(q).revenue / m; });
  SaddleReport report;
  report.m = m;
  report.value = found.value;
  report.alpha = found.alpha;
  report.one_minus_alpha = found.one_minus_alpha;
  report.price = seller(found.one_minus_alpha).price;
  report.grid_value = grid_min;
  report.lower = maximin_certificate(spec, m, options.eps_grid).value;
  report.upper = grid_min;
  return report;
}

double heterogeneous_probe_value(const MeanMadSpec& spec, int m, double p, std::uint64_t seed,
                                 std::size_t probes) {
  check_m(m);
  if (m > static_cast<int>(kDefaultFactorCap)) {
    throw Error(ErrorKind::TooManyFactors, "heterogeneous probes need m <= 20");
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < probes; ++j) {
    auto engine = sample_engine(seed, j);
    std::vector<TwoPointDist> factors;
    factors.reserve(m);
    for (int i = 0; i < m; ++i) {
      // log-uniform 1 - alpha so the probes reach the alpha -> 1 corner.
      const double u = uniform01(engine);
      const double q = std::exp(std::log(q_max(spec)) + u * std::log(1e-12 / q_max(spec)));
      factors.push_back(make_two_point_complement(spec, q));
    }
    best = std::min(best, bundling_revenue(p, product_sum(factors)).revenue / m);
  }
  return best;
}

double extreme_adversary_log_one_minus_alpha(int m) {
  check_m(m);
  const double md = m;
  return -(md + 1.0) * std::log(md) - md;
}

ExtremeAdversary extreme_adversary(const MeanMadSpec& spec, int m) {
  ExtremeAdversary out{};
  out.m = m;
  out.log_one_minus_alpha = extreme_adversary_log_one_minus_alpha(m);
  const double q = std::exp(out.log_one_minus_alpha);
  const double log_alpha = std::log1p(-q);
  out.log_alpha_pow_m = m * log_alpha;
  out.log_single_high = (m - 1) * log_alpha + out.log_one_minus_alpha;

  const double mu = spec.mu();
  const double d = spec.d();
  const double x = spec.half_gap() - 0.5 * d * q / (1.0 - q);
  const double log_y = std::log(0.5 * d) - out.log_one_minus_alpha + std::log1p(2.0 * mu * q / d);
  const double log_fact_m = std::lgamma(m + 1.0);
  std::vector<double> terms;
  terms.reserve(m > 1 ? m - 1 : 0);
  for (int k = 2; k <= m; ++k) {
    const double low = static_cast<double>(m - k) * x;
    const double log_high = std::log(static_cast<double>(k)) + log_y;
    const double log_point = low > 0.0 ? std::max(std::log(low), log_high) +
                                             std::log1p(std::exp(-std::abs(std::log(low) - log_high)))
                                       : log_high;
    terms.push_back(log_fact_m - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0) + log_point +
                    (m - k) * log_alpha + k * out.log_one_minus_alpha);
  }
  if (terms.empty()) {
    out.log_multi_high_revenue = -std::numeric_limits<double>::infinity();
  } else {
    const double top = *std::max_element(terms.begin(), terms.end());
    std::vector<double> scaled(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) scaled[i] = std::exp(terms[i] - top);
    out.log_multi_high_revenue = top + std::log(pairwise_sum(scaled)) - std::log(static_cast<double>(m));
  }
  return out;
}

void write_saddle_csv_header(std::ostream& out) { out << "mu,d,m,objective,value,price,alpha,lower,upper\n"; }

void write_saddle_csv_row(std::ostream& out, const MeanMadSpec& spec, const std::string& objective,
                          const SaddleReport& r) {
  out << format_double(spec.mu()) << ',' << format_double(spec.d()) << ',' << r.m << ',' << objective << ','
      << format_double(r.value) << ',' << format_double(r.price) << ',' << format_double(r.alpha) << ','
      << format_double(r.lower) << ',' << format_double(r.upper) << '\n';
}

}  // namespace rbl
