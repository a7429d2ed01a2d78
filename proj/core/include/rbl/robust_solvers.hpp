#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rbl/ambiguity.hpp"

namespace rbl {

/// Grid and refinement settings shared by the nested solvers.
struct SolverOptions {
  /// Nature's grid over 1 - alpha, log-spaced from 1 - d/(2 mu) down to `q_floor`.
  std::size_t alpha_grid = 2048;
  double q_floor = 1e-12;
  /// Seller's grid over the bundle price on [0, m mu].
  std::size_t price_grid = 1024;
  /// Golden-section stopping width: absolute for prices, in log(1 - alpha) for nature.
  double refine_width = 1e-10;
  /// Grid points for the epsilon scan behind the maximin lower certificate.
  std::size_t eps_grid = 512;
  /// Extra values of 1 - alpha that every inner search also evaluates.
  std::vector<double> extra_q;
  unsigned threads = 0;
};

/// One solved game instance. Values are per good (divided by m).
struct SaddleReport {
  int m = 0;
  double value = 0.0;
  double price = 0.0;
  double alpha = 0.0;
  double one_minus_alpha = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  /// Best value on the raw grids before refinement.
  double grid_value = 0.0;
};

struct AlphaMin {
  double alpha;
  double one_minus_alpha;
  double value;
};

/// Nature's grid in 1 - alpha (descending), extras merged in.
std::vector<double> nature_grid(const MeanMadSpec& spec, const SolverOptions& options);

/// Minimizes h(1 - alpha) over a descending grid of 1 - alpha, then (if
/// `refine`) polishes in log(1 - alpha) around the best grid point. The grid
/// minimum is kept when the polish does worse.
AlphaMin minimize_over_alpha(const MeanMadSpec& spec, const std::vector<double>& q_grid, double width,
                             const std::function<double(double)>& h, bool refine = true);

struct PriceMax {
  double price;
  double value;
  double grid_value;
};

/// Maximizes f over an ascending price grid (evaluated in parallel), then
/// polishes by golden section between the neighbours of the best point.
PriceMax maximize_over_price(const std::vector<double>& prices, double width, unsigned threads,
                             const std::function<double(double)>& f);

/// Approximate argmin over alpha of BUND(p, iid two-point law)/m: grid, then
/// golden refinement around the best grid point. Never worse than the grid.
AlphaMin worst_case_alpha(const MeanMadSpec& spec, int m, double p,
                          const SolverOptions& options = {});

/// sup over p of worst_case_alpha(p).value, refined by golden section. Also
/// probes the robust prices behind the lower certificate.
/// lower = max_eps p*(eps)/m (1 - f/m)^+, upper = mu - d/2.
SaddleReport maximin_bundling_value(const MeanMadSpec& spec, int m,
                                    const SolverOptions& options = {});

/// inf over alpha of best_bundle_price(iid law).revenue / m.
/// lower = the maximin certificate, upper = the raw grid minimum.
SaddleReport minimax_bundling_value(const MeanMadSpec& spec, int m,
                                    const SolverOptions& options = {});

/// max over an eps grid of p*(eps)/m (1 - f(eps)/m), clipped at 0, and its eps.
struct RobustPriceCertificate {
  double eps;
  double price;
  double value;
};
RobustPriceCertificate maximin_certificate(const MeanMadSpec& spec, int m, std::size_t eps_grid = 512);

/// Nature's heterogeneous probes: min over `probes` random two-point product
/// laws (independent alpha per good) of BUND(p)/m. m <= 20.
double heterogeneous_probe_value(const MeanMadSpec& spec, int m, double p, std::uint64_t seed,
                                 std::size_t probes);

/// Extreme adversary alpha(m) = 1 - m^-(m+1) e^-m, all in log domain.
struct ExtremeAdversary {
  int m;
  /// -(m+1) log m - m
  double log_one_minus_alpha;
  /// m log(alpha)
  double log_alpha_pow_m;
  /// (m-1) log(alpha) + log(1-alpha)
  double log_single_high;
  /// log of (1/m) sum_{k>=2} C(m,k) [(m-k) x + k y] alpha^(m-k) (1-alpha)^k;
  /// -inf for m = 1.
  double log_multi_high_revenue;
};

ExtremeAdversary extreme_adversary(const MeanMadSpec& spec, int m);

/// log(1 - alpha(m)) alone; needs no spec.
double extreme_adversary_log_one_minus_alpha(int m);

/// `mu,d,m,objective,value,price,alpha,lower,upper`
void write_saddle_csv_header(std::ostream& out);
void write_saddle_csv_row(std::ostream& out, const MeanMadSpec& spec, const std::string& objective,
                          const SaddleReport& report);

}  // namespace rbl
