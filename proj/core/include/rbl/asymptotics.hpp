#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "rbl/ambiguity.hpp"
#include "rbl/robust_solvers.hpp"

namespace rbl {

/// Closed-form limits for a spec.
struct AsymptoticTargets {
  double maximin_limit;  // mu - d/2
  double ratio_limit;    // 1 - d/(2 mu)
  double regret_limit;   // d/2
  double minimax_upper;  // max(mu - d/2, d/2)
};

AsymptoticTargets asymptotic_targets(const MeanMadSpec& spec);

/// (1 - e^{-1/lambda}) (mu + (lambda - 1) d/2). Throws LambdaOutOfRange for lambda <= 0.
double g_lambda(const MeanMadSpec& spec, double lambda);

/// Variance of the two-point member with x = 0:
/// (d/(2mu)) mu^2 + (1 - d/(2mu)) (d mu/(2mu - d))^2.
double zero_low_variance(const MeanMadSpec& spec);

struct XiGap {
  double gamma;
  double tau0;
  double xi0;
  double xi1;
  double xi;
  /// Where the scanned minimum of g - (mu - d/2) sits.
  double lambda_argmin;
  /// Lower bound on g - (mu - d/2) for lambda beyond the scan.
  double tail_bound;
  double lambda_max;
};

inline constexpr std::size_t kXiGridPoints = 10000;
inline constexpr double kXiLambdaMax = 1e6;

/// Certified gap for mu < d < 2 mu. Throws RangeError otherwise.
XiGap xi_gap(const MeanMadSpec& spec, std::size_t grid = kXiGridPoints, double lambda_max = kXiLambdaMax);

struct RatioBounds {
  double lower;
  double upper;  // +inf when no gamma gives a positive bracket
  double gamma;  // minimizer of the upper bound
  double g;      // zero_low_variance(spec)
};

inline constexpr std::size_t kGammaGridPoints = 2000;

/// lower = p*(eps)(1 - f/m)^+ / (m mu); upper minimized over a gamma grid in (0, 1).
RatioBounds ratio_bound_chain(const MeanMadSpec& spec, int m, double eps,
                              std::size_t gamma_grid = kGammaGridPoints);

struct RegretBounds {
  double upper;
  double lower;
};

/// Throws ParamOutOfRange unless 0 < gamma < 1 and eps is feasible.
RegretBounds regret_bound_chain(const MeanMadSpec& spec, int m, double eps, double gamma);

/// eps = gamma = m^(-1/4).
double schedule_parameter(int m);

enum class OptHandling {
  /// OPT computed by the small-m oracle.
  Exact,
  /// OPT bracketed between constructive mechanisms and m mu.
  Bracketed,
};

std::string to_string(OptHandling mode);

struct EmpiricalObjective {
  double value;
  /// Bracket from the two ends of the OPT bracket; equal to value when exact.
  double lower;
  double upper;
  double price;
  OptHandling mode;
};

/// Largest m at which the empirical objectives call the exact oracle.
inline constexpr int kExactOptMaxM = 3;

/// Constructive lower bound on OPT for the i.i.d. law: best of the bundle
/// price optimum, bundling at the second support point and at (1-gamma) m mu,
/// and separate sale.
double opt_lower_bound(const TwoPointDist& dist, int m, double gamma);

/// sup_p inf_alpha BUND(p)/OPT over i.i.d. two-point nature. In bracketed
/// mode `value` uses OPT = m mu (a guaranteed lower estimate).
EmpiricalObjective ratio_empirical(const MeanMadSpec& spec, int m, const SolverOptions& options = {},
                                   double gamma = 0.0);

/// inf_p sup_alpha (OPT - BUND(p))/m. With `price` >= 0 the seller's price is
/// fixed instead of optimized. In bracketed mode `value` uses OPT = m mu (a
/// guaranteed upper estimate).
EmpiricalObjective regret_empirical(const MeanMadSpec& spec, int m, const SolverOptions& options = {},
                                    double gamma = 0.0, double price = -1.0);

/// `mu,d,m,eps,gamma,objective,mode,value,lower,upper`
void write_study_csv_header(std::ostream& out);
void write_study_csv_row(std::ostream& out, const MeanMadSpec& spec, int m, double eps, double gamma,
                         const std::string& objective, const std::string& mode, double value,
                         double lower, double upper);

void to_json(nlohmann::json& j, const XiGap& xi);

}  // namespace rbl
