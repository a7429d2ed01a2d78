#pragma once

#include <array>
#include <variant>

#include <nlohmann/json_fwd.hpp>

namespace rbl {

/// Mean-MAD ambiguity set parameters: every non-negative law with mean `mu`
/// and mean absolute deviation `d`. Construction enforces mu > 0, 0 < d < 2 mu.
class MeanMadSpec {
 public:
  MeanMadSpec(double mu, double d);

  [[nodiscard]] double mu() const noexcept { return mu_; }
  [[nodiscard]] double d() const noexcept { return d_; }

  /// Smallest admissible low-point mass d/(2 mu); the low support point is 0 there.
  [[nodiscard]] double min_alpha() const noexcept { return d_ / (2.0 * mu_); }
  [[nodiscard]] double half_gap() const noexcept { return mu_ - 0.5 * d_; }

  friend bool operator==(const MeanMadSpec&, const MeanMadSpec&) = default;

 private:
  double mu_;
  double d_;
};

/// Two-point member of the ambiguity set with mass alpha on x and 1 - alpha on y.
///
/// The complement 1 - alpha is stored separately because the extremal
/// adversaries sit at alpha within 1e-12 of 1, where 1 - alpha cannot be
/// recovered from alpha in double precision.
class TwoPointDist {
 public:
  [[nodiscard]] const MeanMadSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] double one_minus_alpha() const noexcept { return q_; }
  [[nodiscard]] double x() const noexcept { return x_; }
  [[nodiscard]] double y() const noexcept { return y_; }

  [[nodiscard]] double mean() const noexcept { return alpha_ * x_ + q_ * y_; }
  [[nodiscard]] double mad() const noexcept;
  [[nodiscard]] double variance() const noexcept;

 private:
  friend TwoPointDist make_two_point(const MeanMadSpec&, double);
  friend TwoPointDist make_two_point_complement(const MeanMadSpec&, double);
  TwoPointDist(MeanMadSpec spec, double alpha, double q);

  MeanMadSpec spec_;
  double alpha_;
  double q_;
  double x_;
  double y_;
};

/// Throws AlphaOutOfRange unless alpha is in [d/(2 mu), 1).
TwoPointDist make_two_point(const MeanMadSpec& spec, double alpha);

/// Same family, parameterized by 1 - alpha in (0, 1 - d/(2 mu)].
TwoPointDist make_two_point_complement(const MeanMadSpec& spec, double one_minus_alpha);

struct ThreePointDist {
  std::array<double, 3> points;
  std::array<double, 3> probs;

  [[nodiscard]] double mean() const noexcept;
  [[nodiscard]] double mad() const noexcept;
};

/// Pareto law with survival (scale/x)^a on [scale, inf). Tail index a in (1, 2]
/// gives a finite mean and an infinite variance.
struct ParetoDist {
  double a;
  double scale;

  [[nodiscard]] double mean() const noexcept;
  [[nodiscard]] double mad() const noexcept;
};

/// MAD of the Pareto law with mean mu and tail index a: 2 mu (a-1)^(a-1) / a^a.
double pareto_induced_mad(double mu, double a);

/// A verified member of an ambiguity set, tagged by family.
struct MemberDist {
  MeanMadSpec spec;
  std::variant<TwoPointDist, ThreePointDist, ParetoDist> law;

  [[nodiscard]] double mean() const;
  [[nodiscard]] double mad() const;
};

MemberDist make_member(const TwoPointDist& dist);

/// Throws IndexOutOfRange for a outside (1, 2], MadMismatch when spec.d is
/// not the MAD induced by (mu, a) within 1e-9 relative.
MemberDist make_pareto_member(const MeanMadSpec& spec, double a);

/// Does not validate moments; pair with verify_membership.
MemberDist make_three_point_member(const MeanMadSpec& spec, std::array<double, 3> points,
                                   std::array<double, 3> probs);

struct MembershipReport {
  bool ok;
  double mean_error;
  double mad_error;
};

inline constexpr double kMomentTolerance = 1e-9;

MembershipReport verify_membership(const MemberDist& dist, const MeanMadSpec& spec,
                                   double tol = kMomentTolerance);

void to_json(nlohmann::json& j, const MemberDist& dist);
void from_json(const nlohmann::json& j, MemberDist& dist);
MemberDist member_from_json(const nlohmann::json& j);

}  // namespace rbl
