#include "rbl/ambiguity.hpp"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "rbl/error.hpp"

namespace rbl {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorKind::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorKind::MadMismatch: return "MadMismatch";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NumericalInstability: return "NumericalInstability";
    case ErrorKind::TooManyFactors: return "TooManyFactors";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NegativePrice: return "NegativePrice";
    case ErrorKind::EpsOutOfRange: return "EpsOutOfRange";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::TruncationTooLow: return "TruncationTooLow";
    case ErrorKind::GammaOutOfRange: return "GammaOutOfRange";
    case ErrorKind::MembershipViolation: return "MembershipViolation";
    case ErrorKind::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorKind::RangeError: return "RangeError";
    case ErrorKind::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

MeanMadSpec::MeanMadSpec(double mu, double d) : mu_(mu), d_(d) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw Error(ErrorKind::InfeasibleSpec, "mu must be positive, got " + std::to_string(mu));
  }
  if (!(d > 0.0) || !(d < 2.0 * mu)) {
    throw Error(ErrorKind::InfeasibleSpec,
                "d must lie in (0, 2 mu), got d=" + std::to_string(d) + " mu=" + std::to_string(mu));
  }
}

TwoPointDist::TwoPointDist(MeanMadSpec spec, double alpha, double q)
    : spec_(spec), alpha_(alpha), q_(q) {
  const double mu = spec_.mu();
  const double d = spec_.d();
  // x(d/(2 mu)) is pinned to 0; the floating-point expression can miss by an ulp.
  x_ = alpha_ == spec_.min_alpha() ? 0.0 : std::max(0.0, mu - d / (2.0 * alpha_));
  y_ = mu + d / (2.0 * q_);
}

double TwoPointDist::mad() const noexcept {
  const double mu = spec_.mu();
  return alpha_ * (mu - x_) + q_ * (y_ - mu);
}

double TwoPointDist::variance() const noexcept {
  // d^2/(4 alpha) + d^2/(4 (1 - alpha))
  const double d = spec_.d();
  return d * d / (4.0 * alpha_) + d * d / (4.0 * q_);
}

TwoPointDist make_two_point(const MeanMadSpec& spec, double alpha) {
  if (!(alpha >= spec.min_alpha()) || !(alpha < 1.0)) {
    throw Error(ErrorKind::AlphaOutOfRange,
                "alpha=" + std::to_string(alpha) + " outside [" + std::to_string(spec.min_alpha()) +
                    ", 1)");
  }
  return TwoPointDist(spec, alpha, 1.0 - alpha);
}

TwoPointDist make_two_point_complement(const MeanMadSpec& spec, double one_minus_alpha) {
  const double q_max = 1.0 - spec.min_alpha();
  if (!(one_minus_alpha > 0.0) || !(one_minus_alpha <= q_max)) {
    throw Error(ErrorKind::AlphaOutOfRange,
                "1 - alpha=" + std::to_string(one_minus_alpha) + " outside (0, " +
                    std::to_string(q_max) + "]");
  }
  const double alpha = one_minus_alpha == q_max ? spec.min_alpha() : 1.0 - one_minus_alpha;
  return TwoPointDist(spec, alpha, one_minus_alpha);
}

double ThreePointDist::mean() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i) s += points[i] * probs[i];
  return s;
}

double ThreePointDist::mad() const noexcept {
  const double m = mean();
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i) s += std::abs(points[i] - m) * probs[i];
  return s;
}

double ParetoDist::mean() const noexcept { return a * scale / (a - 1.0); }

double ParetoDist::mad() const noexcept {
  // 2 E[(X - m)^+] with E[(X - c)^+] = scale^a c^(1-a) / (a - 1) for c >= scale.
  const double m = mean();
  return 2.0 * std::pow(scale, a) * std::pow(m, 1.0 - a) / (a - 1.0);
}

double pareto_induced_mad(double mu, double a) {
  return 2.0 * mu * std::pow(a - 1.0, a - 1.0) / std::pow(a, a);
}

double MemberDist::mean() const {
  return std::visit([](const auto& law) { return law.mean(); }, law);
}

double MemberDist::mad() const {
  return std::visit([](const auto& law) { return law.mad(); }, law);
}

MemberDist make_member(const TwoPointDist& dist) { return MemberDist{dist.spec(), dist}; }

MemberDist make_pareto_member(const MeanMadSpec& spec, double a) {
  if (!(a > 1.0) || !(a <= 2.0)) {
    throw Error(ErrorKind::IndexOutOfRange, "tail index a=" + std::to_string(a) + " outside (1, 2]");
  }
  const double induced = pareto_induced_mad(spec.mu(), a);
  if (std::abs(spec.d() - induced) > 1e-9 * induced) {
    throw Error(ErrorKind::MadMismatch, "requested d=" + std::to_string(spec.d()) +
                                            " but Pareto(a=" + std::to_string(a) +
                                            ") induces d=" + std::to_string(induced));
  }
  return MemberDist{spec, ParetoDist{a, spec.mu() * (a - 1.0) / a}};
}

MemberDist make_three_point_member(const MeanMadSpec& spec, std::array<double, 3> points,
                                   std::array<double, 3> probs) {
  return MemberDist{spec, ThreePointDist{points, probs}};
}

MembershipReport verify_membership(const MemberDist& dist, const MeanMadSpec& spec, double tol) {
  const double mean_error = std::abs(dist.mean() - spec.mu());
  const double mad_error = std::abs(dist.mad() - spec.d());
  return {mean_error <= tol * spec.mu() && mad_error <= tol * spec.d(), mean_error, mad_error};
}

void to_json(nlohmann::json& j, const MemberDist& dist) {
  j = nlohmann::json{{"mu", dist.spec.mu()}, {"d", dist.spec.d()}};
  std::visit(
      [&j](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, TwoPointDist>) {
          j["kind"] = "two_point";
          j["alpha"] = law.alpha();
          j["one_minus_alpha"] = law.one_minus_alpha();
        } else if constexpr (std::is_same_v<T, ThreePointDist>) {
          j["kind"] = "three_point";
          j["points"] = law.points;
          j["probs"] = law.probs;
        } else {
          j["kind"] = "pareto";
          j["a"] = law.a;
          j["scale"] = law.scale;
        }
      },
      dist.law);
}

void from_json(const nlohmann::json& j, MemberDist& dist) { dist = member_from_json(j); }

MemberDist member_from_json(const nlohmann::json& j) {
  const MeanMadSpec spec(j.at("mu").get<double>(), j.at("d").get<double>());
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "two_point") {
    // Whichever constructor produced the pair reproduces it bit for bit.
    if (j.contains("one_minus_alpha")) {
      const double q = j.at("one_minus_alpha").get<double>();
      if (!j.contains("alpha") || 1.0 - j.at("alpha").get<double>() != q) {
        return make_member(make_two_point_complement(spec, q));
      }
    }
    return make_member(make_two_point(spec, j.at("alpha").get<double>()));
  }
  if (kind == "three_point") {
    return make_three_point_member(spec, j.at("points").get<std::array<double, 3>>(),
                                   j.at("probs").get<std::array<double, 3>>());
  }
  if (kind == "pareto") {
    const double a = j.at("a").get<double>();
    auto member = make_pareto_member(spec, a);
    if (j.contains("scale")) std::get<ParetoDist>(member.law).scale = j.at("scale").get<double>();
    return member;
  }
  throw Error(ErrorKind::ConfigError, "unknown distribution kind '" + kind + "'");
}

}  // namespace rbl
