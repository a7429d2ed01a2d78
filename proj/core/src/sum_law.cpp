#include "rbl/sum_law.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>

#include "rbl/binomial.hpp"
#include "rbl/error.hpp"
#include "rbl/numeric.hpp"
#include "rbl/parallel.hpp"

namespace rbl {

double SumLaw::mean() const {
  std::vector<double> terms(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) terms[i] = support[i] * probs[i];
  return pairwise_sum(terms);
}

SumLaw iid_two_point_sum(const TwoPointDist& dist, int m) {
  if (m < 1) throw Error(ErrorKind::ParamOutOfRange, "m must be >= 1, got " + std::to_string(m));
  SumLaw law;
  law.m = m;
  const auto n = static_cast<std::size_t>(m) + 1;
  law.support.resize(n);
  law.probs.resize(n);
  law.log_probs.resize(n);
  const double x = dist.x();
  const double y = dist.y();
  const double p_high = dist.one_minus_alpha();
  const double p_low = dist.alpha();
  for (std::size_t k = 0; k < n; ++k) {
    const double kd = static_cast<double>(k);
    law.support[k] = (m - kd) * x + kd * y;
    law.log_probs[k] = log_binomial_pmf(m, static_cast<std::int64_t>(k), p_high, p_low);
    law.probs[k] = std::exp(law.log_probs[k]);
  }
  const double total = pairwise_sum(law.probs);
  if (std::abs(total - 1.0) > 1e-10) {
    throw Error(ErrorKind::NumericalInstability,
                "binomial weights sum to " + std::to_string(total) + " for m=" + std::to_string(m));
  }
  return law;
}

SumLaw product_sum(std::span<const TwoPointDist> dists, std::size_t cap) {
  if (dists.empty()) throw Error(ErrorKind::LengthMismatch, "product_sum needs at least one factor");
  if (dists.size() > cap) {
    throw Error(ErrorKind::TooManyFactors,
                std::to_string(dists.size()) + " factors exceed cap " + std::to_string(cap));
  }
  for (const auto& dist : dists) {
    if (!(dist.spec() == dists.front().spec())) {
      throw Error(ErrorKind::LengthMismatch, "product_sum factors must share one spec");
    }
  }
  constexpr double merge_tol = 1e-12;
  std::vector<std::pair<double, double>> atoms{{0.0, 1.0}};
  for (const auto& dist : dists) {
    std::vector<std::pair<double, double>> next;
    next.reserve(atoms.size() * 2);
    for (const auto& [s, p] : atoms) {
      next.emplace_back(s + dist.x(), p * dist.alpha());
      next.emplace_back(s + dist.y(), p * dist.one_minus_alpha());
    }
    std::sort(next.begin(), next.end());
    atoms.clear();
    for (const auto& atom : next) {
      if (!atoms.empty() && atom.first - atoms.back().first <= merge_tol) {
        atoms.back().second += atom.second;
      } else {
        atoms.push_back(atom);
      }
    }
  }
  SumLaw law;
  law.m = static_cast<int>(dists.size());
  for (const auto& [s, p] : atoms) {
    law.support.push_back(s);
    law.probs.push_back(p);
  }
  return law;
}

double tail_prob(const SumLaw& law, double p) {
  const auto first = std::lower_bound(law.support.begin(), law.support.end(), p);
  const auto offset = static_cast<std::size_t>(first - law.support.begin());
  // Accumulate from the far tail inward so tiny masses are not absorbed.
  double total = 0.0;
  for (std::size_t i = law.probs.size(); i > offset; --i) total += law.probs[i - 1];
  return std::min(total, 1.0);
}

std::int64_t iid_threshold_index(const TwoPointDist& dist, int m, double p) {
  const double x = dist.x();
  const double y = dist.y();
  const auto point = [&](std::int64_t k) {
    const double kd = static_cast<double>(k);
    return (m - kd) * x + kd * y;
  };
  const double guess = std::ceil((p - m * x) / (y - x));
  std::int64_t k = static_cast<std::int64_t>(std::clamp(guess, 0.0, static_cast<double>(m) + 1.0));
  while (k > 0 && point(k - 1) >= p) --k;
  while (k <= m && point(k) < p) ++k;
  return k;
}

double iid_tail_prob(const TwoPointDist& dist, int m, double p) {
  const std::int64_t k = iid_threshold_index(dist, m, p);
  return binomial_upper_tail(m, k, dist.one_minus_alpha());
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::mt19937_64 sample_engine(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ index));
}

double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

namespace {

double draw(const TwoPointDist& law, double u) { return u < law.one_minus_alpha() ? law.y() : law.x(); }

double draw(const ThreePointDist& law, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    acc += law.probs[i];
    if (u < acc) return law.points[i];
  }
  return law.points[2];
}

double draw(const ParetoDist& law, double u) {
  // Inverse survival function; a = 2 is common enough to skip pow.
  if (law.a == 2.0) return law.scale / std::sqrt(1.0 - u);
  return law.scale * std::pow(1.0 - u, -1.0 / law.a);
}

}  // namespace

double sample_member(const MemberDist& member, std::mt19937_64& engine) {
  const double u = uniform01(engine);
  return std::visit([u](const auto& law) { return draw(law, u); }, member.law);
}

std::vector<double> sample_sum(std::span<const MemberDist> members, int m, std::uint64_t seed,
                               std::size_t n, unsigned threads) {
  if (n < 1) throw Error(ErrorKind::ParamOutOfRange, "sample count must be >= 1");
  if (m < 1) throw Error(ErrorKind::ParamOutOfRange, "m must be >= 1");
  if (members.size() != 1 && members.size() != static_cast<std::size_t>(m)) {
    throw Error(ErrorKind::LengthMismatch, "expected 1 or " + std::to_string(m) + " members, got " +
                                               std::to_string(members.size()));
  }
  std::vector<double> out(n);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      auto engine = sample_engine(seed, j);
      double total = 0.0;
      if (members.size() == 1) {
        std::visit(
            [&](const auto& law) {
              for (int i = 0; i < m; ++i) total += draw(law, uniform01(engine));
            },
            members[0].law);
      } else {
        for (const auto& member : members) total += sample_member(member, engine);
      }
      out[j] = total;
    }
  });
  return out;
}

void write_csv(std::ostream& out, const SumLaw& law) {
  out << "support,prob\n";
  char buf[64];
  for (std::size_t i = 0; i < law.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", law.support[i], law.probs[i]);
    out << buf;
  }
}

}  // namespace rbl
