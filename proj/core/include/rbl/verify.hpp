#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rbl {

struct AcceptanceOptions {
  unsigned threads = 0;
  std::uint64_t seed = 20240101;
  /// Monte Carlo draws per member for the concentration check.
  std::size_t mc_samples = 100000;
  /// Criteria to run (1-based); empty runs all.
  std::vector<int> only;
};

struct CriterionResult {
  int id;
  std::string title;
  bool pass;
  std::string detail;
  double seconds;
};

inline constexpr int kCriterionCount = 10;

/// Runs the acceptance checks in id order. Independent of `threads`.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// "PASS  3  minimax gap (d > mu): ..." style line.
std::string format_result(const CriterionResult& result);

}  // namespace rbl
