#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rbl {

/// Cascade summation; error grows as O(log n) ulps instead of O(n).
double pairwise_sum(std::span<const double> values);

/// n points from lo to hi inclusive, evenly spaced in log(value). lo, hi > 0.
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

/// n points from lo to hi inclusive, evenly spaced.
std::vector<double> lin_spaced(double lo, double hi, std::size_t n);

struct ScalarMin {
  double argmin;
  double value;
};

/// Golden-section search for a minimum of f on [lo, hi], stopping when the
/// bracket is narrower than `width`. Assumes f is unimodal on the bracket;
/// when it is not, the result is a local minimum, never worse than the best
/// point the search evaluated.
ScalarMin golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                  double width, int max_iter = 200);

/// "%.17g"
std::string format_double(double v);

}  // namespace rbl
