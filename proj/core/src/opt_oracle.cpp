#include "rbl/opt_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "rbl/error.hpp"

namespace rbl {

BidLattice::BidLattice(std::span<const TwoPointDist> dists, int m) : m_(m) {
  if (m < 1 || m > 16) throw Error(ErrorKind::ParamOutOfRange, "lattice needs 1 <= m <= 16");
  if (dists.size() != 1 && dists.size() != static_cast<std::size_t>(m)) {
    throw Error(ErrorKind::LengthMismatch, "expected 1 or " + std::to_string(m) + " marginals, got " +
                                               std::to_string(dists.size()));
  }
  std::vector<double> p_high(m);
  for (int i = 0; i < m; ++i) {
    const auto& dist = dists.size() == 1 ? dists[0] : dists[i];
    low_.push_back(dist.x());
    high_.push_back(dist.y());
    p_high[i] = dist.one_minus_alpha();
  }
  iid_ = std::all_of(dists.begin(), dists.end(), [&](const TwoPointDist& d) {
    return d.x() == dists[0].x() && d.y() == dists[0].y() &&
           d.one_minus_alpha() == dists[0].one_minus_alpha();
  });
  const std::size_t n = std::size_t{1} << m;
  prob_.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    double p = 1.0;
    for (int i = 0; i < m; ++i) p *= (t >> i) & 1U ? p_high[i] : 1.0 - p_high[i];
    prob_[t] = p;
  }
}

double BidLattice::value(std::size_t t, int good) const {
  return (t >> good) & 1U ? high_[good] : low_[good];
}

double BidLattice::bundle_value(std::size_t t, Bundle bundle) const {
  double s = 0.0;
  for (int i = 0; i < m_; ++i) {
    if ((bundle >> i) & 1U) s += value(t, i);
  }
  return s;
}

double BidLattice::mean_value() const {
  double s = 0.0;
  for (std::size_t t = 0; t < types(); ++t) s += prob_[t] * bundle_value(t, (Bundle{1} << m_) - 1);
  return s;
}

TruthfulnessReport verify_truthful(const MechanismTables& tables, const BidLattice& lattice,
                                   double tol) {
  const std::size_t n = lattice.types();
  if (tables.alloc.size() != n || tables.pay.size() != n) {
    throw Error(ErrorKind::LengthMismatch, "tables must cover every lattice type");
  }
  for (std::size_t v = 0; v < n; ++v) {
    const double truthful = lattice.bundle_value(v, tables.alloc[v]) - tables.pay[v];
    if (truthful < -tol) return {false, v, v, true, -truthful};
    for (std::size_t w = 0; w < n; ++w) {
      const double misreport = lattice.bundle_value(v, tables.alloc[w]) - tables.pay[w];
      if (misreport > truthful + tol) return {false, v, w, false, misreport - truthful};
    }
  }
  return {};
}

MenuMechanism::MenuMechanism() : entries_{{0, 0.0}} {}

MenuMechanism::MenuMechanism(std::vector<MenuEntry> entries) : entries_(std::move(entries)) {
  const bool has_empty = std::any_of(entries_.begin(), entries_.end(),
                                     [](const MenuEntry& e) { return e.bundle == 0 && e.price == 0.0; });
  if (!has_empty) entries_.insert(entries_.begin(), MenuEntry{0, 0.0});
  for (const auto& e : entries_) {
    if (e.price < 0.0) throw Error(ErrorKind::NegativePrice, "menu prices must be >= 0");
  }
}

namespace {

/// Sorted index list of `a` lexicographically before that of `b`.
bool lex_less(Bundle a, Bundle b) {
  while (a != 0 && b != 0) {
    const int ia = std::countr_zero(a);
    const int ib = std::countr_zero(b);
    if (ia != ib) return ia < ib;
    a &= a - 1;
    b &= b - 1;
  }
  return a == 0 && b != 0;
}

/// Seller-favorable tie order between two equally attractive entries.
bool preferred_on_tie(const MenuEntry& cand, const MenuEntry& best) {
  if (cand.price != best.price) return cand.price > best.price;
  const int cs = std::popcount(cand.bundle);
  const int bs = std::popcount(best.bundle);
  if (cs != bs) return cs > bs;
  return lex_less(cand.bundle, best.bundle);
}

}  // namespace

MechanismTables menu_to_tables(const MenuMechanism& menu, const BidLattice& lattice) {
  const std::size_t n = lattice.types();
  MechanismTables tables{std::vector<Bundle>(n), std::vector<double>(n)};
  for (std::size_t t = 0; t < n; ++t) {
    const MenuEntry* best = nullptr;
    double best_utility = 0.0;
    for (const auto& entry : menu.entries()) {
      const double utility = lattice.bundle_value(t, entry.bundle) - entry.price;
      if (best == nullptr || utility > best_utility + kUtilityTolerance) {
        best = &entry;
        best_utility = utility;
      } else if (utility >= best_utility - kUtilityTolerance && preferred_on_tie(entry, *best)) {
        best = &entry;
        best_utility = std::max(best_utility, utility);
      }
    }
    tables.alloc[t] = best->bundle;
    tables.pay[t] = best->price;
  }
  return tables;
}

double expected_revenue(const MechanismTables& tables, const BidLattice& lattice) {
  double s = 0.0;
  for (std::size_t t = 0; t < lattice.types(); ++t) s += lattice.prob(t) * tables.pay[t];
  return s;
}

namespace {

/// Exhaustive search over allocation rules. For a fixed rule the revenue-
/// maximal payments leave each type its least utility consistent with
/// incentive compatibility and participation, which is a longest-path problem
/// on the type graph; rules with a positive cycle are not implementable.
class AllocationSearch {
 public:
  explicit AllocationSearch(const BidLattice& lattice)
      : lattice_(lattice),
        types_(lattice.types()),
        bundles_(std::size_t{1} << lattice.goods()),
        value_(types_ * bundles_),
        order_(types_),
        alloc_(types_, 0),
        best_alloc_(types_, 0),
        suffix_bound_(types_ + 1, 0.0) {
    const Bundle all = static_cast<Bundle>(bundles_ - 1);
    for (std::size_t t = 0; t < types_; ++t) {
      for (std::size_t b = 0; b < bundles_; ++b) {
        value_[t * bundles_ + b] = lattice.bundle_value(t, static_cast<Bundle>(b));
      }
      auto& ord = order_[t];
      ord.resize(bundles_);
      std::iota(ord.begin(), ord.end(), Bundle{0});
      std::stable_sort(ord.begin(), ord.end(),
                       [&](Bundle a, Bundle b) { return val(t, a) > val(t, b); });
    }
    for (std::size_t t = types_; t-- > 0;) {
      suffix_bound_[t] = suffix_bound_[t + 1] + lattice.prob(t) * val(t, all);
    }
  }

  void run() { descend(0, 0.0); }

  [[nodiscard]] double best_revenue() const { return best_revenue_; }
  [[nodiscard]] const std::vector<Bundle>& best_alloc() const { return best_alloc_; }

  /// Payments leaving each type its least admissible utility; empty when the
  /// rule is not implementable with non-negative payments.
  [[nodiscard]] std::vector<double> payments(const std::vector<Bundle>& alloc) const {
    std::vector<double> u(types_, 0.0);
    bool changed = true;
    std::size_t rounds = 0;
    while (changed) {
      if (rounds++ > types_) return {};
      changed = false;
      for (std::size_t t = 0; t < types_; ++t) {
        for (std::size_t s = 0; s < types_; ++s) {
          const double cand = u[s] + val(t, alloc[s]) - val(s, alloc[s]);
          if (cand > u[t] + kUtilityTolerance) {
            u[t] = cand;
            changed = true;
          }
        }
      }
    }
    std::vector<double> pay(types_);
    for (std::size_t t = 0; t < types_; ++t) {
      pay[t] = val(t, alloc[t]) - u[t];
      if (pay[t] < -kUtilityTolerance) return {};
      pay[t] = std::max(pay[t], 0.0);
    }
    return pay;
  }

 private:
  [[nodiscard]] double val(std::size_t t, Bundle b) const { return value_[t * bundles_ + b]; }

  void descend(std::size_t t, double welfare) {
    if (welfare + suffix_bound_[t] <= best_revenue_ + 1e-12) return;
    if (t == types_) {
      evaluate_leaf();
      return;
    }
    for (Bundle b : order_[t]) {
      // Two-cycle monotonicity against every assigned type.
      bool admissible = true;
      for (std::size_t s = 0; s < t && admissible; ++s) {
        const Bundle bs = alloc_[s];
        admissible = val(t, b) - val(t, bs) + val(s, bs) - val(s, b) >= -kUtilityTolerance;
      }
      if (!admissible) continue;
      alloc_[t] = b;
      descend(t + 1, welfare + lattice_.prob(t) * val(t, b));
    }
  }

  void evaluate_leaf() {
    const auto pay = payments(alloc_);
    if (pay.empty()) return;
    double revenue = 0.0;
    for (std::size_t t = 0; t < types_; ++t) revenue += lattice_.prob(t) * pay[t];
    if (revenue > best_revenue_ + 1e-12) {
      best_revenue_ = revenue;
      best_alloc_ = alloc_;
    }
  }

  const BidLattice& lattice_;
  std::size_t types_;
  std::size_t bundles_;
  std::vector<double> value_;
  std::vector<std::vector<Bundle>> order_;
  std::vector<Bundle> alloc_;
  std::vector<Bundle> best_alloc_;
  std::vector<double> suffix_bound_;
  double best_revenue_ = -1.0;
};

OptResult finish(const MenuMechanism& offered, const BidLattice& lattice) {
  // Entries no type selects are dropped; removing them leaves every choice intact.
  std::vector<MenuEntry> used;
  const auto first = menu_to_tables(offered, lattice);
  for (const auto& entry : offered.entries()) {
    const bool chosen = std::any_of(first.alloc.begin(), first.alloc.end(), [&](Bundle b) {
      return b == entry.bundle;
    });
    if (chosen && entry.bundle != 0) used.push_back(entry);
  }
  const MenuMechanism menu(std::move(used));
  auto tables = menu_to_tables(menu, lattice);
  const double revenue = expected_revenue(tables, lattice);
  const double cap = lattice.mean_value();
  if (revenue > cap * (1.0 + 1e-12) + 1e-12) {
    throw Error(ErrorKind::NumericalInstability,
                "optimal revenue " + std::to_string(revenue) + " exceeds m*mu=" + std::to_string(cap));
  }
  return {revenue, menu, std::move(tables)};
}

OptResult full_search(const BidLattice& lattice) {
  AllocationSearch search(lattice);
  search.run();
  const auto& alloc = search.best_alloc();
  const auto pay = search.payments(alloc);
  std::vector<MenuEntry> entries;
  for (std::size_t t = 0; t < lattice.types(); ++t) {
    if (alloc[t] == 0) continue;
    const bool seen = std::any_of(entries.begin(), entries.end(),
                                  [&](const MenuEntry& e) { return e.bundle == alloc[t]; });
    if (!seen) entries.push_back({alloc[t], pay[t]});
  }
  std::sort(entries.begin(), entries.end(), [](const MenuEntry& a, const MenuEntry& b) {
    return std::popcount(a.bundle) != std::popcount(b.bundle)
               ? std::popcount(a.bundle) < std::popcount(b.bundle)
               : lex_less(a.bundle, b.bundle);
  });
  return finish(MenuMechanism(std::move(entries)), lattice);
}

OptResult symmetric_search(const BidLattice& lattice) {
  const int m = lattice.goods();
  const double x = lattice.value(0, 0);
  const double y = lattice.value(1, 0);
  // Achievable bundle values k x + j y; 0 stays available as a price.
  std::vector<double> grid{0.0};
  for (int k = 0; k <= m; ++k) {
    for (int j = 0; k + j <= m; ++j) {
      if (k + j >= 1) grid.push_back(k * x + j * y);
    }
  }
  std::sort(grid.begin(), grid.end());
  std::vector<double> prices;
  for (double g : grid) {
    if (prices.empty() || g - prices.back() > 1e-12) prices.push_back(g);
  }
  // Buyers are summarized by their number of high goods.
  std::vector<double> class_prob(m + 1, 0.0);
  for (std::size_t t = 0; t < lattice.types(); ++t) class_prob[std::popcount(t)] += lattice.prob(t);
  const auto class_value = [&](int highs, int size) {
    const int h = std::min(highs, size);
    return h * y + (size - h) * x;
  };

  const int options = static_cast<int>(prices.size()) + 1;  // last option: not offered
  std::vector<int> choice(m, 0);
  std::vector<int> best_choice(m, options - 1);
  double best_revenue = -1.0;
  while (true) {
    double revenue = 0.0;
    for (int j = 0; j <= m; ++j) {
      int pick_size = 0;
      double pick_price = 0.0;
      double pick_utility = 0.0;
      for (int s = 1; s <= m; ++s) {
        if (choice[s - 1] == options - 1) continue;
        const double price = prices[choice[s - 1]];
        const double utility = class_value(j, s) - price;
        const bool better = utility > pick_utility + kUtilityTolerance;
        const bool tie = !better && utility >= pick_utility - kUtilityTolerance &&
                         (price > pick_price || (price == pick_price && s > pick_size));
        if (better || tie) {
          pick_size = s;
          pick_price = price;
          pick_utility = std::max(utility, pick_utility);
        }
      }
      revenue += class_prob[j] * pick_price;
    }
    if (revenue > best_revenue + 1e-12) {
      best_revenue = revenue;
      best_choice = choice;
    }
    int pos = 0;
    while (pos < m && ++choice[pos] == options) choice[pos++] = 0;
    if (pos == m) break;
  }

  std::vector<MenuEntry> entries;
  const Bundle all = (Bundle{1} << m) - 1;
  for (int s = 1; s <= m; ++s) {
    if (best_choice[s - 1] == options - 1) continue;
    for (Bundle b = 1; b <= all; ++b) {
      if (std::popcount(b) == s) entries.push_back({b, prices[best_choice[s - 1]]});
    }
  }
  return finish(MenuMechanism(std::move(entries)), lattice);
}

}  // namespace

OptResult opt_deterministic(std::span<const TwoPointDist> dists, int m, OptMode mode) {
  const int cap = mode == OptMode::Full ? kFullCap : kSymmetricCap;
  if (m < 1 || m > cap) {
    throw Error(ErrorKind::CapExceeded,
                "m=" + std::to_string(m) + " outside [1, " + std::to_string(cap) + "] for this mode");
  }
  const BidLattice lattice(dists, m);
  if (mode == OptMode::Symmetric) {
    if (!lattice.iid()) {
      throw Error(ErrorKind::ParamOutOfRange, "symmetric enumeration needs identical marginals");
    }
    return symmetric_search(lattice);
  }
  return full_search(lattice);
}

void to_json(nlohmann::json& j, const MenuMechanism& menu) {
  j = nlohmann::json::array();
  for (const auto& entry : menu.entries()) {
    std::vector<int> goods;
    for (Bundle b = entry.bundle; b != 0; b &= b - 1) goods.push_back(std::countr_zero(b));
    j.push_back({{"bundle", goods}, {"price", entry.price}});
  }
}

MenuMechanism menu_from_json(const nlohmann::json& j) {
  std::vector<MenuEntry> entries;
  for (const auto& item : j) {
    Bundle b = 0;
    for (int good : item.at("bundle").get<std::vector<int>>()) b |= Bundle{1} << good;
    entries.push_back({b, item.at("price").get<double>()});
  }
  return MenuMechanism(std::move(entries));
}

}  // namespace rbl
