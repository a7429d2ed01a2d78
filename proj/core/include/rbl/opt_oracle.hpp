#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rbl/ambiguity.hpp"

namespace rbl {

/// Goods are indexed 0..m-1; a bundle is a bitmask over goods.
using Bundle = std::uint32_t;

/// All valuation vectors in {x_i, y_i}^m with their product-law probabilities.
/// Type t has good i at its high value y_i iff bit i of t is set.
class BidLattice {
 public:
  /// `dists` has length 1 (i.i.d.) or m.
  BidLattice(std::span<const TwoPointDist> dists, int m);

  [[nodiscard]] int goods() const noexcept { return m_; }
  [[nodiscard]] std::size_t types() const noexcept { return prob_.size(); }
  [[nodiscard]] double prob(std::size_t t) const { return prob_[t]; }
  [[nodiscard]] double value(std::size_t t, int good) const;
  /// Sum of the type's values over the goods in `bundle`.
  [[nodiscard]] double bundle_value(std::size_t t, Bundle bundle) const;
  [[nodiscard]] bool iid() const noexcept { return iid_; }
  [[nodiscard]] double mean_value() const;

 private:
  int m_;
  bool iid_;
  std::vector<double> low_;
  std::vector<double> high_;
  std::vector<double> prob_;
};

/// Explicit allocation and payment tables indexed by lattice type.
struct MechanismTables {
  std::vector<Bundle> alloc;
  std::vector<double> pay;
};

struct TruthfulnessReport {
  bool ok = true;
  /// First violated pair: truthful type v prefers reporting w. For an
  /// individual-rationality failure w == v.
  std::size_t v = 0;
  std::size_t w = 0;
  bool ir_violation = false;
  double shortfall = 0.0;
};

inline constexpr double kUtilityTolerance = 1e-9;

TruthfulnessReport verify_truthful(const MechanismTables& tables, const BidLattice& lattice,
                                   double tol = kUtilityTolerance);

struct MenuEntry {
  Bundle bundle;
  double price;
};

/// Priced bundles offered to the buyer; always contains (empty, 0).
class MenuMechanism {
 public:
  MenuMechanism();
  explicit MenuMechanism(std::vector<MenuEntry> entries);

  [[nodiscard]] const std::vector<MenuEntry>& entries() const noexcept { return entries_; }

 private:
  std::vector<MenuEntry> entries_;
};

/// Each type picks a utility-maximizing entry; near-ties (1e-9) go to the
/// highest price, then the larger bundle, then the lexicographically smaller
/// sorted index list.
MechanismTables menu_to_tables(const MenuMechanism& menu, const BidLattice& lattice);

double expected_revenue(const MechanismTables& tables, const BidLattice& lattice);

enum class OptMode {
  /// Every deterministic truthful mechanism on the lattice; m <= 3.
  Full,
  /// Menus whose price depends only on bundle size; i.i.d. inputs, m <= 4.
  Symmetric,
};

struct OptResult {
  double revenue;
  MenuMechanism witness;
  MechanismTables tables;
};

inline constexpr int kFullCap = 3;
inline constexpr int kSymmetricCap = 4;

/// Optimal expected revenue over deterministic truthful mechanisms for a
/// single additive buyer with two-point values. Throws CapExceeded beyond the
/// mode's cap.
OptResult opt_deterministic(std::span<const TwoPointDist> dists, int m, OptMode mode = OptMode::Full);

void to_json(nlohmann::json& j, const MenuMechanism& menu);
MenuMechanism menu_from_json(const nlohmann::json& j);

}  // namespace rbl
