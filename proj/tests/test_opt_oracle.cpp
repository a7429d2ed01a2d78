#include <algorithm>
#include <random>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "rbl/bundling.hpp"
#include "rbl/error.hpp"
#include "rbl/opt_oracle.hpp"
#include "rbl/sum_law.hpp"

namespace {

using rbl::BidLattice;
using rbl::MeanMadSpec;
using rbl::MenuEntry;
using rbl::MenuMechanism;

const MeanMadSpec kSpec(1.0, 0.5);

rbl::MechanismTables bundling_tables(const BidLattice& lattice, double p) {
  rbl::MechanismTables tables;
  const rbl::Bundle all = (1U << lattice.goods()) - 1U;
  for (std::size_t t = 0; t < lattice.types(); ++t) {
    const bool sell = lattice.bundle_value(t, all) >= p;
    tables.alloc.push_back(sell ? all : 0U);
    tables.pay.push_back(sell ? p : 0.0);
  }
  return tables;
}

TEST(Truthful, BundlingIsTruthful) {
  const std::vector<rbl::TwoPointDist> dists = {rbl::make_two_point(kSpec, 0.5)};
  const BidLattice lattice(dists, 3);
  for (double p : {0.0, 1.0, 2.5, 3.5, 4.5, 10.0}) EXPECT_TRUE(rbl::verify_truthful(bundling_tables(lattice, p), lattice).ok);
}

TEST(Truthful, OverchargingBreaksIr) {
  const std::vector<rbl::TwoPointDist> dists = {rbl::make_two_point(kSpec, 0.5)};
  const BidLattice lattice(dists, 2);
  rbl::MechanismTables tables;
  tables.alloc.assign(lattice.types(), 3U);
  tables.pay.assign(lattice.types(), 3.0);
  const auto report = rbl::verify_truthful(tables, lattice);
  EXPECT_FALSE(report.ok);
  EXPECT_TRUE(report.ir_violation);
  EXPECT_EQ(report.v, 0U);
}

TEST(Truthful, RandomMenusAreTruthful) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> price(0.0, 4.0);
  std::uniform_real_distribution<double> alpha(0.25, 0.95);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + trial % 3;
    std::vector<rbl::TwoPointDist> dists;
    for (int i = 0; i < m; ++i) dists.push_back(rbl::make_two_point(kSpec, alpha(rng)));
    const BidLattice lattice(dists, m);
    std::vector<MenuEntry> entries;
    for (rbl::Bundle b = 1; b < (1U << m); ++b) {
      if (rng() % 3 != 0) entries.push_back({b, price(rng)});
    }
    EXPECT_TRUE(rbl::verify_truthful(rbl::menu_to_tables(MenuMechanism(entries), lattice), lattice).ok);
  }
}

TEST(Menu, TwoEntryMenuIsBundling) {
  const std::vector<rbl::TwoPointDist> dists = {rbl::make_two_point(kSpec, 0.5)};
  const BidLattice lattice(dists, 2);
  const auto tables = rbl::menu_to_tables(MenuMechanism({{3U, 2.0}}), lattice);
  const auto expected = bundling_tables(lattice, 2.0);
  EXPECT_EQ(tables.alloc, expected.alloc);
  EXPECT_EQ(tables.pay, expected.pay);
}

TEST(Menu, EmptyMenuSellsNothing) {
  const std::vector<rbl::TwoPointDist> dists = {rbl::make_two_point(kSpec, 0.5)};
  const BidLattice lattice(dists, 2);
  const auto tables = rbl::menu_to_tables(MenuMechanism(), lattice);
  for (std::size_t t = 0; t < lattice.types(); ++t) {
    EXPECT_EQ(tables.alloc[t], 0U);
    EXPECT_EQ(tables.pay[t], 0.0);
  }
}

TEST(Menu, BuyerPicksUtilityMaximizingEntry) {
  const std::vector<rbl::TwoPointDist> dists = {rbl::make_two_point(kSpec, 0.5)};
  const BidLattice lattice(dists, 2);
  const auto tables = rbl::menu_to_tables(MenuMechanism({{1U, 0.75}, {2U, 0.75}, {3U, 1.5}}), lattice);
  // Type 1: good 0 high (1.5), good 1 low (0.5).
  EXPECT_EQ(tables.alloc[1], 1U);
  EXPECT_DOUBLE_EQ(tables.pay[1], 0.75);
  // Type 3 is indifferent between {0}, {1} and the grand bundle; highest price wins.
  EXPECT_EQ(tables.alloc[3], 3U);
}

TEST(Menu, RejectsNegativePrice) {
  try {
    MenuMechanism({{1U, -0.5}});
    FAIL();
  } catch (const rbl::Error& e) {
    EXPECT_EQ(e.kind(), rbl::ErrorKind::NegativePrice);
  }
}

TEST(Opt, SingleGoodClosedForm) {
  for (int i = 0; i < 50; ++i) {
    const double alpha = 0.25 + 0.74 * i / 49.0;
    const std::vector<rbl::TwoPointDist> dists = {rbl::make_two_point(kSpec, alpha)};
    const auto r = rbl::opt_deterministic(dists, 1);
    const double expected = std::max(dists[0].x(), dists[0].one_minus_alpha() * dists[0].y());
    EXPECT_NEAR(r.revenue, expected, 1e-12 * expected) << alpha;
  }
  const std::vector<rbl::TwoPointDist> edge = {rbl::make_two_point(kSpec, 0.25)};
  EXPECT_NEAR(rbl::opt_deterministic(edge, 1).revenue, 1.0, 1e-12);
}

TEST(Opt, TwoGoodsBeatsBaselines) {
  const std::vector<rbl::TwoPointDist> dists = {rbl::make_two_point(kSpec, 0.5)};
  const auto r = rbl::opt_deterministic(dists, 2);
  EXPECT_GE(r.revenue, 1.5 - 1e-12);
  EXPECT_LE(r.revenue, 2.0);
  const BidLattice lattice(dists, 2);
  EXPECT_TRUE(rbl::verify_truthful(r.tables, lattice).ok);
  EXPECT_NEAR(rbl::expected_revenue(rbl::menu_to_tables(r.witness, lattice), lattice), r.revenue, 1e-12);
}

TEST(Opt, PropertiesOnRandomInstances) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> alpha(0.2, 0.98);
  std::uniform_real_distribution<double> dd(0.1, 1.9);
  for (int trial = 0; trial < 12; ++trial) {
    const MeanMadSpec spec(1.0, dd(rng));
    const int m = 1 + trial % 3;
    const auto lo = spec.min_alpha();
    const auto draw = [&] { return lo + (1.0 - lo) * (alpha(rng) - 0.2) / 0.8; };
    const std::vector<rbl::TwoPointDist> iid = {rbl::make_two_point(spec, draw())};
    const auto full = rbl::opt_deterministic(iid, m, rbl::OptMode::Full);
    const auto sym = rbl::opt_deterministic(iid, m, rbl::OptMode::Symmetric);
    EXPECT_NEAR(full.revenue, sym.revenue, 1e-9) << trial;
    const auto law = rbl::iid_two_point_sum(iid[0], m);
    EXPECT_GE(full.revenue + 1e-12, rbl::best_bundle_price(law).revenue);
    EXPECT_GE(full.revenue + 1e-12, rbl::separate_sale_revenue(iid[0], m));
    EXPECT_LE(full.revenue, m * spec.mu() * (1 + 1e-12));
    const BidLattice lattice(iid, m);
    EXPECT_TRUE(rbl::verify_truthful(full.tables, lattice).ok);

    std::vector<rbl::TwoPointDist> mixed;
    for (int i = 0; i < m; ++i) mixed.push_back(rbl::make_two_point(spec, draw()));
    const auto het = rbl::opt_deterministic(mixed, m);
    EXPECT_TRUE(rbl::verify_truthful(het.tables, BidLattice(mixed, m)).ok);
    EXPECT_GE(het.revenue + 1e-12, rbl::best_bundle_price(rbl::product_sum(mixed)).revenue);
  }
}

TEST(Opt, CapsAndModes) {
  const std::vector<rbl::TwoPointDist> dists = {rbl::make_two_point(kSpec, 0.5)};
  const auto expect_kind = [&](rbl::ErrorKind kind, auto&& f) {
    try {
      f();
      ADD_FAILURE();
    } catch (const rbl::Error& e) {
      EXPECT_EQ(e.kind(), kind);
    }
  };
  expect_kind(rbl::ErrorKind::CapExceeded, [&] { rbl::opt_deterministic(dists, 4, rbl::OptMode::Full); });
  expect_kind(rbl::ErrorKind::CapExceeded, [&] { rbl::opt_deterministic(dists, 5, rbl::OptMode::Symmetric); });
  const std::vector<rbl::TwoPointDist> two = {rbl::make_two_point(kSpec, 0.5), rbl::make_two_point(kSpec, 0.6)};
  expect_kind(rbl::ErrorKind::ParamOutOfRange, [&] { rbl::opt_deterministic(two, 2, rbl::OptMode::Symmetric); });
  expect_kind(rbl::ErrorKind::LengthMismatch, [&] { BidLattice(two, 3); });
  EXPECT_GT(rbl::opt_deterministic(dists, 4, rbl::OptMode::Symmetric).revenue, 0.0);
}

TEST(Opt, WitnessJsonRoundTrip) {
  const std::vector<rbl::TwoPointDist> dists = {rbl::make_two_point(kSpec, 0.4)};
  const auto r = rbl::opt_deterministic(dists, 3);
  const nlohmann::json j = r.witness;
  const auto back = rbl::menu_from_json(nlohmann::json::parse(j.dump()));
  ASSERT_EQ(back.entries().size(), r.witness.entries().size());
  for (std::size_t i = 0; i < back.entries().size(); ++i) {
    EXPECT_EQ(back.entries()[i].bundle, r.witness.entries()[i].bundle);
    EXPECT_EQ(back.entries()[i].price, r.witness.entries()[i].price);
  }
}

}  // namespace
