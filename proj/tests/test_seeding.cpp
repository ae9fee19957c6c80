#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "pdsim/seeding.hpp"

using namespace pdsim;

namespace {

constexpr Strategy C = Strategy::Cooperate, D = Strategy::Defect, A = Strategy::Abstain;

SeedSpec lattice_spec(std::variant<UniformRandom, ExactCounts, NestedRings> v, std::size_t w, std::size_t h) {
  return SeedSpec{std::move(v), LatticeTarget{w, h}};
}

SeedSpec wellmixed_spec(std::variant<UniformRandom, ExactCounts, NestedRings> v, std::size_t n) {
  return SeedSpec{std::move(v), WellMixedTarget{n}};
}

TEST(UniformSeed, ThirdsAreBinomial) {
  Rng rng(2024);
  const Grid g = std::get<Grid>(seed(lattice_spec(UniformRandom{}, 100, 100), rng));
  const double mean = 10000.0 / 3, sigma = std::sqrt(10000.0 * (1.0 / 3) * (2.0 / 3));  // ~47.1
  for (Strategy s : kAllStrategies) EXPECT_NEAR(static_cast<double>(g.census().count(s)), mean, 4 * sigma);
}

TEST(UniformSeed, SingletonSet) {
  Rng rng(1);
  const auto pop = std::get<Population>(seed(wellmixed_spec(UniformRandom{{A}}, 100), rng));
  EXPECT_EQ(pop, Population(100, A));
}

TEST(UniformSeed, ReproducibleUnderFixedSeed) {
  Rng a(77), b(77), c(78);
  const auto spec = wellmixed_spec(UniformRandom{{D, A}}, 100);
  const auto pa = std::get<Population>(seed(spec, a));
  EXPECT_EQ(pa, std::get<Population>(seed(spec, b)));
  EXPECT_NE(pa, std::get<Population>(seed(spec, c)));
  EXPECT_EQ(census_of(pa).n_C, 0u);
}

TEST(UniformSeed, EmptySetRejected) {
  Rng rng(0);
  EXPECT_THROW(seed(wellmixed_spec(UniformRandom{{}}, 10), rng), Error);
}

TEST(ExactCountsSeed, RealizesRequestedCensus) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(s);
    const auto pop = std::get<Population>(seed(wellmixed_spec(ExactCounts{{1, 0, 99}}, 100), rng));
    EXPECT_EQ(census_of(pop), (StrategyCensus{1, 0, 99}));
    const auto pair = std::get<Population>(seed(wellmixed_spec(ExactCounts{{0, 50, 50}}, 100), rng));
    EXPECT_EQ(census_of(pair), (StrategyCensus{0, 50, 50}));
  }
}

TEST(ExactCountsSeed, LatticeTarget) {
  Rng rng(3);
  const Grid g = std::get<Grid>(seed(lattice_spec(ExactCounts{{34, 33, 33}}, 10, 10), rng));
  EXPECT_EQ(g.size(), 100u);
  EXPECT_EQ(g.census(), (StrategyCensus{34, 33, 33}));
}

TEST(ExactCountsSeed, PlacementIsShuffled) {
  std::set<std::size_t> positions;
  for (std::uint64_t s = 0; s < 40; ++s) {
    Rng rng(s);
    const auto pop = std::get<Population>(seed(wellmixed_spec(ExactCounts{{1, 0, 99}}, 100), rng));
    positions.insert(static_cast<std::size_t>(std::find(pop.begin(), pop.end(), C) - pop.begin()));
  }
  EXPECT_GT(positions.size(), 20u);
}

TEST(ExactCountsSeed, MismatchRejected) {
  Rng rng(0);
  EXPECT_THROW(seed(wellmixed_spec(ExactCounts{{1, 1, 1}}, 100), rng), CountMismatch);
}

TEST(NestedRingsSeed, CadGeometry) {
  const Grid g = seed_nested_rings(NestedRings::from_label("CAD"), 100, 100);
  EXPECT_EQ(g.census(), (StrategyCensus{9, 9919, 72}));
  // Inner block centered on (50, 50), rings out to Chebyshev distance 4.
  for (std::size_t y = 49; y <= 51; ++y)
    for (std::size_t x = 49; x <= 51; ++x) EXPECT_EQ(g.at(x, y), C);
  EXPECT_EQ(g.at(46, 46), A);
  EXPECT_EQ(g.at(54, 54), A);
  EXPECT_EQ(g.at(45, 50), D);
  EXPECT_EQ(g.at(55, 50), D);
}

TEST(NestedRingsSeed, DegenerateRing) {
  NestedRings r = NestedRings::from_label("CAD");
  r.middle_layers = 0;
  const Grid g = seed_nested_rings(r, 10, 10);
  EXPECT_EQ(g.census(), (StrategyCensus{9, 91, 0}));
}

TEST(NestedRingsSeed, SixDistinctPermutations) {
  const auto perms = all_ring_permutations();
  ASSERT_EQ(perms.size(), 6u);
  std::set<std::string> labels;
  std::set<std::uint64_t> hashes;
  for (const auto& r : perms) {
    labels.insert(r.label());
    hashes.insert(seed_nested_rings(r, 30, 30).hash());
  }
  EXPECT_EQ(labels, (std::set<std::string>{"DCA", "DAC", "CDA", "CAD", "ACD", "ADC"}));
  EXPECT_EQ(hashes.size(), 6u);
}

TEST(NestedRingsSeed, FourFoldRotationSymmetric) {
  // Odd-sized grid so the block center is also the grid center.
  const Grid g = seed_nested_rings(NestedRings::from_label("ACD"), 21, 21);
  for (std::size_t y = 0; y < 21; ++y)
    for (std::size_t x = 0; x < 21; ++x) EXPECT_EQ(g.at(x, y), g.at(20 - y, x));
}

TEST(NestedRingsSeed, TooSmallGridRejected) {
  EXPECT_THROW(seed_nested_rings(NestedRings::from_label("CAD"), 9, 100), GridTooSmallForRings);
  EXPECT_NO_THROW(seed_nested_rings(NestedRings::from_label("CAD"), 10, 10));
  Rng rng(0);
  EXPECT_THROW(seed(wellmixed_spec(NestedRings{}, 100), rng), Error);
}

TEST(SeedLabel, Names) {
  EXPECT_EQ(seed_label(lattice_spec(NestedRings::from_label("ADC"), 50, 50)), "ADC");
  EXPECT_EQ(seed_label(wellmixed_spec(ExactCounts{{1, 1, 98}}, 100)), "1C1D98A");
  EXPECT_EQ(seed_label(lattice_spec(UniformRandom{}, 50, 50)), "uniform-CDA");
}

}  // namespace
