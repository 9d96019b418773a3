#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "dryfric/error.hpp"
#include "dryfric/extrapolate.hpp"

using namespace dryfric;
using namespace dryfric::extrapolate;

namespace {

// A typical computed region, cut short by memory: {1..9}x{1..4} u {1..6}x{5} u {1..4}x{6}.
template <class F>
StatGrid computed_region(F&& field) {
  StatGrid S;
  for (int l = 1; l <= 6; ++l) {
    const int kmax = l <= 4 ? 9 : (l == 5 ? 6 : 4);
    for (int k = 1; k <= kmax; ++k) S.set_computed(k, l, field(k, l));
  }
  return S;
}

const std::vector<StatGrid::Key> kMissing = {{7, 5}, {8, 5}, {9, 5}, {5, 6}, {6, 6},
                                              {7, 6}, {8, 6}, {9, 6}};

double geometric(int k, int l) { return 0.13 - 0.4 * std::ldexp(1.0, -k) - 0.9 * std::ldexp(1.0, -l); }

}  // namespace

TEST_SUITE("extrapolate") {

TEST_CASE("constant field") {
  const StatGrid S = computed_region([](int, int) { return 0.25; });
  CHECK(extrapolate_cell(S, 7, 5) == 0.25);
  const StatGrid filled = propagate(S, kMissing);
  for (const auto& [k, l] : kMissing) CHECK(filled.value(k, l) == 0.25);
}

TEST_CASE("separable geometric field is reproduced exactly") {
  const StatGrid filled = propagate(computed_region(geometric), kMissing);
  for (const auto& [k, l] : kMissing) {
    CHECK(std::abs(filled.value(k, l) - geometric(k, l)) < 1e-12);
    CHECK(filled.provenance(k, l) == Provenance::extrapolated);
  }
  CHECK(filled.provenance(3, 3) == Provenance::computed);
}

TEST_CASE("both fill orders agree") {
  auto field = [](int k, int l) { return 0.7 + 0.3 / (k + 1.0) - 0.2 / (l * l + 1.0) + 0.01 * std::sin(k * l); };
  const StatGrid S = computed_region(field);
  const StatGrid a = propagate(S, kMissing, FillOrder::dependency);
  const StatGrid b = propagate(S, kMissing, FillOrder::row_major);
  for (const auto& [k, l] : kMissing) CHECK(a.value(k, l) == b.value(k, l));
}

TEST_CASE("computed cells are never overwritten") {
  StatGrid S = computed_region(geometric);
  S.set_computed(7, 5, 42.0);
  const StatGrid filled = propagate(S, kMissing);
  CHECK(filled.value(7, 5) == 42.0);
  CHECK(filled.provenance(7, 5) == Provenance::computed);
  CHECK_THROWS_AS(S.set_extrapolated(1, 1, 0.0), InvalidArgument);
}

TEST_CASE("missing predecessors are reported") {
  StatGrid S;
  S.set_computed(1, 1, 1.0);
  CHECK_FALSE(can_extrapolate(S, 4, 4));
  CHECK_THROWS_AS(extrapolate_cell(S, 4, 4), InvalidArgument);
  CHECK_THROWS_AS(propagate(S, {{4, 4}}), InvalidArgument);
  CHECK_THROWS_AS(propagate(S, {{4, 4}}, FillOrder::row_major), InvalidArgument);
  CHECK_THROWS_AS(S.value(2, 2), InvalidArgument);
}

TEST_CASE("CSV round trip keeps computed cells only") {
  const StatGrid filled = propagate(computed_region(geometric), kMissing);
  std::map<std::string, StatGrid> grids{{"S1", filled}};
  std::stringstream io;
  write_grids_csv(io, grids);
  const std::string text = io.str();
  CHECK(text.rfind("statistic,k,l,value,provenance\n", 0) == 0);
  CHECK(text.find("S1,9,6,") != std::string::npos);
  CHECK(text.find("extrapolated") != std::string::npos);

  const auto back = read_grids_csv(io);
  REQUIRE(back.count("S1") == 1);
  const StatGrid& S = back.at("S1");
  CHECK_FALSE(S.has(9, 6));
  CHECK(S.value(4, 4) == doctest::Approx(geometric(4, 4)).epsilon(1e-11));
  const StatGrid again = propagate(S, kMissing);
  CHECK(again.value(9, 6) == doctest::Approx(filled.value(9, 6)).epsilon(1e-10));

  std::istringstream bad("a,b\n1,2\n");
  CHECK_THROWS_AS(read_grids_csv(bad), ConfigError);
  std::istringstream garbage("statistic,k,l,value\nS1,x,1,0.5\n");
  CHECK_THROWS_AS(read_grids_csv(garbage), ConfigError);
}

TEST_CASE("small input perturbations stay small on a first-order field") {
  auto field = [](int k, int l) {
    return 0.13 - 0.4 * std::ldexp(1.0, -k) - 0.9 * std::ldexp(1.0, -l) + 0.05 * std::ldexp(1.0, -k - l);
  };
  const StatGrid S = computed_region(field);
  const StatGrid base = propagate(S, kMissing);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double eps = 1e-9;
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    StatGrid P;
    for (const auto& [key, cell] : S.cells()) P.set_computed(key.first, key.second, cell.value + eps * u(rng));
    const StatGrid out = propagate(P, kMissing);
    for (const auto& [k, l] : kMissing) worst = std::max(worst, std::abs(out.value(k, l) - base.value(k, l)) / eps);
  }
  MESSAGE("largest amplification " << worst);
  CHECK(worst < 4.0);
}

}  // TEST_SUITE
