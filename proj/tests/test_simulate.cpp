/*
 * (C) Copyright 2026 NIAD toolkit developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "core/io.hpp"
#include "core/simulate.hpp"

using namespace niad;

namespace {

std::uint32_t profile_code(const BinaryMatrix& profiles, int row) {
  std::uint32_t code = 0;
  for (int k = 0; k < profiles.cols; ++k) code = (code << 1) | profiles.at(row, k);
  return code;
}

}  // namespace

TEST_CASE("builtin scenario registry") {
  std::vector<std::string> names = builtin_scenario_names();
  CHECK(std::find(names.begin(), names.end(), "paper-sim") != names.end());
  CHECK(std::find(names.begin(), names.end(), "fraction-q") != names.end());
  CHECK_THROWS_AS(builtin_scenario("no-such-scenario"), std::invalid_argument);
}

TEST_CASE("paper-sim scenario carries the six-item design") {
  Scenario sc = builtin_scenario("paper-sim");
  REQUIRE(sc.q.items() == 6);
  REQUIRE(sc.q.attributes() == 3);
  const std::vector<std::string> rows = {"100", "110", "011", "100", "110", "011"};
  for (int j = 0; j < 6; ++j) {
    std::string row;
    for (int k = 0; k < 3; ++k) row += sc.q.entry(j, k) ? '1' : '0';
    CHECK(row == rows[static_cast<size_t>(j)]);
  }
  CHECK(sc.items.slip == std::vector<double>{0.14, 0.12, 0.18, 0.17, 0.08, 0.05});
  CHECK(sc.items.guess == std::vector<double>{0.10, 0.15, 0.18, 0.18, 0.06, 0.06});
  CHECK(sc.n == 5000);

  // the published raw probabilities sum to 0.99; the scenario renormalizes
  // and records the adjustment
  CHECK(std::accumulate(sc.profile_probs.begin(), sc.profile_probs.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sc.normalization_adjustment == doctest::Approx(-0.01));
  CHECK(sc.profile_probs[0] == doctest::Approx(0.27 / 0.99));
  CHECK(sc.profile_probs[7] == doctest::Approx(0.21 / 0.99));
}

TEST_CASE("fraction-q scenario matches the published design") {
  Scenario sc = builtin_scenario("fraction-q");
  REQUIRE(sc.q.items() == 20);
  REQUIRE(sc.q.attributes() == 8);
  const std::vector<std::string> rows = {
      "00010110", "00010010", "00010010", "01101010", "01010011",
      "00000010", "11000010", "00000010", "01000000", "01001011",
      "01001010", "00000011", "01011010", "01000010", "10000010",
      "01000010", "01001010", "01001110", "11101010", "01101010"};
  for (int j = 0; j < 20; ++j) {
    std::string row;
    for (int k = 0; k < 8; ++k) row += sc.q.entry(j, k) ? '1' : '0';
    CHECK(row == rows[static_cast<size_t>(j)]);
  }
  CHECK(sc.n == 2000);
  CHECK(std::accumulate(sc.profile_probs.begin(), sc.profile_probs.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("make_scenario renormalizes and validates") {
  QMatrix q(1, 1, {1});
  ItemParams items{{0.1}, {0.2}};
  Scenario sc = make_scenario("t", q, items, {0.3, 0.3}, 10, 1);
  CHECK(sc.profile_probs[0] == doctest::Approx(0.5));
  CHECK(sc.normalization_adjustment == doctest::Approx(-0.4));
  CHECK_THROWS_AS(make_scenario("t", q, items, {0.5, -0.5}, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_scenario("t", q, items, {0.5, 0.5, 0.0}, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_scenario("t", q, items, {0.5, 0.5}, 0, 1), std::invalid_argument);
}

TEST_CASE("simulation is deterministic in the seed") {
  Scenario a = builtin_scenario("paper-sim", 300, 17);
  Scenario b = builtin_scenario("paper-sim", 300, 17);
  BinaryMatrix pa = draw_population(a), pb = draw_population(b);
  CHECK(pa.v == pb.v);
  BinaryMatrix ra = generate_responses(pa, a.q, a.items, a.link, a.seed);
  BinaryMatrix rb = generate_responses(pb, b.q, b.items, b.link, b.seed);
  CHECK(ra.v == rb.v);

  Scenario c = builtin_scenario("paper-sim", 300, 18);
  CHECK(draw_population(c).v != pa.v);
}

TEST_CASE("population draws ignore the item design") {
  // the population stream is split from the response stream, so two
  // scenarios with the same K, n, seed draw identical profiles
  Scenario sim = builtin_scenario("paper-sim", 500, 4);
  QMatrix other(2, 3, {1, 1, 1, 1, 0, 1});
  Scenario alt = make_scenario("alt", other, {{0.1, 0.1}, {0.2, 0.2}}, sim.profile_probs,
                               500, 4);
  CHECK(draw_population(sim).v == draw_population(alt).v);
}

TEST_CASE("class frequencies stay near the generating distribution") {
  Scenario sc = builtin_scenario("paper-sim", 5000, 99);
  BinaryMatrix pop = draw_population(sc);
  Partition part = make_partition(sc.q);

  std::vector<double> freq(static_cast<size_t>(part.num_classes()), 0.0);
  for (int i = 0; i < pop.rows; ++i)
    freq[static_cast<size_t>(part.class_of({profile_code(pop, i), 3}))] += 1.0;
  for (double& f : freq) f /= pop.rows;

  for (int c = 0; c < part.num_classes(); ++c) {
    double nu = 0;
    for (Profile m : part.classes[static_cast<size_t>(c)].members)
      nu += sc.profile_probs[m.code];
    CHECK(std::abs(freq[static_cast<size_t>(c)] - nu) < 0.02);
  }
}

TEST_CASE("item response rates match the model within three standard errors") {
  Scenario sc = builtin_scenario("paper-sim", 20000, 7);
  BinaryMatrix pop = draw_population(sc);
  BinaryMatrix resp = generate_responses(pop, sc.q, sc.items, sc.link, sc.seed);

  for (int j = 0; j < sc.q.items(); ++j) {
    double expected = 0;
    for (std::uint32_t code = 0; code < 8; ++code) {
      BitVec xi = ideal_response(sc.q, {code, 3}, sc.link);
      double p1 = xi.bit(j) ? 1.0 - sc.items.slip[static_cast<size_t>(j)]
                            : sc.items.guess[static_cast<size_t>(j)];
      expected += sc.profile_probs[code] * p1;
    }
    double observed = 0;
    for (int i = 0; i < resp.rows; ++i) observed += resp.at(i, j);
    observed /= resp.rows;
    double se = std::sqrt(expected * (1 - expected) / resp.rows);
    CHECK(std::abs(observed - expected) < 3 * se);
  }
}

TEST_CASE("response pattern frequencies pass a chi-square check") {
  // one-attribute, two-item design: four patterns with closed-form masses
  QMatrix q(2, 1, {1, 1});
  ItemParams items{{0.15, 0.2}, {0.25, 0.1}};
  Scenario sc = make_scenario("gof", q, items, {0.4, 0.6}, 20000, 23);
  BinaryMatrix pop = draw_population(sc);
  BinaryMatrix resp = generate_responses(pop, q, items, sc.link, sc.seed);

  std::vector<double> expected(4, 0.0);
  for (std::uint32_t a = 0; a < 2; ++a) {
    BitVec xi = ideal_response(q, {a, 1}, sc.link);
    for (std::uint32_t x = 0; x < 4; ++x) {
      double p = sc.profile_probs[a];
      for (int j = 0; j < 2; ++j) {
        bool hit = (x >> (1 - j)) & 1u;
        double p1 = xi.bit(j) ? 1.0 - items.slip[static_cast<size_t>(j)]
                              : items.guess[static_cast<size_t>(j)];
        p *= hit ? p1 : 1.0 - p1;
      }
      expected[x] += p;
    }
  }
  std::vector<double> observed(4, 0.0);
  for (int i = 0; i < resp.rows; ++i)
    observed[static_cast<size_t>((resp.at(i, 0) << 1) | resp.at(i, 1))] += 1.0;

  double chi2 = 0;
  for (int x = 0; x < 4; ++x) {
    double e = expected[static_cast<size_t>(x)] * resp.rows;
    double d = observed[static_cast<size_t>(x)] - e;
    chi2 += d * d / e;
  }
  CHECK(chi2 < 16.27);  // chi-square(3), p = 0.001
}

TEST_CASE("scenario JSON round trip") {
  Scenario sc = builtin_scenario("paper-sim", 777, 5);
  std::string json = scenario_to_json(sc);
  Scenario back = scenario_from_json(json);
  CHECK(back.n == 777);
  CHECK(back.seed == 5);
  CHECK(back.q.items() == 6);
  CHECK(back.items.slip == sc.items.slip);
  for (size_t i = 0; i < sc.profile_probs.size(); ++i)
    CHECK(back.profile_probs[i] == doctest::Approx(sc.profile_probs[i]).epsilon(1e-12));
  BinaryMatrix p1 = draw_population(sc), p2 = draw_population(back);
  CHECK(p1.v == p2.v);
}
