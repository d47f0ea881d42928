/*
 * (C) Copyright 2026 NIAD toolkit developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <string>
#include <vector>

#include "model.hpp"

namespace niad {

struct Scenario {
  std::string name;
  QMatrix q;
  ItemParams items;
  std::vector<double> profile_probs;  // length 2^K, normalized
  int n = 0;
  std::uint64_t seed = 0;
  Link link = Link::DINA;
  // Nonzero when the raw probabilities did not sum to 1 and were rescaled.
  double normalization_adjustment = 0.0;

  void validate() const;
};

// Builds a scenario, normalizing profile_probs proportionally when their raw
// sum deviates from 1 (recorded in normalization_adjustment).
Scenario make_scenario(std::string name, QMatrix q, ItemParams items,
                       std::vector<double> profile_probs, int n, std::uint64_t seed,
                       Link link = Link::DINA);

// i.i.d. profile draws from profile_probs; deterministic given the seed.
// The population and response streams are split so changing J never perturbs
// the drawn profiles.
BinaryMatrix draw_population(const Scenario& sc);

BinaryMatrix generate_responses(const BinaryMatrix& profiles, const QMatrix& q,
                                const ItemParams& items, Link link, std::uint64_t seed);

// The six-item simulation design and the 20x8 fraction-subtraction design.
std::vector<std::string> builtin_scenario_names();
Scenario builtin_scenario(const std::string& name, int n = 0, std::uint64_t seed = 0);

}  // namespace niad
