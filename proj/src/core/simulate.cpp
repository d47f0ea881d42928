/*
 * (C) Copyright 2026 NIAD toolkit developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "rng.hpp"

namespace niad {

namespace {
constexpr std::uint64_t kPopulationStream = 0x706f70756c617465ULL;
constexpr std::uint64_t kResponseStream = 0x726573706f6e7365ULL;
}  // namespace

void Scenario::validate() const {
  items.validate();
  if (items.items() != q.items()) throw std::invalid_argument("item parameter length != J");
  if (profile_probs.size() != (size_t{1} << q.attributes()))
    throw std::invalid_argument("profile_probs length != 2^K");
  double total = 0;
  for (double p : profile_probs) {
    if (p < 0) throw std::invalid_argument("profile probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw std::invalid_argument("profile_probs must be normalized");
  if (n < 1) throw std::invalid_argument("respondent count must be >= 1");
}

Scenario make_scenario(std::string name, QMatrix q, ItemParams items,
                       std::vector<double> profile_probs, int n, std::uint64_t seed, Link link) {
  double total = 0;
  for (double p : profile_probs) total += p;
  if (!(total > 0)) throw std::invalid_argument("profile probabilities sum to zero");
  Scenario sc{std::move(name), std::move(q), std::move(items), std::move(profile_probs),
              n,               seed,         link};
  if (std::abs(total - 1.0) > 1e-10) {
    for (double& p : sc.profile_probs) p /= total;
    sc.normalization_adjustment = total - 1.0;
  }
  sc.validate();
  return sc;
}

BinaryMatrix draw_population(const Scenario& sc) {
  sc.validate();
  const int k = sc.q.attributes();
  Rng rng(sc.seed, kPopulationStream);
  BinaryMatrix out = BinaryMatrix::zeros(sc.n, k);
  for (int i = 0; i < sc.n; ++i) {
    double u = rng.next_double();
    double acc = 0;
    std::uint32_t code = static_cast<std::uint32_t>(sc.profile_probs.size()) - 1;
    for (std::uint32_t a = 0; a < sc.profile_probs.size(); ++a) {
      acc += sc.profile_probs[a];
      if (u < acc) {
        code = a;
        break;
      }
    }
    Profile p{code, k};
    for (int kk = 0; kk < k; ++kk) out.set(i, kk, p.bit(kk) ? 1 : 0);
  }
  return out;
}

BinaryMatrix generate_responses(const BinaryMatrix& profiles, const QMatrix& q,
                                const ItemParams& items, Link link, std::uint64_t seed) {
  items.validate();
  if (profiles.cols != q.attributes())
    throw std::invalid_argument("profile columns != Q-matrix K");
  if (items.items() != q.items()) throw std::invalid_argument("item parameter length != J");
  Rng rng(seed, kResponseStream);
  BinaryMatrix out = BinaryMatrix::zeros(profiles.rows, q.items());
  for (int i = 0; i < profiles.rows; ++i) {
    Profile a{0, profiles.cols};
    for (int k = 0; k < profiles.cols; ++k)
      a.code = (a.code << 1) | (profiles.at(i, k) ? 1u : 0u);
    BitVec xi = ideal_response(q, a, link);
    for (int j = 0; j < q.items(); ++j) {
      double p1 = xi.bit(j) ? 1.0 - items.slip[static_cast<size_t>(j)]
                            : items.guess[static_cast<size_t>(j)];
      out.set(i, j, rng.bernoulli(p1) ? 1 : 0);
    }
  }
  return out;
}

std::vector<std::string> builtin_scenario_names() { return {"paper-sim", "fraction-q"}; }

Scenario builtin_scenario(const std::string& name, int n, std::uint64_t seed) {
  if (name == "paper-sim") {
    QMatrix q(6, 3,
              {1, 0, 0,   //
               1, 1, 0,   //
               0, 1, 1,   //
               1, 0, 0,   //
               1, 1, 0,   //
               0, 1, 1});
    ItemParams items{{0.14, 0.12, 0.18, 0.17, 0.08, 0.05}, {0.10, 0.15, 0.18, 0.18, 0.06, 0.06}};
    // as printed the probabilities sum to 0.99; make_scenario renormalizes
    std::vector<double> probs = {0.27, 0.00, 0.01, 0.04, 0.10, 0.16, 0.20, 0.21};
    return make_scenario("paper-sim", std::move(q), std::move(items), std::move(probs),
                         n > 0 ? n : 5000, seed);
  }
  if (name == "fraction-q") {
    const char* rows[20] = {"00010110", "00010010", "00010010", "01101010", "01010011",
                            "00000010", "11000010", "00000010", "01000000", "01001011",
                            "01001010", "00000011", "01011010", "01000010", "10000010",
                            "01000010", "01001010", "01001110", "11101010", "01101010"};
    std::vector<int> entries;
    entries.reserve(20 * 8);
    for (const char* r : rows)
      for (int k = 0; k < 8; ++k) entries.push_back(r[k] - '0');
    QMatrix q(20, 8, entries);
    // the source assessment's real responses and parameters are not
    // available; defaults give a moderately noisy synthetic population
    ItemParams items{std::vector<double>(20, 0.2), std::vector<double>(20, 0.2)};
    PriorSpec prior = PriorSpec::independent(std::vector<double>(8, 0.0));
    std::vector<double> probs = prior_profile_probs(prior, 8);
    return make_scenario("fraction-q", std::move(q), std::move(items), std::move(probs),
                         n > 0 ? n : 2000, seed);
  }
  throw std::invalid_argument("unknown builtin scenario: " + name);
}

}  // namespace niad
