/*
 * (C) Copyright 2026 NIAD toolkit developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <optional>
#include <vector>

#include "qspace.hpp"

namespace niad {

// Slip/guess probabilities are clamped to [kProbFloor, 1 - kProbFloor] so the
// log-likelihood stays finite.
inline constexpr double kProbFloor = 1e-6;

struct ItemParams {
  std::vector<double> slip;
  std::vector<double> guess;

  int items() const { return static_cast<int>(slip.size()); }
  void validate() const;
  // Items with |1 - s_j - g_j| < 1e-3 carry no discriminating power.
  std::vector<int> degenerate_items(double tol = 1e-3) const;
};

enum class PriorVariant { Saturated, Independent, HigherOrder, RestrictedHigherOrder };

const char* prior_variant_name(PriorVariant v);

struct PriorSpec {
  PriorVariant variant = PriorVariant::Saturated;
  std::vector<double> nu;  // Saturated: length L over equivalence classes
  std::vector<double> b;   // difficulties, length K (all other variants)
  std::vector<double> a;   // discriminations: length K (HO) or 1 (RHO)

  static PriorSpec saturated(std::vector<double> nu);
  static PriorSpec independent(std::vector<double> b);
  static PriorSpec higher_order(std::vector<double> a, std::vector<double> b);
  static PriorSpec restricted_higher_order(double a, std::vector<double> b);
};

struct ModelSpec {
  QMatrix q;
  Partition partition;
  ItemParams items;
  PriorSpec prior;
  Link link = Link::DINA;

  void validate() const;
};

struct BinaryMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> v;  // row-major

  std::uint8_t at(int i, int j) const { return v[static_cast<size_t>(i) * cols + j]; }
  void set(int i, int j, std::uint8_t x) { v[static_cast<size_t>(i) * cols + j] = x; }
  static BinaryMatrix zeros(int r, int c) { return BinaryMatrix{r, c, std::vector<std::uint8_t>(static_cast<size_t>(r) * c, 0)}; }
};

// Gauss-Hermite rule for integrals against the standard normal density:
// integral f(t) phi(t) dt ~= sum w_i f(x_i), weights summing to 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_hermite_normal(int n);

inline constexpr int kQuadratureNodes = 31;

double log_response_prob(const BitVec& x, const BitVec& xi, const ItemParams& items);
double response_prob(const BitVec& x, const BitVec& xi, const ItemParams& items);

double class_conditional_prob(const BitVec& x, const EquivalenceClass& c, const ModelSpec& spec);

// Prior mass per profile code (lexicographic order). Not defined for the
// Saturated variant, which resolves only to classes.
std::vector<double> prior_profile_probs(const PriorSpec& prior, int attributes);

// Aggregated prior mass per equivalence class; sums to 1. If underflow is
// non-null it is set when any class mass computes below 1e-300.
std::vector<double> prior_class_probs(const PriorSpec& prior, const Partition& partition,
                                      bool* underflow = nullptr);

// Response patterns pooled by multiplicity; row_pattern maps each original
// data row to its pattern ordinal.
struct PooledData {
  std::vector<BitVec> patterns;
  std::vector<double> counts;
  std::vector<int> row_pattern;
  int n = 0;
  int items = 0;
};
PooledData pool_rows(const BinaryMatrix& data);

// log P(X_j = 1 | class) per class x item; the building block for pattern
// likelihoods and the T-matrix.
std::vector<std::vector<double>> class_item_success(const Partition& partition,
                                                    const ItemParams& items);

// log p(x | class c) for one pooled pattern.
double log_pattern_prob(const BitVec& x, const EquivalenceClass& c, const ItemParams& items);

double log_likelihood(const BinaryMatrix& data, const ModelSpec& spec);
double log_likelihood_pooled(const PooledData& pooled, const ModelSpec& spec);

double logsumexp(const std::vector<double>& v);

}  // namespace niad
