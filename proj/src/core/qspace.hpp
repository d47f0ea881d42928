/*
 * (C) Copyright 2026 NIAD toolkit developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "bits.hpp"

namespace niad {

enum class Link { DINA, DINO };

// J x K binary loading matrix. Rows are stored as attribute masks with
// attribute 1 in the most significant of the low K bits, mirroring Profile.
class QMatrix {
 public:
  // entries is row-major J*K, every value 0 or 1. Throws std::invalid_argument
  // on an all-zero row, an out-of-range entry, or K > kMaxAttributes.
  QMatrix(int items, int attributes, const std::vector<int>& entries);

  static constexpr int kMaxAttributes = 24;

  int items() const { return j_; }
  int attributes() const { return k_; }
  bool entry(int j, int k) const { return (rows_[static_cast<size_t>(j)] >> (k_ - 1 - k)) & 1u; }
  std::uint32_t row_mask(int j) const { return rows_[static_cast<size_t>(j)]; }
  const std::vector<std::uint32_t>& row_masks() const { return rows_; }

 private:
  int j_ = 0;
  int k_ = 0;
  std::vector<std::uint32_t> rows_;
};

struct EquivalenceClass {
  Profile minimal_representative;
  std::vector<Profile> members;  // sorted lexicographically
  BitVec ideal;                  // shared J-bit ideal response
  Profile delta;                 // marginal identifiability indicators, K bits
};

struct Partition {
  std::vector<EquivalenceClass> classes;  // ordered by minimal representative
  int num_classes() const { return static_cast<int>(classes.size()); }
  // class ordinal for each profile code, length 2^K
  std::vector<int> profile_index;

  int class_of(Profile p) const { return profile_index[p.code]; }
};

BitVec ideal_response(const QMatrix& q, Profile a, Link link = Link::DINA);

// True iff every unit row e_k appears in q (Q-matrix completeness).
bool is_complete(const QMatrix& q);

// Partition of the 2^K profile space by equal ideal response.
Partition make_partition(const QMatrix& q, Link link = Link::DINA);

// delta_k = 1 iff all members agree on attribute k.
Profile marginal_identifiability(const std::vector<Profile>& members, int attributes);

// Whether two profiles lead to different response distributions given s, g.
bool separable(const QMatrix& q, Profile a1, Profile a2, const std::vector<double>& slip,
               const std::vector<double>& guess, Link link = Link::DINA);

}  // namespace niad
