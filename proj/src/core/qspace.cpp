/*
 * (C) Copyright 2026 NIAD toolkit developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "qspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace niad {

QMatrix::QMatrix(int items, int attributes, const std::vector<int>& entries)
    : j_(items), k_(attributes) {
  if (j_ < 1 || k_ < 1) throw std::invalid_argument("Q-matrix needs J >= 1 and K >= 1");
  if (k_ > kMaxAttributes) throw std::invalid_argument("Q-matrix exceeds the K <= 24 cap");
  if (entries.size() != static_cast<size_t>(j_) * static_cast<size_t>(k_))
    throw std::invalid_argument("Q-matrix entry count does not match J*K");
  rows_.resize(static_cast<size_t>(j_), 0);
  for (int j = 0; j < j_; ++j) {
    std::uint32_t mask = 0;
    for (int k = 0; k < k_; ++k) {
      int v = entries[static_cast<size_t>(j) * k_ + k];
      if (v != 0 && v != 1) throw std::invalid_argument("Q-matrix entries must be 0 or 1");
      mask = (mask << 1) | static_cast<std::uint32_t>(v);
    }
    if (mask == 0) throw std::invalid_argument("Q-matrix row " + std::to_string(j + 1) +
                                               " requires no attribute");
    rows_[static_cast<size_t>(j)] = mask;
  }
}

BitVec ideal_response(const QMatrix& q, Profile a, Link link) {
  if (a.len != q.attributes()) throw std::invalid_argument("profile length != Q-matrix K");
  BitVec xi(q.items());
  for (int j = 0; j < q.items(); ++j) {
    std::uint32_t r = q.row_mask(j);
    bool on = link == Link::DINA ? (a.code & r) == r : (a.code & r) != 0;
    xi.set(j, on);
  }
  return xi;
}

bool is_complete(const QMatrix& q) {
  std::uint32_t found = 0;
  for (std::uint32_t r : q.row_masks())
    if ((r & (r - 1)) == 0) found |= r;  // single-attribute row
  return found == (1u << q.attributes()) - 1u;
}

Profile marginal_identifiability(const std::vector<Profile>& members, int attributes) {
  if (members.empty()) throw std::invalid_argument("empty equivalence class");
  std::uint32_t all_and = ~0u, all_or = 0;
  for (Profile m : members) {
    all_and &= m.code;
    all_or |= m.code;
  }
  std::uint32_t mask = (1u << attributes) - 1u;
  // agree on bit k iff the AND and OR coincide there
  return Profile{(~(all_and ^ all_or)) & mask, attributes};
}

Partition make_partition(const QMatrix& q, Link link) {
  const int k = q.attributes();
  const std::uint32_t n = 1u << k;

  // Duplicate rows produce identical ideal-response columns; dropping them
  // for grouping leaves the induced relation unchanged (the full J-bit ideal
  // is still reported per class).
  std::vector<std::uint32_t> rows = q.row_masks();
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  const int d = static_cast<int>(rows.size());
  const int words = (d + 63) / 64;

  std::vector<std::uint64_t> keys(static_cast<size_t>(n) * words, 0);
  for (std::uint32_t a = 0; a < n; ++a) {
    for (int j = 0; j < d; ++j) {
      std::uint32_t r = rows[static_cast<size_t>(j)];
      bool on = link == Link::DINA ? (a & r) == r : (a & r) != 0;
      if (on) keys[static_cast<size_t>(a) * words + j / 64] |= std::uint64_t{1} << (j % 64);
    }
  }

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    for (int w = 0; w < words; ++w) {
      std::uint64_t ka = keys[static_cast<size_t>(a) * words + w];
      std::uint64_t kb = keys[static_cast<size_t>(b) * words + w];
      if (ka != kb) return ka < kb;
    }
    return a < b;  // lexicographic profile order within a class
  });

  auto same_key = [&](std::uint32_t a, std::uint32_t b) {
    for (int w = 0; w < words; ++w)
      if (keys[static_cast<size_t>(a) * words + w] != keys[static_cast<size_t>(b) * words + w])
        return false;
    return true;
  };

  Partition part;
  for (std::uint32_t i = 0; i < n;) {
    std::uint32_t start = i;
    EquivalenceClass c;
    while (i < n && same_key(order[start], order[i]))
      c.members.push_back(Profile{order[i++], k});
    c.minimal_representative = c.members.front();
    c.ideal = ideal_response(q, c.minimal_representative, link);
    c.delta = marginal_identifiability(c.members, k);
    part.classes.push_back(std::move(c));
  }
  std::sort(part.classes.begin(), part.classes.end(),
            [](const EquivalenceClass& a, const EquivalenceClass& b) {
              return a.minimal_representative < b.minimal_representative;
            });
  part.profile_index.assign(n, -1);
  for (int c = 0; c < part.num_classes(); ++c)
    for (Profile m : part.classes[static_cast<size_t>(c)].members)
      part.profile_index[m.code] = c;
  return part;
}

bool separable(const QMatrix& q, Profile a1, Profile a2, const std::vector<double>& slip,
               const std::vector<double>& guess, Link link) {
  if (slip.size() != static_cast<size_t>(q.items()) ||
      guess.size() != static_cast<size_t>(q.items()))
    throw std::invalid_argument("slip/guess length != Q-matrix J");
  BitVec x1 = ideal_response(q, a1, link);
  BitVec x2 = ideal_response(q, a2, link);
  for (int j = 0; j < q.items(); ++j)
    if (x1.bit(j) != x2.bit(j) &&
        1.0 - slip[static_cast<size_t>(j)] != guess[static_cast<size_t>(j)])
      return true;
  return false;
}

}  // namespace niad
