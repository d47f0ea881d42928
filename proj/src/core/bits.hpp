/*
 * (C) Copyright 2026 NIAD toolkit developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace niad {

// Attribute profiles are packed into a 32-bit code with attribute 1 as the
// most significant bit, so that ascending codes enumerate profiles in the
// lexicographic order of their bit strings.
struct Profile {
  std::uint32_t code = 0;
  int len = 0;

  bool bit(int k) const { return (code >> (len - 1 - k)) & 1u; }
  auto operator<=>(const Profile&) const = default;
};

inline std::string profile_to_string(Profile p) {
  std::string s(static_cast<size_t>(p.len), '0');
  for (int k = 0; k < p.len; ++k)
    if (p.bit(k)) s[static_cast<size_t>(k)] = '1';
  return s;
}

inline Profile profile_from_string(const std::string& s) {
  Profile p;
  p.len = static_cast<int>(s.size());
  if (p.len == 0 || p.len > 24) throw std::invalid_argument("profile length out of range");
  for (char c : s) {
    p.code <<= 1;
    if (c == '1')
      p.code |= 1u;
    else if (c != '0')
      throw std::invalid_argument("profile string must contain only 0/1");
  }
  return p;
}

inline Profile complement_profile(Profile p) {
  return Profile{~p.code & ((1u << p.len) - 1u), p.len};
}

// A length-J binary vector packed into 64-bit words; item 1 is bit 0 of
// word 0 so comparisons are not positional, only equality and per-bit access.
struct BitVec {
  std::vector<std::uint64_t> words;
  int len = 0;

  explicit BitVec(int n = 0) : words((n + 63) / 64, 0), len(n) {}

  bool bit(int j) const { return (words[static_cast<size_t>(j) / 64] >> (j % 64)) & 1u; }
  void set(int j, bool v) {
    std::uint64_t m = std::uint64_t{1} << (j % 64);
    if (v)
      words[static_cast<size_t>(j) / 64] |= m;
    else
      words[static_cast<size_t>(j) / 64] &= ~m;
  }
  bool operator==(const BitVec&) const = default;
};

inline std::string bitvec_to_string(const BitVec& b) {
  std::string s(static_cast<size_t>(b.len), '0');
  for (int j = 0; j < b.len; ++j)
    if (b.bit(j)) s[static_cast<size_t>(j)] = '1';
  return s;
}

inline BitVec bitvec_from_string(const std::string& s) {
  BitVec b(static_cast<int>(s.size()));
  for (int j = 0; j < b.len; ++j) {
    char c = s[static_cast<size_t>(j)];
    if (c == '1')
      b.set(j, true);
    else if (c != '0')
      throw std::invalid_argument("bit string must contain only 0/1");
  }
  return b;
}

}  // namespace niad
