/*
 * (C) Copyright 2026 NIAD toolkit developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "model.hpp"

namespace niad {

// Explicit starting point for one EM run; used to seed a fit from a known
// solution (for example the dual model's fixed point).
struct EmInit {
  std::vector<double> nu;  // Saturated: length L
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> slip;
  std::vector<double> guess;
};

struct EmOptions {
  int max_iterations = 2000;
  double tolerance = 1e-8;  // relative log-likelihood change
  int restarts = 10;
  std::uint64_t seed = 0;
  bool estimate_items = true;
  std::optional<EmInit> init;  // replaces the first random start when set

  void validate() const;
};

struct FitResult {
  ModelSpec spec;
  double loglik = 0;
  int n_params = 0;
  int n_params_unreduced = 0;
  double aic = 0;
  double bic = 0;
  std::vector<std::vector<double>> posteriors;  // N x L, p([alpha] | x^i)
  bool converged = false;
  bool degenerate = false;  // all responsibility collapsed onto one class
  int n_iterations = 0;
  std::vector<double> restart_logliks;
  std::vector<double> iteration_logliks;  // trace of the winning start
};

// Reduced count: 2J + L (Saturated over classes), 2J + K (Independent),
// 2J + K + 1 (RHO), 2J + 2K (HO).
int parameter_count(PriorVariant variant, const QMatrix& q, const Partition& partition);
// Saturated over raw profiles, 2J + 2^K; reporting only.
int parameter_count_unreduced(const QMatrix& q);

FitResult em_fit(const BinaryMatrix& data, const QMatrix& q, PriorVariant variant,
                 const EmOptions& opts, Link link = Link::DINA);

// 2^J x L matrix of tail probabilities P(X >= x | class), rows in
// lexicographic order of x (item 1 the most significant bit).
struct TMatrix {
  int items = 0;
  int num_classes = 0;
  std::vector<double> entries;  // row-major, 2^J rows

  double at(std::uint32_t x, int c) const {
    return entries[static_cast<size_t>(x) * num_classes + c];
  }
};

inline constexpr int kTMatrixMaxItems = 20;

TMatrix t_matrix(const QMatrix& q, const ItemParams& items, Link link = Link::DINA);

struct RankCheck {
  bool identifiable = false;
  int rank = 0;
  int num_classes = 0;
  double sigma_max = 0;
  double threshold = 0;
};

// Numeric rank of the T-matrix against rank L; singular values below
// sigma_max * 2^J * 64 * machine epsilon are treated as zero.
RankCheck identifiability_rank_check(const QMatrix& q, const ItemParams& items,
                                     Link link = Link::DINA);

}  // namespace niad
