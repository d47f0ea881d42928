/*
 * (C) Copyright 2026 NIAD toolkit developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <optional>
#include <vector>

#include "model.hpp"

namespace niad {

struct MasteryBounds {
  std::vector<double> p_min;
  std::vector<double> p_max;
};

enum class Mastery : std::uint8_t { NotMastered = 0, Mastered = 1, Unclassified = 2 };

struct Decision {
  std::vector<Mastery> attr;

  // "0", "1" or "*" per attribute
  std::string to_string() const;
};

struct ZetaReport {
  std::vector<double> zeta;
};

// Posterior over equivalence classes for one response vector; sums to 1.
// Throws std::runtime_error when every class likelihood underflows.
std::vector<double> class_posterior(const BitVec& x, const ModelSpec& spec);

MasteryBounds mastery_bounds(const BitVec& x, const ModelSpec& spec);
MasteryBounds mastery_bounds(const std::vector<double>& posterior, const Partition& partition);

// Mastered if p_min > cutoff, NotMastered if p_max < cutoff, else
// Unclassified; ties on either side are left unclassified.
Decision niad_classify(const BitVec& x, const ModelSpec& spec, double cutoff = 0.5);
Decision decide(const MasteryBounds& bounds, double cutoff);

ZetaReport zeta_rates(const Partition& partition, const std::vector<double>& nu_class);

// P(alpha_k = 1 | x) per attribute. For a Saturated prior an explicit
// within-class allocation over all 2^K profiles must be supplied; without it
// the value is an artifact of the prior and the call is rejected.
std::vector<double> marginal_posterior(const BitVec& x, const ModelSpec& spec,
                                       const std::vector<double>* allocation = nullptr);

struct AttributeRates {
  std::vector<double> misclassification;  // errors over all N; unclassified never count
  std::vector<double> unclassified;
};

AttributeRates misclassification_report(const BinaryMatrix& truth,
                                        const std::vector<Decision>& decisions);

}  // namespace niad
