/*
 * (C) Copyright 2026 NIAD toolkit developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "classify.hpp"

#include <cmath>
#include <stdexcept>

namespace niad {

std::string Decision::to_string() const {
  std::string s;
  for (Mastery m : attr)
    s += m == Mastery::Mastered ? '1' : m == Mastery::NotMastered ? '0' : '*';
  return s;
}

std::vector<double> class_posterior(const BitVec& x, const ModelSpec& spec) {
  spec.validate();
  const int l = spec.partition.num_classes();
  std::vector<double> nu = prior_class_probs(spec.prior, spec.partition);
  std::vector<double> logterms(static_cast<size_t>(l));
  for (int c = 0; c < l; ++c)
    logterms[static_cast<size_t>(c)] =
        log_pattern_prob(x, spec.partition.classes[static_cast<size_t>(c)], spec.items) +
        std::log(std::max(nu[static_cast<size_t>(c)], 1e-300));
  double lse = logsumexp(logterms);
  if (!std::isfinite(lse)) throw std::runtime_error("all class likelihoods underflowed");
  std::vector<double> post(static_cast<size_t>(l));
  for (int c = 0; c < l; ++c)
    post[static_cast<size_t>(c)] = std::exp(logterms[static_cast<size_t>(c)] - lse);
  return post;
}

MasteryBounds mastery_bounds(const std::vector<double>& posterior, const Partition& partition) {
  const int k = partition.classes.front().minimal_representative.len;
  MasteryBounds b;
  b.p_min.assign(static_cast<size_t>(k), 0.0);
  b.p_max.assign(static_cast<size_t>(k), 0.0);
  for (int c = 0; c < partition.num_classes(); ++c) {
    const EquivalenceClass& cls = partition.classes[static_cast<size_t>(c)];
    for (int a = 0; a < k; ++a) {
      if (cls.delta.bit(a)) {
        if (cls.minimal_representative.bit(a))
          b.p_min[static_cast<size_t>(a)] += posterior[static_cast<size_t>(c)];
      } else {
        b.p_max[static_cast<size_t>(a)] += posterior[static_cast<size_t>(c)];
      }
    }
  }
  for (int a = 0; a < k; ++a)
    b.p_max[static_cast<size_t>(a)] += b.p_min[static_cast<size_t>(a)];
  return b;
}

MasteryBounds mastery_bounds(const BitVec& x, const ModelSpec& spec) {
  return mastery_bounds(class_posterior(x, spec), spec.partition);
}

Decision decide(const MasteryBounds& bounds, double cutoff) {
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw std::invalid_argument("cutoff must be in (0,1)");
  Decision d;
  d.attr.resize(bounds.p_min.size());
  for (size_t k = 0; k < bounds.p_min.size(); ++k) {
    if (bounds.p_min[k] > cutoff)
      d.attr[k] = Mastery::Mastered;
    else if (bounds.p_max[k] < cutoff)
      d.attr[k] = Mastery::NotMastered;
    else
      d.attr[k] = Mastery::Unclassified;
  }
  return d;
}

Decision niad_classify(const BitVec& x, const ModelSpec& spec, double cutoff) {
  return decide(mastery_bounds(x, spec), cutoff);
}

ZetaReport zeta_rates(const Partition& partition, const std::vector<double>& nu_class) {
  if (nu_class.size() != static_cast<size_t>(partition.num_classes()))
    throw std::invalid_argument("nu length != L");
  const int k = partition.classes.front().minimal_representative.len;
  ZetaReport r;
  r.zeta.assign(static_cast<size_t>(k), 0.0);
  for (int c = 0; c < partition.num_classes(); ++c) {
    const EquivalenceClass& cls = partition.classes[static_cast<size_t>(c)];
    for (int a = 0; a < k; ++a)
      if (cls.delta.bit(a)) r.zeta[static_cast<size_t>(a)] += nu_class[static_cast<size_t>(c)];
  }
  return r;
}

std::vector<double> marginal_posterior(const BitVec& x, const ModelSpec& spec,
                                       const std::vector<double>* allocation) {
  spec.validate();
  const int k = spec.q.attributes();
  const std::uint32_t n = 1u << k;
  std::vector<double> profile_prior;
  if (spec.prior.variant == PriorVariant::Saturated) {
    if (!allocation)
      throw std::invalid_argument(
          "marginal posterior under a saturated prior needs an explicit within-class "
          "allocation; use mastery_bounds instead");
    if (allocation->size() != n) throw std::invalid_argument("allocation length != 2^K");
    profile_prior = *allocation;
  } else {
    profile_prior = prior_profile_probs(spec.prior, k);
  }
  // profile posterior: p(alpha | x) propto p(x | [alpha]) * prior(alpha)
  std::vector<double> logterms(n);
  for (std::uint32_t a = 0; a < n; ++a) {
    int c = spec.partition.class_of(Profile{a, k});
    logterms[a] = log_pattern_prob(x, spec.partition.classes[static_cast<size_t>(c)], spec.items) +
                  std::log(std::max(profile_prior[a], 1e-300));
  }
  double lse = logsumexp(logterms);
  std::vector<double> out(static_cast<size_t>(k), 0.0);
  for (std::uint32_t a = 0; a < n; ++a) {
    double p = std::exp(logterms[a] - lse);
    Profile pr{a, k};
    for (int kk = 0; kk < k; ++kk)
      if (pr.bit(kk)) out[static_cast<size_t>(kk)] += p;
  }
  return out;
}

AttributeRates misclassification_report(const BinaryMatrix& truth,
                                        const std::vector<Decision>& decisions) {
  if (truth.rows != static_cast<int>(decisions.size()))
    throw std::invalid_argument("truth rows != decision count");
  const int k = truth.cols;
  AttributeRates r;
  r.misclassification.assign(static_cast<size_t>(k), 0.0);
  r.unclassified.assign(static_cast<size_t>(k), 0.0);
  for (int i = 0; i < truth.rows; ++i) {
    const Decision& d = decisions[static_cast<size_t>(i)];
    if (static_cast<int>(d.attr.size()) != k)
      throw std::invalid_argument("decision width != truth columns");
    for (int a = 0; a < k; ++a) {
      Mastery m = d.attr[static_cast<size_t>(a)];
      if (m == Mastery::Unclassified)
        r.unclassified[static_cast<size_t>(a)] += 1.0;
      else if (static_cast<int>(m) != truth.at(i, a))
        r.misclassification[static_cast<size_t>(a)] += 1.0;
    }
  }
  for (int a = 0; a < k; ++a) {
    r.misclassification[static_cast<size_t>(a)] /= truth.rows;
    r.unclassified[static_cast<size_t>(a)] /= truth.rows;
  }
  return r;
}

}  // namespace niad
