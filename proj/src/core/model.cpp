/*
 * (C) Copyright 2026 NIAD toolkit developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace niad {

void ItemParams::validate() const {
  if (slip.size() != guess.size()) throw std::invalid_argument("slip/guess length mismatch");
  if (slip.empty()) throw std::invalid_argument("empty item parameters");
  for (size_t j = 0; j < slip.size(); ++j) {
    if (!(slip[j] > 0.0 && slip[j] < 1.0) || !(guess[j] > 0.0 && guess[j] < 1.0))
      throw std::invalid_argument("slip/guess must lie in the open unit interval");
  }
}

std::vector<int> ItemParams::degenerate_items(double tol) const {
  std::vector<int> out;
  for (size_t j = 0; j < slip.size(); ++j)
    if (std::abs(1.0 - slip[j] - guess[j]) < tol) out.push_back(static_cast<int>(j));
  return out;
}

const char* prior_variant_name(PriorVariant v) {
  switch (v) {
    case PriorVariant::Saturated: return "saturated";
    case PriorVariant::Independent: return "independent";
    case PriorVariant::HigherOrder: return "higher_order";
    case PriorVariant::RestrictedHigherOrder: return "restricted_higher_order";
  }
  return "?";
}

PriorSpec PriorSpec::saturated(std::vector<double> nu) {
  PriorSpec p;
  p.variant = PriorVariant::Saturated;
  p.nu = std::move(nu);
  double total = 0;
  for (double x : p.nu) {
    if (x < 0) throw std::invalid_argument("saturated nu entries must be nonnegative");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw std::invalid_argument("saturated nu must sum to 1 within 1e-10");
  return p;
}

PriorSpec PriorSpec::independent(std::vector<double> b) {
  PriorSpec p;
  p.variant = PriorVariant::Independent;
  p.b = std::move(b);
  for (double x : p.b)
    if (!std::isfinite(x)) throw std::invalid_argument("difficulty must be finite");
  return p;
}

PriorSpec PriorSpec::higher_order(std::vector<double> a, std::vector<double> b) {
  PriorSpec p;
  p.variant = PriorVariant::HigherOrder;
  p.a = std::move(a);
  p.b = std::move(b);
  if (p.a.size() != p.b.size()) throw std::invalid_argument("a/b length mismatch");
  for (double x : p.a)
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument("discriminations must be nonnegative and finite");
  for (double x : p.b)
    if (!std::isfinite(x)) throw std::invalid_argument("difficulty must be finite");
  return p;
}

PriorSpec PriorSpec::restricted_higher_order(double a, std::vector<double> b) {
  PriorSpec p;
  p.variant = PriorVariant::RestrictedHigherOrder;
  p.a = {a};
  p.b = std::move(b);
  if (!(a >= 0.0) || !std::isfinite(a))
    throw std::invalid_argument("discrimination must be nonnegative and finite");
  for (double x : p.b)
    if (!std::isfinite(x)) throw std::invalid_argument("difficulty must be finite");
  return p;
}

void ModelSpec::validate() const {
  items.validate();
  if (items.items() != q.items()) throw std::invalid_argument("item parameter length != J");
  const int l = partition.num_classes();
  const int k = q.attributes();
  switch (prior.variant) {
    case PriorVariant::Saturated:
      if (static_cast<int>(prior.nu.size()) != l)
        throw std::invalid_argument("saturated nu length != L");
      break;
    case PriorVariant::Independent:
      if (static_cast<int>(prior.b.size()) != k)
        throw std::invalid_argument("independent b length != K");
      break;
    case PriorVariant::HigherOrder:
      if (static_cast<int>(prior.b.size()) != k || static_cast<int>(prior.a.size()) != k)
        throw std::invalid_argument("higher-order a/b length != K");
      break;
    case PriorVariant::RestrictedHigherOrder:
      if (static_cast<int>(prior.b.size()) != k || prior.a.size() != 1)
        throw std::invalid_argument("restricted higher-order needs scalar a and K difficulties");
      break;
  }
}

QuadratureRule gauss_hermite_normal(int n) {
  // Golub-Welsch on the Jacobi matrix of the (physicists') Hermite
  // polynomials, then rescaled to the standard normal weight.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    double off = std::sqrt(i / 2.0);
    jac(i, i - 1) = off;
    jac(i - 1, i) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  QuadratureRule rule;
  rule.nodes.resize(static_cast<size_t>(n));
  rule.weights.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    rule.nodes[static_cast<size_t>(i)] = std::sqrt(2.0) * es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    rule.weights[static_cast<size_t>(i)] = v0 * v0;  // already sums to 1
  }
  return rule;
}

double log_response_prob(const BitVec& x, const BitVec& xi, const ItemParams& items) {
  if (x.len != xi.len || x.len != items.items())
    throw std::invalid_argument("response/ideal/item dimension mismatch");
  double ll = 0;
  for (int j = 0; j < x.len; ++j) {
    double p1 = xi.bit(j) ? 1.0 - items.slip[static_cast<size_t>(j)]
                          : items.guess[static_cast<size_t>(j)];
    ll += x.bit(j) ? std::log(p1) : std::log1p(-p1);
  }
  return ll;
}

double response_prob(const BitVec& x, const BitVec& xi, const ItemParams& items) {
  return std::exp(log_response_prob(x, xi, items));
}

double class_conditional_prob(const BitVec& x, const EquivalenceClass& c, const ModelSpec& spec) {
  return response_prob(x, c.ideal, spec.items);
}

double log_pattern_prob(const BitVec& x, const EquivalenceClass& c, const ItemParams& items) {
  return log_response_prob(x, c.ideal, items);
}

std::vector<double> prior_profile_probs(const PriorSpec& prior, int attributes) {
  const std::uint32_t n = 1u << attributes;
  std::vector<double> out(n, 0.0);
  switch (prior.variant) {
    case PriorVariant::Saturated:
      throw std::invalid_argument("saturated prior does not resolve to profiles");
    case PriorVariant::Independent: {
      if (static_cast<int>(prior.b.size()) != attributes)
        throw std::invalid_argument("independent b length != K");
      std::vector<double> p1(prior.b.size());
      for (size_t k = 0; k < prior.b.size(); ++k) p1[k] = 1.0 / (1.0 + std::exp(-prior.b[k]));
      for (std::uint32_t a = 0; a < n; ++a) {
        double p = 1.0;
        Profile pr{a, attributes};
        for (int k = 0; k < attributes; ++k)
          p *= pr.bit(k) ? p1[static_cast<size_t>(k)] : 1.0 - p1[static_cast<size_t>(k)];
        out[a] = p;
      }
      break;
    }
    case PriorVariant::HigherOrder:
    case PriorVariant::RestrictedHigherOrder: {
      if (static_cast<int>(prior.b.size()) != attributes)
        throw std::invalid_argument("prior b length != K");
      static const QuadratureRule rule = gauss_hermite_normal(kQuadratureNodes);
      for (size_t t = 0; t < rule.nodes.size(); ++t) {
        double theta = rule.nodes[t];
        std::vector<double> p1(static_cast<size_t>(attributes));
        for (int k = 0; k < attributes; ++k) {
          double ak = prior.variant == PriorVariant::HigherOrder ? prior.a[static_cast<size_t>(k)]
                                                                 : prior.a[0];
          p1[static_cast<size_t>(k)] =
              1.0 / (1.0 + std::exp(-(prior.b[static_cast<size_t>(k)] + ak * theta)));
        }
        for (std::uint32_t a = 0; a < n; ++a) {
          double p = 1.0;
          Profile pr{a, attributes};
          for (int k = 0; k < attributes; ++k)
            p *= pr.bit(k) ? p1[static_cast<size_t>(k)] : 1.0 - p1[static_cast<size_t>(k)];
          out[a] += rule.weights[t] * p;
        }
      }
      break;
    }
  }
  double total = 0;
  for (double p : out) total += p;
  for (double& p : out) p /= total;
  return out;
}

std::vector<double> prior_class_probs(const PriorSpec& prior, const Partition& partition,
                                      bool* underflow) {
  const int l = partition.num_classes();
  std::vector<double> out(static_cast<size_t>(l), 0.0);
  if (prior.variant == PriorVariant::Saturated) {
    if (static_cast<int>(prior.nu.size()) != l)
      throw std::invalid_argument("saturated nu length != L");
    out = prior.nu;
  } else {
    int k = partition.classes.front().minimal_representative.len;
    std::vector<double> per_profile = prior_profile_probs(prior, k);
    for (int c = 0; c < l; ++c)
      for (Profile m : partition.classes[static_cast<size_t>(c)].members)
        out[static_cast<size_t>(c)] += per_profile[m.code];
  }
  if (underflow) {
    *underflow = false;
    for (double p : out)
      if (p < 1e-300) *underflow = true;
  }
  return out;
}

PooledData pool_rows(const BinaryMatrix& data) {
  if (data.rows < 1 || data.cols < 1) throw std::invalid_argument("empty response data");
  PooledData pooled;
  pooled.n = data.rows;
  pooled.items = data.cols;
  pooled.row_pattern.resize(static_cast<size_t>(data.rows));
  std::map<std::vector<std::uint64_t>, int> index;
  for (int i = 0; i < data.rows; ++i) {
    BitVec x(data.cols);
    for (int j = 0; j < data.cols; ++j) {
      std::uint8_t cell = data.at(i, j);
      if (cell > 1) throw std::invalid_argument("non-binary response cell");
      x.set(j, cell == 1);
    }
    auto [it, inserted] = index.try_emplace(x.words, static_cast<int>(pooled.patterns.size()));
    if (inserted) {
      pooled.patterns.push_back(std::move(x));
      pooled.counts.push_back(0.0);
    }
    pooled.counts[static_cast<size_t>(it->second)] += 1.0;
    pooled.row_pattern[static_cast<size_t>(i)] = it->second;
  }
  return pooled;
}

std::vector<std::vector<double>> class_item_success(const Partition& partition,
                                                    const ItemParams& items) {
  const int l = partition.num_classes();
  const int j_count = items.items();
  std::vector<std::vector<double>> p(static_cast<size_t>(l),
                                     std::vector<double>(static_cast<size_t>(j_count)));
  for (int c = 0; c < l; ++c) {
    const BitVec& xi = partition.classes[static_cast<size_t>(c)].ideal;
    for (int j = 0; j < j_count; ++j)
      p[static_cast<size_t>(c)][static_cast<size_t>(j)] =
          xi.bit(j) ? 1.0 - items.slip[static_cast<size_t>(j)] : items.guess[static_cast<size_t>(j)];
  }
  return p;
}

double logsumexp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double log_likelihood_pooled(const PooledData& pooled, const ModelSpec& spec) {
  spec.validate();
  if (pooled.items != spec.q.items()) throw std::invalid_argument("data columns != Q-matrix J");
  std::vector<double> nu = prior_class_probs(spec.prior, spec.partition);
  const int l = spec.partition.num_classes();
  std::vector<double> lognu(static_cast<size_t>(l));
  for (int c = 0; c < l; ++c) lognu[static_cast<size_t>(c)] = std::log(nu[static_cast<size_t>(c)]);
  double ll = 0;
  std::vector<double> terms(static_cast<size_t>(l));
  for (size_t p = 0; p < pooled.patterns.size(); ++p) {
    for (int c = 0; c < l; ++c)
      terms[static_cast<size_t>(c)] =
          log_pattern_prob(pooled.patterns[p], spec.partition.classes[static_cast<size_t>(c)],
                           spec.items) +
          lognu[static_cast<size_t>(c)];
    ll += pooled.counts[p] * logsumexp(terms);
  }
  return ll;
}

double log_likelihood(const BinaryMatrix& data, const ModelSpec& spec) {
  return log_likelihood_pooled(pool_rows(data), spec);
}

}  // namespace niad
