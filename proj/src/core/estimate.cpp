/*
 * (C) Copyright 2026 NIAD toolkit developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "estimate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rng.hpp"

namespace niad {

namespace {

constexpr double kDifficultyBound = 12.0;
constexpr double kDiscriminationMin = 1e-3;
constexpr double kDiscriminationMax = 25.0;

double clamp_prob(double p) { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

double normal_draw(Rng& rng) {
  double u1 = std::max(rng.next_double(), 1e-300);
  double u2 = rng.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Expected complete-data log-likelihood of the prior parameters given
// expected per-profile counts.
double prior_objective(const PriorSpec& prior, int attributes,
                       const std::vector<double>& profile_counts) {
  std::vector<double> p = prior_profile_probs(prior, attributes);
  double f = 0;
  for (size_t a = 0; a < p.size(); ++a)
    if (profile_counts[a] > 0) f += profile_counts[a] * std::log(std::max(p[a], 1e-300));
  return f;
}

// Coordinatewise damped Newton ascent with numeric derivatives and step
// halving; never decreases the objective.
void maximize_prior(PriorSpec& prior, int attributes, const std::vector<double>& profile_counts) {
  struct Coord {
    double* value;
    double lo, hi;
  };
  std::vector<Coord> coords;
  for (double& bk : prior.b) coords.push_back({&bk, -kDifficultyBound, kDifficultyBound});
  if (prior.variant == PriorVariant::HigherOrder ||
      prior.variant == PriorVariant::RestrictedHigherOrder)
    for (double& ak : prior.a) coords.push_back({&ak, kDiscriminationMin, kDiscriminationMax});

  double f = prior_objective(prior, attributes, profile_counts);
  for (int sweep = 0; sweep < 50; ++sweep) {
    double f_before = f;
    for (auto& c : coords) {
      double x0 = *c.value;
      double h = 1e-5 * (1.0 + std::abs(x0));
      *c.value = std::clamp(x0 + h, c.lo, c.hi);
      double fp = prior_objective(prior, attributes, profile_counts);
      *c.value = std::clamp(x0 - h, c.lo, c.hi);
      double fm = prior_objective(prior, attributes, profile_counts);
      *c.value = x0;
      double grad = (fp - fm) / (2 * h);
      double hess = (fp - 2 * f + fm) / (h * h);
      double step = hess < -1e-12 ? -grad / hess : grad;
      step = std::clamp(step, -2.0, 2.0);
      for (int halving = 0; halving < 30 && step != 0.0; ++halving) {
        *c.value = std::clamp(x0 + step, c.lo, c.hi);
        double f_try = prior_objective(prior, attributes, profile_counts);
        if (f_try >= f) {
          f = f_try;
          break;
        }
        *c.value = x0;
        step /= 2;
      }
    }
    if (f - f_before < 1e-10 * (1.0 + std::abs(f))) break;
  }
}

struct EStepStats {
  double loglik = 0;
  std::vector<double> class_mass;              // m_c = sum_x N_x r_{x,c}
  std::vector<std::vector<double>> resp;       // per pattern x class
  std::vector<double> item_e1, item_e1x1, item_e0x1;  // per item
};

EStepStats e_step(const PooledData& pooled, const Partition& partition, const ItemParams& items,
                  const std::vector<double>& nu_class, bool item_stats) {
  const int l = partition.num_classes();
  const int j_count = items.items();
  EStepStats st;
  st.class_mass.assign(static_cast<size_t>(l), 0.0);
  st.resp.resize(pooled.patterns.size());
  if (item_stats) {
    st.item_e1.assign(static_cast<size_t>(j_count), 0.0);
    st.item_e1x1.assign(static_cast<size_t>(j_count), 0.0);
    st.item_e0x1.assign(static_cast<size_t>(j_count), 0.0);
  }
  std::vector<double> lognu(static_cast<size_t>(l));
  for (int c = 0; c < l; ++c)
    lognu[static_cast<size_t>(c)] = std::log(std::max(nu_class[static_cast<size_t>(c)], 1e-300));

  std::vector<double> terms(static_cast<size_t>(l));
  for (size_t p = 0; p < pooled.patterns.size(); ++p) {
    const BitVec& x = pooled.patterns[p];
    for (int c = 0; c < l; ++c)
      terms[static_cast<size_t>(c)] =
          log_pattern_prob(x, partition.classes[static_cast<size_t>(c)], items) +
          lognu[static_cast<size_t>(c)];
    double lse = logsumexp(terms);
    st.loglik += pooled.counts[p] * lse;
    auto& w = st.resp[p];
    w.resize(static_cast<size_t>(l));
    for (int c = 0; c < l; ++c) {
      w[static_cast<size_t>(c)] = std::exp(terms[static_cast<size_t>(c)] - lse);
      st.class_mass[static_cast<size_t>(c)] += pooled.counts[p] * w[static_cast<size_t>(c)];
    }
    if (item_stats) {
      for (int c = 0; c < l; ++c) {
        double wc = pooled.counts[p] * w[static_cast<size_t>(c)];
        if (wc == 0) continue;
        const BitVec& xi = partition.classes[static_cast<size_t>(c)].ideal;
        for (int j = 0; j < j_count; ++j) {
          if (xi.bit(j)) {
            st.item_e1[static_cast<size_t>(j)] += wc;
            if (x.bit(j)) st.item_e1x1[static_cast<size_t>(j)] += wc;
          } else if (x.bit(j)) {
            st.item_e0x1[static_cast<size_t>(j)] += wc;
          }
        }
      }
    }
  }
  return st;
}

PriorSpec random_prior_start(PriorVariant variant, int num_classes, int attributes, Rng& rng) {
  PriorSpec prior;
  prior.variant = variant;
  switch (variant) {
    case PriorVariant::Saturated: {
      prior.nu.resize(static_cast<size_t>(num_classes));
      double total = 0;
      for (double& v : prior.nu) {
        v = -std::log(std::max(rng.next_double(), 1e-300));  // symmetric Dirichlet(1)
        total += v;
      }
      for (double& v : prior.nu) v /= total;
      break;
    }
    case PriorVariant::Independent:
      prior.b.resize(static_cast<size_t>(attributes));
      for (double& bk : prior.b) bk = 0.5 * normal_draw(rng);
      break;
    case PriorVariant::HigherOrder:
      prior.a.assign(static_cast<size_t>(attributes), 1.0);
      prior.b.resize(static_cast<size_t>(attributes));
      for (double& ak : prior.a)
        ak = std::clamp(1.0 + 0.25 * normal_draw(rng), kDiscriminationMin, kDiscriminationMax);
      for (double& bk : prior.b) bk = 0.5 * normal_draw(rng);
      break;
    case PriorVariant::RestrictedHigherOrder:
      prior.a.assign(1, std::clamp(1.0 + 0.25 * normal_draw(rng), kDiscriminationMin,
                                   kDiscriminationMax));
      prior.b.resize(static_cast<size_t>(attributes));
      for (double& bk : prior.b) bk = 0.5 * normal_draw(rng);
      break;
  }
  return prior;
}

struct SingleRun {
  PriorSpec prior;
  ItemParams items;
  double loglik = -std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  std::vector<std::vector<double>> resp;  // final pattern x class responsibilities
  bool converged = false;
  int iterations = 0;
};

SingleRun run_em_once(const PooledData& pooled, const QMatrix& q, const Partition& partition,
                      PriorSpec prior, ItemParams items, const EmOptions& opts) {
  const int l = partition.num_classes();
  const double n = static_cast<double>(pooled.n);
  SingleRun run;
  double prev = -std::numeric_limits<double>::infinity();
  std::vector<double> nu_class;
  EStepStats st;

  for (int it = 0; it < opts.max_iterations; ++it) {
    nu_class = prior_class_probs(prior, partition);
    st = e_step(pooled, partition, items, nu_class, opts.estimate_items);
    run.trace.push_back(st.loglik);
    run.iterations = it + 1;
    if (std::abs(st.loglik - prev) < opts.tolerance * (std::abs(prev) + 1.0)) {
      run.converged = true;
      break;
    }
    prev = st.loglik;

    // M-step: prior
    if (prior.variant == PriorVariant::Saturated) {
      for (int c = 0; c < l; ++c)
        prior.nu[static_cast<size_t>(c)] = st.class_mass[static_cast<size_t>(c)] / n;
    } else {
      // expected profile counts: within a class the responsibilities split
      // proportionally to the current prior
      std::vector<double> profile_probs = prior_profile_probs(prior, q.attributes());
      std::vector<double> counts(profile_probs.size(), 0.0);
      for (int c = 0; c < l; ++c) {
        const auto& cls = partition.classes[static_cast<size_t>(c)];
        double class_prob = 0;
        for (Profile m : cls.members) class_prob += profile_probs[m.code];
        for (Profile m : cls.members)
          counts[m.code] = class_prob > 0
                               ? st.class_mass[static_cast<size_t>(c)] * profile_probs[m.code] /
                                     class_prob
                               : st.class_mass[static_cast<size_t>(c)] /
                                     static_cast<double>(cls.members.size());
      }
      maximize_prior(prior, q.attributes(), counts);
    }

    // M-step: items (closed-form expected slip/guess ratios)
    if (opts.estimate_items) {
      for (int j = 0; j < q.items(); ++j) {
        double e1 = st.item_e1[static_cast<size_t>(j)];
        double e0 = n - e1;
        if (e1 > 0)
          items.slip[static_cast<size_t>(j)] =
              clamp_prob((e1 - st.item_e1x1[static_cast<size_t>(j)]) / e1);
        if (e0 > 0)
          items.guess[static_cast<size_t>(j)] =
              clamp_prob(st.item_e0x1[static_cast<size_t>(j)] / e0);
      }
    }
  }
  if (!run.converged) {
    // final evaluation at the last parameters
    nu_class = prior_class_probs(prior, partition);
    st = e_step(pooled, partition, items, nu_class, false);
    run.trace.push_back(st.loglik);
  }
  run.loglik = run.trace.back();
  run.prior = std::move(prior);
  run.items = std::move(items);
  run.resp = std::move(st.resp);
  return run;
}

}  // namespace

void EmOptions::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(tolerance > 0)) throw std::invalid_argument("tolerance must be positive");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
}

int parameter_count(PriorVariant variant, const QMatrix& q, const Partition& partition) {
  int base = 2 * q.items();
  switch (variant) {
    case PriorVariant::Saturated: return base + partition.num_classes();
    case PriorVariant::Independent: return base + q.attributes();
    case PriorVariant::RestrictedHigherOrder: return base + q.attributes() + 1;
    case PriorVariant::HigherOrder: return base + 2 * q.attributes();
  }
  return base;
}

int parameter_count_unreduced(const QMatrix& q) {
  return 2 * q.items() + (1 << q.attributes());
}

FitResult em_fit(const BinaryMatrix& data, const QMatrix& q, PriorVariant variant,
                 const EmOptions& opts, Link link) {
  opts.validate();
  if (data.cols != q.items()) throw std::invalid_argument("data columns != Q-matrix J");
  PooledData pooled = pool_rows(data);
  Partition partition = make_partition(q, link);
  const int l = partition.num_classes();

  const bool init_prior = opts.init && (!opts.init->nu.empty() || !opts.init->b.empty());
  const bool init_items = opts.init && !opts.init->slip.empty();

  SingleRun best;
  std::vector<double> restart_logliks;
  for (int r = 0; r < opts.restarts; ++r) {
    Rng rng(opts.seed, static_cast<std::uint64_t>(r));
    PriorSpec prior;
    ItemParams items;
    if (r == 0 && init_prior) {
      prior.variant = variant;
      prior.nu = opts.init->nu;
      prior.a = opts.init->a;
      prior.b = opts.init->b;
    } else {
      prior = random_prior_start(variant, l, q.attributes(), rng);
    }
    if (init_items) {
      // fixed or warm-started item parameters apply to every restart
      items.slip = opts.init->slip;
      items.guess = opts.init->guess;
    } else {
      items.slip.resize(static_cast<size_t>(q.items()));
      items.guess.resize(static_cast<size_t>(q.items()));
      for (double& s : items.slip) s = rng.uniform(0.1, 0.3);
      for (double& g : items.guess) g = rng.uniform(0.1, 0.3);
    }
    items.validate();
    SingleRun run = run_em_once(pooled, q, partition, std::move(prior), std::move(items), opts);
    restart_logliks.push_back(run.loglik);
    if (run.loglik > best.loglik) best = std::move(run);
  }

  FitResult fit{ModelSpec{q, std::move(partition), best.items, best.prior, link}};
  fit.loglik = best.loglik;
  fit.n_params = parameter_count(variant, q, fit.spec.partition);
  fit.n_params_unreduced = parameter_count_unreduced(q);
  fit.aic = 2.0 * fit.n_params - 2.0 * fit.loglik;
  fit.bic = fit.n_params * std::log(static_cast<double>(pooled.n)) - 2.0 * fit.loglik;
  fit.converged = best.converged;
  fit.n_iterations = best.iterations;
  fit.restart_logliks = std::move(restart_logliks);
  fit.iteration_logliks = std::move(best.trace);
  fit.posteriors.resize(static_cast<size_t>(pooled.n));
  for (int i = 0; i < pooled.n; ++i)
    fit.posteriors[static_cast<size_t>(i)] =
        best.resp[static_cast<size_t>(pooled.row_pattern[static_cast<size_t>(i)])];
  if (opts.estimate_items) {
    std::vector<double> nu_class = prior_class_probs(fit.spec.prior, fit.spec.partition);
    fit.degenerate = l > 1 && *std::max_element(nu_class.begin(), nu_class.end()) > 1.0 - 1e-8;
  }
  return fit;
}

TMatrix t_matrix(const QMatrix& q, const ItemParams& items, Link link) {
  if (q.items() > kTMatrixMaxItems)
    throw std::invalid_argument("T-matrix requires J <= 20");
  items.validate();
  if (items.items() != q.items()) throw std::invalid_argument("item parameter length != J");
  Partition partition = make_partition(q, link);
  const int l = partition.num_classes();
  const std::uint32_t rows = 1u << q.items();
  std::vector<std::vector<double>> p = class_item_success(partition, items);

  TMatrix t;
  t.items = q.items();
  t.num_classes = l;
  t.entries.assign(static_cast<size_t>(rows) * l, 0.0);
  for (std::uint32_t x = 0; x < rows; ++x) {
    for (int c = 0; c < l; ++c) {
      double prod = 1.0;
      for (int j = 0; j < q.items(); ++j)
        if ((x >> (q.items() - 1 - j)) & 1u) prod *= p[static_cast<size_t>(c)][static_cast<size_t>(j)];
      t.entries[static_cast<size_t>(x) * l + c] = prod;
    }
  }
  return t;
}

RankCheck identifiability_rank_check(const QMatrix& q, const ItemParams& items, Link link) {
  if (q.items() > kTMatrixMaxItems)
    throw std::invalid_argument("rank check requires J <= 20");
  items.validate();
  Partition partition = make_partition(q, link);
  const int l = partition.num_classes();
  const double rows = std::pow(2.0, q.items());
  std::vector<std::vector<double>> p = class_item_success(partition, items);

  RankCheck rc;
  rc.num_classes = l;
  std::vector<double> sigma;
  if (rows * l <= 4e6) {
    Eigen::MatrixXd t(static_cast<Eigen::Index>(rows), l);
    const std::uint32_t n = static_cast<std::uint32_t>(rows);
    for (std::uint32_t x = 0; x < n; ++x)
      for (int c = 0; c < l; ++c) {
        double prod = 1.0;
        for (int j = 0; j < q.items(); ++j)
          if ((x >> (q.items() - 1 - j)) & 1u)
            prod *= p[static_cast<size_t>(c)][static_cast<size_t>(j)];
        t(static_cast<Eigen::Index>(x), c) = prod;
      }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(t);
    sigma.assign(svd.singularValues().data(), svd.singularValues().data() + l);
  } else {
    // rows factorize over items, so the Gram matrix has the closed form
    // G_{cd} = prod_j (1 + p_jc * p_jd); singular values are sqrt(eig(G))
    Eigen::MatrixXd gram(l, l);
    for (int c = 0; c < l; ++c)
      for (int d = c; d < l; ++d) {
        double prod = 1.0;
        for (int j = 0; j < q.items(); ++j)
          prod *= 1.0 + p[static_cast<size_t>(c)][static_cast<size_t>(j)] *
                            p[static_cast<size_t>(d)][static_cast<size_t>(j)];
        gram(c, d) = prod;
        gram(d, c) = prod;
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    for (int i = 0; i < l; ++i) sigma.push_back(std::sqrt(std::max(es.eigenvalues()(i), 0.0)));
  }
  rc.sigma_max = *std::max_element(sigma.begin(), sigma.end());
  rc.threshold = rc.sigma_max * rows * 64.0 * std::numeric_limits<double>::epsilon();
  for (double s : sigma)
    if (s > rc.threshold) ++rc.rank;
  rc.identifiable = rc.rank == l;
  return rc;
}

}  // namespace niad
