/*
 * (C) Copyright 2026 NIAD toolkit developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "niad/niad.h"

#include <cstring>
#include <memory>
#include <sstream>
#include <string>

#include "core/classify.hpp"
#include "core/estimate.hpp"
#include "core/io.hpp"
#include "core/model.hpp"
#include "core/qspace.hpp"
#include "core/simulate.hpp"

namespace {

thread_local std::string g_last_error;

niad_status set_error(niad_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename F>
niad_status guarded(F&& f) {
  try {
    return f();
  } catch (const niad::ParseError& e) {
    return set_error(NIAD_ERR_PARSE, e.what());
  } catch (const std::invalid_argument& e) {
    return set_error(NIAD_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::runtime_error& e) {
    return set_error(NIAD_ERR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return set_error(NIAD_ERR_NUMERIC, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

niad::Link to_link(niad_link link) {
  return link == NIAD_LINK_DINO ? niad::Link::DINO : niad::Link::DINA;
}

niad::PriorVariant to_variant(niad_prior_variant v) {
  switch (v) {
    case NIAD_PRIOR_SATURATED: return niad::PriorVariant::Saturated;
    case NIAD_PRIOR_INDEPENDENT: return niad::PriorVariant::Independent;
    case NIAD_PRIOR_HIGHER_ORDER: return niad::PriorVariant::HigherOrder;
    case NIAD_PRIOR_RESTRICTED_HIGHER_ORDER: return niad::PriorVariant::RestrictedHigherOrder;
  }
  throw std::invalid_argument("unknown prior variant");
}

niad_status copy_bits(const std::string& s, char* buf, size_t bufsize) {
  if (!buf || bufsize < s.size() + 1)
    return set_error(NIAD_ERR_INVALID_ARGUMENT, "buffer too small");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return NIAD_OK;
}

}  // namespace

struct niad_qmatrix {
  niad::QMatrix q;
};
struct niad_partition {
  niad::Partition p;
};
struct niad_matrix {
  niad::BinaryMatrix m;
};
struct niad_scenario {
  niad::Scenario sc;
};
struct niad_fit {
  niad::FitResult fit;
};
struct niad_model {
  niad::ModelSpec spec;
};
struct niad_classification {
  std::vector<niad::Decision> decisions;
  std::vector<niad::MasteryBounds> bounds;
  int attributes = 0;
};

extern "C" {

const char* niad_version(void) { return "0.1.0"; }

const char* niad_last_error(void) { return g_last_error.c_str(); }

void niad_string_free(char* s) { std::free(s); }

niad_status niad_qmatrix_create(int items, int attributes, const int* entries,
                                niad_qmatrix** out) {
  return guarded([&] {
    if (!entries || !out) throw std::invalid_argument("null argument");
    std::vector<int> v(entries, entries + static_cast<size_t>(items) * attributes);
    *out = new niad_qmatrix{niad::QMatrix(items, attributes, v)};
    return NIAD_OK;
  });
}

niad_status niad_qmatrix_load_csv(const char* path, int has_header, niad_qmatrix** out) {
  return guarded([&] {
    if (!path || !out) throw std::invalid_argument("null argument");
    *out = new niad_qmatrix{niad::load_qmatrix_csv(path, has_header != 0)};
    return NIAD_OK;
  });
}

int niad_qmatrix_items(const niad_qmatrix* q) { return q ? q->q.items() : 0; }
int niad_qmatrix_attributes(const niad_qmatrix* q) { return q ? q->q.attributes() : 0; }
int niad_qmatrix_get(const niad_qmatrix* q, int item, int attribute) {
  if (!q || item < 0 || item >= q->q.items() || attribute < 0 ||
      attribute >= q->q.attributes())
    return -1;
  return q->q.entry(item, attribute) ? 1 : 0;
}
int niad_qmatrix_is_complete(const niad_qmatrix* q) {
  return q && niad::is_complete(q->q) ? 1 : 0;
}
void niad_qmatrix_free(niad_qmatrix* q) { delete q; }

niad_status niad_partition_build(const niad_qmatrix* q, niad_link link, niad_partition** out) {
  return guarded([&] {
    if (!q || !out) throw std::invalid_argument("null argument");
    *out = new niad_partition{niad::make_partition(q->q, to_link(link))};
    return NIAD_OK;
  });
}

int niad_partition_num_classes(const niad_partition* p) { return p ? p->p.num_classes() : 0; }

int niad_partition_class_size(const niad_partition* p, int c) {
  if (!p || c < 0 || c >= p->p.num_classes()) return -1;
  return static_cast<int>(p->p.classes[static_cast<size_t>(c)].members.size());
}

niad_status niad_partition_class_min_rep(const niad_partition* p, int c, char* buf,
                                         size_t bufsize) {
  return guarded([&] {
    if (!p || c < 0 || c >= p->p.num_classes()) throw std::invalid_argument("bad class index");
    return copy_bits(
        niad::profile_to_string(p->p.classes[static_cast<size_t>(c)].minimal_representative),
        buf, bufsize);
  });
}

niad_status niad_partition_class_delta(const niad_partition* p, int c, char* buf,
                                       size_t bufsize) {
  return guarded([&] {
    if (!p || c < 0 || c >= p->p.num_classes()) throw std::invalid_argument("bad class index");
    return copy_bits(niad::profile_to_string(p->p.classes[static_cast<size_t>(c)].delta), buf,
                     bufsize);
  });
}

niad_status niad_partition_to_json(const niad_partition* p, char** out) {
  return guarded([&] {
    if (!p || !out) throw std::invalid_argument("null argument");
    *out = dup_string(niad::partition_to_json(p->p));
    return NIAD_OK;
  });
}

niad_status niad_partition_table(const niad_partition* p, const niad_fit* fit, char** out) {
  return guarded([&] {
    if (!p || !out) throw std::invalid_argument("null argument");
    if (fit) {
      std::vector<double> nu =
          niad::prior_class_probs(fit->fit.spec.prior, fit->fit.spec.partition);
      *out = dup_string(niad::partition_table(p->p, &nu));
    } else {
      *out = dup_string(niad::partition_table(p->p));
    }
    return NIAD_OK;
  });
}

void niad_partition_free(niad_partition* p) { delete p; }

niad_status niad_matrix_load_csv(const char* path, niad_matrix** out) {
  return guarded([&] {
    if (!path || !out) throw std::invalid_argument("null argument");
    *out = new niad_matrix{niad::load_binary_csv(path)};
    return NIAD_OK;
  });
}

int niad_matrix_rows(const niad_matrix* m) { return m ? m->m.rows : 0; }
int niad_matrix_cols(const niad_matrix* m) { return m ? m->m.cols : 0; }
int niad_matrix_get(const niad_matrix* m, int row, int col) {
  if (!m || row < 0 || row >= m->m.rows || col < 0 || col >= m->m.cols) return -1;
  return m->m.at(row, col);
}

niad_status niad_matrix_to_csv(const niad_matrix* m, char** out) {
  return guarded([&] {
    if (!m || !out) throw std::invalid_argument("null argument");
    *out = dup_string(niad::binary_to_csv(m->m));
    return NIAD_OK;
  });
}

void niad_matrix_free(niad_matrix* m) { delete m; }

niad_status niad_scenario_builtin(const char* name, int n, uint64_t seed, niad_scenario** out) {
  return guarded([&] {
    if (!name || !out) throw std::invalid_argument("null argument");
    *out = new niad_scenario{niad::builtin_scenario(name, n, seed)};
    return NIAD_OK;
  });
}

niad_status niad_scenario_load_json(const char* path, niad_scenario** out) {
  return guarded([&] {
    if (!path || !out) throw std::invalid_argument("null argument");
    std::string dir = ".";
    if (auto pos = std::string(path).find_last_of('/'); pos != std::string::npos)
      dir = std::string(path).substr(0, pos);
    *out = new niad_scenario{niad::scenario_from_json(niad::read_file(path), dir)};
    return NIAD_OK;
  });
}

niad_status niad_scenario_to_json(const niad_scenario* sc, char** out) {
  return guarded([&] {
    if (!sc || !out) throw std::invalid_argument("null argument");
    *out = dup_string(niad::scenario_to_json(sc->sc));
    return NIAD_OK;
  });
}

niad_status niad_scenario_qmatrix(const niad_scenario* sc, niad_qmatrix** out) {
  return guarded([&] {
    if (!sc || !out) throw std::invalid_argument("null argument");
    *out = new niad_qmatrix{sc->sc.q};
    return NIAD_OK;
  });
}

niad_status niad_scenario_simulate(const niad_scenario* sc, niad_matrix** profiles,
                                   niad_matrix** responses) {
  return guarded([&] {
    if (!sc || !profiles || !responses) throw std::invalid_argument("null argument");
    niad::BinaryMatrix pop = niad::draw_population(sc->sc);
    niad::BinaryMatrix resp =
        niad::generate_responses(pop, sc->sc.q, sc->sc.items, sc->sc.link, sc->sc.seed);
    *profiles = new niad_matrix{std::move(pop)};
    *responses = new niad_matrix{std::move(resp)};
    return NIAD_OK;
  });
}

void niad_scenario_free(niad_scenario* sc) { delete sc; }

void niad_em_options_init(niad_em_options* opts) {
  if (!opts) return;
  opts->max_iterations = 2000;
  opts->tolerance = 1e-8;
  opts->restarts = 10;
  opts->seed = 0;
  opts->estimate_items = 1;
  opts->fixed_items_json = nullptr;
}

niad_status niad_fit_run(const niad_qmatrix* q, const niad_matrix* data,
                         niad_prior_variant variant, niad_link link,
                         const niad_em_options* opts, niad_fit** out) {
  return guarded([&] {
    if (!q || !data || !opts || !out) throw std::invalid_argument("null argument");
    niad::EmOptions em;
    em.max_iterations = opts->max_iterations;
    em.tolerance = opts->tolerance;
    em.restarts = opts->restarts;
    em.seed = opts->seed;
    em.estimate_items = opts->estimate_items != 0;
    if (opts->fixed_items_json) {
      niad::ItemParams fixed = niad::items_from_json(opts->fixed_items_json, q->q.items());
      em.estimate_items = false;
      niad::EmInit init;
      init.slip = std::move(fixed.slip);
      init.guess = std::move(fixed.guess);
      em.init = std::move(init);  // priors still drawn randomly per restart
    }
    *out = new niad_fit{niad::em_fit(data->m, q->q, to_variant(variant), em, to_link(link))};
    return NIAD_OK;
  });
}

double niad_fit_loglik(const niad_fit* f) { return f ? f->fit.loglik : 0; }
double niad_fit_aic(const niad_fit* f) { return f ? f->fit.aic : 0; }
double niad_fit_bic(const niad_fit* f) { return f ? f->fit.bic : 0; }
int niad_fit_n_params(const niad_fit* f) { return f ? f->fit.n_params : 0; }
int niad_fit_n_params_unreduced(const niad_fit* f) { return f ? f->fit.n_params_unreduced : 0; }
int niad_fit_converged(const niad_fit* f) { return f && f->fit.converged ? 1 : 0; }
int niad_fit_iterations(const niad_fit* f) { return f ? f->fit.n_iterations : 0; }

niad_status niad_fit_to_json(const niad_fit* f, char** out) {
  return guarded([&] {
    if (!f || !out) throw std::invalid_argument("null argument");
    *out = dup_string(niad::fit_to_json(f->fit));
    return NIAD_OK;
  });
}

niad_status niad_fit_model(const niad_fit* f, niad_model** out) {
  return guarded([&] {
    if (!f || !out) throw std::invalid_argument("null argument");
    *out = new niad_model{f->fit.spec};
    return NIAD_OK;
  });
}

void niad_fit_free(niad_fit* f) { delete f; }

niad_status niad_parameter_count(const niad_qmatrix* q, niad_prior_variant variant,
                                 niad_link link, int* out) {
  return guarded([&] {
    if (!q || !out) throw std::invalid_argument("null argument");
    niad::Partition p = niad::make_partition(q->q, to_link(link));
    *out = niad::parameter_count(to_variant(variant), q->q, p);
    return NIAD_OK;
  });
}

niad_status niad_parameter_count_unreduced(const niad_qmatrix* q, int* out) {
  return guarded([&] {
    if (!q || !out) throw std::invalid_argument("null argument");
    *out = niad::parameter_count_unreduced(q->q);
    return NIAD_OK;
  });
}

niad_status niad_model_from_fit_json(const niad_qmatrix* q, const char* json, niad_model** out) {
  return guarded([&] {
    if (!q || !json || !out) throw std::invalid_argument("null argument");
    *out = new niad_model{niad::model_from_fit_json(q->q, json)};
    return NIAD_OK;
  });
}

niad_status niad_model_true_from_scenario(const niad_scenario* sc, niad_model** out) {
  return guarded([&] {
    if (!sc || !out) throw std::invalid_argument("null argument");
    niad::Partition part = niad::make_partition(sc->sc.q, sc->sc.link);
    std::vector<double> nu(static_cast<size_t>(part.num_classes()), 0.0);
    for (int c = 0; c < part.num_classes(); ++c)
      for (niad::Profile m : part.classes[static_cast<size_t>(c)].members)
        nu[static_cast<size_t>(c)] += sc->sc.profile_probs[m.code];
    niad::ModelSpec spec{sc->sc.q, std::move(part), sc->sc.items,
                         niad::PriorSpec::saturated(std::move(nu)), sc->sc.link};
    *out = new niad_model{std::move(spec)};
    return NIAD_OK;
  });
}

void niad_model_free(niad_model* m) { delete m; }

niad_status niad_classify_run(const niad_model* m, const niad_matrix* data, double cutoff,
                              niad_classification** out) {
  return guarded([&] {
    if (!m || !data || !out) throw std::invalid_argument("null argument");
    if (data->m.cols != m->spec.q.items())
      throw std::invalid_argument("data columns != Q-matrix J");
    auto result = std::make_unique<niad_classification>();
    result->attributes = m->spec.q.attributes();
    niad::PooledData pooled = niad::pool_rows(data->m);
    std::vector<niad::MasteryBounds> pattern_bounds(pooled.patterns.size());
    std::vector<niad::Decision> pattern_decisions(pooled.patterns.size());
    for (size_t p = 0; p < pooled.patterns.size(); ++p) {
      pattern_bounds[p] = niad::mastery_bounds(pooled.patterns[p], m->spec);
      pattern_decisions[p] = niad::decide(pattern_bounds[p], cutoff);
    }
    result->decisions.reserve(static_cast<size_t>(data->m.rows));
    result->bounds.reserve(static_cast<size_t>(data->m.rows));
    for (int i = 0; i < data->m.rows; ++i) {
      int p = pooled.row_pattern[static_cast<size_t>(i)];
      result->decisions.push_back(pattern_decisions[static_cast<size_t>(p)]);
      result->bounds.push_back(pattern_bounds[static_cast<size_t>(p)]);
    }
    *out = result.release();
    return NIAD_OK;
  });
}

niad_status niad_classification_to_csv(const niad_classification* c, char** out) {
  return guarded([&] {
    if (!c || !out) throw std::invalid_argument("null argument");
    *out = dup_string(niad::classification_to_csv(c->decisions, c->bounds));
    return NIAD_OK;
  });
}

niad_status niad_classification_summary(const niad_classification* c,
                                        const niad_matrix* truth, char** out) {
  return guarded([&] {
    if (!c || !out) throw std::invalid_argument("null argument");
    std::ostringstream os;
    const int k = c->attributes;
    std::vector<double> unclassified(static_cast<size_t>(k), 0.0);
    for (const auto& d : c->decisions)
      for (int a = 0; a < k; ++a)
        if (d.attr[static_cast<size_t>(a)] == niad::Mastery::Unclassified)
          unclassified[static_cast<size_t>(a)] += 1.0;
    for (double& u : unclassified) u /= static_cast<double>(c->decisions.size());
    if (truth) {
      niad::AttributeRates rates = niad::misclassification_report(truth->m, c->decisions);
      os << "attribute  misclassification (unclassified)\n";
      char buf[64];
      for (int a = 0; a < k; ++a) {
        std::snprintf(buf, sizeof buf, "%9d  %.2f (%.2f)\n", a + 1,
                      rates.misclassification[static_cast<size_t>(a)],
                      rates.unclassified[static_cast<size_t>(a)]);
        os << buf;
      }
    } else {
      os << "attribute  unclassified\n";
      char buf[64];
      for (int a = 0; a < k; ++a) {
        std::snprintf(buf, sizeof buf, "%9d  %.2f\n", a + 1,
                      unclassified[static_cast<size_t>(a)]);
        os << buf;
      }
    }
    *out = dup_string(os.str());
    return NIAD_OK;
  });
}

void niad_classification_free(niad_classification* c) { delete c; }

niad_status niad_zeta_json(const niad_model* m, char** out) {
  return guarded([&] {
    if (!m || !out) throw std::invalid_argument("null argument");
    std::vector<double> nu = niad::prior_class_probs(m->spec.prior, m->spec.partition);
    *out = dup_string(niad::zeta_to_json(niad::zeta_rates(m->spec.partition, nu)));
    return NIAD_OK;
  });
}

niad_status niad_rank_check(const niad_qmatrix* q, const double* slip, const double* guess,
                            niad_link link, int* rank, int* num_classes, int* identifiable) {
  return guarded([&] {
    if (!q || !slip || !guess) throw std::invalid_argument("null argument");
    niad::ItemParams items;
    items.slip.assign(slip, slip + q->q.items());
    items.guess.assign(guess, guess + q->q.items());
    niad::RankCheck rc = niad::identifiability_rank_check(q->q, items, to_link(link));
    if (rank) *rank = rc.rank;
    if (num_classes) *num_classes = rc.num_classes;
    if (identifiable) *identifiable = rc.identifiable ? 1 : 0;
    return NIAD_OK;
  });
}

niad_status niad_tmatrix_csv(const niad_qmatrix* q, const double* slip, const double* guess,
                             niad_link link, char** out) {
  return guarded([&] {
    if (!q || !slip || !guess || !out) throw std::invalid_argument("null argument");
    niad::ItemParams items;
    items.slip.assign(slip, slip + q->q.items());
    items.guess.assign(guess, guess + q->q.items());
    *out = dup_string(niad::tmatrix_to_csv(niad::t_matrix(q->q, items, to_link(link))));
    return NIAD_OK;
  });
}

niad_status niad_model_tmatrix_csv(const niad_model* m, char** out) {
  return guarded([&] {
    if (!m || !out) throw std::invalid_argument("null argument");
    *out = dup_string(
        niad::tmatrix_to_csv(niad::t_matrix(m->spec.q, m->spec.items, m->spec.link)));
    return NIAD_OK;
  });
}

niad_status niad_evaluate_report(const niad_model* m, char** out) {
  return guarded([&] {
    if (!m || !out) throw std::invalid_argument("null argument");
    std::ostringstream os;
    const niad::ModelSpec& spec = m->spec;
    std::vector<double> nu = niad::prior_class_probs(spec.prior, spec.partition);
    niad::ZetaReport zeta = niad::zeta_rates(spec.partition, nu);
    os << "Q-matrix: " << spec.q.items() << " items, " << spec.q.attributes() << " attributes\n";
    os << "complete: " << (niad::is_complete(spec.q) ? "yes" : "no") << "\n";
    os << "equivalence classes: " << spec.partition.num_classes() << " of "
       << (1 << spec.q.attributes()) << " profiles\n";
    os << "marginal identifiability rate per attribute:\n";
    char buf[64];
    for (size_t k = 0; k < zeta.zeta.size(); ++k) {
      std::snprintf(buf, sizeof buf, "  zeta_%zu = %.2f\n", k + 1, zeta.zeta[k]);
      os << buf;
    }
    // attributes not identifiable for some positive-mass class
    os << "attributes affected by non-identifiability:";
    bool any = false;
    for (size_t k = 0; k < zeta.zeta.size(); ++k)
      if (zeta.zeta[k] < 1.0 - 1e-12) {
        os << ' ' << (k + 1);
        any = true;
      }
    os << (any ? "\n" : " none\n");
    if (spec.q.items() <= niad::kTMatrixMaxItems) {
      niad::RankCheck rc = niad::identifiability_rank_check(spec.q, spec.items, spec.link);
      os << "T-matrix rank: " << rc.rank << " (L = " << rc.num_classes << ") -> "
         << (rc.identifiable ? "identifiable over classes" : "NOT identifiable") << "\n";
    } else {
      os << "T-matrix rank: skipped (J > " << niad::kTMatrixMaxItems << ")\n";
    }
    *out = dup_string(os.str());
    return NIAD_OK;
  });
}

}  // extern "C"
