/*
 * (C) Copyright 2026 NIAD toolkit developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

// Command-line front end over the C API. Outputs are staged to a temp name
// and renamed into place so failed runs leave the output directory untouched.
// Exit codes: 0 success, 2 input error, 3 non-convergence with output.

#include <CLI11.hpp>
#include <niad/niad.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitNonConverged = 3;

struct CliError {
  int code;
  std::string message;
};

void check(niad_status status) {
  if (status != NIAD_OK) throw CliError{kExitInputError, niad_last_error()};
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  niad_string_free(s);
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitInputError, "cannot open " + path};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Staged writes: everything lands in out_dir only when the command succeeds.
class OutputStage {
 public:
  explicit OutputStage(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_))
      throw CliError{kExitInputError, "output directory not writable: " + dir_};
  }

  void add(const std::string& name, const std::string& content) {
    staged_.emplace_back(name, content);
  }

  void commit() {
    for (const auto& [name, content] : staged_) {
      fs::path final_path = fs::path(dir_) / name;
      fs::path tmp = final_path;
      tmp += ".tmp";
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CliError{kExitInputError, "cannot write " + tmp.string()};
        out << content;
        if (!out.flush()) throw CliError{kExitInputError, "write failed: " + tmp.string()};
      }
      fs::rename(tmp, final_path);
      std::cout << "wrote " << final_path.string() << "\n";
    }
    staged_.clear();
  }

 private:
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> staged_;
};

using QHandle = std::unique_ptr<niad_qmatrix, decltype(&niad_qmatrix_free)>;
using PartHandle = std::unique_ptr<niad_partition, decltype(&niad_partition_free)>;
using MatHandle = std::unique_ptr<niad_matrix, decltype(&niad_matrix_free)>;
using ScenHandle = std::unique_ptr<niad_scenario, decltype(&niad_scenario_free)>;
using FitHandle = std::unique_ptr<niad_fit, decltype(&niad_fit_free)>;
using ModelHandle = std::unique_ptr<niad_model, decltype(&niad_model_free)>;
using ClassHandle = std::unique_ptr<niad_classification, decltype(&niad_classification_free)>;

QHandle load_q(const std::string& path, bool header) {
  niad_qmatrix* q = nullptr;
  check(niad_qmatrix_load_csv(path.c_str(), header ? 1 : 0, &q));
  return QHandle(q, &niad_qmatrix_free);
}

MatHandle load_matrix(const std::string& path) {
  niad_matrix* m = nullptr;
  check(niad_matrix_load_csv(path.c_str(), &m));
  return MatHandle(m, &niad_matrix_free);
}

ScenHandle load_scenario(const std::string& name_or_path, int n, std::uint64_t seed) {
  niad_scenario* sc = nullptr;
  if (fs::exists(name_or_path))
    check(niad_scenario_load_json(name_or_path.c_str(), &sc));
  else
    check(niad_scenario_builtin(name_or_path.c_str(), n, seed, &sc));
  return ScenHandle(sc, &niad_scenario_free);
}

struct FitFlags {
  std::string variant = "niad";
  int restarts = 10;
  int max_iter = 2000;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  std::string fixed_items_path;
  bool dino = false;
};

void add_fit_flags(CLI::App* cmd, FitFlags& flags) {
  cmd->add_option("--variant", flags.variant, "niad|ind|ho|rho|all")->capture_default_str();
  cmd->add_option("--restarts", flags.restarts)->capture_default_str();
  cmd->add_option("--max-iter", flags.max_iter)->capture_default_str();
  cmd->add_option("--tol", flags.tol)->capture_default_str();
  cmd->add_option("--seed", flags.seed)->capture_default_str();
  cmd->add_option("--fixed-items", flags.fixed_items_path,
                  "JSON {\"slip\":[...],\"guess\":[...]} held fixed during EM");
  cmd->add_flag("--dino", flags.dino, "use the DINO (disjunctive) link");
}

niad_prior_variant parse_variant(const std::string& v) {
  static const std::map<std::string, niad_prior_variant> names = {
      {"niad", NIAD_PRIOR_SATURATED},
      {"ind", NIAD_PRIOR_INDEPENDENT},
      {"ho", NIAD_PRIOR_HIGHER_ORDER},
      {"rho", NIAD_PRIOR_RESTRICTED_HIGHER_ORDER}};
  auto it = names.find(v);
  if (it == names.end()) throw CliError{kExitInputError, "unknown variant: " + v};
  return it->second;
}

const char* variant_label(niad_prior_variant v) {
  switch (v) {
    case NIAD_PRIOR_SATURATED: return "NIAD";
    case NIAD_PRIOR_INDEPENDENT: return "ind";
    case NIAD_PRIOR_HIGHER_ORDER: return "HO";
    case NIAD_PRIOR_RESTRICTED_HIGHER_ORDER: return "RHO";
  }
  return "?";
}

FitHandle run_fit(const niad_qmatrix* q, const niad_matrix* data, niad_prior_variant variant,
                  const FitFlags& flags, const std::string& fixed_items_json) {
  niad_em_options opts;
  niad_em_options_init(&opts);
  opts.max_iterations = flags.max_iter;
  opts.tolerance = flags.tol;
  opts.restarts = flags.restarts;
  opts.seed = flags.seed;
  if (!fixed_items_json.empty()) opts.fixed_items_json = fixed_items_json.c_str();
  niad_fit* fit = nullptr;
  check(niad_fit_run(q, data, variant, flags.dino ? NIAD_LINK_DINO : NIAD_LINK_DINA, &opts,
                     &fit));
  return FitHandle(fit, &niad_fit_free);
}

int cmd_partition(const std::string& q_path, bool header, const std::string& out_dir) {
  QHandle q = load_q(q_path, header);
  niad_partition* p = nullptr;
  check(niad_partition_build(q.get(), NIAD_LINK_DINA, &p));
  PartHandle part(p, &niad_partition_free);
  char* json = nullptr;
  check(niad_partition_to_json(part.get(), &json));
  char* table = nullptr;
  check(niad_partition_table(part.get(), nullptr, &table));
  std::string table_text = take_string(table);
  OutputStage stage(out_dir);
  stage.add("partition.json", take_string(json));
  stage.add("partition.txt", table_text);
  stage.commit();
  std::cout << niad_partition_num_classes(part.get()) << " equivalence classes over "
            << (1 << niad_qmatrix_attributes(q.get())) << " profiles\n"
            << table_text;
  return kExitOk;
}

int cmd_check(const std::string& q_path, bool header) {
  QHandle q = load_q(q_path, header);
  const int j = niad_qmatrix_items(q.get());
  const int k = niad_qmatrix_attributes(q.get());
  niad_partition* p = nullptr;
  check(niad_partition_build(q.get(), NIAD_LINK_DINA, &p));
  PartHandle part(p, &niad_partition_free);
  std::cout << "Q-matrix: " << j << " items x " << k << " attributes\n";
  std::cout << "complete: " << (niad_qmatrix_is_complete(q.get()) ? "yes" : "no") << "\n";
  std::cout << "equivalence classes: " << niad_partition_num_classes(part.get()) << " of "
            << (1 << k) << " profiles\n";
  if (j <= 20) {
    std::vector<double> slip(static_cast<size_t>(j), 0.2), guess(static_cast<size_t>(j), 0.2);
    int rank = 0, l = 0, ident = 0;
    check(niad_rank_check(q.get(), slip.data(), guess.data(), NIAD_LINK_DINA, &rank, &l,
                          &ident));
    std::cout << "T-matrix rank (generic s=g=0.2): " << rank << " (L = " << l << ") -> "
              << (ident ? "identifiable over classes" : "NOT identifiable") << "\n";
  }
  return kExitOk;
}

int cmd_simulate(const std::string& scenario, int n, std::uint64_t seed,
                 const std::string& out_dir) {
  ScenHandle sc = load_scenario(scenario, n, seed);
  niad_matrix *profiles = nullptr, *responses = nullptr;
  check(niad_scenario_simulate(sc.get(), &profiles, &responses));
  MatHandle prof(profiles, &niad_matrix_free), resp(responses, &niad_matrix_free);
  char* sc_json = nullptr;
  check(niad_scenario_to_json(sc.get(), &sc_json));
  char* truth_csv = nullptr;
  check(niad_matrix_to_csv(prof.get(), &truth_csv));
  char* resp_csv = nullptr;
  check(niad_matrix_to_csv(resp.get(), &resp_csv));
  niad_qmatrix* qraw = nullptr;
  check(niad_scenario_qmatrix(sc.get(), &qraw));
  QHandle q(qraw, &niad_qmatrix_free);
  std::ostringstream q_csv;
  for (int j = 0; j < niad_qmatrix_items(q.get()); ++j) {
    for (int k = 0; k < niad_qmatrix_attributes(q.get()); ++k)
      q_csv << (k ? "," : "") << niad_qmatrix_get(q.get(), j, k);
    q_csv << "\n";
  }
  OutputStage stage(out_dir);
  stage.add("q.csv", q_csv.str());
  stage.add("scenario.json", take_string(sc_json));
  stage.add("truth.csv", take_string(truth_csv));
  stage.add("responses.csv", take_string(resp_csv));
  stage.commit();
  std::cout << "simulated " << niad_matrix_rows(resp.get()) << " respondents x "
            << niad_matrix_cols(resp.get()) << " items\n";
  return kExitOk;
}

int cmd_fit(const std::string& q_path, bool header, const std::string& data_path,
            const FitFlags& flags, const std::string& out_dir) {
  QHandle q = load_q(q_path, header);
  MatHandle data = load_matrix(data_path);
  std::string fixed_json;
  if (!flags.fixed_items_path.empty()) fixed_json = read_text(flags.fixed_items_path);

  std::vector<niad_prior_variant> variants;
  if (flags.variant == "all")
    variants = {NIAD_PRIOR_SATURATED, NIAD_PRIOR_INDEPENDENT, NIAD_PRIOR_HIGHER_ORDER,
                NIAD_PRIOR_RESTRICTED_HIGHER_ORDER};
  else
    variants = {parse_variant(flags.variant)};

  OutputStage stage(out_dir);
  std::ostringstream table;
  table << "variant  n_params       AIC       BIC  converged\n";
  bool all_converged = true;
  for (niad_prior_variant v : variants) {
    FitHandle fit = run_fit(q.get(), data.get(), v, flags, fixed_json);
    char* json = nullptr;
    check(niad_fit_to_json(fit.get(), &json));
    std::string fname = std::string("fit_") + variant_label(v) + ".json";
    stage.add(fname, take_string(json));
    char buf[128];
    std::snprintf(buf, sizeof buf, "%7s  %8d  %8.1f  %8.1f  %s\n", variant_label(v),
                  niad_fit_n_params(fit.get()), niad_fit_aic(fit.get()),
                  niad_fit_bic(fit.get()), niad_fit_converged(fit.get()) ? "yes" : "NO");
    table << buf;
    if (!niad_fit_converged(fit.get())) all_converged = false;
  }
  stage.add("comparison.txt", table.str());
  stage.commit();
  std::cout << table.str();
  if (!all_converged) {
    std::cerr << "warning: EM did not converge for at least one variant\n";
    return kExitNonConverged;
  }
  return kExitOk;
}

int cmd_classify(const std::string& q_path, bool header, const std::string& data_path,
                 const std::string& fit_path, const std::string& truth_path, double cutoff,
                 const FitFlags& flags, const std::string& out_dir) {
  QHandle q = load_q(q_path, header);
  MatHandle data = load_matrix(data_path);
  ModelHandle model(nullptr, &niad_model_free);
  if (!fit_path.empty()) {
    niad_model* m = nullptr;
    check(niad_model_from_fit_json(q.get(), read_text(fit_path).c_str(), &m));
    model.reset(m);
  } else {
    std::string fixed_json;
    if (!flags.fixed_items_path.empty()) fixed_json = read_text(flags.fixed_items_path);
    FitHandle fit = run_fit(q.get(), data.get(), parse_variant(flags.variant), flags,
                            fixed_json);
    niad_model* m = nullptr;
    check(niad_fit_model(fit.get(), &m));
    model.reset(m);
  }
  niad_classification* c = nullptr;
  check(niad_classify_run(model.get(), data.get(), cutoff, &c));
  ClassHandle cls(c, &niad_classification_free);
  char* csv = nullptr;
  check(niad_classification_to_csv(cls.get(), &csv));
  MatHandle truth(nullptr, &niad_matrix_free);
  if (!truth_path.empty()) truth = load_matrix(truth_path);
  char* summary = nullptr;
  check(niad_classification_summary(cls.get(), truth.get(), &summary));
  std::string summary_text = take_string(summary);
  OutputStage stage(out_dir);
  stage.add("classification.csv", take_string(csv));
  stage.add("summary.txt", summary_text);
  stage.commit();
  std::cout << summary_text;
  return kExitOk;
}

int cmd_evaluate(const std::string& q_path, bool header, const std::string& fit_path,
                 bool emit_tmatrix, const std::string& out_dir) {
  QHandle q = load_q(q_path, header);
  niad_model* m = nullptr;
  check(niad_model_from_fit_json(q.get(), read_text(fit_path).c_str(), &m));
  ModelHandle model(m, &niad_model_free);
  char* zeta = nullptr;
  check(niad_zeta_json(model.get(), &zeta));
  char* audit = nullptr;
  check(niad_evaluate_report(model.get(), &audit));
  std::string audit_text = take_string(audit);
  OutputStage stage(out_dir);
  stage.add("zeta.json", take_string(zeta));
  stage.add("audit.txt", audit_text);
  if (emit_tmatrix) {
    char* tm = nullptr;
    check(niad_model_tmatrix_csv(model.get(), &tm));
    stage.add("tmatrix.csv", take_string(tm));
  }
  stage.commit();
  std::cout << audit_text;
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& fit_paths) {
  std::cout << "variant  n_params       AIC       BIC\n";
  for (const std::string& path : fit_paths) {
    std::string text = read_text(path);
    auto grab_num = [&](const std::string& key) {
      auto pos = text.find("\"" + key + "\"");
      if (pos == std::string::npos) throw CliError{kExitInputError, path + ": missing " + key};
      pos = text.find(':', pos);
      return std::stod(text.substr(pos + 1));
    };
    auto grab_str = [&](const std::string& key) {
      auto pos = text.find("\"" + key + "\"");
      if (pos == std::string::npos) throw CliError{kExitInputError, path + ": missing " + key};
      pos = text.find(':', pos);
      auto a = text.find('"', pos), b = text.find('"', a + 1);
      return text.substr(a + 1, b - a - 1);
    };
    char buf[128];
    std::snprintf(buf, sizeof buf, "%7s  %8d  %8.1f  %8.1f\n", grab_str("variant").c_str(),
                  static_cast<int>(grab_num("n_params")), grab_num("aic"), grab_num("bic"));
    std::cout << buf;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Q-matrix identifiability analysis and NIAD-DINA estimation"};
  app.require_subcommand(1);

  std::string q_path, data_path, truth_path, fit_path, scenario, out_dir = ".";
  std::vector<std::string> fit_paths;
  bool header = false, emit_tmatrix = false;
  double cutoff = 0.5;
  int n = 0;
  std::uint64_t seed = 0;
  FitFlags fit_flags;

  auto* partition = app.add_subcommand("partition", "partition the attribute profile space");
  partition->add_option("--q", q_path, "Q-matrix CSV")->required();
  partition->add_flag("--header", header, "Q-matrix CSV has a header row");
  partition->add_option("--out", out_dir);

  auto* chk = app.add_subcommand("check", "validate a Q-matrix and audit identifiability");
  chk->add_option("--q", q_path)->required();
  chk->add_flag("--header", header);

  auto* simulate = app.add_subcommand("simulate", "generate synthetic respondents");
  simulate->add_option("--scenario", scenario, "builtin name or scenario JSON path")
      ->required();
  simulate->add_option("--n", n, "respondent count (0 keeps the scenario default)");
  simulate->add_option("--seed", seed);
  simulate->add_option("--out", out_dir);

  auto* fit = app.add_subcommand("fit", "EM marginal maximum likelihood");
  fit->add_option("--q", q_path)->required();
  fit->add_flag("--header", header);
  fit->add_option("--data", data_path, "responses CSV")->required();
  fit->add_option("--out", out_dir);
  add_fit_flags(fit, fit_flags);

  auto* classify = app.add_subcommand("classify", "three-way attribute classification");
  classify->add_option("--q", q_path)->required();
  classify->add_flag("--header", header);
  classify->add_option("--data", data_path)->required();
  classify->add_option("--fit", fit_path, "fit JSON; omitted -> fit inline");
  classify->add_option("--truth", truth_path, "true profiles CSV for error rates");
  classify->add_option("--cutoff", cutoff)->capture_default_str();
  classify->add_option("--out", out_dir);
  add_fit_flags(classify, fit_flags);

  auto* evaluate = app.add_subcommand("evaluate", "identifiability rates and rank audit");
  evaluate->add_option("--q", q_path)->required();
  evaluate->add_flag("--header", header);
  evaluate->add_option("--fit", fit_path, "fit JSON supplying nu and item parameters")
      ->required();
  evaluate->add_flag("--emit-tmatrix", emit_tmatrix);
  evaluate->add_option("--out", out_dir);

  auto* report = app.add_subcommand("report", "model comparison table from fit JSONs");
  report->add_option("fits", fit_paths, "fit JSON files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (partition->parsed()) return cmd_partition(q_path, header, out_dir);
    if (chk->parsed()) return cmd_check(q_path, header);
    if (simulate->parsed()) return cmd_simulate(scenario, n, seed, out_dir);
    if (fit->parsed()) return cmd_fit(q_path, header, data_path, fit_flags, out_dir);
    if (classify->parsed())
      return cmd_classify(q_path, header, data_path, fit_path, truth_path, cutoff, fit_flags,
                          out_dir);
    if (evaluate->parsed()) return cmd_evaluate(q_path, header, fit_path, emit_tmatrix, out_dir);
    if (report->parsed()) return cmd_report(fit_paths);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
