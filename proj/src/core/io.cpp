/*
 * (C) Copyright 2026 NIAD toolkit developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "io.hpp"

#include <json.hpp>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace niad {

using nlohmann::json;

namespace {

std::vector<std::vector<std::string>> split_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    rows.push_back(std::move(fields));
  }
  return rows;
}

int parse_cell(const std::string& s, const std::string& origin, size_t line, size_t col) {
  std::string t = s;
  t.erase(0, t.find_first_not_of(" \t"));
  t.erase(t.find_last_not_of(" \t") + 1);
  if (t == "0") return 0;
  if (t == "1") return 1;
  throw ParseError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                   ": expected 0 or 1, got '" + s + "'");
}

Link link_from_string(const std::string& s) {
  if (s == "dina" || s == "DINA") return Link::DINA;
  if (s == "dino" || s == "DINO") return Link::DINO;
  throw ParseError("unknown link: " + s);
}

PriorVariant variant_from_string(const std::string& s) {
  if (s == "saturated") return PriorVariant::Saturated;
  if (s == "independent") return PriorVariant::Independent;
  if (s == "higher_order") return PriorVariant::HigherOrder;
  if (s == "restricted_higher_order") return PriorVariant::RestrictedHigherOrder;
  throw ParseError("unknown prior variant: " + s);
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

QMatrix parse_qmatrix_csv(const std::string& text, const std::string& origin, bool has_header,
                          std::vector<std::string>* attribute_names) {
  auto rows = split_csv(text);
  size_t first = 0;
  if (has_header) {
    if (rows.empty()) throw ParseError(origin + ":1:1: missing header row");
    if (attribute_names) *attribute_names = rows[0];
    first = 1;
  }
  if (rows.size() <= first) throw ParseError(origin + ": no data rows");
  size_t k = rows[first].size();
  std::vector<int> entries;
  for (size_t r = first; r < rows.size(); ++r) {
    if (rows[r].size() != k)
      throw ParseError(origin + ":" + std::to_string(r + 1) + ":1: expected " +
                       std::to_string(k) + " fields, got " + std::to_string(rows[r].size()));
    for (size_t c = 0; c < k; ++c) entries.push_back(parse_cell(rows[r][c], origin, r + 1, c + 1));
  }
  return QMatrix(static_cast<int>(rows.size() - first), static_cast<int>(k), entries);
}

QMatrix load_qmatrix_csv(const std::string& path, bool has_header,
                         std::vector<std::string>* attribute_names) {
  return parse_qmatrix_csv(read_file(path), path, has_header, attribute_names);
}

BinaryMatrix parse_binary_csv(const std::string& text, const std::string& origin) {
  auto rows = split_csv(text);
  if (rows.empty()) throw ParseError(origin + ": empty file");
  size_t cols = rows[0].size();
  BinaryMatrix m = BinaryMatrix::zeros(static_cast<int>(rows.size()), static_cast<int>(cols));
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols)
      throw ParseError(origin + ":" + std::to_string(r + 1) + ":1: ragged row");
    for (size_t c = 0; c < cols; ++c)
      m.set(static_cast<int>(r), static_cast<int>(c),
            static_cast<std::uint8_t>(parse_cell(rows[r][c], origin, r + 1, c + 1)));
  }
  return m;
}

BinaryMatrix load_binary_csv(const std::string& path) {
  return parse_binary_csv(read_file(path), path);
}

std::string binary_to_csv(const BinaryMatrix& m) {
  std::string out;
  out.reserve(static_cast<size_t>(m.rows) * (2 * m.cols));
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) {
      if (j) out += ',';
      out += static_cast<char>('0' + m.at(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string partition_to_json(const Partition& partition) {
  json arr = json::array();
  for (const auto& c : partition.classes) {
    json members = json::array();
    for (Profile m : c.members) members.push_back(profile_to_string(m));
    arr.push_back({{"min_rep", profile_to_string(c.minimal_representative)},
                   {"members", members},
                   {"ideal", bitvec_to_string(c.ideal)},
                   {"delta", profile_to_string(c.delta)}});
  }
  return arr.dump(2) + "\n";
}

std::string partition_table(const Partition& partition, const std::vector<double>* nu_class) {
  std::ostringstream out;
  out << "class      size  delta";
  if (nu_class) out << "      nu";
  out << "\n";
  for (int c = 0; c < partition.num_classes(); ++c) {
    const auto& cls = partition.classes[static_cast<size_t>(c)];
    char buf[64];
    std::snprintf(buf, sizeof buf, "[%s]  %4zu  %s",
                  profile_to_string(cls.minimal_representative).c_str(), cls.members.size(),
                  profile_to_string(cls.delta).c_str());
    out << buf;
    if (nu_class) {
      std::snprintf(buf, sizeof buf, "  %6.2f", (*nu_class)[static_cast<size_t>(c)]);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

std::string fit_to_json(const FitResult& fit) {
  json j;
  j["variant"] = prior_variant_name(fit.spec.prior.variant);
  j["link"] = fit.spec.link == Link::DINA ? "dina" : "dino";
  j["loglik"] = fit.loglik;
  j["n_params"] = fit.n_params;
  j["n_params_unreduced"] = fit.n_params_unreduced;
  j["aic"] = fit.aic;
  j["bic"] = fit.bic;
  j["converged"] = fit.converged;
  j["degenerate"] = fit.degenerate;
  j["n_iterations"] = fit.n_iterations;
  j["restart_logliks"] = fit.restart_logliks;
  j["slip"] = fit.spec.items.slip;
  j["guess"] = fit.spec.items.guess;
  std::vector<double> nu = prior_class_probs(fit.spec.prior, fit.spec.partition);
  json nu_by_class = json::object();
  for (int c = 0; c < fit.spec.partition.num_classes(); ++c)
    nu_by_class[profile_to_string(
        fit.spec.partition.classes[static_cast<size_t>(c)].minimal_representative)] =
        nu[static_cast<size_t>(c)];
  j["nu_by_class"] = nu_by_class;
  if (fit.spec.prior.variant != PriorVariant::Saturated) {
    j["prior_b"] = fit.spec.prior.b;
    if (!fit.spec.prior.a.empty()) j["prior_a"] = fit.spec.prior.a;
  }
  return j.dump(2) + "\n";
}

ModelSpec model_from_fit_json(const QMatrix& q, const std::string& text, Link link) {
  json j = json::parse(text);
  Partition partition = make_partition(q, j.contains("link") && j["link"] == "dino"
                                              ? Link::DINO
                                              : link);
  ModelSpec spec{q, std::move(partition), ItemParams{}, PriorSpec{},
                 j.contains("link") && j["link"] == "dino" ? Link::DINO : link};
  spec.items.slip = j.at("slip").get<std::vector<double>>();
  spec.items.guess = j.at("guess").get<std::vector<double>>();
  PriorVariant v = variant_from_string(j.at("variant").get<std::string>());
  if (v == PriorVariant::Saturated) {
    std::vector<double> nu(static_cast<size_t>(spec.partition.num_classes()), 0.0);
    const auto& by_class = j.at("nu_by_class");
    double total = 0;
    for (int c = 0; c < spec.partition.num_classes(); ++c) {
      std::string key = profile_to_string(
          spec.partition.classes[static_cast<size_t>(c)].minimal_representative);
      nu[static_cast<size_t>(c)] = by_class.at(key).get<double>();
      total += nu[static_cast<size_t>(c)];
    }
    for (double& x : nu) x /= total;  // absorb serialization rounding
    spec.prior = PriorSpec::saturated(std::move(nu));
  } else {
    spec.prior.variant = v;
    spec.prior.b = j.at("prior_b").get<std::vector<double>>();
    if (j.contains("prior_a")) spec.prior.a = j["prior_a"].get<std::vector<double>>();
  }
  spec.validate();
  return spec;
}

ItemParams items_from_json(const std::string& text, int items) {
  json j = json::parse(text);
  ItemParams p;
  p.slip = j.at("slip").get<std::vector<double>>();
  p.guess = j.at("guess").get<std::vector<double>>();
  if (p.items() != items) throw ParseError("item parameter length != J");
  p.validate();
  return p;
}

std::string items_to_json(const ItemParams& items) {
  json j;
  j["slip"] = items.slip;
  j["guess"] = items.guess;
  return j.dump(2) + "\n";
}

std::string scenario_to_json(const Scenario& sc) {
  json j;
  j["name"] = sc.name;
  j["n"] = sc.n;
  j["seed"] = sc.seed;
  j["link"] = sc.link == Link::DINA ? "dina" : "dino";
  j["slip"] = sc.items.slip;
  j["guess"] = sc.items.guess;
  j["profile_probs"] = sc.profile_probs;
  j["normalization_adjustment"] = sc.normalization_adjustment;
  json q = json::array();
  for (int r = 0; r < sc.q.items(); ++r) {
    std::string row;
    for (int k = 0; k < sc.q.attributes(); ++k) row += sc.q.entry(r, k) ? '1' : '0';
    q.push_back(row);
  }
  j["q"] = q;
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text, const std::string& q_dir) {
  json j = json::parse(text);
  QMatrix q = [&] {
    if (j.contains("q_csv")) {
      std::filesystem::path p = j["q_csv"].get<std::string>();
      if (p.is_relative()) p = std::filesystem::path(q_dir) / p;
      return load_qmatrix_csv(p.string());
    }
    const auto& rows = j.at("q");
    std::vector<int> entries;
    size_t k = rows.at(0).get<std::string>().size();
    for (const auto& r : rows) {
      std::string s = r.get<std::string>();
      if (s.size() != k) throw ParseError("ragged q rows in scenario");
      for (char c : s) entries.push_back(c - '0');
    }
    return QMatrix(static_cast<int>(rows.size()), static_cast<int>(k), entries);
  }();
  ItemParams items;
  items.slip = j.at("slip").get<std::vector<double>>();
  items.guess = j.at("guess").get<std::vector<double>>();
  std::vector<double> probs;
  if (j.contains("profile_probs")) {
    probs = j["profile_probs"].get<std::vector<double>>();
  } else if (j.contains("prior")) {
    const auto& pj = j["prior"];
    PriorSpec prior;
    prior.variant = variant_from_string(pj.at("variant").get<std::string>());
    prior.b = pj.at("b").get<std::vector<double>>();
    if (pj.contains("a")) prior.a = pj["a"].get<std::vector<double>>();
    probs = prior_profile_probs(prior, q.attributes());
  } else {
    throw ParseError("scenario needs profile_probs or prior");
  }
  return make_scenario(j.value("name", std::string("scenario")), std::move(q), std::move(items),
                       std::move(probs), j.at("n").get<int>(),
                       j.value("seed", std::uint64_t{0}),
                       link_from_string(j.value("link", std::string("dina"))));
}

std::string zeta_to_json(const ZetaReport& report) {
  json j = json::object();
  for (size_t k = 0; k < report.zeta.size(); ++k) j[std::to_string(k + 1)] = report.zeta[k];
  return j.dump(2) + "\n";
}

std::string classification_to_csv(const std::vector<Decision>& decisions,
                                  const std::vector<MasteryBounds>& bounds) {
  if (decisions.size() != bounds.size())
    throw std::invalid_argument("decision/bounds count mismatch");
  std::ostringstream out;
  size_t k = decisions.empty() ? 0 : decisions[0].attr.size();
  out << "id";
  for (size_t a = 1; a <= k; ++a)
    out << ",decision_" << a << ",p_min_" << a << ",p_max_" << a;
  out << "\n";
  char buf[32];
  for (size_t i = 0; i < decisions.size(); ++i) {
    out << (i + 1);
    std::string d = decisions[i].to_string();
    for (size_t a = 0; a < k; ++a) {
      std::snprintf(buf, sizeof buf, ",%c,%.4f,%.4f", d[a], bounds[i].p_min[a],
                    bounds[i].p_max[a]);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

std::string tmatrix_to_csv(const TMatrix& t) {
  std::ostringstream out;
  const std::uint32_t rows = 1u << t.items;
  for (std::uint32_t x = 0; x < rows; ++x) {
    std::string pat(static_cast<size_t>(t.items), '0');
    for (int j = 0; j < t.items; ++j)
      if ((x >> (t.items - 1 - j)) & 1u) pat[static_cast<size_t>(j)] = '1';
    out << pat;
    for (int c = 0; c < t.num_classes; ++c) out << ',' << t.at(x, c);
    out << "\n";
  }
  return out.str();
}

}  // namespace niad
