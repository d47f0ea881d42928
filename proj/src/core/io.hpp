/*
 * (C) Copyright 2026 NIAD toolkit developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "classify.hpp"
#include "estimate.hpp"
#include "simulate.hpp"

namespace niad {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// CSV of {0,1} cells. Q-matrix files may carry one header row of attribute
// names when has_header is set.
QMatrix load_qmatrix_csv(const std::string& path, bool has_header = false,
                         std::vector<std::string>* attribute_names = nullptr);
QMatrix parse_qmatrix_csv(const std::string& text, const std::string& origin,
                          bool has_header = false,
                          std::vector<std::string>* attribute_names = nullptr);

BinaryMatrix load_binary_csv(const std::string& path);
BinaryMatrix parse_binary_csv(const std::string& text, const std::string& origin);
std::string binary_to_csv(const BinaryMatrix& m);

std::string partition_to_json(const Partition& partition);
// Text table of classes, sizes and delta vectors; nu column optional.
std::string partition_table(const Partition& partition,
                            const std::vector<double>* nu_class = nullptr);

std::string fit_to_json(const FitResult& fit);
// Rebuilds the fitted model from a fit report; the Q-matrix must match the
// dimensions recorded in the report.
ModelSpec model_from_fit_json(const QMatrix& q, const std::string& json, Link link = Link::DINA);

ItemParams items_from_json(const std::string& json, int items);
std::string items_to_json(const ItemParams& items);

std::string scenario_to_json(const Scenario& sc);
// q_dir resolves a relative "q_csv" file reference inside the scenario.
Scenario scenario_from_json(const std::string& json, const std::string& q_dir = ".");

std::string zeta_to_json(const ZetaReport& report);

std::string classification_to_csv(const std::vector<Decision>& decisions,
                                  const std::vector<MasteryBounds>& bounds);

std::string tmatrix_to_csv(const TMatrix& t);

std::string read_file(const std::string& path);
// Stages to a temporary sibling and renames into place.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace niad
