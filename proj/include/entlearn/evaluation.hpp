// Copyright 2026 The entlearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Accuracy statistics for predictions against exact references, plus the CSV
// tables behind correlation plots, sweep curves and trajectory forecasts.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entlearn/datagen.hpp"
#include "entlearn/neural.hpp"

namespace entlearn::cli {

double rmse(std::span<const double> truth, std::span<const double> predicted);
double max_abs_error(std::span<const double> truth, std::span<const double> predicted);
/// Undefined (nullopt) for fewer than 2 points or zero variance on either side.
std::optional<double> pearson_r(std::span<const double> x, std::span<const double> y);

struct MetricReport {
  std::string label;
  std::size_t n_values = 0;
  double rmse = 0.0;
  std::optional<double> pearson;
  double max_abs_error = 0.0;
  // Dynamic datasets only: split at T_tra (t <= T_tra is the training window).
  std::optional<double> rmse_training_window;
  std::optional<double> rmse_unseen_window;
};

struct ResidualRow {
  std::size_t sample = 0;
  std::size_t metric = 0;
  std::optional<double> position;  // t for dynamics, the sweep value for sweeps
  double truth = 0.0;
  double predicted = 0.0;
};

struct EvaluationReport {
  datagen::DatasetKind kind = datagen::DatasetKind::Static;
  std::size_t n_samples = 0;
  std::vector<MetricReport> metrics;
  std::vector<ResidualRow> residuals;
};

/// One target vector per sample.
using ReferenceTargets = std::vector<std::vector<double>>;

ReferenceTargets reference_from_dataset(const datagen::Dataset& dataset);
/// Recomputes every reference target from the stored sample meta.
ReferenceTargets reference_from_oracle(const neural::PredictionSet& predictions);

EvaluationReport evaluate_predictions(const neural::PredictionSet& predictions, const ReferenceTargets& reference);

/// Writes <prefix>_summary.csv, <prefix>_residuals.csv and per-metric
/// scatter / sweep / dynamics tables. Returns the paths written.
std::vector<std::filesystem::path> write_evaluation_csvs(const EvaluationReport& report,
                                                         const neural::PredictionSet& predictions,
                                                         const std::filesystem::path& prefix);

}  // namespace entlearn::cli
