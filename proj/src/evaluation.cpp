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

#include "entlearn/evaluation.hpp"

#include <cmath>
#include <fstream>

#include "entlearn/error.hpp"

namespace entlearn::cli {
namespace {

std::string number(double v) { return std::isfinite(v) ? format_double(v) : std::string("nan"); }
std::string number(const std::optional<double>& v) { return v ? number(*v) : std::string("nan"); }

struct CsvFile {
  std::filesystem::path path;
  std::string text;

  void write() const { write_text_file(path, text); }
};

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const std::string& suffix) {
  return prefix.parent_path() / (prefix.filename().string() + suffix);
}

}  // namespace

double rmse(std::span<const double> truth, std::span<const double> predicted) {
  if (truth.size() != predicted.size()) throw ValidationError("rmse inputs differ in length");
  if (truth.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) sum += (truth[k] - predicted[k]) * (truth[k] - predicted[k]);
  return std::sqrt(sum / static_cast<double>(truth.size()));
}

double max_abs_error(std::span<const double> truth, std::span<const double> predicted) {
  if (truth.size() != predicted.size()) throw ValidationError("max_abs_error inputs differ in length");
  double worst = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) worst = std::max(worst, std::abs(truth[k] - predicted[k]));
  return worst;
}

std::optional<double> pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("pearson_r inputs differ in length");
  if (x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

ReferenceTargets reference_from_dataset(const datagen::Dataset& dataset) {
  ReferenceTargets out;
  out.reserve(dataset.samples.size());
  for (const auto& s : dataset.samples) out.push_back(s.targets);
  return out;
}

ReferenceTargets reference_from_oracle(const neural::PredictionSet& predictions) {
  ReferenceTargets out;
  out.reserve(predictions.predictions.size());
  for (const auto& p : predictions.predictions) {
    out.push_back(datagen::regenerate_sample(predictions.dataset, p.meta).targets);
  }
  return out;
}

EvaluationReport evaluate_predictions(const neural::PredictionSet& predictions, const ReferenceTargets& reference) {
  const auto& header = predictions.dataset;
  if (reference.size() != predictions.predictions.size()) {
    throw ValidationError("prediction count " + std::to_string(predictions.predictions.size()) +
                          " does not match reference count " + std::to_string(reference.size()));
  }
  if (predictions.output_dim != header.target_dim) {
    throw ValidationError("prediction width does not match the dataset target_dim");
  }
  for (const auto& r : reference) {
    if (static_cast<int>(r.size()) != header.target_dim) throw ValidationError("reference target width mismatch");
  }
  for (const auto& p : predictions.predictions) {
    if (static_cast<int>(p.values.size()) != header.target_dim) throw ValidationError("prediction width mismatch");
  }

  const std::size_t m = header.metric_specs.size();
  const bool dynamic = header.kind == datagen::DatasetKind::Dynamic;
  const std::size_t times = dynamic ? static_cast<std::size_t>(header.grid->k_out) : 1;

  EvaluationReport report;
  report.kind = header.kind;
  report.n_samples = reference.size();
  for (std::size_t s = 0; s < reference.size(); ++s) {
    const auto& pred = predictions.predictions[s];
    std::optional<double> sweep_value;
    if (header.kind == datagen::DatasetKind::Sweep && pred.meta.contains("sweep_value")) {
      sweep_value = pred.meta["sweep_value"].get<double>();
    }
    for (std::size_t k = 0; k < times; ++k) {
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t slot = k * m + j;
        ResidualRow row{s, j, sweep_value, reference[s][slot], pred.values[slot]};
        if (dynamic) row.position = header.grid->target_time(static_cast<int>(k) + 1);
        report.residuals.push_back(row);
      }
    }
  }

  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> truth, predicted, truth_train, pred_train, truth_unseen, pred_unseen;
    for (const auto& row : report.residuals) {
      if (row.metric != j) continue;
      truth.push_back(row.truth);
      predicted.push_back(row.predicted);
      if (dynamic) {
        const bool in_train = *row.position <= header.grid->t_train;
        (in_train ? truth_train : truth_unseen).push_back(row.truth);
        (in_train ? pred_train : pred_unseen).push_back(row.predicted);
      }
    }
    MetricReport mr;
    mr.label = header.metric_specs[j].label();
    mr.n_values = truth.size();
    mr.rmse = rmse(truth, predicted);
    mr.pearson = pearson_r(truth, predicted);
    mr.max_abs_error = max_abs_error(truth, predicted);
    if (dynamic) {
      if (!truth_train.empty()) mr.rmse_training_window = rmse(truth_train, pred_train);
      if (!truth_unseen.empty()) mr.rmse_unseen_window = rmse(truth_unseen, pred_unseen);
    }
    report.metrics.push_back(std::move(mr));
  }
  return report;
}

std::vector<std::filesystem::path> write_evaluation_csvs(const EvaluationReport& report,
                                                         const neural::PredictionSet& predictions,
                                                         const std::filesystem::path& prefix) {
  const auto& header = predictions.dataset;
  std::vector<CsvFile> files;

  CsvFile summary{with_suffix(prefix, "_summary.csv"),
                  "metric,n,rmse,pearson_r,max_abs_error,rmse_training_window,rmse_unseen_window\n"};
  for (const auto& mr : report.metrics) {
    summary.text += mr.label + "," + std::to_string(mr.n_values) + "," + number(mr.rmse) + "," + number(mr.pearson) +
                    "," + number(mr.max_abs_error) + "," + number(mr.rmse_training_window) + "," +
                    number(mr.rmse_unseen_window) + "\n";
  }
  files.push_back(std::move(summary));

  CsvFile residuals{with_suffix(prefix, "_residuals.csv"), "sample,metric,position,true,predicted,residual\n"};
  for (const auto& r : report.residuals) {
    residuals.text += std::to_string(r.sample) + "," + std::to_string(r.metric) + "," + number(r.position) + "," +
                      number(r.truth) + "," + number(r.predicted) + "," + number(r.predicted - r.truth) + "\n";
  }
  files.push_back(std::move(residuals));

  for (std::size_t j = 0; j < report.metrics.size(); ++j) {
    const auto& label = report.metrics[j].label;
    CsvFile scatter{with_suffix(prefix, "_scatter_" + label + ".csv"), "true,predicted\n"};
    for (const auto& r : report.residuals) {
      if (r.metric == j) scatter.text += number(r.truth) + "," + number(r.predicted) + "\n";
    }
    files.push_back(std::move(scatter));

    if (report.kind == datagen::DatasetKind::Sweep) {
      CsvFile sweep{with_suffix(prefix, "_sweep_" + label + ".csv"), "sweep_value,true,predicted\n"};
      for (const auto& r : report.residuals) {
        if (r.metric == j) sweep.text += number(r.position) + "," + number(r.truth) + "," + number(r.predicted) + "\n";
      }
      files.push_back(std::move(sweep));
    }
    if (report.kind == datagen::DatasetKind::Dynamic) {
      CsvFile dyn{with_suffix(prefix, "_dynamics_" + label + ".csv"), "sample,J,g,t,true,predicted,training_window\n"};
      for (const auto& r : report.residuals) {
        if (r.metric != j) continue;
        const auto& meta = predictions.predictions[r.sample].meta;
        dyn.text += std::to_string(r.sample) + "," + number(meta.value("J", std::nan(""))) + "," +
                    number(meta.value("g", std::nan(""))) + "," + number(r.position) + "," + number(r.truth) + "," +
                    number(r.predicted) + "," + (*r.position <= header.grid->t_train ? "1" : "0") + "\n";
      }
      files.push_back(std::move(dyn));
    }
  }

  std::vector<std::filesystem::path> written;
  for (const auto& f : files) {
    f.write();
    written.push_back(f.path);
  }
  return written;
}

}  // namespace entlearn::cli
