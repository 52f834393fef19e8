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

// Acceptance suite: one PASS/FAIL line per criterion. Datasets, checkpoints
// and evaluation tables are kept under the work directory for inspection.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <optional>

#include "CLI11.hpp"
#include "entlearn/datagen.hpp"
#include "entlearn/entmetrics.hpp"
#include "entlearn/evaluation.hpp"
#include "entlearn/neural.hpp"
#include "oracle.hpp"

namespace fs = std::filesystem;
using namespace entlearn;
using entmetrics::MetricSpec;
using entmetrics::SubsystemSpec;

namespace {

constexpr int kQubits = 4;
constexpr std::size_t kStaticTrain = 20000;
constexpr std::size_t kStaticTest = 500;
constexpr std::size_t kDynamicTrain = 20000;
constexpr std::uint64_t kStaticTrainSeed = 101;
constexpr std::uint64_t kStaticTestSeed = 202;
constexpr std::uint64_t kDynamicTrainSeed = 303;

neural::TrainConfig static_train_config() {
  neural::TrainConfig c;
  c.learning_rate = 1e-3;
  c.batch_size = 128;
  c.max_epochs = 60;
  c.validation_fraction = 0.05;
  c.patience = 20;
  c.seed = 7;
  return c;
}

neural::TrainConfig dynamic_train_config() {
  neural::TrainConfig c;
  c.learning_rate = 1e-3;
  c.batch_size = 128;
  c.max_epochs = 40;
  c.validation_fraction = 0.05;
  c.patience = 10;
  c.seed = 8;
  return c;
}

std::vector<MetricSpec> static_metrics() { return {MetricSpec::parse("renyi:2:1,2"), MetricSpec::parse("pt:3:1:2")}; }

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Shared artifacts are built lazily so criteria can run independently.
class Workspace {
 public:
  explicit Workspace(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  const datagen::Dataset& static_train() {
    if (!static_train_) static_train_ = build(static_train_config_data(kStaticTrain, kStaticTrainSeed), "static_train.jsonl");
    return *static_train_;
  }
  const datagen::Dataset& static_test() {
    if (!static_test_) static_test_ = build(static_train_config_data(kStaticTest, kStaticTestSeed), "static_test.jsonl");
    return *static_test_;
  }
  const neural::ModelCheckpoint& static_model() {
    if (!static_model_) {
      const auto start = Clock::now();
      const auto& ds = static_train();
      auto result = neural::train(ds, neural::ArchDescriptor::for_dataset(ds.header), static_train_config());
      static_train_seconds_ = seconds_since(start);
      neural::save_checkpoint(path("static_model.json"), result.checkpoint);
      write_text_file(path("static_model.log.csv"), neural::format_training_log(result.log));
      static_model_ = std::move(result.checkpoint);
    }
    return *static_model_;
  }
  double static_train_seconds() const { return static_train_seconds_; }

  const datagen::Dataset& dynamic_train() {
    if (!dynamic_train_) {
      datagen::DynamicConfig c = dynamic_config();
      c.n_samples = kDynamicTrain;
      c.seed = kDynamicTrainSeed;
      datagen::generate_dynamic_dataset(c, path("dynamic_train.jsonl"));
      dynamic_train_ = datagen::read_dataset(path("dynamic_train.jsonl"));
    }
    return *dynamic_train_;
  }
  const neural::ModelCheckpoint& dynamic_model() {
    if (!dynamic_model_) {
      const auto start = Clock::now();
      const auto& ds = dynamic_train();
      auto result = neural::train(ds, neural::ArchDescriptor::for_dataset(ds.header), dynamic_train_config());
      dynamic_train_seconds_ = seconds_since(start);
      neural::save_checkpoint(path("dynamic_model.json"), result.checkpoint);
      write_text_file(path("dynamic_model.log.csv"), neural::format_training_log(result.log));
      dynamic_model_ = std::move(result.checkpoint);
    }
    return *dynamic_model_;
  }
  double dynamic_train_seconds() const { return dynamic_train_seconds_; }

  static datagen::DynamicConfig dynamic_config() {
    datagen::DynamicConfig c;
    c.n_qubits = kQubits;
    c.metric_specs = static_metrics();
    return c;
  }

  static datagen::StaticConfig static_train_config_data(std::size_t n, std::uint64_t seed) {
    return datagen::StaticConfig{kQubits, n, static_metrics(), seed};
  }

 private:
  datagen::Dataset build(const datagen::StaticConfig& c, const std::string& name) {
    datagen::generate_static_dataset(c, path(name));
    return datagen::read_dataset(path(name));
  }

  fs::path dir_;
  std::optional<datagen::Dataset> static_train_, static_test_, dynamic_train_;
  std::optional<neural::ModelCheckpoint> static_model_, dynamic_model_;
  double static_train_seconds_ = 0.0, dynamic_train_seconds_ = 0.0;
};

std::vector<int> random_subset(int n, std::mt19937_64& rng, const std::set<int>& exclude = {}) {
  std::vector<int> pool;
  for (int q = 1; q <= n; ++q) {
    if (!exclude.count(q)) pool.push_back(q);
  }
  std::shuffle(pool.begin(), pool.end(), rng);
  std::uniform_int_distribution<std::size_t> size(1, pool.size());
  std::vector<int> out(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size(rng)));
  std::sort(out.begin(), out.end());
  return out;
}

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  std::size_t compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 3;
    const oracle::CVec psi = oracle::random_state(1 << n, rng);
    const oracle::CMat rho = oracle::outer(psi);
    const auto region = random_subset(n, rng);
    const auto a = random_subset(n - 1, rng);
    const std::set<int> used(a.begin(), a.end());
    const auto b = random_subset(n, rng, used);
    const auto c = random_subset(n, rng);

    std::vector<MetricSpec> specs{MetricSpec::renyi(2, SubsystemSpec(region)), MetricSpec::renyi(3, SubsystemSpec(region))};
    for (int order : {1, 2, 3}) specs.push_back(MetricSpec::pt_moment(order, SubsystemSpec(a), SubsystemSpec(b)));
    specs.push_back(MetricSpec::coherence(SubsystemSpec(c)));
    const auto got = entmetrics::evaluate_metrics(qcore::StateVector(n, psi), specs);

    const oracle::CMat reduced = oracle::partial_trace(rho, n, region);
    std::vector<double> ref{oracle::renyi(reduced, 2), oracle::renyi(reduced, 3)};
    for (int order : {1, 2, 3}) ref.push_back(oracle::pt_moment(rho, n, a, b, order));
    ref.push_back(oracle::coherence(oracle::partial_trace(rho, n, c)));
    for (std::size_t k = 0; k < ref.size(); ++k) {
      worst = std::max(worst, std::abs(got[k] - ref[k]));
      ++compared;
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-9 && elapsed < 60.0, std::to_string(compared) + " values on 200 states, max |diff| " +
                                                fmt(worst) + " (tol 1e-9), " + fmt(elapsed, 3) + " s (limit 60 s)"};
}

Outcome analytic_anchors() {
  qcore::CVector v = qcore::CVector::Zero(4);
  v[0] = v[3] = 1.0 / std::sqrt(2.0);
  const qcore::StateVector bell(2, v);
  const auto values = entmetrics::evaluate_metrics(
      bell, {MetricSpec::parse("renyi:2:1"), MetricSpec::parse("pt:3:1:2"), MetricSpec::parse("coherence:1,2")});
  const double e_s2 = std::abs(values[0] - 1.0), e_p3 = std::abs(values[1] - 0.25), e_c = std::abs(values[2] - 1.0);

  std::mt19937_64 rng(77);
  double worst_p1 = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 2;
    const auto rho = entmetrics::DensityMatrix(n, oracle::random_mixed(1 << n, 1 + trial % (1 << n), rng));
    const auto a = random_subset(n, rng);
    worst_p1 = std::max(worst_p1, std::abs(entmetrics::pt_moment(rho, SubsystemSpec(a), 1) - 1.0));
  }
  const bool pass = e_s2 <= 1e-12 && e_p3 <= 1e-12 && e_c <= 1e-12 && worst_p1 <= 1e-12;
  return {pass, "Bell S2 err " + fmt(e_s2) + ", P3 err " + fmt(e_p3) + ", C err " + fmt(e_c) +
                    "; P1 max err over 100 mixed states " + fmt(worst_p1) + " (tol 1e-12)"};
}

Outcome gradient_suite() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::string where;
  const auto dyn = neural::gradient_check_arch(neural::ModelKind::DynamicLstm);
  for (auto kind : {neural::ModelKind::StaticFcnn, neural::ModelKind::DynamicLstm}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto r = neural::gradient_check(neural::gradient_check_arch(kind), seed);
      if (r.max_relative_error > worst) {
        worst = r.max_relative_error;
        where = neural::to_string(kind) + "/" + r.worst_parameter;
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {worst < 1e-5 && elapsed < 120.0 && dyn.steps == 5,
          "20 checks (2 archs x 10 seeds, LSTM S=" + std::to_string(dyn.steps) + "), max rel err " + fmt(worst) +
              " at " + where + " (tol 1e-5), " + fmt(elapsed, 3) + " s (limit 120 s)"};
}

cli::EvaluationReport evaluate(const neural::ModelCheckpoint& model, const datagen::Dataset& ds, const fs::path& prefix) {
  const auto preds = neural::predict(model, ds);
  const auto report = cli::evaluate_predictions(preds, cli::reference_from_dataset(ds));
  cli::write_evaluation_csvs(report, preds, prefix);
  return report;
}

Outcome static_learning(Workspace& ws) {
  const auto& model = ws.static_model();
  const auto report = evaluate(model, ws.static_test(), ws.path("static_test_eval"));
  const auto& s2 = report.metrics[0];
  const auto& p3 = report.metrics[1];
  const double r = s2.pearson.value_or(-1.0);
  const bool pass = r >= 0.95 && s2.rmse <= 0.08 && p3.rmse <= 0.05 && ws.static_train_seconds() < 1800.0;
  return {pass, "S2(A=1,2) r " + fmt(r) + " (>= 0.95), rmse " + fmt(s2.rmse) + " (<= 0.08); P3(A=1,B=2) rmse " +
                    fmt(p3.rmse) + " (<= 0.05); " + std::to_string(model.training.epochs_run) + " epochs in " +
                    fmt(ws.static_train_seconds(), 4) + " s (target 1800 s)"};
}

// Crossing estimate between adjacent sweep points whose ground states lie in
// different magnetization sectors: intersect E_a + M_a (h - h_a) lines, with
// M = dE/dh = sum_i <Z_i> read from the stored inputs.
std::vector<double> level_crossings(const datagen::Dataset& sweep) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < sweep.samples.size(); ++k) {
    const auto& lo = sweep.samples[k];
    const auto& hi = sweep.samples[k + 1];
    double m_lo = 0.0, m_hi = 0.0;
    for (int q = 0; q < kQubits; ++q) {
      m_lo += lo.inputs[static_cast<std::size_t>(3 * q + 2)];
      m_hi += hi.inputs[static_cast<std::size_t>(3 * q + 2)];
    }
    if (std::abs(m_lo - m_hi) < 0.5) continue;
    const double h_lo = lo.meta["sweep_value"].get<double>(), h_hi = hi.meta["sweep_value"].get<double>();
    const double e_lo = lo.meta["energy"].get<double>(), e_hi = hi.meta["energy"].get<double>();
    out.push_back(((e_hi - m_hi * h_hi) - (e_lo - m_lo * h_lo)) / (m_lo - m_hi));
  }
  return out;
}

Outcome sweep_physics(Workspace& ws) {
  std::string detail;
  bool pass = true;

  datagen::SweepConfig xxz;
  xxz.metric_specs = static_metrics();
  datagen::generate_ground_state_sweep(xxz, ws.path("sweep_xxz.jsonl"));
  const auto xxz_ds = datagen::read_dataset(ws.path("sweep_xxz.jsonl"));
  std::size_t jump_at = 0;
  double biggest = -1.0;
  for (std::size_t k = 0; k + 1 < xxz_ds.samples.size(); ++k) {
    const double jump = std::abs(xxz_ds.samples[k + 1].targets[0] - xxz_ds.samples[k].targets[0]);
    if (jump > biggest) {
      biggest = jump;
      jump_at = k;
    }
  }
  const double d_lo = xxz_ds.samples[jump_at].meta["sweep_value"].get<double>();
  const double d_hi = xxz_ds.samples[jump_at + 1].meta["sweep_value"].get<double>();
  const bool kink = d_lo <= -0.5 && -0.5 <= d_hi;
  pass = pass && kink;
  detail += "XXZ largest S2 jump " + fmt(biggest) + " on [" + fmt(d_lo) + ", " + fmt(d_hi) + "]";

  datagen::SweepConfig xx;
  xx.sweep.model = datagen::SweepModel::XX;
  xx.sweep.coupling = -0.3;
  xx.metric_specs = static_metrics();
  datagen::generate_ground_state_sweep(xx, ws.path("sweep_xx.jsonl"));
  const auto xx_ds = datagen::read_dataset(ws.path("sweep_xx.jsonl"));
  const auto crossings = level_crossings(xx_ds);
  double worst_offset = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const double expected = 2.0 * -0.3 * std::cos(k * std::numbers::pi / 5.0);
    double nearest = 1e9;
    for (double c : crossings) nearest = std::min(nearest, std::abs(c - expected));
    worst_offset = std::max(worst_offset, nearest);
  }
  const bool crossings_ok = crossings.size() == 4 && worst_offset <= 0.04;
  pass = pass && crossings_ok;
  detail += "; XX " + std::to_string(crossings.size()) + " crossings, max offset from 2J cos(k pi/5) " +
            fmt(worst_offset) + " (tol 0.04)";

  const auto& model = ws.static_model();
  double worst_rmse = 0.0;
  for (const auto& [name, ds] : {std::pair<std::string, const datagen::Dataset*>{"xxz", &xxz_ds}, {"xx", &xx_ds}}) {
    const auto report = evaluate(model, *ds, ws.path("sweep_" + name + "_eval"));
    for (const auto& m : report.metrics) {
      worst_rmse = std::max(worst_rmse, m.rmse);
      detail += "; " + name + " " + m.label + " rmse " + fmt(m.rmse);
    }
  }
  pass = pass && worst_rmse <= 0.1;
  detail += " (network tol 0.1)";
  return {pass, detail};
}

double amplitude(const std::vector<double>& values, std::size_t metric, std::size_t m) {
  double lo = 1e300, hi = -1e300;
  for (std::size_t k = metric; k < values.size(); k += m) {
    lo = std::min(lo, values[k]);
    hi = std::max(hi, values[k]);
  }
  return hi - lo;
}

Outcome dynamics_forecasting(Workspace& ws) {
  const auto& model = ws.dynamic_model();

  auto test_config = Workspace::dynamic_config();
  test_config.fixed_parameters = datagen::field_grid(-0.5, -1.0, 0.0, 20);
  datagen::generate_dynamic_dataset(test_config, ws.path("dynamic_test.jsonl"));
  const auto test = datagen::read_dataset(ws.path("dynamic_test.jsonl"));
  const auto report = evaluate(model, test, ws.path("dynamic_test_eval"));
  const auto& s2 = report.metrics[0];
  const double unseen = s2.rmse_unseen_window.value_or(1e9);
  const double seen = s2.rmse_training_window.value_or(1e9);

  auto dqpt_config = Workspace::dynamic_config();
  dqpt_config.fixed_parameters = {{-0.5, -0.75}, {-0.5, -0.3}};
  datagen::generate_dynamic_dataset(dqpt_config, ws.path("dynamic_dqpt.jsonl"));
  const auto dqpt = datagen::read_dataset(ws.path("dynamic_dqpt.jsonl"));
  evaluate(model, dqpt, ws.path("dynamic_dqpt_eval"));
  const auto m = dqpt.header.metric_specs.size();
  const double oracle_strong = amplitude(dqpt.samples[0].targets, 0, m);
  const double oracle_weak = amplitude(dqpt.samples[1].targets, 0, m);
  const double pred_strong = amplitude(neural::predict(model.model, dqpt.samples[0].inputs), 0, m);
  const double pred_weak = amplitude(neural::predict(model.model, dqpt.samples[1].inputs), 0, m);

  const bool pass = unseen <= 0.10 && seen <= 0.05 && oracle_strong > oracle_weak && pred_strong > pred_weak;
  return {pass, "S2(A=1,2) rmse unseen (pi, 2pi] " + fmt(unseen) + " (<= 0.10), training window " + fmt(seen) +
                    " (<= 0.05); amplitude g=-0.75 vs g=-0.3: oracle " + fmt(oracle_strong) + " > " +
                    fmt(oracle_weak) + ", predicted " + fmt(pred_strong) + " > " + fmt(pred_weak) + "; " +
                    std::to_string(model.training.epochs_run) + " epochs in " + fmt(ws.dynamic_train_seconds(), 4) +
                    " s"};
}

Outcome determinism(Workspace& ws) {
  bool pass = true;
  std::string detail;

  ws.static_train();
  datagen::generate_static_dataset(Workspace::static_train_config_data(kStaticTrain, kStaticTrainSeed),
                                   ws.path("static_train_again.jsonl"));
  const bool static_same = slurp(ws.path("static_train.jsonl")) == slurp(ws.path("static_train_again.jsonl"));
  auto dyn = Workspace::dynamic_config();
  dyn.n_samples = 200;
  dyn.seed = kDynamicTrainSeed;
  datagen::generate_dynamic_dataset(dyn, ws.path("det_dynamic_a.jsonl"));
  datagen::generate_dynamic_dataset(dyn, ws.path("det_dynamic_b.jsonl"));
  const bool dynamic_same = slurp(ws.path("det_dynamic_a.jsonl")) == slurp(ws.path("det_dynamic_b.jsonl"));
  datagen::SweepConfig sweep;
  sweep.metric_specs = static_metrics();
  datagen::generate_ground_state_sweep(sweep, ws.path("det_sweep_a.jsonl"));
  datagen::generate_ground_state_sweep(sweep, ws.path("det_sweep_b.jsonl"));
  const bool sweep_same = slurp(ws.path("det_sweep_a.jsonl")) == slurp(ws.path("det_sweep_b.jsonl"));
  pass = static_same && dynamic_same && sweep_same;
  detail += std::string("datasets byte-identical: static ") + (static_same ? "yes" : "NO") + ", dynamic " +
            (dynamic_same ? "yes" : "NO") + ", sweep " + (sweep_same ? "yes" : "NO");

  const auto ds = datagen::read_dataset(ws.path("static_train_again.jsonl"));
  auto arch = neural::ArchDescriptor::for_dataset(ds.header);
  auto config = static_train_config();
  config.max_epochs = 2;
  neural::save_checkpoint(ws.path("det_model_a.json"), neural::train(ds, arch, config).checkpoint);
  neural::save_checkpoint(ws.path("det_model_b.json"), neural::train(ds, arch, config).checkpoint);
  const bool model_same = slurp(ws.path("det_model_a.json")) == slurp(ws.path("det_model_b.json"));
  const auto dyn_ds = datagen::read_dataset(ws.path("det_dynamic_a.jsonl"));
  auto dyn_config = dynamic_train_config();
  dyn_config.max_epochs = 2;
  const auto dyn_arch = neural::ArchDescriptor::for_dataset(dyn_ds.header);
  neural::save_checkpoint(ws.path("det_lstm_a.json"), neural::train(dyn_ds, dyn_arch, dyn_config).checkpoint);
  neural::save_checkpoint(ws.path("det_lstm_b.json"), neural::train(dyn_ds, dyn_arch, dyn_config).checkpoint);
  const bool lstm_same = slurp(ws.path("det_lstm_a.json")) == slurp(ws.path("det_lstm_b.json"));
  pass = pass && model_same && lstm_same;
  detail += std::string("; retrained checkpoints byte-identical: static ") + (model_same ? "yes" : "NO") +
            ", lstm " + (lstm_same ? "yes" : "NO");

  std::size_t mismatches = 0;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& [file, reference] : {std::pair<std::string, std::string>{"det_model_a.json", "static"},
                                        {"det_lstm_a.json", "lstm"}}) {
    const auto saved = neural::load_checkpoint(ws.path(file));
    neural::save_checkpoint(ws.path("reload_" + file), saved);
    const auto loaded = neural::load_checkpoint(ws.path("reload_" + file));
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x(static_cast<std::size_t>(saved.model.arch().total_input_dim()));
      for (double& v : x) v = u(rng);
      if (neural::predict(saved.model, x) != neural::predict(loaded.model, x)) ++mismatches;
    }
  }
  pass = pass && mismatches == 0;
  detail += "; save/load predictions differing on 2x100 random inputs: " + std::to_string(mismatches);
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entlearn acceptance suite"};
  std::string work_dir = (fs::temp_directory_path() / "entlearn_acceptance").string();
  std::vector<int> only;
  app.add_option("--work-dir", work_dir, "Directory for generated datasets, checkpoints and tables");
  app.add_option("--only", only, "Run only these criteria (1-7)");
  CLI11_PARSE(app, argc, argv);

  Workspace ws(work_dir);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"analytic anchors", analytic_anchors},
      {"gradient suite", gradient_suite},
      {"static learning", [&] { return static_learning(ws); }},
      {"sweep physics", [&] { return sweep_physics(ws); }},
      {"dynamics forecasting", [&] { return dynamics_forecasting(ws); }},
      {"determinism and round-trips", [&] { return determinism(ws); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::cout << "criterion " << id << " " << (outcome.pass ? "PASS" : "FAIL") << " " << criteria[i].first << ": "
              << outcome.detail << " [" << fmt(seconds_since(start), 4) << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
