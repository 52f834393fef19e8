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

#include "entlearn/cli.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>

#include "CLI11.hpp"
#include "entlearn/datagen.hpp"
#include "entlearn/error.hpp"
#include "entlearn/evaluation.hpp"
#include "entlearn/neural.hpp"

namespace entlearn::cli {
namespace {

namespace fs = std::filesystem;
using datagen::DatasetKind;
using entmetrics::MetricSpec;

// Config section name for each command.
const std::map<std::string, std::string> kSections = {
    {"gen-static", "gen_static"}, {"gen-dynamic", "gen_dynamic"}, {"gen-sweep", "gen_sweep"},
    {"train", "train"},           {"predict", "predict"},         {"evaluate", "evaluate"},
    {"oracle", "oracle"},         {"gradcheck", "gradcheck"}};

template <typename T>
T get_or(const Json& section, const char* key, T fallback) {
  if (!section.contains(key) || section[key].is_null()) return fallback;
  try {
    return section[key].get<T>();
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("config field '") + key + "': " + e.what());
  }
}

std::string require_string(const Json& section, const char* key) {
  const auto v = get_or<std::string>(section, key, "");
  if (v.empty()) throw ValidationError(std::string("missing required setting '") + key + "'");
  return v;
}

fs::path require_input(const Json& section, const char* key) {
  fs::path p = require_string(section, key);
  if (!fs::exists(p)) throw IoError("input file not found: " + p.string());
  return p;
}

std::vector<MetricSpec> metrics_from(const Json& section, const std::vector<std::string>& fallback) {
  std::vector<MetricSpec> specs;
  if (section.contains("metrics")) {
    for (const auto& m : section["metrics"]) specs.push_back(entmetrics::metric_from_json(m));
  } else {
    for (const auto& m : fallback) specs.push_back(MetricSpec::parse(m));
  }
  return specs;
}

Json metrics_json(const std::vector<MetricSpec>& specs) {
  Json out = Json::array();
  for (const auto& s : specs) out.push_back(s.to_string());
  return out;
}

void write_resolved(const fs::path& output, const std::string& command, const Json& resolved) {
  write_text_file(fs::path(output.string() + ".config.json"),
                  dump_json(Json{{"command", command}, {kSections.at(command), resolved}}) + "\n");
}

int gen_static(const Json& cfg, std::ostream& out) {
  datagen::StaticConfig c;
  c.n_qubits = get_or(cfg, "n_qubits", 6);
  c.n_samples = get_or<std::size_t>(cfg, "n_samples", 1000);
  c.seed = get_or<std::uint64_t>(cfg, "seed", 0);
  c.metric_specs = metrics_from(cfg, {"renyi:2:1,2,3,4", "pt:3:1,2:3,4"});
  const fs::path output = require_string(cfg, "output");
  datagen::make_header(c);
  const auto n = datagen::generate_static_dataset(c, output);
  write_resolved(output, "gen-static",
                 Json{{"n_qubits", c.n_qubits}, {"n_samples", c.n_samples}, {"seed", c.seed},
                      {"metrics", metrics_json(c.metric_specs)}, {"output", output.string()}});
  out << "gen-static: wrote " << n << " samples (" << c.n_qubits << " qubits) to " << output.string() << "\n";
  return kExitOk;
}

int gen_dynamic(const Json& cfg, std::ostream& out) {
  datagen::DynamicConfig c;
  c.n_qubits = get_or(cfg, "n_qubits", 6);
  c.n_samples = get_or<std::size_t>(cfg, "n_samples", 1000);
  c.seed = get_or<std::uint64_t>(cfg, "seed", 0);
  c.metric_specs = metrics_from(cfg, {"renyi:2:1", "pt:3:1:2,3"});
  c.grid.steps = get_or(cfg, "steps", c.grid.steps);
  c.grid.t_train = get_or(cfg, "t_train", c.grid.t_train);
  c.grid.t_total = get_or(cfg, "t_total", c.grid.t_total);
  c.grid.k_out = get_or(cfg, "k_out", c.grid.k_out);
  c.grid.theta_y = get_or(cfg, "theta_y", c.grid.theta_y);
  c.grid.theta_z = get_or(cfg, "theta_z", c.grid.theta_z);
  Json resolved{{"n_qubits", c.n_qubits}, {"n_samples", c.n_samples}, {"seed", c.seed},
                {"metrics", metrics_json(c.metric_specs)}, {"steps", c.grid.steps},
                {"t_train", c.grid.t_train}, {"t_total", c.grid.t_total}, {"k_out", c.grid.k_out},
                {"theta_y", c.grid.theta_y}, {"theta_z", c.grid.theta_z}};
  if (cfg.contains("fixed_J")) {
    const double coupling = get_or(cfg, "fixed_J", -0.5);
    const double g_start = get_or(cfg, "g_start", -1.0);
    const double g_stop = get_or(cfg, "g_stop", 0.0);
    const int g_count = get_or(cfg, "g_count", 20);
    c.fixed_parameters = datagen::field_grid(coupling, g_start, g_stop, g_count);
    resolved.update(Json{{"fixed_J", coupling}, {"g_start", g_start}, {"g_stop", g_stop}, {"g_count", g_count}});
  }
  const fs::path output = require_string(cfg, "output");
  resolved["output"] = output.string();
  datagen::make_header(c);
  const auto n = datagen::generate_dynamic_dataset(c, output);
  write_resolved(output, "gen-dynamic", resolved);
  out << "gen-dynamic: wrote " << n << " trajectories (" << c.n_qubits << " qubits, S=" << c.grid.steps
      << ", K_out=" << c.grid.k_out << ") to " << output.string() << "\n";
  return kExitOk;
}

int gen_sweep(const Json& cfg, std::ostream& out) {
  datagen::SweepConfig c;
  c.sweep.model = datagen::sweep_model_from_string(get_or<std::string>(cfg, "model", "xxz"));
  c.n_qubits = get_or(cfg, "n_qubits", 4);
  c.sweep.coupling = get_or(cfg, "J", c.sweep.model == datagen::SweepModel::XXZ ? -0.5 : -0.3);
  c.sweep.start = get_or(cfg, "start", -1.0);
  c.sweep.stop = get_or(cfg, "stop", 1.0);
  c.sweep.step = get_or(cfg, "step", 0.04);
  c.metric_specs = metrics_from(cfg, {"renyi:2:1,2", "pt:3:1:2"});
  const fs::path output = require_string(cfg, "output");
  const fs::path csv = get_or<std::string>(cfg, "csv", output.string() + ".csv");
  datagen::make_header(c);
  const auto n = datagen::generate_ground_state_sweep(c, output);

  const auto ds = datagen::read_dataset(output);
  std::string table = "sweep_value,energy,gap,degenerate";
  for (const auto& s : c.metric_specs) table += "," + s.label();
  table += "\n";
  for (const auto& s : ds.samples) {
    table += format_double(s.meta["sweep_value"].get<double>()) + "," + format_double(s.meta["energy"].get<double>()) +
             "," + format_double(s.meta["gap"].get<double>()) + "," + (s.meta["degenerate"].get<bool>() ? "1" : "0");
    for (double v : s.targets) table += "," + format_double(v);
    table += "\n";
  }
  write_text_file(csv, table);
  write_resolved(output, "gen-sweep",
                 Json{{"model", datagen::to_string(c.sweep.model)}, {"n_qubits", c.n_qubits}, {"J", c.sweep.coupling},
                      {"start", c.sweep.start}, {"stop", c.sweep.stop}, {"step", c.sweep.step},
                      {"metrics", metrics_json(c.metric_specs)}, {"output", output.string()}, {"csv", csv.string()}});
  out << "gen-sweep: wrote " << n << " " << datagen::to_string(c.sweep.model) << " ground states to "
      << output.string() << " and " << csv.string() << "\n";
  return kExitOk;
}

int train_command(const Json& cfg, std::ostream& out) {
  const fs::path dataset_path = require_input(cfg, "dataset");
  const fs::path output = require_string(cfg, "output");
  const fs::path log_path = get_or<std::string>(cfg, "log", output.string() + ".log.csv");
  const auto config = neural::train_config_from_json(cfg.value("config", Json::object()));
  const auto dataset = datagen::read_dataset(dataset_path);
  auto arch = neural::ArchDescriptor::for_dataset(dataset.header);
  const Json arch_cfg = cfg.value("arch", Json::object());
  arch.hidden = get_or(arch_cfg, "hidden", arch.hidden);
  if (arch.kind == neural::ModelKind::DynamicLstm) arch.lstm_hidden = get_or(arch_cfg, "lstm_hidden", arch.lstm_hidden);
  if (arch_cfg.contains("activation")) arch.hidden_activation = neural::activation_from_string(arch_cfg["activation"]);
  arch.validate();
  neural::check_compatible(dataset.header, arch);

  const auto result = neural::train(dataset, arch, config);
  neural::save_checkpoint(output, result.checkpoint);
  write_text_file(log_path, neural::format_training_log(result.log));
  Json arch_resolved{{"hidden", arch.hidden}, {"activation", neural::to_string(arch.hidden_activation)}};
  if (arch.kind == neural::ModelKind::DynamicLstm) arch_resolved["lstm_hidden"] = arch.lstm_hidden;
  write_resolved(output, "train",
                 Json{{"dataset", dataset_path.string()}, {"output", output.string()}, {"log", log_path.string()},
                      {"arch", arch_resolved}, {"config", neural::to_json(config)}});
  const auto& t = result.checkpoint.training;
  out << "train: " << neural::to_string(arch.kind) << " on " << dataset.samples.size() << " samples, "
      << t.epochs_run << " epochs, best epoch " << t.best_epoch << ", train_loss " << format_double(t.train_loss)
      << ", val_loss " << format_double(t.val_loss) << " -> " << output.string() << "\n";
  return kExitOk;
}

int predict_command(const Json& cfg, std::ostream& out) {
  const fs::path model_path = require_input(cfg, "model");
  const fs::path dataset_path = require_input(cfg, "dataset");
  const fs::path output = require_string(cfg, "output");
  const auto checkpoint = neural::load_checkpoint(model_path);
  const auto dataset = datagen::read_dataset(dataset_path);
  neural::check_compatible(dataset.header, checkpoint.model.arch());
  const auto predictions = neural::predict(checkpoint, dataset);
  neural::write_predictions(output, predictions);
  write_resolved(output, "predict",
                 Json{{"model", model_path.string()}, {"dataset", dataset_path.string()}, {"output", output.string()}});
  out << "predict: " << predictions.predictions.size() << " predictions of width " << predictions.output_dim
      << " -> " << output.string() << "\n";
  return kExitOk;
}

int evaluate_command(const Json& cfg, std::ostream& out) {
  const fs::path predictions_path = require_input(cfg, "predictions");
  const bool use_oracle = get_or(cfg, "oracle", false);
  const fs::path prefix = get_or<std::string>(cfg, "output_prefix", predictions_path.string() + ".eval");
  fs::path reference_path;
  if (!use_oracle) reference_path = require_input(cfg, "reference");

  const auto predictions = neural::read_predictions(predictions_path);
  ReferenceTargets reference;
  if (use_oracle) {
    reference = reference_from_oracle(predictions);
  } else {
    const auto ds = datagen::read_dataset(reference_path);
    if (ds.header.target_dim != predictions.output_dim) {
      throw ValidationError("reference target_dim does not match prediction width");
    }
    reference = reference_from_dataset(ds);
  }
  const auto report = evaluate_predictions(predictions, reference);
  const auto files = write_evaluation_csvs(report, predictions, prefix);
  Json resolved{{"predictions", predictions_path.string()}, {"oracle", use_oracle}, {"output_prefix", prefix.string()}};
  if (!use_oracle) resolved["reference"] = reference_path.string();
  write_resolved(fs::path(prefix.string() + "_evaluate"), "evaluate", resolved);
  out << "evaluate: " << report.n_samples << " samples";
  for (const auto& m : report.metrics) {
    out << "; " << m.label << " rmse=" << format_double(m.rmse)
        << " r=" << (m.pearson ? format_double(*m.pearson) : std::string("undefined"))
        << " max_abs=" << format_double(m.max_abs_error);
    if (m.rmse_unseen_window) out << " rmse_unseen=" << format_double(*m.rmse_unseen_window);
  }
  out << " (" << files.size() << " CSV files)\n";
  return kExitOk;
}

int oracle_command(const Json& cfg, std::ostream& out) {
  const fs::path dataset_path = require_input(cfg, "dataset");
  const double tolerance = get_or(cfg, "tolerance", 1e-9);
  const auto ds = datagen::read_dataset(dataset_path);
  double worst = 0.0;
  for (const auto& s : ds.samples) {
    const auto fresh = datagen::regenerate_sample(ds.header, s.meta);
    for (std::size_t k = 0; k < s.targets.size(); ++k) worst = std::max(worst, std::abs(fresh.targets[k] - s.targets[k]));
    for (std::size_t k = 0; k < s.inputs.size(); ++k) worst = std::max(worst, std::abs(fresh.inputs[k] - s.inputs[k]));
  }
  const bool ok = worst <= tolerance;
  out << "oracle: " << ds.samples.size() << " samples, max deviation " << format_double(worst) << " ("
      << (ok ? "within" : "EXCEEDS") << " tolerance " << format_double(tolerance) << ")\n";
  return ok ? kExitOk : kExitValidation;
}

int gradcheck_command(const Json& cfg, std::ostream& out) {
  const auto kind = neural::model_kind_from_string(get_or<std::string>(cfg, "arch", "static"));
  const auto seed = get_or<std::uint64_t>(cfg, "seed", 0);
  const auto report = neural::gradient_check(neural::gradient_check_arch(kind), seed);
  const bool ok = report.max_relative_error < 1e-5;
  out << "gradcheck: " << neural::to_string(kind) << " seed " << seed << ", " << report.parameters_checked
      << " parameters, max relative error " << format_double(report.max_relative_error) << " ("
      << (ok ? "pass" : "FAIL") << ")\n";
  return ok ? kExitOk : kExitValidation;
}

const std::map<std::string, std::function<int(const Json&, std::ostream&)>> kCommands = {
    {"gen-static", gen_static}, {"gen-dynamic", gen_dynamic}, {"gen-sweep", gen_sweep},
    {"train", train_command},   {"predict", predict_command}, {"evaluate", evaluate_command},
    {"oracle", oracle_command}, {"gradcheck", gradcheck_command}};

// Flag values land in `overrides` under the matching config key.
template <typename T>
void bind_option(CLI::App* app, const std::string& flag, Json& overrides, const std::string& key, const std::string& help) {
  app->add_option_function<T>(flag, [&overrides, key](const T& v) { overrides[key] = v; }, help);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entanglement learning from local measurements", "entlearn"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "Pipeline config (JSON); flags override its fields");

  Json overrides = Json::object();
  Json train_overrides = Json::object();
  Json arch_overrides = Json::object();

  auto* gs = app.add_subcommand("gen-static", "Random 2-local ground states -> static dataset");
  bind_option<int>(gs, "--n-qubits", overrides, "n_qubits", "Register size");
  bind_option<std::size_t>(gs, "--samples", overrides, "n_samples", "Number of samples");
  bind_option<std::uint64_t>(gs, "--seed", overrides, "seed", "Master seed");
  bind_option<std::vector<std::string>>(gs, "--metric", overrides, "metrics", "Metric spec, e.g. renyi:2:1,2 or pt:3:1:2");
  bind_option<std::string>(gs, "--output", overrides, "output", "Dataset path");

  auto* gd = app.add_subcommand("gen-dynamic", "Quench trajectories -> dynamic dataset");
  bind_option<int>(gd, "--n-qubits", overrides, "n_qubits", "Register size");
  bind_option<std::size_t>(gd, "--samples", overrides, "n_samples", "Number of random (J, g) draws");
  bind_option<std::uint64_t>(gd, "--seed", overrides, "seed", "Master seed");
  bind_option<std::vector<std::string>>(gd, "--metric", overrides, "metrics", "Metric spec");
  bind_option<int>(gd, "--steps", overrides, "steps", "Input samples S over [0, T_tra]");
  bind_option<double>(gd, "--t-train", overrides, "t_train", "Observation window T_tra");
  bind_option<double>(gd, "--t-total", overrides, "t_total", "Forecast horizon T_tot");
  bind_option<int>(gd, "--k-out", overrides, "k_out", "Target time points K_out");
  bind_option<double>(gd, "--theta-y", overrides, "theta_y", "Initial R_y angle");
  bind_option<double>(gd, "--theta-z", overrides, "theta_z", "Initial R_z angle");
  bind_option<double>(gd, "--fixed-J", overrides, "fixed_J", "Use a fixed-J grid of g values instead of random draws");
  bind_option<double>(gd, "--g-start", overrides, "g_start", "First g of the grid");
  bind_option<double>(gd, "--g-stop", overrides, "g_stop", "Last g of the grid");
  bind_option<int>(gd, "--g-count", overrides, "g_count", "Number of g values");
  bind_option<std::string>(gd, "--output", overrides, "output", "Dataset path");

  auto* sw = app.add_subcommand("gen-sweep", "XXZ / XX ground-state sweep");
  bind_option<std::string>(sw, "--model", overrides, "model", "xxz or xx");
  bind_option<int>(sw, "--n-qubits", overrides, "n_qubits", "Register size");
  bind_option<double>(sw, "--J", overrides, "J", "Exchange coupling J");
  bind_option<double>(sw, "--start", overrides, "start", "First sweep value");
  bind_option<double>(sw, "--stop", overrides, "stop", "Last sweep value (inclusive)");
  bind_option<double>(sw, "--step", overrides, "step", "Sweep step");
  bind_option<std::vector<std::string>>(sw, "--metric", overrides, "metrics", "Metric spec");
  bind_option<std::string>(sw, "--output", overrides, "output", "Dataset path");
  bind_option<std::string>(sw, "--csv", overrides, "csv", "Sweep table path");

  auto* tr = app.add_subcommand("train", "Train a network on a dataset");
  bind_option<std::string>(tr, "--dataset", overrides, "dataset", "Training dataset");
  bind_option<std::string>(tr, "--output", overrides, "output", "Checkpoint path");
  bind_option<std::string>(tr, "--log", overrides, "log", "Training-curve CSV path");
  bind_option<std::vector<int>>(tr, "--hidden", arch_overrides, "hidden", "Dense hidden widths");
  bind_option<int>(tr, "--lstm-hidden", arch_overrides, "lstm_hidden", "LSTM hidden width");
  bind_option<std::string>(tr, "--activation", arch_overrides, "activation", "Hidden activation: relu or tanh");
  bind_option<double>(tr, "--lr", train_overrides, "learning_rate", "Adam learning rate");
  bind_option<int>(tr, "--batch-size", train_overrides, "batch_size", "Minibatch size");
  bind_option<int>(tr, "--epochs", train_overrides, "max_epochs", "Maximum epochs");
  bind_option<double>(tr, "--val-fraction", train_overrides, "validation_fraction", "Held-out fraction");
  bind_option<int>(tr, "--patience", train_overrides, "patience", "Early-stopping patience (epochs)");
  bind_option<std::uint64_t>(tr, "--seed", train_overrides, "seed", "Training seed");

  auto* pr = app.add_subcommand("predict", "Run a checkpoint over a dataset");
  bind_option<std::string>(pr, "--model", overrides, "model", "Checkpoint path");
  bind_option<std::string>(pr, "--dataset", overrides, "dataset", "Input dataset");
  bind_option<std::string>(pr, "--output", overrides, "output", "Predictions path");

  auto* ev = app.add_subcommand("evaluate", "Score predictions and emit figure CSVs");
  bind_option<std::string>(ev, "--predictions", overrides, "predictions", "Predictions file");
  bind_option<std::string>(ev, "--reference", overrides, "reference", "Reference dataset");
  ev->add_flag_callback("--oracle", [&overrides] { overrides["oracle"] = true; },
                        "Recompute references exactly from sample meta");
  bind_option<std::string>(ev, "--output-prefix", overrides, "output_prefix", "Prefix for CSV outputs");

  auto* orc = app.add_subcommand("oracle", "Re-derive a dataset from its meta and compare");
  bind_option<std::string>(orc, "--dataset", overrides, "dataset", "Dataset to check");
  bind_option<double>(orc, "--tolerance", overrides, "tolerance", "Max allowed deviation");

  auto* gc = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  bind_option<std::string>(gc, "--arch", overrides, "arch", "static or dynamic");
  bind_option<std::uint64_t>(gc, "--seed", overrides, "seed", "Model/batch seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    Json section = Json::object();
    if (!config_path.empty()) {
      const Json config = read_json_file(config_path);
      if (!config.is_object()) throw ValidationError("config must be a JSON object");
      section = config.value(kSections.at(command), Json::object());
      if (!section.is_object()) throw ValidationError("config section '" + kSections.at(command) + "' must be an object");
    }
    section.update(overrides);
    if (!train_overrides.empty()) {
      Json merged = section.value("config", Json::object());
      merged.update(train_overrides);
      section["config"] = merged;
    }
    if (!arch_overrides.empty()) {
      Json merged = section.value("arch", Json::object());
      merged.update(arch_overrides);
      section["arch"] = merged;
    }
    return kCommands.at(command)(section, out);
  } catch (const ValidationError& e) {
    err << command << ": " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    err << command << ": " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << command << ": " << e.what() << "\n";
    return kExitIo;
  } catch (const Json::exception& e) {
    err << command << ": malformed input: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace entlearn::cli
