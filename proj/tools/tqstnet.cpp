// Copyright 2026 The tqstnet developers
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

// Command-line surface for the tQST pipeline: dataset generation, model
// training, evaluation, reconstruction, purity estimation, noise sweeps,
// classical baselines, and architecture ablations.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tqst/baseline.hpp"
#include "tqst/datagen.hpp"
#include "tqst/eval.hpp"
#include "tqst/nn/checkpoint.hpp"
#include "tqst/nn/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tqst;

namespace {

// Shared by train and eval so both commands carve identical splits.
constexpr std::uint64_t kDefaultSplitSeed = 1000003;

NoiseSpec parse_noise(const std::string& text) {
  if (text.empty() || text == "none") return NoiseSpec{};
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ValidationError("noise spec must be none, depol:P, or expstate:E");
  const std::string kind = text.substr(0, colon);
  const double strength = std::stod(text.substr(colon + 1));
  if (kind == "depol") return NoiseSpec{NoiseKind::Depolarizing, strength};
  if (kind == "expstate") return NoiseSpec{NoiseKind::ExpState, strength};
  throw ValidationError("unknown noise kind: " + kind);
}

nn::Task parse_task(const std::string& text) {
  if (text == "tomography") return nn::Task::Tomography;
  if (text == "purity") return nn::Task::Purity;
  throw ValidationError("task must be tomography or purity");
}

nn::Family parse_family(const std::string& text) {
  if (text == "mlp") return nn::Family::MLP;
  if (text == "pemlp") return nn::Family::PEMLP;
  if (text == "combined") return nn::Family::Combined;
  throw ValidationError("family must be mlp, pemlp, or combined");
}

std::string resolve_dataset_dir(const std::string& arg,
                                const std::string& data_dir) {
  if (fs::exists(fs::path(arg) / "manifest.json")) return arg;
  if (!data_dir.empty() &&
      fs::exists(fs::path(data_dir) / arg / "manifest.json"))
    return (fs::path(data_dir) / arg).string();
  throw ValidationError("dataset not found: " + arg);
}

void dataset_views(const Dataset& ds, const std::vector<size_t>& idx,
                   nn::Task task, std::vector<std::vector<double>>& inputs,
                   std::vector<std::vector<double>>& targets) {
  inputs.clear();
  targets.clear();
  inputs.reserve(idx.size());
  targets.reserve(idx.size());
  for (size_t i : idx) {
    inputs.push_back(ds.samples[i].record);
    if (task == nn::Task::Tomography)
      targets.push_back(ds.samples[i].target_params);
    else
      targets.push_back({ds.samples[i].target_purity});
  }
}

const std::vector<size_t>& pick_split(const SplitIndices& split,
                                      const std::string& which,
                                      std::vector<size_t>& all_storage,
                                      size_t total) {
  if (which == "train") return split.train;
  if (which == "val") return split.val;
  if (which == "test") return split.test;
  if (which == "all") {
    all_storage.resize(total);
    for (size_t i = 0; i < total; ++i) all_storage[i] = i;
    return all_storage;
  }
  throw ValidationError("split must be train, val, test, or all");
}

json matrix_to_json(const DensityMatrix& rho,
                    std::optional<double> fid = std::nullopt) {
  const int d = rho.dim();
  json re = json::array(), im = json::array();
  json mag_rows = json::array(), phase_rows = json::array();
  for (int i = 0; i < d; ++i) {
    json re_row = json::array(), im_row = json::array();
    std::string mag_line, phase_line;
    for (int j = 0; j < d; ++j) {
      const cplx v = rho.matrix()(i, j);
      re_row.push_back(v.real());
      im_row.push_back(v.imag());
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f", std::abs(v));
      mag_line += std::string(j ? " " : "") + buf;
      std::snprintf(buf, sizeof buf, "%+.3f", std::arg(v) / std::numbers::pi);
      phase_line += std::string(j ? " " : "") + buf;
    }
    re.push_back(re_row);
    im.push_back(im_row);
    mag_rows.push_back(mag_line);
    phase_rows.push_back(phase_line);
  }
  json out{{"n_qubits", rho.n_qubits()},
           {"real", re},
           {"imag", im},
           {"magnitude_rows", mag_rows},
           {"phase_over_pi_rows", phase_rows}};
  if (fid) out["fidelity"] = *fid;
  return out;
}

DensityMatrix matrix_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open matrix file: " + path);
  json j = json::parse(in);
  const int n_qubits = j.at("n_qubits").get<int>();
  const int d = dim_for_qubits(n_qubits);
  ComplexMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k)
      m(i, k) = cplx(j.at("real")[i][k].get<double>(),
                     j.at("imag")[i][k].get<double>());
  return DensityMatrix::from_matrix(n_qubits, m);
}

/// Reference from a dataset-schema CSV row (t-columns) or a matrix JSON.
DensityMatrix load_reference(const std::string& path, int row) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") {
    Dataset ds = import_csv(path);
    if (row < 0 || row >= static_cast<int>(ds.samples.size()))
      throw ValidationError("reference row out of range");
    RawReconstruction raw{ds.spec.n_qubits, ds.samples[row].target_params};
    return DensityMatrix::from_matrix(ds.spec.n_qubits,
                                      vector_to_hermitian(raw));
  }
  return matrix_from_json_file(path);
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write: " + path);
  out << j.dump(2) << "\n";
}

struct TrainSettings {
  int epochs = 100;
  int batch = 32;
  double lr = 1e-4;
  std::uint64_t seed = 0;
  std::uint64_t split_seed = kDefaultSplitSeed;
};

void add_train_settings(CLI::App* cmd, TrainSettings& s) {
  cmd->add_option("--epochs", s.epochs, "Training epochs")
      ->capture_default_str();
  cmd->add_option("--batch", s.batch, "Batch size")->capture_default_str();
  cmd->add_option("--lr", s.lr, "Adam learning rate")->capture_default_str();
  cmd->add_option("--seed", s.seed, "Init/shuffle/dropout seed")
      ->capture_default_str();
  cmd->add_option(
         "--split-seed", s.split_seed,
         "Seed of the 90/5/5 split (must match between train and eval)")
      ->capture_default_str();
}

/// Split the dataset, build a model, and train it.
nn::Model run_training(const Dataset& ds, nn::ModelConfig cfg,
                       const TrainSettings& s, const std::string& loss_csv,
                       bool verbose) {
  SplitIndices split = split_dataset(ds, 0.9, 0.05, s.split_seed);
  std::vector<std::vector<double>> tr_in, tr_tg, va_in, va_tg;
  dataset_views(ds, split.train, cfg.task, tr_in, tr_tg);
  dataset_views(ds, split.val, cfg.task, va_in, va_tg);

  Rng init_rng = Rng(s.seed).split(0);
  nn::Model model = nn::build_model(cfg, init_rng);
  if (verbose)
    std::cout << "model: " << to_string(cfg.family) << "/"
              << to_string(cfg.task) << " qubits=" << cfg.n_qubits
              << " parameters=" << model.param_count() << "\n"
              << std::flush;

  nn::TrainOptions opts;
  opts.epochs = s.epochs;
  opts.batch_size = s.batch;
  opts.lr = s.lr;
  opts.seed = s.seed;
  if (verbose)
    opts.on_epoch = [&](int epoch, double tl, double vl) {
      std::cout << "epoch " << (epoch + 1) << "/" << s.epochs << " train "
                << tl << " val " << vl << "\n"
                << std::flush;
    };
  nn::TrainData train{&tr_in, &tr_tg}, val{&va_in, &va_tg};
  nn::TrainHistory hist = nn::train_model(model, train, val, opts);

  if (!loss_csv.empty()) {
    std::ofstream out(loss_csv);
    if (!out) throw ValidationError("cannot write: " + loss_csv);
    out.precision(17);
    out << "epoch,train_loss,val_loss\n";
    for (size_t e = 0; e < hist.train_loss.size(); ++e)
      out << (e + 1) << "," << hist.train_loss[e] << "," << hist.val_loss[e]
          << "\n";
  }
  return model;
}

EvalReport evaluate_model(nn::Model& model, const Dataset& ds,
                          const std::vector<size_t>& idx) {
  if (model.config().task == nn::Task::Tomography)
    return evaluate_tomography(model_reconstructor(model),
                               to_string(model.config().family), ds, idx);
  return evaluate_purity(
      [&](const std::vector<double>& rec) { return model.predict(rec)[0]; },
      to_string(model.config().family), ds, idx);
}

int run(int argc, char** argv) {
  CLI::App app{
      "Threshold quantum state tomography with permutation-equivariant "
      "networks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from a key=value file");
  std::string data_dir;
  app.add_option("--data-dir", data_dir, "Default dataset directory")
      ->envname("TQST_DATA_DIR");

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "Generate a dataset");
  int gen_qubits = 2, gen_per_pair = 2000, gen_shots = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_noise = "none", gen_out, gen_csv;
  double gen_threshold = -1.0;
  gen->add_option("--qubits", gen_qubits, "Number of qubits")->required();
  gen->add_option("--per-pair", gen_per_pair,
                  "Samples per (zeros, rank) pair and purity class")
      ->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generation seed")->capture_default_str();
  gen->add_option("--noise", gen_noise, "none, depol:P, or expstate:E")
      ->capture_default_str();
  gen->add_option("--shots", gen_shots,
                  "Shots per measurement (0 = exact expectation values)")
      ->capture_default_str();
  gen->add_option("--threshold", gen_threshold,
                  "Manual threshold override (default: Gini rule)");
  gen->add_option("--out", gen_out, "Output dataset directory");
  gen->add_option("--csv", gen_csv, "Also export the dataset as CSV");
  gen->callback([&] {
    DatasetSpec spec;
    spec.n_qubits = gen_qubits;
    spec.per_pair = gen_per_pair;
    spec.noise = parse_noise(gen_noise);
    spec.seed = gen_seed;
    spec.shots = gen_shots;
    if (gen_threshold >= 0.0) spec.threshold_override = gen_threshold;
    Dataset ds = build_dataset(spec);

    std::string out = gen_out;
    if (out.empty()) {
      std::string name = "ds-q" + std::to_string(gen_qubits) + "-" +
                         spec.noise.name() + "-s" + std::to_string(gen_seed);
      out = data_dir.empty() ? name : (fs::path(data_dir) / name).string();
    }
    save_dataset(out, ds);
    if (!gen_csv.empty()) export_csv(gen_csv, ds);

    long long total_meas = 0;
    int min_meas = 1 << 30, max_meas = 0;
    for (const Sample& s : ds.samples) {
      total_meas += s.meta.measurements;
      min_meas = std::min(min_meas, s.meta.measurements);
      max_meas = std::max(max_meas, s.meta.measurements);
    }
    const int d = dim_for_qubits(gen_qubits);
    std::cout << "dataset: " << out << "\n"
              << "samples: " << ds.samples.size() << "\n"
              << "measurements per sample: mean "
              << static_cast<double>(total_meas) / ds.samples.size()
              << " min " << min_meas << " max " << max_meas << " of " << d * d
              << "\n";
  });

  // ---- train ----
  auto* train = app.add_subcommand("train", "Train a model on a dataset");
  std::string train_data, train_task = "tomography", train_family = "mlp";
  std::string train_out = "model.ckpt", train_loss_csv;
  std::vector<int> train_hidden;
  int train_dense_hidden = -1;
  double train_dropout = -1.0;
  TrainSettings train_settings;
  train->add_option("--data", train_data, "Dataset directory or name")
      ->required();
  train->add_option("--task", train_task, "tomography or purity")
      ->capture_default_str();
  train->add_option("--family", train_family, "mlp, pemlp, or combined")
      ->capture_default_str();
  train->add_option("--hidden", train_hidden,
                    "Hidden sizes (MLP: neurons, PE families: features)")
      ->delimiter(',');
  train->add_option("--dense-hidden", train_dense_hidden,
                    "Combined: neurons of the dense hidden layer");
  train->add_option("--dropout", train_dropout,
                    "Dropout before the final Linear layer");
  add_train_settings(train, train_settings);
  train->add_option("--out", train_out, "Checkpoint path")
      ->capture_default_str();
  train->add_option("--loss-csv", train_loss_csv, "Per-epoch loss curve CSV");
  train->callback([&] {
    Dataset ds = load_dataset(resolve_dataset_dir(train_data, data_dir));
    nn::ModelConfig cfg = nn::ModelConfig::defaults(
        parse_task(train_task), parse_family(train_family), ds.spec.n_qubits);
    if (!train_hidden.empty()) cfg.hidden = train_hidden;
    if (train_dense_hidden >= 0) cfg.dense_hidden = train_dense_hidden;
    if (train_dropout >= 0.0) cfg.dropout = train_dropout;
    nn::Model model =
        run_training(ds, cfg, train_settings, train_loss_csv, true);
    nn::save_model(train_out, model);
    std::cout << "checkpoint: " << train_out << "\n";
  });

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  std::string eval_data, eval_model, eval_split = "test";
  std::string eval_json = "report.json", eval_csv;
  std::uint64_t eval_split_seed = kDefaultSplitSeed;
  bool eval_no_rows = false;
  eval->add_option("--data", eval_data, "Dataset directory or name")
      ->required();
  eval->add_option("--model", eval_model, "Checkpoint path")->required();
  eval->add_option("--split", eval_split, "train, val, test, or all")
      ->capture_default_str();
  eval->add_option("--split-seed", eval_split_seed, "Split seed")
      ->capture_default_str();
  eval->add_option("--out-json", eval_json, "Report JSON path")
      ->capture_default_str();
  eval->add_option("--out-csv", eval_csv, "Per-sample rows CSV path");
  eval->add_flag("--no-rows", eval_no_rows, "Omit per-sample rows from JSON");
  eval->callback([&] {
    Dataset ds = load_dataset(resolve_dataset_dir(eval_data, data_dir));
    nn::Model model = nn::load_model(eval_model);
    if (model.config().n_qubits != ds.spec.n_qubits)
      throw ValidationError("model and dataset disagree on qubit count");
    SplitIndices split = split_dataset(ds, 0.9, 0.05, eval_split_seed);
    std::vector<size_t> all;
    const std::vector<size_t>& idx =
        pick_split(split, eval_split, all, ds.samples.size());
    EvalReport report = evaluate_model(model, ds, idx);
    write_json_file(eval_json, report.to_json(!eval_no_rows));
    if (!eval_csv.empty()) report.write_csv(eval_csv);
    if (report.task == "tomography")
      std::cout << "fidelity: " << report.mean_fidelity << " +- "
                << report.std_fidelity << "\n";
    std::cout << "mse: " << report.mse << "\nr2: " << report.r2 << "\n"
              << "report: " << eval_json << "\n";
  });

  // ---- baseline ----
  auto* base = app.add_subcommand(
      "baseline", "Evaluate the classical reconstruction baselines");
  std::string base_data, base_method = "direct", base_split = "test";
  std::string base_json = "baseline.json", base_csv;
  std::uint64_t base_split_seed = kDefaultSplitSeed;
  int base_iters = 500;
  double base_step = 0.5;
  base->add_option("--data", base_data, "Dataset directory or name")
      ->required();
  base->add_option("--method", base_method, "direct or mle")
      ->capture_default_str();
  base->add_option("--mle-iters", base_iters, "MLE refinement iterations")
      ->capture_default_str();
  base->add_option("--mle-step", base_step, "MLE initial step size")
      ->capture_default_str();
  base->add_option("--split", base_split, "train, val, test, or all")
      ->capture_default_str();
  base->add_option("--split-seed", base_split_seed, "Split seed")
      ->capture_default_str();
  base->add_option("--out-json", base_json, "Report JSON path")
      ->capture_default_str();
  base->add_option("--out-csv", base_csv, "Per-sample rows CSV path");
  base->callback([&] {
    if (base_method != "direct" && base_method != "mle")
      throw ValidationError("method must be direct or mle");
    Dataset ds = load_dataset(resolve_dataset_dir(base_data, data_dir));
    SplitIndices split = split_dataset(ds, 0.9, 0.05, base_split_seed);
    std::vector<size_t> all;
    const std::vector<size_t>& idx =
        pick_split(split, base_split, all, ds.samples.size());
    Reconstructor rec =
        base_method == "direct"
            ? direct_inversion_reconstructor(ds.spec.n_qubits)
            : mle_reconstructor(ds.spec.n_qubits, base_iters, base_step);
    EvalReport report = evaluate_tomography(rec, base_method, ds, idx);
    write_json_file(base_json, report.to_json(false));
    if (!base_csv.empty()) report.write_csv(base_csv);
    std::cout << "fidelity: " << report.mean_fidelity << " +- "
              << report.std_fidelity << "\nreport: " << base_json << "\n";
  });

  // ---- reconstruct ----
  auto* rec_cmd = app.add_subcommand(
      "reconstruct", "Reconstruct a density matrix from a measurement record");
  std::string rec_record, rec_model, rec_method = "direct", rec_reference;
  std::string rec_out = "reconstruction.json";
  int rec_row = 0, rec_iters = 500;
  double rec_step = 0.5;
  rec_cmd->add_option("--record", rec_record, "CSV with m0..m{4^n-1} columns")
      ->required();
  rec_cmd->add_option("--row", rec_row, "Record row to reconstruct")
      ->capture_default_str();
  rec_cmd->add_option("--model", rec_model,
                      "Tomography checkpoint (otherwise --method is used)");
  rec_cmd->add_option("--method", rec_method, "direct or mle")
      ->capture_default_str();
  rec_cmd->add_option("--mle-iters", rec_iters, "MLE refinement iterations")
      ->capture_default_str();
  rec_cmd->add_option("--mle-step", rec_step, "MLE initial step size")
      ->capture_default_str();
  rec_cmd->add_option("--reference", rec_reference,
                      "Reference state (matrix JSON or dataset CSV)");
  rec_cmd->add_option("--out", rec_out, "Output matrix JSON")
      ->capture_default_str();
  rec_cmd->callback([&] {
    std::vector<MeasurementRecord> records = import_records_csv(rec_record);
    if (rec_row < 0 || rec_row >= static_cast<int>(records.size()))
      throw ValidationError("record row out of range");
    const MeasurementRecord& record = records[rec_row];

    DensityMatrix rho = [&] {
      if (!rec_model.empty()) {
        nn::Model model = nn::load_model(rec_model);
        return model_reconstructor(model)(record.values);
      }
      if (rec_method == "direct") return direct_invert(record);
      if (rec_method == "mle")
        return mle_refine(record, direct_invert(record), rec_iters, rec_step);
      throw ValidationError("method must be direct or mle");
    }();

    std::optional<double> fid;
    if (!rec_reference.empty())
      fid = fidelity(load_reference(rec_reference, rec_row), rho);
    write_json_file(rec_out, matrix_to_json(rho, fid));
    std::cout << "measurements performed: " << record.performed_count()
              << " of " << record.values.size() << "\n";
    if (fid) std::cout << "fidelity vs reference: " << *fid << "\n";
    std::cout << "matrix: " << rec_out << "\n";
  });

  // ---- purity ----
  auto* pur =
      app.add_subcommand("purity", "Estimate purity from a measurement record");
  std::string pur_record, pur_model, pur_method = "direct";
  int pur_row = 0, pur_iters = 500;
  double pur_step = 0.5;
  std::string pur_json;
  pur->add_option("--record", pur_record, "CSV with m0..m{4^n-1} columns")
      ->required();
  pur->add_option("--row", pur_row, "Record row")->capture_default_str();
  pur->add_option("--model", pur_model,
                  "Purity checkpoint (otherwise reconstruct via --method)");
  pur->add_option("--method", pur_method, "direct or mle")
      ->capture_default_str();
  pur->add_option("--mle-iters", pur_iters, "MLE refinement iterations")
      ->capture_default_str();
  pur->add_option("--mle-step", pur_step, "MLE initial step size")
      ->capture_default_str();
  pur->add_option("--out-json", pur_json, "Optional JSON output");
  pur->callback([&] {
    std::vector<MeasurementRecord> records = import_records_csv(pur_record);
    if (pur_row < 0 || pur_row >= static_cast<int>(records.size()))
      throw ValidationError("record row out of range");
    const MeasurementRecord& record = records[pur_row];
    double value = 0.0;
    if (!pur_model.empty()) {
      nn::Model model = nn::load_model(pur_model);
      if (model.config().task != nn::Task::Purity)
        throw ValidationError("checkpoint is not a purity model");
      value = clamp_purity(model.predict(record.values)[0], record.n_qubits);
    } else {
      if (pur_method != "direct" && pur_method != "mle")
        throw ValidationError("method must be direct or mle");
      DensityMatrix rho =
          pur_method == "mle"
              ? mle_refine(record, direct_invert(record), pur_iters, pur_step)
              : direct_invert(record);
      value = purity(rho);
    }
    if (!pur_json.empty()) write_json_file(pur_json, json{{"purity", value}});
    std::cout << "purity: " << value << "\n";
  });

  // ---- noise-sweep ----
  auto* sweep = app.add_subcommand(
      "noise-sweep", "Train and evaluate across noise strengths");
  int sw_qubits = 2, sw_per_pair = 200;
  std::string sw_channel = "both", sw_task = "tomography", sw_family = "mlp";
  std::vector<double> sw_strengths = {0.01, 0.05, 0.1, 0.2,
                                      0.4,  0.6,  0.8, 1.0};
  std::string sw_out = "sweep.csv";
  TrainSettings sw_settings;
  sweep->add_option("--qubits", sw_qubits, "Number of qubits")
      ->capture_default_str();
  sweep->add_option("--per-pair", sw_per_pair,
                    "Samples per (zeros, rank) pair and purity class")
      ->capture_default_str();
  sweep->add_option("--channel", sw_channel, "depol, expstate, or both")
      ->capture_default_str();
  sweep->add_option("--strengths", sw_strengths, "Noise strengths")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--task", sw_task, "tomography or purity")
      ->capture_default_str();
  sweep->add_option("--family", sw_family, "mlp, pemlp, or combined")
      ->capture_default_str();
  add_train_settings(sweep, sw_settings);
  sweep->add_option("--out", sw_out, "Sweep CSV path")->capture_default_str();
  sweep->callback([&] {
    std::vector<NoiseKind> kinds;
    if (sw_channel == "depol" || sw_channel == "both")
      kinds.push_back(NoiseKind::Depolarizing);
    if (sw_channel == "expstate" || sw_channel == "both")
      kinds.push_back(NoiseKind::ExpState);
    if (kinds.empty())
      throw ValidationError("channel must be depol, expstate, or both");

    std::ofstream out(sw_out);
    if (!out) throw ValidationError("cannot write: " + sw_out);
    out.precision(10);
    out << "channel,strength,mean,std,mse,r2\n";
    const nn::Task task = parse_task(sw_task);
    for (NoiseKind kind : kinds) {
      for (double strength : sw_strengths) {
        DatasetSpec spec;
        spec.n_qubits = sw_qubits;
        spec.per_pair = sw_per_pair;
        spec.noise = NoiseSpec{kind, strength};
        spec.seed = sw_settings.seed;
        Dataset ds = build_dataset(spec);
        nn::ModelConfig cfg =
            nn::ModelConfig::defaults(task, parse_family(sw_family), sw_qubits);
        nn::Model model = run_training(ds, cfg, sw_settings, "", false);
        SplitIndices split =
            split_dataset(ds, 0.9, 0.05, sw_settings.split_seed);
        EvalReport report = evaluate_model(model, ds, split.test);
        const double mean =
            task == nn::Task::Tomography ? report.mean_fidelity : report.mse;
        const double sd =
            task == nn::Task::Tomography ? report.std_fidelity : 0.0;
        out << spec.noise.name() << "," << strength << "," << mean << ","
            << sd << "," << report.mse << "," << report.r2 << "\n"
            << std::flush;
        std::cout << spec.noise.name() << " " << strength << ": mean " << mean
                  << " mse " << report.mse << " r2 " << report.r2 << "\n"
                  << std::flush;
      }
    }
    std::cout << "sweep: " << sw_out << "\n";
  });

  // ---- ablate ----
  auto* abl =
      app.add_subcommand("ablate", "Grid over hidden layer counts and sizes");
  std::string abl_data, abl_family = "mlp", abl_task = "tomography";
  std::vector<int> abl_layers = {1, 2, 3};
  std::vector<int> abl_sizes;
  std::string abl_out = "ablation.csv";
  TrainSettings abl_settings;
  abl->add_option("--data", abl_data, "Dataset directory or name")->required();
  abl->add_option("--family", abl_family, "mlp or pemlp")
      ->capture_default_str();
  abl->add_option("--task", abl_task, "tomography or purity")
      ->capture_default_str();
  abl->add_option("--layers", abl_layers, "Hidden layer counts")
      ->delimiter(',')
      ->capture_default_str();
  abl->add_option("--sizes", abl_sizes,
                  "Neurons (mlp) or internal features (pemlp) per layer")
      ->delimiter(',');
  add_train_settings(abl, abl_settings);
  abl->add_option("--out", abl_out, "Ablation CSV path")
      ->capture_default_str();
  abl->callback([&] {
    const nn::Family family = parse_family(abl_family);
    if (family == nn::Family::Combined)
      throw ValidationError("ablate covers the individual families");
    if (abl_sizes.empty())
      abl_sizes = family == nn::Family::MLP
                      ? std::vector<int>{64, 128, 256, 512, 1024}
                      : std::vector<int>{8, 16, 32, 64, 128};
    Dataset ds = load_dataset(resolve_dataset_dir(abl_data, data_dir));

    std::ofstream out(abl_out);
    if (!out) throw ValidationError("cannot write: " + abl_out);
    out.precision(10);
    out << "family,task,layers,size,params,mean,std,mse,r2\n";
    for (int layers : abl_layers) {
      for (int size : abl_sizes) {
        nn::ModelConfig cfg;
        cfg.task = parse_task(abl_task);
        cfg.family = family;
        cfg.n_qubits = ds.spec.n_qubits;
        cfg.hidden.assign(layers, size);
        nn::Model model = run_training(ds, cfg, abl_settings, "", false);
        SplitIndices split =
            split_dataset(ds, 0.9, 0.05, abl_settings.split_seed);
        EvalReport report = evaluate_model(model, ds, split.test);
        const double mean = cfg.task == nn::Task::Tomography
                                ? report.mean_fidelity
                                : report.mse;
        const double sd =
            cfg.task == nn::Task::Tomography ? report.std_fidelity : 0.0;
        out << abl_family << "," << abl_task << "," << layers << "," << size
            << "," << model.param_count() << "," << mean << "," << sd << ","
            << report.mse << "," << report.r2 << "\n"
            << std::flush;
        std::cout << abl_family << " layers=" << layers << " size=" << size
                  << ": mean " << mean << "\n"
                  << std::flush;
      }
    }
    std::cout << "ablation: " << abl_out << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad usage is a validation error
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
