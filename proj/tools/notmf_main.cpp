// Command-line front end. Talks to the engine exclusively through the C API.
#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "notmf/notmf_c.h"

namespace {

namespace fs = std::filesystem;

struct DatasetDeleter {
  void operator()(notmf_dataset* p) const { notmf_dataset_free(p); }
};
struct ModelDeleter {
  void operator()(notmf_model* p) const { notmf_model_free(p); }
};
struct ForecastDeleter {
  void operator()(notmf_forecast* p) const { notmf_forecast_free(p); }
};
struct GridDeleter {
  void operator()(notmf_grid_result* p) const { notmf_grid_free(p); }
};

using DatasetPtr = std::unique_ptr<notmf_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<notmf_model, ModelDeleter>;
using ForecastPtr = std::unique_ptr<notmf_forecast, ForecastDeleter>;
using GridPtr = std::unique_ptr<notmf_grid_result, GridDeleter>;

// Engine failures exit with the status code class: parse 2, dimension 3,
// numerical 4.
int fail(notmf_status status) {
  std::cerr << "error: " << notmf_last_error() << "\n";
  return static_cast<int>(status);
}

int check(notmf_status status) {
  if (status != NOTMF_OK) {
    std::cerr << "error: " << notmf_last_error() << "\n";
    std::exit(static_cast<int>(status));
  }
  return 0;
}

std::string format_value(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string variant_name(int32_t code) {
  switch (code) {
    case NOTMF_VARIANT_NOTMF: return "notmf";
    case NOTMF_VARIANT_NOTMF_FIRST: return "notmf-1st";
    case NOTMF_VARIANT_TMF: return "tmf";
    case NOTMF_VARIANT_TRMF: return "trmf";
    default: return "unknown";
  }
}

struct ConfigFlags {
  notmf_config config;
  std::string variant = "notmf";
  bool zero_as_missing = false;
  bool standardize = false;

  ConfigFlags() { notmf_config_default(&config); }

  void attach(CLI::App* cmd) {
    cmd->add_option("--rank", config.rank, "Latent rank R")
        ->envname("NOTMF_RANK")
        ->capture_default_str();
    cmd->add_option("--order", config.order, "VAR order d")
        ->envname("NOTMF_ORDER")
        ->capture_default_str();
    cmd->add_option("--season", config.season, "Seasonal differencing period m (0 disables)")
        ->envname("NOTMF_SEASON")
        ->capture_default_str();
    cmd->add_option("--lambda", config.lambda, "Temporal loss weight")
        ->envname("NOTMF_LAMBDA")
        ->capture_default_str();
    cmd->add_option("--rho", config.rho, "Factor ridge weight")
        ->envname("NOTMF_RHO")
        ->capture_default_str();
    cmd->add_option("--iters", config.outer_iters, "Outer alternating iterations")
        ->envname("NOTMF_ITERS")
        ->capture_default_str();
    cmd->add_option("--cg-iters", config.cg_iters, "Conjugate gradient iterations per solve")
        ->envname("NOTMF_CG_ITERS")
        ->capture_default_str();
    cmd->add_option("--cg-tol", config.cg_tol, "Relative residual tolerance for cg")
        ->envname("NOTMF_CG_TOL")
        ->capture_default_str();
    cmd->add_option("--variant", variant, "Model variant: notmf | notmf-1st | tmf | trmf")
        ->envname("NOTMF_VARIANT")
        ->capture_default_str();
    cmd->add_option("--seed", config.seed, "Seed for every random draw")
        ->envname("NOTMF_SEED")
        ->capture_default_str();
    cmd->add_flag("--standardize", standardize, "Per-series z-scoring of observed entries")
        ->envname("NOTMF_STANDARDIZE");
    cmd->add_flag("--zero-as-missing", zero_as_missing, "Treat numeric 0 as missing on load")
        ->envname("NOTMF_ZERO_AS_MISSING");
  }

  notmf_config resolve() const {
    notmf_config c = config;
    if (variant == "notmf") {
      c.variant = NOTMF_VARIANT_NOTMF;
    } else if (variant == "notmf-1st" || variant == "notmf_first") {
      c.variant = NOTMF_VARIANT_NOTMF_FIRST;
    } else if (variant == "tmf") {
      c.variant = NOTMF_VARIANT_TMF;
    } else if (variant == "trmf") {
      c.variant = NOTMF_VARIANT_TRMF;
    } else {
      std::cerr << "error: unknown variant '" << variant
                << "' (expected notmf|notmf-1st|tmf|trmf)\n";
      std::exit(3);
    }
    c.standardize = standardize ? 1 : 0;
    return c;
  }
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory '" << dir << "': " << ec.message()
              << "\n";
    std::exit(1);
  }
}

void write_trace(const notmf_model* model, const std::string& path) {
  const int64_t len = notmf_model_trace_length(model);
  std::vector<double> trace(static_cast<std::size_t>(len));
  check(notmf_model_trace(model, trace.data()));
  std::ofstream out(path);
  out << "iteration,objective\n";
  for (int64_t i = 0; i < len; ++i) {
    out << (i + 1) << ',' << format_value(trace[static_cast<std::size_t>(i)]) << '\n';
  }
}

void write_metrics(const std::string& path, double mape, double rmse, int64_t n_eval,
                   double seconds, const notmf_config& config, const std::string& variant,
                   int64_t train_cols, int64_t horizon, int64_t windows) {
  std::ofstream out(path);
  out << "mape: " << format_value(mape) << '\n';
  out << "rmse: " << format_value(rmse) << '\n';
  out << "n_evaluated: " << n_eval << '\n';
  out << "wall_clock_seconds: " << format_value(seconds) << '\n';
  out << "config.variant: " << variant << '\n';
  out << "config.rank: " << config.rank << '\n';
  out << "config.order: " << config.order << '\n';
  out << "config.season: " << config.season << '\n';
  out << "config.lambda: " << format_value(config.lambda) << '\n';
  out << "config.rho: " << format_value(config.rho) << '\n';
  out << "config.iters: " << config.outer_iters << '\n';
  out << "config.cg_iters: " << config.cg_iters << '\n';
  out << "config.cg_tol: " << format_value(config.cg_tol) << '\n';
  out << "config.seed: " << config.seed << '\n';
  out << "config.standardize: " << config.standardize << '\n';
  out << "train_cols: " << train_cols << '\n';
  out << "horizon: " << horizon << '\n';
  out << "windows: " << windows << '\n';
}

std::vector<double> parse_grid(const std::string& text, const char* name) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(',', start);
    const std::string token =
        pos == std::string::npos ? text.substr(start) : text.substr(start, pos - start);
    if (!token.empty()) {
      try {
        values.push_back(std::stod(token));
      } catch (const std::exception&) {
        std::cerr << "error: bad " << name << " grid entry '" << token << "'\n";
        std::exit(3);
      }
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (values.empty()) {
    std::cerr << "error: " << name << " grid is empty\n";
    std::exit(3);
  }
  return values;
}

int run_fit(const std::string& input, const std::string& out_dir, int64_t train_cols,
            const ConfigFlags& flags) {
  const auto started = std::chrono::steady_clock::now();
  notmf_dataset* raw = nullptr;
  notmf_status status = notmf_dataset_from_csv(input.c_str(), flags.zero_as_missing, &raw);
  if (status != NOTMF_OK) return fail(status);
  DatasetPtr data(raw);
  if (train_cols > 0) {
    notmf_dataset* sliced = nullptr;
    status = notmf_dataset_slice_cols(data.get(), 0, train_cols, &sliced);
    if (status != NOTMF_OK) return fail(status);
    data.reset(sliced);
  }
  const notmf_config config = flags.resolve();
  notmf_model* raw_model = nullptr;
  status = notmf_fit(data.get(), &config, &raw_model);
  if (status != NOTMF_OK) return fail(status);
  ModelPtr model(raw_model);

  ensure_dir(out_dir);
  const std::string model_path = (fs::path(out_dir) / "model.bin").string();
  status = notmf_model_save(model.get(), model_path.c_str());
  if (status != NOTMF_OK) return fail(status);
  write_trace(model.get(), (fs::path(out_dir) / "objective_trace.csv").string());
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
  std::cout << "fit: " << notmf_model_series(model.get()) << " series, "
            << notmf_model_steps(model.get()) << " steps, rank " << notmf_model_rank(model.get())
            << ", " << format_value(elapsed.count()) << " s\n"
            << "wrote " << model_path << "\n";
  return 0;
}

int run_forecast(const std::string& model_path, const std::string& truth_path, int64_t horizon,
                 const std::string& out_dir, bool zero_as_missing) {
  const auto started = std::chrono::steady_clock::now();
  notmf_model* raw_model = nullptr;
  notmf_status status = notmf_model_load(model_path.c_str(), &raw_model);
  if (status != NOTMF_OK) return fail(status);
  ModelPtr model(raw_model);

  DatasetPtr truth;
  if (!truth_path.empty()) {
    notmf_dataset* raw = nullptr;
    status = notmf_dataset_from_csv(truth_path.c_str(), zero_as_missing ? 1 : 0, &raw);
    if (status != NOTMF_OK) return fail(status);
    truth.reset(raw);
  }

  notmf_forecast* raw_fc = nullptr;
  status = notmf_forecast_model(model.get(), horizon, &raw_fc);
  if (status != NOTMF_OK) return fail(status);
  ForecastPtr forecast(raw_fc);

  ensure_dir(out_dir);
  const std::string fc_path = (fs::path(out_dir) / "forecast.csv").string();
  status = notmf_forecast_to_csv(forecast.get(), truth.get(), fc_path.c_str());
  if (status != NOTMF_OK) return fail(status);
  std::cout << "wrote " << fc_path << "\n";

  const bool truth_covers =
      truth && notmf_dataset_cols(truth.get()) >=
                   notmf_forecast_start_index(forecast.get()) + notmf_forecast_cols(forecast.get());
  if (truth_covers) {
    double mape = 0.0, rmse = 0.0;
    int64_t n_eval = 0;
    status = notmf_score_forecast(truth.get(), forecast.get(), &mape, &rmse, &n_eval);
    if (status != NOTMF_OK) return fail(status);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
    notmf_config config;
    check(notmf_model_config(model.get(), &config));
    const std::string metrics_path = (fs::path(out_dir) / "metrics.txt").string();
    write_metrics(metrics_path, mape, rmse, n_eval, elapsed.count(), config,
                  variant_name(config.variant), notmf_model_steps(model.get()), horizon, 1);
    std::cout << "mape " << format_value(mape) << ", rmse " << format_value(rmse) << " ("
              << n_eval << " entries)\nwrote " << metrics_path << "\n";
  }
  return 0;
}

int run_rolling(const std::string& input, const std::string& out_dir, int64_t train_cols,
                int64_t horizon, int64_t windows, const ConfigFlags& flags) {
  const auto started = std::chrono::steady_clock::now();
  notmf_dataset* raw = nullptr;
  notmf_status status = notmf_dataset_from_csv(input.c_str(), flags.zero_as_missing, &raw);
  if (status != NOTMF_OK) return fail(status);
  DatasetPtr data(raw);

  const notmf_config config = flags.resolve();
  notmf_forecast* raw_fc = nullptr;
  status = notmf_rolling_forecast(data.get(), &config, train_cols, horizon, windows, nullptr,
                                  &raw_fc);
  if (status != NOTMF_OK) return fail(status);
  ForecastPtr forecast(raw_fc);

  ensure_dir(out_dir);
  const std::string fc_path = (fs::path(out_dir) / "forecast.csv").string();
  status = notmf_forecast_to_csv(forecast.get(), data.get(), fc_path.c_str());
  if (status != NOTMF_OK) return fail(status);
  std::cout << "wrote " << fc_path << "\n";

  double mape = 0.0, rmse = 0.0;
  int64_t n_eval = 0;
  status = notmf_score_forecast(data.get(), forecast.get(), &mape, &rmse, &n_eval);
  if (status == NOTMF_OK) {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
    const std::string metrics_path = (fs::path(out_dir) / "metrics.txt").string();
    write_metrics(metrics_path, mape, rmse, n_eval, elapsed.count(), config, flags.variant,
                  train_cols, horizon, windows);
    std::cout << "mape " << format_value(mape) << ", rmse " << format_value(rmse) << " ("
              << n_eval << " entries)\nwrote " << metrics_path << "\n";
  }
  return 0;
}

int run_eval(const std::string& input, const std::string& out_dir, int64_t train_cols,
             int64_t val_cols, int64_t horizon, const std::string& lambda_grid,
             const std::string& rho_grid, const ConfigFlags& flags) {
  notmf_dataset* raw = nullptr;
  notmf_status status = notmf_dataset_from_csv(input.c_str(), flags.zero_as_missing, &raw);
  if (status != NOTMF_OK) return fail(status);
  DatasetPtr data(raw);

  const std::vector<double> lambdas = parse_grid(lambda_grid, "lambda");
  const std::vector<double> rhos = parse_grid(rho_grid, "rho");
  const notmf_config config = flags.resolve();
  notmf_grid_result* raw_grid = nullptr;
  status = notmf_grid_search(data.get(), &config, train_cols, val_cols, horizon, lambdas.data(),
                             static_cast<int64_t>(lambdas.size()), rhos.data(),
                             static_cast<int64_t>(rhos.size()), &raw_grid);
  if (status != NOTMF_OK) return fail(status);
  GridPtr grid(raw_grid);

  ensure_dir(out_dir);
  const std::string table_path = (fs::path(out_dir) / "score_table.csv").string();
  std::ofstream table(table_path);
  table << "lambda,rho,mape,rmse\n";
  for (int64_t i = 0; i < notmf_grid_size(grid.get()); ++i) {
    double lambda = 0.0, rho = 0.0, mape = 0.0, rmse = 0.0;
    check(notmf_grid_cell(grid.get(), i, &lambda, &rho, &mape, &rmse));
    table << format_value(lambda) << ',' << format_value(rho) << ',' << format_value(mape) << ','
          << format_value(rmse) << '\n';
  }
  table.close();

  double lambda = 0.0, rho = 0.0, mape = 0.0, rmse = 0.0;
  check(notmf_grid_cell(grid.get(), notmf_grid_best_index(grid.get()), &lambda, &rho, &mape,
                        &rmse));
  std::cout << "best: lambda=" << format_value(lambda) << " rho=" << format_value(rho)
            << " mape=" << format_value(mape) << " rmse=" << format_value(rmse) << "\nwrote "
            << table_path << "\n";
  return 0;
}

int run_synth(const std::string& out_dir, const notmf_synth_spec& spec) {
  notmf_dataset* full = nullptr;
  notmf_dataset* masked = nullptr;
  const notmf_status status = notmf_synthetic(&spec, &full, &masked);
  if (status != NOTMF_OK) return fail(status);
  DatasetPtr full_ptr(full), masked_ptr(masked);

  ensure_dir(out_dir);
  const std::string full_path = (fs::path(out_dir) / "synthetic_full.csv").string();
  const std::string masked_path = (fs::path(out_dir) / "synthetic_masked.csv").string();
  check(notmf_dataset_to_csv(full_ptr.get(), full_path.c_str()));
  check(notmf_dataset_to_csv(masked_ptr.get(), masked_path.c_str()));
  std::cout << "wrote " << full_path << " (" << notmf_dataset_rows(full_ptr.get()) << " x "
            << notmf_dataset_cols(full_ptr.get()) << ")\nwrote " << masked_path << " ("
            << notmf_dataset_observed_count(masked_ptr.get()) << " observed entries)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"notmf: nonstationary temporal matrix factorization forecasting"};
  app.require_subcommand(1);

  auto* fit_cmd = app.add_subcommand("fit", "Train a model on a CSV matrix");
  std::string fit_input, fit_out = "out";
  int64_t fit_train_cols = 0;
  ConfigFlags fit_flags;
  fit_cmd->add_option("--input", fit_input, "Input CSV")->required()->envname("NOTMF_INPUT");
  fit_cmd->add_option("--output-dir", fit_out, "Artifact directory")
      ->envname("NOTMF_OUTPUT_DIR")
      ->capture_default_str();
  fit_cmd->add_option("--train-cols", fit_train_cols, "Use only the first K columns")
      ->envname("NOTMF_TRAIN_COLS");
  fit_flags.attach(fit_cmd);

  auto* fc_cmd = app.add_subcommand("forecast", "Forecast from a saved model");
  std::string fc_model, fc_truth, fc_out = "out";
  int64_t fc_horizon = 1;
  bool fc_zero_missing = false;
  fc_cmd->add_option("--model", fc_model, "Model archive from fit")
      ->required()
      ->envname("NOTMF_MODEL");
  fc_cmd->add_option("--input", fc_truth, "CSV with labels and, when long enough, ground truth")
      ->envname("NOTMF_INPUT");
  fc_cmd->add_option("--horizon", fc_horizon, "Steps ahead")
      ->envname("NOTMF_HORIZON")
      ->capture_default_str();
  fc_cmd->add_option("--output-dir", fc_out, "Artifact directory")
      ->envname("NOTMF_OUTPUT_DIR")
      ->capture_default_str();
  fc_cmd->add_flag("--zero-as-missing", fc_zero_missing, "Treat numeric 0 as missing on load")
      ->envname("NOTMF_ZERO_AS_MISSING");

  auto* roll_cmd = app.add_subcommand("rolling", "Rolling forecast with a fixed dictionary");
  std::string roll_input, roll_out = "out";
  int64_t roll_train = 0, roll_horizon = 1, roll_windows = 1;
  ConfigFlags roll_flags;
  roll_cmd->add_option("--input", roll_input, "Input CSV")->required()->envname("NOTMF_INPUT");
  roll_cmd->add_option("--train-cols", roll_train, "Training columns for the initial fit")
      ->required()
      ->envname("NOTMF_TRAIN_COLS");
  roll_cmd->add_option("--horizon", roll_horizon, "Steps per window")
      ->envname("NOTMF_HORIZON")
      ->capture_default_str();
  roll_cmd->add_option("--windows", roll_windows, "Number of rolling windows")
      ->envname("NOTMF_WINDOWS")
      ->capture_default_str();
  roll_cmd->add_option("--output-dir", roll_out, "Artifact directory")
      ->envname("NOTMF_OUTPUT_DIR")
      ->capture_default_str();
  roll_flags.attach(roll_cmd);

  auto* eval_cmd = app.add_subcommand("eval", "Validation grid search over (lambda, rho)");
  std::string eval_input, eval_out = "out", lambda_grid = "0.1,1,10", rho_grid = "0.5,5,50";
  int64_t eval_train = 0, eval_val = 0, eval_horizon = 1;
  ConfigFlags eval_flags;
  eval_cmd->add_option("--input", eval_input, "Input CSV")->required()->envname("NOTMF_INPUT");
  eval_cmd->add_option("--train-cols", eval_train, "Training columns")
      ->required()
      ->envname("NOTMF_TRAIN_COLS");
  eval_cmd->add_option("--val-cols", eval_val, "Validation columns (multiple of horizon)")
      ->required()
      ->envname("NOTMF_VAL_COLS");
  eval_cmd->add_option("--horizon", eval_horizon, "Steps per validation window")
      ->envname("NOTMF_HORIZON")
      ->capture_default_str();
  eval_cmd->add_option("--lambda-grid", lambda_grid, "Comma-separated lambda values")
      ->envname("NOTMF_LAMBDA_GRID")
      ->capture_default_str();
  eval_cmd->add_option("--rho-grid", rho_grid, "Comma-separated rho values")
      ->envname("NOTMF_RHO_GRID")
      ->capture_default_str();
  eval_cmd->add_option("--output-dir", eval_out, "Artifact directory")
      ->envname("NOTMF_OUTPUT_DIR")
      ->capture_default_str();
  eval_flags.attach(eval_cmd);

  auto* synth_cmd = app.add_subcommand("synth", "Generate the synthetic benchmark CSV pair");
  std::string synth_out = "out";
  notmf_synth_spec spec;
  notmf_synth_spec_default(&spec);
  synth_cmd->add_option("--series", spec.n_series, "Number of series N")->capture_default_str();
  synth_cmd->add_option("--steps", spec.n_steps, "Number of time steps T")->capture_default_str();
  synth_cmd->add_option("--true-rank", spec.true_rank, "Generating rank")->capture_default_str();
  synth_cmd->add_option("--true-season", spec.true_season, "Generating season")
      ->capture_default_str();
  synth_cmd->add_option("--true-order", spec.true_order, "Generating VAR order")
      ->capture_default_str();
  synth_cmd->add_option("--noise-sd", spec.noise_sd, "Observation noise")->capture_default_str();
  synth_cmd->add_option("--missing-rate", spec.missing_rate, "Bernoulli missing rate")
      ->capture_default_str();
  synth_cmd->add_option("--seed", spec.seed, "Generator seed")
      ->envname("NOTMF_SEED")
      ->capture_default_str();
  synth_cmd->add_option("--output-dir", synth_out, "Artifact directory")
      ->envname("NOTMF_OUTPUT_DIR")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (fit_cmd->parsed()) return run_fit(fit_input, fit_out, fit_train_cols, fit_flags);
  if (fc_cmd->parsed())
    return run_forecast(fc_model, fc_truth, fc_horizon, fc_out, fc_zero_missing);
  if (roll_cmd->parsed())
    return run_rolling(roll_input, roll_out, roll_train, roll_horizon, roll_windows, roll_flags);
  if (eval_cmd->parsed())
    return run_eval(eval_input, eval_out, eval_train, eval_val, eval_horizon, lambda_grid,
                    rho_grid, eval_flags);
  if (synth_cmd->parsed()) return run_synth(synth_out, spec);
  return 1;
}
