#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "tgf/data/synth.hpp"
#include "tgf/eval/intervals.hpp"
#include "tgf/experiment/config.hpp"
#include "tgf/io/digest.hpp"
#include "tgf/io/model_bundle.hpp"
#include "tgf/io/tables.hpp"
#include "tgf/train.hpp"

namespace tgf {

/// Called as each pipeline stage starts; used by tests to check ordering.
using StageObserver = std::function<void(std::string_view stage)>;

struct ManifestEntry {
  std::string path;  // relative to the output directory
  std::size_t bytes = 0;
  std::string sha256;
};

struct ModelRun {
  std::string name;
  ModelBundle bundle;
  std::vector<double> loss_trace;
  Forecast forecast;
  MetricReport metrics;
};

struct RunResult {
  ExperimentConfig config;
  NormStats stats;
  WindowSet train_windows;
  WindowSet test_windows;
  std::vector<ModelRun> models;
  ComparisonReport report;
  std::vector<ManifestEntry> manifest;
  std::string output_dir;

  const ModelRun& model(std::string_view name) const {
    for (const auto& m : models)
      if (m.name == name) return m;
    throw ConfigError("no model named '" + std::string(name) + "'");
  }
};

/// Loads or synthesizes the raw frame, composes the FGI and keeps the configured features.
inline SeriesFrame load_experiment_frame(const ExperimentConfig& cfg) {
  SeriesFrame raw = cfg.synthetic
                        ? synthesize_series(RngSeed{cfg.synthetic->seed}, cfg.synthetic->rows, cfg.synthetic->params)
                        : load_series(cfg.data_path);
  raw = with_composed_fgi(raw, cfg.fgi_weight_sentiment, cfg.fgi_weight_trends);
  for (const auto& f : cfg.features) {
    if (!raw.has_column(f)) throw SchemaError("input has no column '" + f + "' required by the features");
  }
  return raw.select(cfg.features);
}

namespace detail {

inline TrainConfig train_config(const GradientTraining& t, RngSeed seed) {
  TrainConfig c;
  c.epochs = t.epochs;
  c.adam.lr = t.learning_rate;
  c.batch_size = t.batch_size;
  c.seed = seed;
  return c;
}

template <class Model>
std::vector<double> train_residuals(const Model& model, const WindowSet& train, const NormStats& stats) {
  const auto fc = forecast_windows(model, train, stats);
  std::vector<double> r(fc.size());
  for (std::size_t i = 0; i < fc.size(); ++i) r[i] = fc.actual[i] - fc.predicted[i];
  return r;
}

/// Fits one model kind. Kernel models have no epochs; their trace holds the
/// single training MSE after fitting.
inline AnyModel fit_model(std::size_t kind, const ExperimentConfig& cfg, const WindowSet& train, RngSeed seed,
                          std::vector<double>& trace) {
  const auto k = train.features();
  switch (kind) {
    case 0: {
      RbfnForecaster f;
      f.lags = cfg.rbfn.lags;
      RbfnOptions opt;
      opt.centers = cfg.rbfn.centers;
      opt.seed = seed;
      opt.spread = cfg.rbfn.spread;
      opt.ridge = cfg.rbfn.ridge;
      f.model = rbfn_fit(lagged_design(train, f.lags), train.targets, opt);
      trace = {mean_squared_error(f, train)};
      return f;
    }
    case 1: {
      GrnnForecaster f;
      f.lags = cfg.grnn.lags;
      f.model = grnn_fit(lagged_design(train, f.lags), train.targets, cfg.grnn.sigma_grid);
      trace = {mean_squared_error(f, train)};
      return f;
    }
    case 2: {
      auto m = BiLstmModel::init(k, cfg.bilstm.hidden, derive_seed(seed, 0));
      trace = train_model(m, train, train_config(cfg.bilstm.training, derive_seed(seed, 1))).loss_trace;
      return m;
    }
    case 3: {
      auto m = BiGruModel::init(k, cfg.bigru.hidden, derive_seed(seed, 0));
      trace = train_model(m, train, train_config(cfg.bigru.training, derive_seed(seed, 1))).loss_trace;
      return m;
    }
    default: {
      auto hc = cfg.hybrid_config();
      hc.features = k;
      auto m = HybridModel::init(hc, derive_seed(seed, 0));
      trace = train_model(m, train, train_config(cfg.hybrid.training, derive_seed(seed, 1))).loss_trace;
      return m;
    }
  }
}

/// Tracks files written into the output directory and deletes them unless committed.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    created_dir_ = !std::filesystem::exists(dir_);
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw DataError("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }
  ArtifactWriter(const ArtifactWriter&) = delete;
  ArtifactWriter& operator=(const ArtifactWriter&) = delete;

  ~ArtifactWriter() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& e : entries_) std::filesystem::remove(dir_ / e.path, ec);
    std::filesystem::remove(dir_ / "manifest.json", ec);
    if (created_dir_ && std::filesystem::is_empty(dir_, ec)) std::filesystem::remove(dir_, ec);
  }

  void write(const std::string& name, const std::string& text) {
    entries_.push_back({name, text.size(), sha256_hex(text)});
    write_text_file((dir_ / name).string(), text);
  }

  /// Writes manifest.json listing every other file; no timestamps so reruns match.
  void finish() {
    Json files = Json::array();
    for (const auto& e : entries_) files.push_back({{"path", e.path}, {"bytes", e.bytes}, {"sha256", e.sha256}});
    write_text_file((dir_ / "manifest.json").string(), dump_json(Json{{"format", "tgf-manifest"}, {"files", files}}));
    committed_ = true;
  }

  const std::vector<ManifestEntry>& entries() const { return entries_; }

 private:
  std::filesystem::path dir_;
  std::vector<ManifestEntry> entries_;
  bool created_dir_ = false;
  bool committed_ = false;
};

}  // namespace detail

/// Normalized, windowed data for one experiment. Stats come from the training part only.
struct PreparedData {
  SeriesFrame frame;
  TrainTestSplit split;
  NormStats stats;
  WindowSet train_windows;
  WindowSet test_windows;
};

inline PreparedData prepare_data(const ExperimentConfig& cfg, const StageObserver& enter) {
  PreparedData d;
  enter("ingest");
  d.frame = load_experiment_frame(cfg);
  enter("split");
  d.split = chronological_split(d.frame, SplitSpec{cfg.split_ratio});
  enter("normalize:fit");
  d.stats = fit_minmax(d.split.train);
  enter("normalize:apply");
  const auto train_n = apply_minmax(d.split.train, d.stats);
  const auto test_n = apply_minmax(d.split.test, d.stats);
  enter("window");
  d.train_windows = make_windows(train_n, cfg.window, cfg.target);
  d.test_windows = make_test_windows(train_n, test_n, cfg.window, cfg.target, cfg.borrow_context);
  if (d.test_windows.size() == 0) {
    throw SizeError("test part of " + std::to_string(d.split.test.rows()) + " rows yields no window of length " +
                    std::to_string(cfg.window));
  }
  return d;
}

/// Index of a model name in kModelNames.
inline std::size_t model_index(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kModelNames); ++i)
    if (name == kModelNames[i]) return i;
  throw ConfigError("unknown model '" + std::string(name) + "' (expected rbfn, grnn, bilstm, bigru or hybrid)");
}

/// Trains one model, forecasts the test windows and attaches the prediction band.
inline ModelRun train_and_forecast(std::size_t kind, const ExperimentConfig& cfg, const PreparedData& data,
                                   const StageObserver& enter) {
  ModelRun run;
  run.name = kModelNames[kind];
  enter("train:" + run.name);
  run.bundle.model =
      detail::fit_model(kind, cfg, data.train_windows, derive_seed(RngSeed{cfg.seed}, kind + 1), run.loss_trace);
  run.bundle.window = cfg.window;
  run.bundle.features = cfg.features;
  run.bundle.target = cfg.target;
  run.bundle.stats = data.stats;

  enter("predict:" + run.name);
  std::visit(
      [&](const auto& m) {
        run.forecast = forecast_windows(m, data.test_windows, data.stats);
        run.bundle.train_residuals = detail::train_residuals(m, data.train_windows, data.stats);
      },
      run.bundle.model);
  for (double y : run.forecast.predicted) {
    if (!std::isfinite(y)) throw NumericalError("non-finite forecast");
  }

  enter("interval:" + run.name);
  const auto band = prediction_interval(run.bundle.train_residuals, run.forecast.predicted, cfg.interval_level);
  run.forecast.lower = band.lower;
  run.forecast.upper = band.upper;
  run.forecast.level = band.level;

  enter("metrics:" + run.name);
  run.metrics = compute_metrics(run.forecast.actual, run.forecast.predicted);
  return run;
}

/// Ingest, normalize on the training part, window, train the five models, forecast
/// the test part with prediction bands, score, compare and write artifacts.
/// Errors carry the failing stage as a message prefix; files already written are removed.
inline RunResult run_experiment(const ExperimentConfig& cfg, const StageObserver& observer = {}) {
  RunResult res;
  res.config = cfg;
  res.output_dir = cfg.output_dir;
  std::string stage;
  const StageObserver enter = [&](std::string_view s) {
    stage = std::string(s);
    if (observer) observer(stage);
  };

  try {
    const auto data = prepare_data(cfg, enter);
    const auto& frame = data.frame;
    res.stats = data.stats;
    res.train_windows = data.train_windows;
    res.test_windows = data.test_windows;
    for (std::size_t kind = 0; kind < std::size(kModelNames); ++kind) {
      res.models.push_back(train_and_forecast(kind, cfg, data, enter));
    }

    enter("compare");
    std::vector<std::string> names;
    std::vector<Forecast> forecasts;
    for (const auto& m : res.models) {
      names.push_back(m.name);
      forecasts.push_back(m.forecast);
    }
    res.report = compare_forecasts(names, forecasts, cfg.significance);

    enter("write");
    detail::ArtifactWriter out(cfg.output_dir);
    out.write("config.resolved.json", dump_json(config_to_json(cfg)));
    std::vector<MetricReport> metrics;
    for (const auto& m : res.models) metrics.push_back(m.metrics);
    out.write("metrics.csv", metrics_to_csv(names, metrics));
    for (const auto& m : res.models) {
      out.write("predictions_" + m.name + ".csv", forecast_to_csv(m.forecast));
      out.write("loss_" + m.name + ".csv", loss_trace_to_csv(m.loss_trace));
      out.write("model_" + m.name + ".json", dump_json(bundle_to_json(m.bundle)));
    }
    out.write("stats.json", dump_json(comparison_to_json(res.report)));
    out.write("comparison.csv", comparison_to_csv(res.report));
    std::map<Date, double> fgi;
    if (frame.has_column(columns::kFgi)) {
      const auto col = frame.column(columns::kFgi);
      for (std::size_t i = 0; i < frame.rows(); ++i) fgi[frame.dates()[i]] = col[i];
    }
    out.write("plot_data.csv", plot_data_csv(names, forecasts, fgi));
    out.finish();
    res.manifest = out.entries();
  } catch (const Error&) {
    rethrow_in_stage(stage);
  }
  return res;
}

}  // namespace tgf
