// Command-line harness: experiment runs, per-step tools and fixture generation.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

#include "tgf/tgf.hpp"

namespace fs = std::filesystem;
using namespace tgf;

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kData = 3, kNumerical = 4 };

/// "predictions_hybrid.csv" -> "hybrid"; other names keep their stem.
std::string model_name_from_path(const std::string& path) {
  auto stem = fs::path(path).stem().string();
  const std::string prefix = "predictions_";
  if (stem.rfind(prefix, 0) == 0 && stem.size() > prefix.size()) stem.erase(0, prefix.size());
  return stem;
}

SeriesFrame load_frame_with_fgi(const std::string& path, double w1, double w2) {
  return with_composed_fgi(load_series(path), w1, w2);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  write_text_file(path, text);
}

struct RunArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

int cmd_run(const RunArgs& a) {
  auto raw = read_json_file(a.config);
  if (!raw.is_object()) throw ConfigError(a.config + ": config must be a JSON object");
  if (!a.out.empty()) raw["output_dir"] = a.out;
  if (a.seed) raw["seed"] = *a.seed;
  auto cfg = validate_config(raw, fs::path(a.config).parent_path());
  const auto res = run_experiment(cfg, [](std::string_view stage) {
    if (stage.rfind("train:", 0) == 0) std::cerr << "training " << stage.substr(6) << "\n";
  });
  std::cout << metrics_to_csv([&] {
    std::vector<std::string> n;
    for (const auto& m : res.models) n.push_back(m.name);
    return n;
  }(), [&] {
    std::vector<MetricReport> r;
    for (const auto& m : res.models) r.push_back(m.metrics);
    return r;
  }());
  std::cout << "friedman chi2=" << format_double(res.report.friedman.chi2)
            << " p=" << format_double(res.report.friedman.p_value) << "\n"
            << "artifacts written to " << cfg.output_dir << "\n";
  return kOk;
}

struct CompareArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> names;
  std::string out = "report.json";
  double alpha = 0.05;
};

int cmd_compare(const CompareArgs& a) {
  if (!a.names.empty() && a.names.size() != a.inputs.size()) {
    throw ConfigError("compare: --names must list one name per input file");
  }
  std::vector<std::string> names;
  std::vector<Forecast> forecasts;
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    names.push_back(a.names.empty() ? model_name_from_path(a.inputs[i]) : a.names[i]);
    forecasts.push_back(load_forecast(a.inputs[i]));
  }
  const auto rep = compare_forecasts(names, forecasts, a.alpha);
  write_output(a.out, dump_json(comparison_to_json(rep)));
  const auto csv = comparison_to_csv(rep);
  if (a.out != "-") write_output(fs::path(a.out).replace_extension(".csv").string(), csv);
  std::cout << csv;
  return kOk;
}

struct IngestArgs {
  std::string input;
  std::string out = "-";
  std::string scenario = "bitcoin";
  std::vector<std::string> features;
  double split = 0.8;
  std::size_t window = 30;
  bool borrow = false;
};

/// Normalized frames and window sets as one JSON document.
int cmd_ingest(const IngestArgs& a) {
  auto raw = Json{{"data", a.input}, {"scenario", a.scenario}, {"split_ratio", a.split}, {"window", a.window},
                  {"test_windows", a.borrow ? "borrow" : "strict"}};
  if (!a.features.empty()) raw["features"] = a.features;
  auto cfg = validate_config(raw);
  const auto data = prepare_data(cfg, [](std::string_view) {});
  const Json doc{{"format", "tgf-dataset"},
                 {"version", 1},
                 {"source", a.input},
                 {"split_ratio", cfg.split_ratio},
                 {"norm_stats", norm_stats_to_json(data.stats)},
                 {"train", frame_to_json(apply_minmax(data.split.train, data.stats))},
                 {"test", frame_to_json(apply_minmax(data.split.test, data.stats))},
                 {"train_windows", window_set_to_json(data.train_windows)},
                 {"test_windows", window_set_to_json(data.test_windows)}};
  write_output(a.out, dump_json(doc));
  std::cerr << data.split.train.rows() << " train rows, " << data.split.test.rows() << " test rows, "
            << data.train_windows.size() << " train windows, " << data.test_windows.size() << " test windows\n";
  return kOk;
}

struct FgiArgs {
  std::string input;
  std::string out = "-";
  std::optional<double> sentiment;
  std::optional<double> trends;
  double w1 = 0.5;
  double w2 = 0.5;
};

int cmd_fgi(const FgiArgs& a) {
  if (a.sentiment || a.trends) {
    if (!a.sentiment || !a.trends || !a.input.empty()) {
      throw ConfigError("fgi: give both --sentiment and --trends, or --input alone");
    }
    const double score = compose_fgi(*a.sentiment, *a.trends, a.w1, a.w2);
    std::cout << format_double(score) << ',' << to_string(classify_fgi(score)) << "\n";
    return kOk;
  }
  if (a.input.empty()) throw ConfigError("fgi: --input or --sentiment/--trends required");
  SeriesSchema schema;
  schema.required = {columns::kSentiment, columns::kTrends};
  schema.optional = {};
  const auto frame = load_series(a.input, schema);
  std::ostringstream os;
  os << "date,sentiment,trends,fgi,category\n";
  for (std::size_t i = 0; i < frame.rows(); ++i) {
    const double s = frame.values()(i, 0), g = frame.values()(i, 1);
    const double score = compose_fgi(s, g, a.w1, a.w2);
    os << format_iso_date(frame.dates()[i]) << ',' << format_double(s) << ',' << format_double(g) << ','
       << format_double(score) << ',' << to_string(classify_fgi(score)) << '\n';
  }
  write_output(a.out, os.str());
  return kOk;
}

struct TrainArgs {
  std::string config;
  std::string model;
  std::string out;
};

int cmd_train(const TrainArgs& a) {
  const auto kind = model_index(a.model);
  const auto cfg = load_config(a.config);
  std::string stage;
  const StageObserver enter = [&](std::string_view s) { stage = std::string(s); };
  ModelRun run;
  try {
    const auto data = prepare_data(cfg, enter);
    run = train_and_forecast(kind, cfg, data, enter);
  } catch (const Error&) {
    rethrow_in_stage(stage);
  }
  const auto out = a.out.empty() ? "model_" + run.name + ".json" : a.out;
  write_output(out, dump_json(bundle_to_json(run.bundle)));
  std::cout << metrics_to_csv({run.name}, {run.metrics});
  std::cerr << "saved " << out << "\n";
  return kOk;
}

struct PredictArgs {
  std::string model;
  std::string input;
  std::string out = "-";
  double level = 0.95;
  bool no_band = false;
};

int cmd_predict(const PredictArgs& a) {
  const auto bundle = load_bundle(a.model);
  const auto frame = load_frame_with_fgi(a.input, 0.5, 0.5);
  for (const auto& f : bundle.features) {
    if (!frame.has_column(f)) throw SchemaError(a.input + ": missing column '" + f + "' used by the model");
  }
  auto fc = std::visit(
      [&](const auto& m) {
        return predict_series(m, frame.select(bundle.features), bundle.stats, bundle.window, bundle.target);
      },
      bundle.model);
  if (!a.no_band) {
    const auto band = prediction_interval(bundle.train_residuals, fc.predicted, a.level);
    fc.lower = band.lower;
    fc.upper = band.upper;
    fc.level = band.level;
  }
  write_output(a.out, forecast_to_csv(fc));
  return kOk;
}

struct EvaluateArgs {
  std::vector<std::string> inputs;
  std::string out = "-";
};

int cmd_evaluate(const EvaluateArgs& a) {
  std::vector<std::string> names;
  std::vector<MetricReport> reports;
  for (const auto& path : a.inputs) {
    const auto fc = load_forecast(path);
    names.push_back(model_name_from_path(path));
    reports.push_back(compute_metrics(fc.actual, fc.predicted));
  }
  write_output(a.out, metrics_to_csv(names, reports));
  return kOk;
}

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string data;
  std::string out = "-";
};

int cmd_report(const ReportArgs& a) {
  std::vector<std::string> names;
  std::vector<Forecast> forecasts;
  for (const auto& path : a.inputs) {
    names.push_back(model_name_from_path(path));
    forecasts.push_back(load_forecast(path));
  }
  std::map<Date, double> fgi;
  if (!a.data.empty()) {
    const auto frame = load_frame_with_fgi(a.data, 0.5, 0.5);
    if (frame.has_column(columns::kFgi)) {
      const auto col = frame.column(columns::kFgi);
      for (std::size_t i = 0; i < frame.rows(); ++i) fgi[frame.dates()[i]] = col[i];
    }
  }
  write_output(a.out, plot_data_csv(names, forecasts, fgi));
  return kOk;
}

struct SynthArgs {
  std::size_t rows = 600;
  std::uint64_t seed = 1;
  std::string out = "-";
  SynthParams params{};
  std::string start;
  bool raw_sentiment = false;
};

int cmd_synth(SynthArgs a) {
  if (!a.start.empty()) {
    const auto d = parse_iso_date(a.start);
    if (!d) throw ConfigError("synth: --start is not an ISO date");
    a.params.start = *d;
  }
  auto frame = synthesize_series(RngSeed{a.seed}, a.rows, a.params);
  if (a.raw_sentiment) {
    std::vector<std::string> keep;
    for (const auto& n : frame.names())
      if (n != columns::kFgi) keep.push_back(n);
    frame = frame.select(keep);
  }
  write_output(a.out, series_to_csv(frame));
  return kOk;
}

template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const DimensionError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentiment-aware crypto price forecasting toolkit"};
  app.require_subcommand(1);
  std::function<int()> action;

  RunArgs run;
  auto* c_run = app.add_subcommand("run", "Run the full five-model experiment from a config file");
  c_run->add_option("--config", run.config, "Experiment config (JSON)")->required();
  c_run->add_option("--out", run.out, "Output directory (overrides output_dir)");
  c_run->add_option("--seed", run.seed, "Master seed (overrides seed)");
  c_run->callback([&] { action = [&] { return cmd_run(run); }; });

  CompareArgs cmp;
  auto* c_cmp = app.add_subcommand("compare", "Friedman and pairwise Wilcoxon tests over prediction files");
  c_cmp->add_option("--inputs", cmp.inputs, "Prediction CSVs (date,actual,predicted,...)")->required();
  c_cmp->add_option("--names", cmp.names, "Model names, one per input (default: from file names)");
  c_cmp->add_option("--out", cmp.out, "Report JSON path; a CSV with the same stem is written next to it");
  c_cmp->add_option("--alpha", cmp.alpha, "Family-wise significance level")->check(CLI::Range(0.0, 1.0));
  c_cmp->callback([&] { action = [&] { return cmd_compare(cmp); }; });

  IngestArgs ing;
  auto* c_ing = app.add_subcommand("ingest", "Normalize and window a price CSV into a JSON dataset");
  c_ing->add_option("--input", ing.input, "Price CSV")->required();
  c_ing->add_option("--out", ing.out, "Output JSON (default stdout)");
  c_ing->add_option("--scenario", ing.scenario, "bitcoin, ethereum or custom");
  c_ing->add_option("--features", ing.features, "Feature columns for the custom scenario");
  c_ing->add_option("--split", ing.split, "Training share of rows");
  c_ing->add_option("--window", ing.window, "Window length");
  c_ing->add_flag("--borrow", ing.borrow, "Let test windows start in the training part");
  c_ing->callback([&] { action = [&] { return cmd_ingest(ing); }; });

  FgiArgs fgi;
  auto* c_fgi = app.add_subcommand("fgi", "Compose fear-and-greed scores from sentiment and search trends");
  c_fgi->add_option("--input", fgi.input, "CSV with date,sentiment,trends");
  c_fgi->add_option("--out", fgi.out, "Output CSV (default stdout)");
  c_fgi->add_option("--sentiment", fgi.sentiment, "Single sentiment score in [-1, 1]");
  c_fgi->add_option("--trends", fgi.trends, "Single trends score in [0, 100]");
  c_fgi->add_option("--w-sentiment", fgi.w1, "Sentiment weight");
  c_fgi->add_option("--w-trends", fgi.w2, "Trends weight");
  c_fgi->callback([&] { action = [&] { return cmd_fgi(fgi); }; });

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train", "Train one model from a config and save its bundle");
  c_tr->add_option("--config", tr.config, "Experiment config (JSON)")->required();
  c_tr->add_option("--model", tr.model, "rbfn, grnn, bilstm, bigru or hybrid")->required();
  c_tr->add_option("--out", tr.out, "Bundle path (default model_<name>.json)");
  c_tr->callback([&] { action = [&] { return cmd_train(tr); }; });

  PredictArgs pr;
  auto* c_pr = app.add_subcommand("predict", "Forecast a price CSV with a saved model bundle");
  c_pr->add_option("--model", pr.model, "Model bundle JSON")->required();
  c_pr->add_option("--input", pr.input, "Price CSV")->required();
  c_pr->add_option("--out", pr.out, "Predictions CSV (default stdout)");
  c_pr->add_option("--level", pr.level, "Prediction interval level")->check(CLI::Range(0.0, 1.0));
  c_pr->add_flag("--no-band", pr.no_band, "Omit the prediction interval");
  c_pr->callback([&] { action = [&] { return cmd_predict(pr); }; });

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "MSE, RMSE, MAE and MAPE of prediction files");
  c_ev->add_option("--inputs", ev.inputs, "Prediction CSVs")->required();
  c_ev->add_option("--out", ev.out, "Metrics CSV (default stdout)");
  c_ev->callback([&] { action = [&] { return cmd_evaluate(ev); }; });

  ReportArgs rp;
  auto* c_rp = app.add_subcommand("report", "Plot-ready long-format CSV from prediction files");
  c_rp->add_option("--inputs", rp.inputs, "Prediction CSVs")->required();
  c_rp->add_option("--data", rp.data, "Price CSV supplying fear-and-greed categories");
  c_rp->add_option("--out", rp.out, "Output CSV (default stdout)");
  c_rp->callback([&] { action = [&] { return cmd_report(rp); }; });

  SynthArgs sy;
  auto* c_sy = app.add_subcommand("synth", "Generate a seeded synthetic price CSV");
  c_sy->add_option("--rows", sy.rows, "Number of daily rows");
  c_sy->add_option("--seed", sy.seed, "Generator seed");
  c_sy->add_option("--out", sy.out, "Output CSV (default stdout)");
  c_sy->add_option("--start", sy.start, "First date (YYYY-MM-DD)");
  c_sy->add_option("--drift", sy.params.drift, "Daily log-price drift");
  c_sy->add_option("--volatility", sy.params.volatility, "Daily log-price volatility");
  c_sy->add_option("--coupling", sy.params.coupling, "Sentiment effect on the next log return");
  c_sy->add_option("--cycle", sy.params.cycle_period, "Sentiment cycle length in days");
  c_sy->add_flag("--aux-price", sy.params.aux_price, "Add a correlated btc_close column");
  c_sy->add_flag("--raw-sentiment", sy.raw_sentiment, "Drop the composed fgi column");
  c_sy->callback([&] { action = [&] { return cmd_synth(sy); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  return guarded(action);
}
