#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "support.hpp"
#include "tgf/data/synth.hpp"
#include "tgf/io/digest.hpp"
#include "tgf/io/model_bundle.hpp"
#include "tgf/io/tables.hpp"
#include "tgf/train.hpp"

using namespace tgf;

namespace {

NormStats stats_for(const WindowSet& ws) {
  NormStats s;
  s.names = ws.feature_names;
  for (std::size_t j = 0; j < ws.features(); ++j) {
    s.min.push_back(100.0 * static_cast<double>(j));
    s.max.push_back(100.0 * static_cast<double>(j) + 50.0 + static_cast<double>(j));
  }
  return s;
}

std::vector<AnyModel> one_of_each(const WindowSet& ws) {
  std::vector<AnyModel> out;
  RbfnForecaster r;
  r.lags = 2;
  RbfnOptions opt;
  opt.centers = 4;
  opt.seed = RngSeed{5};
  r.model = rbfn_fit(lagged_design(ws, r.lags), ws.targets, opt);
  out.emplace_back(r);
  GrnnForecaster g;
  g.model = grnn_fit(lagged_design(ws, 1), ws.targets);
  out.emplace_back(g);
  out.emplace_back(BiLstmModel::init(ws.features(), 3, RngSeed{1}));
  out.emplace_back(BiGruModel::init(ws.features(), 3, RngSeed{2}));
  HybridConfig hc;
  hc.window = ws.window;
  hc.features = ws.features();
  hc.d_model = 4;
  hc.heads = 2;
  hc.layers = 1;
  hc.d_ffn = 6;
  hc.d_gru = 3;
  out.emplace_back(HybridModel::init(hc, RngSeed{3}));
  return out;
}

Forecast sample_forecast(std::size_t n, std::uint64_t seed, bool band) {
  Rng rng(RngSeed{seed});
  Forecast fc;
  const Date start{std::chrono::year{2022} / 3 / 1};
  for (std::size_t i = 0; i < n; ++i) {
    fc.dates.push_back(start + std::chrono::days{static_cast<long>(i)});
    fc.actual.push_back(20000.0 + 1000.0 * rng.normal());
    fc.predicted.push_back(fc.actual.back() + 0.1234567890123 * rng.normal());
    if (band) {
      fc.lower.push_back(fc.predicted.back() - 17.25);
      fc.upper.push_back(fc.predicted.back() + 1.0 / 3.0);
    }
  }
  return fc;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("tgf_io_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(JsonCodec, TensorRoundTripIsBitExact) {
  Rng rng(RngSeed{9});
  const auto t = tgf::testing::random_tensor(3, 5, rng, 1e3);
  const auto back = tensor_from_json(Json::parse(tensor_to_json(t).dump()), "t");
  EXPECT_EQ(back.shape_string(), t.shape_string());
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(back[i], t[i]);
}

TEST(JsonCodec, TensorRejectsWrongLength) {
  Json j = {{"rows", 2}, {"cols", 2}, {"data", {1.0, 2.0, 3.0}}};
  EXPECT_THROW(tensor_from_json(j, "t"), DataError);
}

TEST(JsonCodec, FrameAndWindowSetRoundTrip) {
  const auto frame = synthesize_series(RngSeed{4}, 40);
  const auto back = frame_from_json(Json::parse(frame_to_json(frame).dump()));
  EXPECT_EQ(back.dates(), frame.dates());
  EXPECT_EQ(back.names(), frame.names());
  for (std::size_t i = 0; i < frame.values().size(); ++i) EXPECT_EQ(back.values()[i], frame.values()[i]);

  const auto ws = make_windows(apply_minmax(frame, fit_minmax(frame)), 5, columns::kClose);
  const auto wb = window_set_from_json(Json::parse(window_set_to_json(ws).dump()));
  ASSERT_EQ(wb.size(), ws.size());
  EXPECT_EQ(wb.target_dates, ws.target_dates);
  EXPECT_EQ(wb.targets, ws.targets);
  EXPECT_EQ(wb.feature_names, ws.feature_names);
  for (std::size_t i = 0; i < ws.size(); ++i)
    for (std::size_t e = 0; e < ws.inputs[i].size(); ++e) EXPECT_EQ(wb.inputs[i][e], ws.inputs[i][e]);
}

TEST(JsonCodec, NormStatsRoundTrip) {
  const auto frame = synthesize_series(RngSeed{4}, 20);
  const auto s = fit_minmax(frame);
  EXPECT_EQ(norm_stats_from_json(Json::parse(norm_stats_to_json(s).dump())), s);
}

TEST(ModelBundle, EveryKindSurvivesSaveAndLoad) {
  const auto ws = tgf::testing::small_window_set(12, 4, 3, 21);
  const auto dir = scratch_dir("bundles");
  for (auto& model : one_of_each(ws)) {
    ModelBundle b;
    b.model = model;
    b.window = ws.window;
    b.features = ws.feature_names;
    b.target = ws.target_column;
    b.stats = stats_for(ws);
    b.train_residuals = {0.5, -1.25, 3.0};
    const auto path = (dir / (b.kind() + ".json")).string();
    save_bundle(b, path);
    const auto loaded = load_bundle(path);
    EXPECT_EQ(loaded.kind(), b.kind());
    EXPECT_EQ(loaded.window, b.window);
    EXPECT_EQ(loaded.features, b.features);
    EXPECT_EQ(loaded.stats, b.stats);
    EXPECT_EQ(loaded.train_residuals, b.train_residuals);
    for (const auto& w : ws.inputs) EXPECT_EQ(predict_any(loaded.model, w), predict_any(b.model, w)) << b.kind();
  }
}

TEST(ModelBundle, RejectsForeignAndTruncatedDocuments) {
  EXPECT_THROW(bundle_from_json(Json{{"format", "other"}}), DataError);
  const auto ws = tgf::testing::small_window_set(6, 3, 2, 4);
  ModelBundle b;
  b.model = BiGruModel::init(2, 2, RngSeed{1});
  b.window = 3;
  b.features = ws.feature_names;
  b.stats = stats_for(ws);
  auto j = bundle_to_json(b);
  j["parameters"].erase(j["parameters"].begin());
  EXPECT_THROW(bundle_from_json(j), DataError);
  auto k = bundle_to_json(b);
  k["kind"] = "svm";
  EXPECT_THROW(bundle_from_json(k), SchemaError);
}

TEST(ModelBundle, ShapeMismatchIsDimensionError) {
  ModelBundle b;
  b.model = BiLstmModel::init(2, 3, RngSeed{1});
  b.window = 3;
  b.features = {"a", "b"};
  auto j = bundle_to_json(b);
  j["hyperparameters"]["hidden"] = 4;
  EXPECT_THROW(bundle_from_json(j), DimensionError);
}

TEST(Tables, PredictionsCsvRoundTripIsLossless) {
  for (bool band : {true, false}) {
    const auto fc = sample_forecast(25, 3, band);
    std::istringstream in(forecast_to_csv(fc));
    const auto back = forecast_from_csv(in, "mem");
    EXPECT_EQ(back.dates, fc.dates);
    EXPECT_EQ(back.actual, fc.actual);
    EXPECT_EQ(back.predicted, fc.predicted);
    EXPECT_EQ(back.lower, fc.lower);
    EXPECT_EQ(back.upper, fc.upper);
  }
}

TEST(Tables, PredictionsCsvRejectsBadRows) {
  std::istringstream missing("date,actual,predicted\n2020-01-01,1,2\n");
  EXPECT_THROW(forecast_from_csv(missing, "m"), SchemaError);
  std::istringstream order("date,actual,predicted,lower,upper\n2020-01-02,1,2,,\n2020-01-01,1,2,,\n");
  EXPECT_THROW(forecast_from_csv(order, "m"), OrderingError);
  std::istringstream nan("date,actual,predicted,lower,upper\n2020-01-02,nan,2,,\n");
  EXPECT_THROW(forecast_from_csv(nan, "m"), ParseError);
}

TEST(Tables, MetricsAndLossCsvRoundTrip) {
  MetricReport r{1.0 / 3.0, std::sqrt(1.0 / 3.0), 0.1, 2.825, 10};
  std::istringstream in(metrics_to_csv({"hybrid"}, {r}));
  const auto t = parse_csv_table(in, "metrics");
  ASSERT_EQ(t.header, (std::vector<std::string>{"model", "mse", "rmse", "mae", "mape"}));
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(csv_number(t.rows[0][1], "m", 0), r.mse);
  EXPECT_EQ(csv_number(t.rows[0][2], "m", 0), r.rmse);
  EXPECT_EQ(csv_number(t.rows[0][4], "m", 0), r.mape_percent);

  const std::vector<double> trace{0.5, 0.25, 1e-7 / 3.0};
  std::istringstream lin(loss_trace_to_csv(trace));
  const auto lt = parse_csv_table(lin, "loss");
  ASSERT_EQ(lt.rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(lt.rows[i][0], std::to_string(i + 1));
    EXPECT_EQ(csv_number(lt.rows[i][1], "l", i), trace[i]);
  }
}

TEST(Tables, ComparisonJsonAndCsvCarryTheReportColumns) {
  std::vector<Forecast> fcs;
  std::vector<std::string> names{"a", "b", "c"};
  for (std::uint64_t s = 0; s < 3; ++s) {
    auto fc = sample_forecast(30, 11, false);
    Rng rng(RngSeed{s + 100});
    for (auto& p : fc.predicted) p += static_cast<double>(s) * rng.normal();
    fcs.push_back(fc);
  }
  const auto rep = compare_forecasts(names, fcs);
  const auto j = comparison_to_json(rep);
  EXPECT_EQ(j["pairs"].size(), 3u);
  for (const char* key : {"model1", "model2", "wilcoxon_R", "raw_p", "bonferroni_p", "significant"})
    EXPECT_TRUE(j["pairs"][0].contains(key)) << key;
  EXPECT_EQ(j["friedman"]["df"], 2);

  std::istringstream in(comparison_to_csv(rep));
  const auto t = parse_csv_table(in, "cmp");
  EXPECT_EQ(t.header,
            (std::vector<std::string>{"model1", "model2", "wilcoxon_R", "raw_p", "bonferroni_p", "significant"}));
  ASSERT_EQ(t.rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(csv_number(t.rows[i][3], "c", i), rep.pairs[i].p_raw);
    EXPECT_EQ(csv_number(t.rows[i][4], "c", i), rep.pairs[i].p_corrected);
  }
}

TEST(Tables, CompareNamesTheFirstMisalignedDate) {
  auto a = sample_forecast(10, 1, false);
  auto b = sample_forecast(10, 2, false);
  for (std::size_t i = 7; i < 10; ++i) b.dates[i] = b.dates[i] + std::chrono::days{100};
  try {
    compare_forecasts({"a", "b"}, {a, b});
    FAIL() << "expected AlignmentError";
  } catch (const AlignmentError& e) {
    EXPECT_NE(std::string(e.what()).find(format_iso_date(b.dates[7])), std::string::npos) << e.what();
  }
  auto shorter = a;
  shorter.dates.pop_back();
  shorter.actual.pop_back();
  shorter.predicted.pop_back();
  EXPECT_THROW(compare_forecasts({"a", "s"}, {a, shorter}), AlignmentError);
  EXPECT_THROW(compare_forecasts({"a"}, {a}), SizeError);
}

TEST(Tables, PlotDataHasOneActualRowPerDate) {
  const auto a = sample_forecast(5, 1, true);
  const auto b = sample_forecast(5, 2, false);
  std::map<Date, double> fgi{{a.dates[0], 10.0}, {a.dates[1], 90.0}};
  std::istringstream in(plot_data_csv({"m1", "m2"}, {a, b}, fgi));
  const auto t = parse_csv_table(in, "plot");
  EXPECT_EQ(t.header,
            (std::vector<std::string>{"date", "series", "value", "band_lo", "band_hi", "fgi_category"}));
  EXPECT_EQ(t.rows.size(), 5u * 3u + 2u);
  EXPECT_EQ(t.rows[0][1], "actual");
  EXPECT_EQ(t.rows[0][5], std::string(to_string(classify_fgi(10.0))));
  EXPECT_FALSE(t.rows[1][3].empty());
  EXPECT_TRUE(t.rows[2][3].empty());
}

TEST(Digest, KnownSha256Vectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
