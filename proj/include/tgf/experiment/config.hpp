#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tgf/core/adam.hpp"
#include "tgf/data/synth.hpp"
#include "tgf/hybrid/model.hpp"
#include "tgf/io/json_codec.hpp"
#include "tgf/kernels/grnn.hpp"

namespace tgf {

struct SyntheticSource {
  std::size_t rows = 600;
  std::uint64_t seed = 1;
  SynthParams params{};
};

struct GradientTraining {
  std::size_t epochs = 100;
  double learning_rate = 1e-3;
  std::size_t batch_size = 0;  // 0 = full batch
};

struct RbfnSettings {
  std::size_t centers = 20;
  std::size_t lags = 1;
  std::optional<double> spread;
  double ridge = 1e-8;
};

struct GrnnSettings {
  std::vector<double> sigma_grid = kDefaultGrnnSigmaGrid;
  std::size_t lags = 1;
};

struct RecurrentSettings {
  std::size_t hidden = 32;
  GradientTraining training{};
};

struct HybridSettings {
  std::size_t d_model = 32;
  std::size_t heads = 4;
  std::size_t layers = 2;
  std::size_t d_ffn = 64;
  std::size_t d_gru = 32;
  GradientTraining training{};
};

struct ExperimentConfig {
  std::string data_path;                  // empty when `synthetic` is set
  std::optional<SyntheticSource> synthetic;
  std::string scenario = "bitcoin";
  std::vector<std::string> features;      // resolved from the scenario unless custom
  std::string target = columns::kClose;
  double split_ratio = 0.8;
  std::size_t window = 30;
  bool borrow_context = false;            // "test_windows": "strict" | "borrow"
  double fgi_weight_sentiment = 0.5;
  double fgi_weight_trends = 0.5;
  std::uint64_t seed = 42;
  double interval_level = 0.95;
  double significance = 0.05;
  std::string output_dir = "out";
  RbfnSettings rbfn{};
  GrnnSettings grnn{};
  RecurrentSettings bilstm{};
  RecurrentSettings bigru{};
  HybridSettings hybrid{};

  HybridConfig hybrid_config() const {
    HybridConfig c;
    c.window = window;
    c.features = features.size();
    c.d_model = hybrid.d_model;
    c.heads = hybrid.heads;
    c.layers = hybrid.layers;
    c.d_ffn = hybrid.d_ffn;
    c.d_gru = hybrid.d_gru;
    return c;
  }
};

inline std::vector<std::string> scenario_features(const std::string& scenario) {
  if (scenario == "bitcoin") return {columns::kClose, columns::kVolume, columns::kFgi};
  if (scenario == "ethereum") return {columns::kClose, columns::kVolume, columns::kFgi, columns::kBtcClose};
  throw ConfigError("unknown scenario '" + scenario + "' (expected bitcoin, ethereum or custom)");
}

namespace detail {

/// Typed access to a JSON object that remembers which keys were consumed so
/// leftovers can be reported as unknown.
class ConfigReader {
 public:
  ConfigReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + "expected a JSON object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const Json::exception&) {
      throw ConfigError("config key '" + qualified(key) + "' has the wrong type");
    }
  }

  void read_count(const std::string& key, std::size_t& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ConfigError("config key '" + qualified(key) + "' must be a nonnegative integer");
    }
    out = v.get<std::size_t>();
  }

  ConfigReader child(const std::string& key) {
    seen_.insert(key);
    static const Json empty = Json::object();
    return ConfigReader(j_.contains(key) ? j_.at(key) : empty, qualified(key));
  }

  void reject_unknown() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError("unknown config key '" + qualified(key) + "'");
  }

  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string where() const { return path_.empty() ? "config: " : "config key '" + path_ + "': "; }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void read_training(ConfigReader& r, GradientTraining& t) {
  r.read_count("epochs", t.epochs);
  r.read("learning_rate", t.learning_rate);
  r.read_count("batch_size", t.batch_size);
  if (!(t.learning_rate > 0.0)) throw ConfigError("config: learning_rate must be positive");
}

inline void read_recurrent(ConfigReader r, RecurrentSettings& s) {
  r.read_count("hidden", s.hidden);
  read_training(r, s.training);
  r.reject_unknown();
  if (s.hidden == 0) throw ConfigError("config key '" + r.qualified("hidden") + "' must be >= 1");
}

}  // namespace detail

/// Parses and fully defaults an experiment config. Relative data paths are
/// resolved against `base_dir` and must exist.
inline ExperimentConfig validate_config(const Json& raw, const std::filesystem::path& base_dir = {}) {
  ExperimentConfig cfg;
  detail::ConfigReader r(raw, "");

  r.read("data", cfg.data_path);
  if (r.has("synthetic")) {
    auto s = r.child("synthetic");
    SyntheticSource src;
    s.read_count("rows", src.rows);
    s.read("seed", src.seed);
    s.read("initial_price", src.params.initial_price);
    s.read("drift", src.params.drift);
    s.read("volatility", src.params.volatility);
    s.read("cycle_period", src.params.cycle_period);
    s.read("coupling", src.params.coupling);
    s.read("sentiment_noise", src.params.sentiment_noise);
    s.read("trends_noise", src.params.trends_noise);
    s.read("base_volume", src.params.base_volume);
    s.read("volume_noise", src.params.volume_noise);
    s.read("aux_price", src.params.aux_price);
    std::string start;
    s.read("start", start);
    if (!start.empty()) {
      const auto d = parse_iso_date(start);
      if (!d) throw ConfigError("config key 'synthetic.start' is not an ISO date");
      src.params.start = *d;
    }
    s.reject_unknown();
    cfg.synthetic = src;
  }
  if (cfg.data_path.empty() == !cfg.synthetic.has_value()) {
    throw ConfigError("config: set exactly one of 'data' (CSV path) or 'synthetic'");
  }
  if (!cfg.data_path.empty()) {
    std::filesystem::path p(cfg.data_path);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    if (!std::filesystem::is_regular_file(p)) {
      throw ConfigError("config: data file '" + p.string() + "' does not exist");
    }
    cfg.data_path = p.lexically_normal().string();
  }

  r.read("scenario", cfg.scenario);
  if (cfg.scenario == "custom") {
    r.read("features", cfg.features);
    if (cfg.features.empty()) throw ConfigError("config: scenario 'custom' requires a 'features' list");
  } else {
    cfg.features = scenario_features(cfg.scenario);
    if (r.has("features")) throw ConfigError("config: 'features' is only allowed with scenario 'custom'");
  }
  if (cfg.synthetic && cfg.scenario == "ethereum") cfg.synthetic->params.aux_price = true;
  r.read("target", cfg.target);
  if (std::find(cfg.features.begin(), cfg.features.end(), cfg.target) == cfg.features.end()) {
    throw ConfigError("config: target '" + cfg.target + "' is not among the features");
  }

  r.read("split_ratio", cfg.split_ratio);
  if (!(cfg.split_ratio > 0.0 && cfg.split_ratio < 1.0)) {
    throw ConfigError("config: split_ratio must lie in (0, 1)");
  }
  r.read_count("window", cfg.window);
  if (cfg.window == 0) throw ConfigError("config: window must be >= 1");
  std::string test_windows = "strict";
  r.read("test_windows", test_windows);
  if (test_windows != "strict" && test_windows != "borrow") {
    throw ConfigError("config: test_windows must be 'strict' or 'borrow'");
  }
  cfg.borrow_context = test_windows == "borrow";

  if (r.has("fgi_weights")) {
    auto w = r.child("fgi_weights");
    w.read("sentiment", cfg.fgi_weight_sentiment);
    w.read("trends", cfg.fgi_weight_trends);
    w.reject_unknown();
    if (cfg.fgi_weight_sentiment < 0.0 || cfg.fgi_weight_trends < 0.0 ||
        std::abs(cfg.fgi_weight_sentiment + cfg.fgi_weight_trends - 1.0) > 1e-12) {
      throw ConfigError("config: fgi_weights must be nonnegative and sum to 1");
    }
  }

  r.read("seed", cfg.seed);
  r.read("interval_level", cfg.interval_level);
  if (!(cfg.interval_level > 0.0 && cfg.interval_level < 1.0)) {
    throw ConfigError("config: interval_level must lie in (0, 1)");
  }
  r.read("significance", cfg.significance);
  if (!(cfg.significance > 0.0 && cfg.significance < 1.0)) {
    throw ConfigError("config: significance must lie in (0, 1)");
  }
  r.read("output_dir", cfg.output_dir);

  auto models = r.child("models");
  {
    auto m = models.child("rbfn");
    m.read_count("centers", cfg.rbfn.centers);
    m.read_count("lags", cfg.rbfn.lags);
    double spread = 0.0;
    if (m.has("spread")) {
      m.read("spread", spread);
      if (!(spread > 0.0)) throw ConfigError("config: models.rbfn.spread must be positive");
      cfg.rbfn.spread = spread;
    }
    m.read("ridge", cfg.rbfn.ridge);
    m.reject_unknown();
    if (cfg.rbfn.centers == 0) throw ConfigError("config: models.rbfn.centers must be >= 1");
    if (cfg.rbfn.ridge < 0.0) throw ConfigError("config: models.rbfn.ridge must be nonnegative");
  }
  {
    auto m = models.child("grnn");
    m.read("sigma_grid", cfg.grnn.sigma_grid);
    m.read_count("lags", cfg.grnn.lags);
    m.reject_unknown();
    if (cfg.grnn.sigma_grid.empty()) throw ConfigError("config: models.grnn.sigma_grid is empty");
    for (double s : cfg.grnn.sigma_grid)
      if (!(s > 0.0)) throw ConfigError("config: models.grnn.sigma_grid values must be positive");
  }
  for (auto lags : {cfg.rbfn.lags, cfg.grnn.lags}) {
    if (lags == 0 || lags > cfg.window) {
      throw ConfigError("config: kernel lags must lie in [1, window]");
    }
  }
  detail::read_recurrent(models.child("bilstm"), cfg.bilstm);
  detail::read_recurrent(models.child("bigru"), cfg.bigru);
  {
    auto m = models.child("hybrid");
    m.read_count("d_model", cfg.hybrid.d_model);
    m.read_count("heads", cfg.hybrid.heads);
    m.read_count("layers", cfg.hybrid.layers);
    m.read_count("d_ffn", cfg.hybrid.d_ffn);
    m.read_count("d_gru", cfg.hybrid.d_gru);
    detail::read_training(m, cfg.hybrid.training);
    m.reject_unknown();
  }
  models.reject_unknown();
  r.reject_unknown();

  cfg.hybrid_config().validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  return validate_config(read_json_file(path), std::filesystem::path(path).parent_path());
}

inline Json training_to_json(const GradientTraining& t) {
  return {{"epochs", t.epochs}, {"learning_rate", t.learning_rate}, {"batch_size", t.batch_size}};
}

/// Fully-resolved snapshot. The output directory is a run location rather than
/// an experiment parameter and is left out so reruns elsewhere stay identical.
inline Json config_to_json(const ExperimentConfig& c) {
  Json j = Json::object();
  if (c.synthetic) {
    const auto& s = *c.synthetic;
    j["synthetic"] = {{"rows", s.rows},
                      {"seed", s.seed},
                      {"start", format_iso_date(s.params.start)},
                      {"initial_price", s.params.initial_price},
                      {"drift", s.params.drift},
                      {"volatility", s.params.volatility},
                      {"cycle_period", s.params.cycle_period},
                      {"coupling", s.params.coupling},
                      {"sentiment_noise", s.params.sentiment_noise},
                      {"trends_noise", s.params.trends_noise},
                      {"base_volume", s.params.base_volume},
                      {"volume_noise", s.params.volume_noise},
                      {"aux_price", s.params.aux_price}};
  } else {
    j["data"] = c.data_path;
  }
  j["scenario"] = c.scenario;
  if (c.scenario == "custom") j["features"] = c.features;
  j["target"] = c.target;
  j["split_ratio"] = c.split_ratio;
  j["window"] = c.window;
  j["test_windows"] = c.borrow_context ? "borrow" : "strict";
  j["fgi_weights"] = {{"sentiment", c.fgi_weight_sentiment}, {"trends", c.fgi_weight_trends}};
  j["seed"] = c.seed;
  j["interval_level"] = c.interval_level;
  j["significance"] = c.significance;
  Json rbfn = {{"centers", c.rbfn.centers}, {"lags", c.rbfn.lags}, {"ridge", c.rbfn.ridge}};
  if (c.rbfn.spread) rbfn["spread"] = *c.rbfn.spread;
  auto with_training = [](Json head, const GradientTraining& t) {
    head.update(training_to_json(t));
    return head;
  };
  Json models = Json::object();
  models["rbfn"] = rbfn;
  models["grnn"] = {{"sigma_grid", c.grnn.sigma_grid}, {"lags", c.grnn.lags}};
  models["bilstm"] = with_training({{"hidden", c.bilstm.hidden}}, c.bilstm.training);
  models["bigru"] = with_training({{"hidden", c.bigru.hidden}}, c.bigru.training);
  models["hybrid"] = with_training({{"d_model", c.hybrid.d_model},
                                    {"heads", c.hybrid.heads},
                                    {"layers", c.hybrid.layers},
                                    {"d_ffn", c.hybrid.d_ffn},
                                    {"d_gru", c.hybrid.d_gru}},
                                   c.hybrid.training);
  j["models"] = models;
  return j;
}

}  // namespace tgf
