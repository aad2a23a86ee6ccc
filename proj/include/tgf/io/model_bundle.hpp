#pragma once

#include <string>
#include <variant>

#include "tgf/forecast.hpp"
#include "tgf/hybrid/model.hpp"
#include "tgf/io/json_codec.hpp"
#include "tgf/recurrent/birnn.hpp"

namespace tgf {

using AnyModel = std::variant<RbfnForecaster, GrnnForecaster, BiLstmModel, BiGruModel, HybridModel>;

inline constexpr const char* kModelNames[] = {"rbfn", "grnn", "bilstm", "bigru", "hybrid"};

inline std::string model_kind(const AnyModel& m) { return kModelNames[m.index()]; }

inline double predict_any(const AnyModel& m, const Tensor2& window) {
  return std::visit([&](const auto& model) { return model.predict(window); }, m);
}

/// A trained model plus everything needed to run it on raw data.
struct ModelBundle {
  AnyModel model;
  std::size_t window = 0;
  std::vector<std::string> features;
  std::string target = columns::kClose;
  NormStats stats;
  std::vector<double> train_residuals;  // original scale, for prediction intervals

  std::string kind() const { return model_kind(model); }
};

namespace detail {

template <class Model>
Json params_to_json(const Model& m) {
  Json out = Json::object();
  Model::for_each_param(m, [&](const std::string& name, const Tensor2& t) { out[name] = tensor_to_json(t); });
  return out;
}

template <class Model>
void params_from_json(Model& m, const Json& j) {
  Model::for_each_param(m, [&](const std::string& name, Tensor2& t) {
    if (!j.contains(name)) throw SchemaError("model bundle: missing parameter '" + name + "'");
    auto loaded = tensor_from_json(j.at(name), "parameter '" + name + "'");
    if (!t.same_shape(loaded) && t.size() != 0) {
      throw DimensionError("model bundle: parameter '" + name + "' has shape " + loaded.shape_string() +
                           ", expected " + t.shape_string());
    }
    t = std::move(loaded);
  });
}

inline HybridConfig hybrid_config_from_json(const Json& h) {
  HybridConfig c;
  c.window = h.at("window").get<std::size_t>();
  c.features = h.at("features").get<std::size_t>();
  c.d_model = h.at("d_model").get<std::size_t>();
  c.heads = h.at("heads").get<std::size_t>();
  c.layers = h.at("layers").get<std::size_t>();
  c.d_ffn = h.at("d_ffn").get<std::size_t>();
  c.d_gru = h.at("d_gru").get<std::size_t>();
  return c;
}

}  // namespace detail

inline Json model_hyperparameters(const AnyModel& m) {
  struct Visitor {
    Json operator()(const RbfnForecaster& f) const {
      return {{"lags", f.lags}, {"centers", f.model.neurons()}, {"input_size", f.model.input_size()}};
    }
    Json operator()(const GrnnForecaster& f) const {
      return {{"lags", f.lags}, {"sigma", f.model.sigma}, {"samples", f.model.samples()},
              {"input_size", f.model.input_size()}};
    }
    Json operator()(const BiLstmModel& b) const {
      return {{"input_size", b.input_size()}, {"hidden", b.hidden_size()}};
    }
    Json operator()(const BiGruModel& b) const {
      return {{"input_size", b.input_size()}, {"hidden", b.hidden_size()}};
    }
    Json operator()(const HybridModel& h) const {
      const auto& c = h.config;
      return {{"window", c.window}, {"features", c.features}, {"d_model", c.d_model},
              {"heads", c.heads},   {"layers", c.layers},     {"d_ffn", c.d_ffn},
              {"d_gru", c.d_gru}};
    }
  };
  return std::visit(Visitor{}, m);
}

inline Json bundle_to_json(const ModelBundle& b) {
  Json params = std::visit(
      [](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, RbfnForecaster> || std::is_same_v<M, GrnnForecaster>) {
          return detail::params_to_json(m.model);
        } else {
          return detail::params_to_json(m);
        }
      },
      b.model);
  return Json{{"format", "tgf-model"},
              {"version", 1},
              {"kind", b.kind()},
              {"hyperparameters", model_hyperparameters(b.model)},
              {"window", b.window},
              {"features", b.features},
              {"target", b.target},
              {"norm_stats", norm_stats_to_json(b.stats)},
              {"train_residuals", b.train_residuals},
              {"parameters", params}};
}

inline ModelBundle bundle_from_json(const Json& j) {
  try {
    if (j.value("format", "") != "tgf-model") throw SchemaError("model bundle: not a tgf-model document");
    if (j.at("version").get<int>() != 1) throw SchemaError("model bundle: unsupported version");
    ModelBundle b;
    b.window = j.at("window").get<std::size_t>();
    b.features = j.at("features").get<std::vector<std::string>>();
    b.target = j.at("target").get<std::string>();
    b.stats = norm_stats_from_json(j.at("norm_stats"));
    b.train_residuals = j.value("train_residuals", std::vector<double>{});
    const auto kind = j.at("kind").get<std::string>();
    const auto& h = j.at("hyperparameters");
    const auto& p = j.at("parameters");
    if (kind == "rbfn") {
      RbfnForecaster f;
      f.lags = h.at("lags").get<std::size_t>();
      detail::params_from_json(f.model, p);
      f.model.validate();
      b.model = std::move(f);
    } else if (kind == "grnn") {
      GrnnForecaster f;
      f.lags = h.at("lags").get<std::size_t>();
      f.model.sigma = h.at("sigma").get<double>();
      detail::params_from_json(f.model, p);
      b.model = std::move(f);
    } else if (kind == "bilstm") {
      auto m = BiLstmModel::zeros(h.at("input_size").get<std::size_t>(), h.at("hidden").get<std::size_t>());
      detail::params_from_json(m, p);
      b.model = std::move(m);
    } else if (kind == "bigru") {
      auto m = BiGruModel::zeros(h.at("input_size").get<std::size_t>(), h.at("hidden").get<std::size_t>());
      detail::params_from_json(m, p);
      b.model = std::move(m);
    } else if (kind == "hybrid") {
      auto m = HybridModel::zeros(detail::hybrid_config_from_json(h));
      detail::params_from_json(m, p);
      b.model = std::move(m);
    } else {
      throw SchemaError("model bundle: unknown model kind '" + kind + "'");
    }
    return b;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("model bundle: ") + e.what());
  }
}

inline void save_bundle(const ModelBundle& b, const std::string& path) {
  write_text_file(path, dump_json(bundle_to_json(b)));
}

inline ModelBundle load_bundle(const std::string& path) { return bundle_from_json(read_json_file(path)); }

}  // namespace tgf
