#pragma once

#include <string>
#include <vector>

#include "tgf/core/rng.hpp"
#include "tgf/core/tensor.hpp"

namespace tgf {

/// Named handle onto one trainable tensor of a model.
struct ParamRef {
  std::string name;
  Tensor2* tensor;
};

/// Flattens a model's parameters into a list. Models expose
/// `template <class Self, class F> static void for_each_param(Self&, F&&)`.
template <class Model>
std::vector<ParamRef> parameter_list(Model& model) {
  std::vector<ParamRef> out;
  Model::for_each_param(model, [&](const std::string& name, Tensor2& t) {
    out.push_back(ParamRef{name, &t});
  });
  return out;
}

template <class Model>
std::size_t parameter_count(const Model& model) {
  std::size_t n = 0;
  Model::for_each_param(model, [&](const std::string&, const Tensor2& t) { n += t.size(); });
  return n;
}

/// A zero-valued copy with the same shapes, used as a gradient accumulator.
template <class Model>
Model zeros_like(const Model& model) {
  Model out = model;
  Model::for_each_param(out, [](const std::string&, Tensor2& t) { t.fill(0.0); });
  return out;
}

/// Uniform(−√(6/(rows+cols)), +√(6/(rows+cols))).
inline Tensor2 xavier_init(std::size_t rows, std::size_t cols, Rng& rng) {
  if (rows == 0 || cols == 0) {
    throw DimensionError("xavier_init: zero dimension " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Tensor2 out(rows, cols);
  for (auto& v : out.data()) v = rng.uniform(-limit, limit);
  return out;
}

inline Tensor2 xavier_init(std::size_t rows, std::size_t cols, RngSeed seed) {
  Rng rng(seed);
  return xavier_init(rows, cols, rng);
}

}  // namespace tgf
