#pragma once

#include <string>
#include <vector>

#include "tgf/eval/rank_tests.hpp"

namespace tgf {

struct PairwiseComparison {
  std::string model1;
  std::string model2;
  double wilcoxon_r = 0.0;
  double p_raw = 1.0;
  double p_corrected = 1.0;
  bool significant = false;
  std::size_t n_effective = 0;
};

/// Friedman over all models plus every pairwise Wilcoxon test with Bonferroni
/// correction over the k(k−1)/2 pairs.
struct ComparisonReport {
  std::vector<std::string> models;
  FriedmanResult friedman;
  std::vector<PairwiseComparison> pairs;
  std::size_t comparisons = 0;
  double alpha = 0.05;
};

/// `errors[j]` holds model j's per-date absolute errors; each date is a block.
inline ComparisonReport compare_models(const std::vector<std::string>& names,
                                       const std::vector<std::vector<double>>& errors,
                                       double alpha = 0.05) {
  if (names.size() != errors.size()) throw DimensionError("compare_models: names vs error columns");
  if (names.size() < 2) throw SizeError("compare_models: need at least two models");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("compare_models: alpha outside (0, 1)");
  const auto n = errors.front().size();
  for (const auto& e : errors)
    if (e.size() != n) throw DimensionError("compare_models: models cover different numbers of dates");

  Tensor2 table(n, names.size());
  for (std::size_t j = 0; j < names.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) table(i, j) = errors[j][i];

  ComparisonReport rep;
  rep.models = names;
  rep.alpha = alpha;
  rep.friedman = friedman_test(table);
  rep.comparisons = names.size() * (names.size() - 1) / 2;
  for (std::size_t a = 0; a < names.size(); ++a) {
    for (std::size_t b = a + 1; b < names.size(); ++b) {
      WilcoxonResult w;
      try {
        w = wilcoxon_signed_rank(errors[a], errors[b]);
      } catch (const DegenerateTestError&) {
        throw DegenerateTestError("wilcoxon: models '" + names[a] + "' and '" + names[b] +
                                  "' have identical errors on every date");
      }
      PairwiseComparison row;
      row.model1 = names[a];
      row.model2 = names[b];
      row.wilcoxon_r = w.r_stat;
      row.p_raw = w.p_value;
      row.p_corrected = bonferroni_adjust(w.p_value, rep.comparisons);
      row.significant = row.p_corrected < alpha;
      row.n_effective = w.n_effective;
      rep.pairs.push_back(row);
    }
  }
  return rep;
}

}  // namespace tgf
