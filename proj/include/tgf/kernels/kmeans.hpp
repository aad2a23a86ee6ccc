#pragma once

#include <limits>
#include <numeric>
#include <vector>

#include "tgf/core/rng.hpp"
#include "tgf/kernels/linalg.hpp"

namespace tgf {

struct KMeansResult {
  Tensor2 centers;
  double inertia = 0.0;
  std::size_t iterations = 0;
};

struct KMeansOptions {
  std::size_t max_iterations = 100;
  std::size_t restarts = 3;
};

/// Lloyd's algorithm from m distinct random rows, repeated `restarts` times;
/// the lowest-inertia run wins. An emptied cluster keeps its previous center.
inline KMeansResult kmeans(const Tensor2& x, std::size_t m, RngSeed seed, KMeansOptions opt = {}) {
  const auto n = x.rows();
  const auto k = x.cols();
  if (m == 0 || m > n) {
    throw SizeError("kmeans: need 1 <= m <= n, got m=" + std::to_string(m) +
                    ", n=" + std::to_string(n));
  }
  Rng rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> assign(n);
  for (std::size_t restart = 0; restart < std::max<std::size_t>(opt.restarts, 1); ++restart) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order.begin(), order.end());
    Tensor2 centers(m, k);
    for (std::size_t c = 0; c < m; ++c)
      std::copy_n(x.row(order[c]).begin(), k, centers.row(c).begin());

    double inertia = 0.0;
    std::size_t it = 0;
    for (; it < opt.max_iterations; ++it) {
      bool changed = it == 0;
      inertia = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t arg = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < m; ++c) {
          const double d = squared_distance(x.row(i), centers.row(c));
          if (d < best_d) {
            best_d = d;
            arg = c;
          }
        }
        if (assign[i] != arg) changed = true;
        assign[i] = arg;
        inertia += best_d;
      }
      if (!changed) break;
      Tensor2 sums(m, k);
      std::vector<std::size_t> counts(m, 0);
      for (std::size_t i = 0; i < n; ++i) {
        ++counts[assign[i]];
        auto s = sums.row(assign[i]);
        auto r = x.row(i);
        for (std::size_t j = 0; j < k; ++j) s[j] += r[j];
      }
      for (std::size_t c = 0; c < m; ++c) {
        if (counts[c] == 0) continue;
        auto cr = centers.row(c);
        auto s = sums.row(c);
        for (std::size_t j = 0; j < k; ++j) cr[j] = s[j] / static_cast<double>(counts[c]);
      }
    }
    inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < m; ++c)
        best_d = std::min(best_d, squared_distance(x.row(i), centers.row(c)));
      inertia += best_d;
    }
    if (inertia < best.inertia) {
      best.centers = std::move(centers);
      best.inertia = inertia;
      best.iterations = it;
    }
  }
  return best;
}

}  // namespace tgf
