#pragma once

// Independent reference implementations used to freeze expected values.
// These deliberately avoid the partition code paths they are checking:
// everything here is a pointwise scan over a midpoint grid.

#include <cstdint>
#include <vector>

#include "allab/types.hpp"

namespace allab::oracle {

// Sliding-window pointwise k-NN vote over a uniform midpoint grid. The
// window of k nearest neighbors of an ascending x moves monotonically, so
// the whole scan costs O(grid + n).
inline double grid_one_measure_knn(const SortedLabeled& s, int k, std::int64_t grid) {
  const std::int64_t n = s.size();
  std::vector<std::int64_t> ones(n + 1, 0);
  for (std::int64_t i = 0; i < n; ++i) ones[i + 1] = ones[i] + s.ys[i];

  std::int64_t w = 0;
  std::int64_t hits = 0;
  const int k_prime = k / 2 + 1;
  for (std::int64_t g = 0; g < grid; ++g) {
    const double x = (g + 0.5) / static_cast<double>(grid);
    while (w + k < n && s.xs[w + k] - x < x - s.xs[w]) ++w;
    hits += (ones[w + k] - ones[w]) >= k_prime;
  }
  return static_cast<double>(hits) / static_cast<double>(grid);
}

// Pointwise histogram vote over a midpoint grid (midpoints never land on a
// cell edge, so the floor convention is immaterial here).
inline double grid_one_measure_hist(const SortedLabeled& s, double h, std::int64_t grid) {
  const int cells = static_cast<int>(std::ceil(1.0 / h - 1e-9));
  std::vector<std::int64_t> one(cells, 0), tot(cells, 0);
  for (std::int64_t i = 0; i < s.size(); ++i) {
    const int c = std::min(cells - 1, static_cast<int>(s.xs[i] / h));
    ++tot[c];
    one[c] += s.ys[i];
  }
  std::int64_t hits = 0;
  for (std::int64_t g = 0; g < grid; ++g) {
    const double x = (g + 0.5) / static_cast<double>(grid);
    const int c = std::min(cells - 1, static_cast<int>(x / h));
    hits += 2 * one[c] > tot[c];
  }
  return static_cast<double>(hits) / static_cast<double>(grid);
}

// Coverage of each k-window measured by brute-force window ownership on a
// midpoint grid.
inline std::vector<double> grid_window_coverage(const SortedLabeled& s, int k,
                                                std::int64_t grid) {
  const std::int64_t n = s.size();
  std::vector<double> cover(n - k + 1, 0.0);
  std::int64_t w = 0;
  for (std::int64_t g = 0; g < grid; ++g) {
    const double x = (g + 0.5) / static_cast<double>(grid);
    while (w + k < n && s.xs[w + k] - x < x - s.xs[w]) ++w;
    cover[w] += 1.0 / static_cast<double>(grid);
  }
  return cover;
}

}  // namespace allab::oracle
