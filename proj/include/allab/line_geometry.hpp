#pragma once

#include <Eigen/Core>
#include <optional>
#include <utility>
#include <vector>

#include "allab/distributions.hpp"
#include "allab/estimators.hpp"
#include "allab/pool.hpp"
#include "allab/types.hpp"

namespace allab {

// Partition of [0,1] into half-open cells (edges[j], edges[j+1]], with the
// first cell closed at 0. owner[j] identifies the owning point / window /
// histogram cell. Cell lengths sum to exactly 1 by construction.
struct CoveragePartition {
  Eigen::VectorXd edges;  // edges[0] = 0 < ... < edges[K] = 1
  std::vector<std::int64_t> owner;

  std::int64_t cells() const { return static_cast<std::int64_t>(owner.size()); }
  double length(std::int64_t j) const { return edges[j + 1] - edges[j]; }
  Eigen::VectorXd lengths() const;
};

// Voronoi coverage of labeled points on the line: boundaries at midpoints of
// consecutive points, end cells absorb [0, .] and [., 1].
CoveragePartition coverage_1nn(const SortedLabeled& s);

// Coverage by windows of k consecutive labeled points; the boundary between
// windows starting at i and i+1 is the midpoint of x_(i) and x_(i+k).
CoveragePartition k_cover_partition(const SortedLabeled& s, int k);

// [0,1] split into maximal constant-prediction cells with the per-cell label.
struct PredictionCells {
  std::vector<double> edges;       // 0 = e_0 < ... < e_K = 1
  std::vector<std::int8_t> label;  // size K
};

// Exact prediction regions for the threshold tie rule. Supports Knn,
// Histogram, and NullifiedHistogram in d = 1; the kernel has no finite cell
// decomposition here and is served by mc_risk instead.
PredictionCells prediction_cells(const EstimatorSpec& spec, const LabeledSet& s);

// Exact P_X-measure of { x : predict(x) = 1 }.
double predicted_one_measure(const EstimatorSpec& spec, const LabeledSet& s);

// Exact risk P(predict(X) != Y) under the distribution, by piecewise
// integration over the prediction cells.
double exact_risk(const EstimatorSpec& spec, const LabeledSet& s,
                  const DistributionSpec& dist);

struct McEstimate {
  double estimate = 0;
  double se = 0;
  std::int64_t draws = 0;
};

// Monte Carlo risk with fresh (X, Y) draws; the oracle counterpart of
// exact_risk and the only risk path for d >= 2 or kernel estimators.
McEstimate mc_risk(const EstimatorSpec& spec, const LabeledSet& s,
                   const DistributionSpec& dist, std::int64_t draws, RngStream& stream);

struct StructureMetrics {
  std::int64_t o_n = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> intervals;  // inclusive index runs
  std::int64_t interior_count = 0;
  double interior_coverage_total = 0;
  double d_n = 0;  // largest coordinate gap between consecutive intervals
  Eigen::VectorXi random_cell_counts;  // random-source occupancy per cell of side h
};

// Proof-object instrumentation over the pool order: interval decomposition,
// interior points and their total 1-NN coverage, open-point count at k, the
// maximum inter-interval gap, and random-source cell occupancy at side h.
StructureMetrics structure_metrics(const Pool& pool,
                                   const std::vector<std::int64_t>& queried_sorted,
                                   const LabeledSet& s, int k, double cell_h);

struct CellOccupancy {
  Eigen::VectorXi counts;
  double measure_leq = 0;  // P_X-measure of cells with count <= M
};

CellOccupancy cell_occupancy(const LabeledSet& s, double h,
                             std::optional<Source> source_filter, std::int64_t M);

}  // namespace allab
