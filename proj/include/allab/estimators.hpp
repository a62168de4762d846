#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "allab/rng.hpp"
#include "allab/types.hpp"

namespace allab {

// Tie handling at an exact 1/2 vote: Threshold predicts 1 only on a strict
// majority (>= floor(k/2)+1 ones for k-NN), FairCoin spends one stream draw.
enum class TieRule : std::uint8_t { Threshold, FairCoin };

// Which member of a close pair loses its weight in the nullified histogram.
enum class NullPairing : std::uint8_t { Mutual, LaterOnly };

struct EstimatorSpec {
  enum class Kind : std::uint8_t { Knn, Histogram, Kernel, NullifiedHistogram };

  Kind kind = Kind::Knn;
  int k = 1;            // Knn
  double h = 0.25;      // Histogram / NullifiedHistogram cell side, Kernel bandwidth
  double r_null = 0.0;  // NullifiedHistogram pairing radius, must be < h
  TieRule tie = TieRule::Threshold;
  NullPairing pairing = NullPairing::Mutual;

  static EstimatorSpec knn(int k, TieRule tie = TieRule::Threshold);
  static EstimatorSpec histogram(double h);
  static EstimatorSpec kernel(double h);
  static EstimatorSpec nullified_histogram(double h, double r_null,
                                           NullPairing pairing = NullPairing::Mutual);

  int k_prime() const { return k / 2 + 1; }
  void validate() const;
};

// Per-entry weights aligned with the training entries. `raw` holds the
// unnormalized w_n(x, X_i); normalization divides by the raw sum when it is
// positive, and the all-zero vector stays all-zero (empty cell, everything
// nullified).
struct WeightVector {
  Eigen::VectorXd raw;

  bool all_zero() const { return raw.size() == 0 || raw.maxCoeff() <= 0.0; }

  Eigen::VectorXd normalized() const {
    if (raw.size() == 0) return raw;
    const double s = raw.sum();
    if (s <= 0.0) return Eigen::VectorXd::Zero(raw.size());
    return raw / s;
  }
};

// Raw weights from coordinates alone (labels never affect weights). Ties in
// k-NN distance break toward the lexicographically smaller coordinate, then
// the lower list position.
Eigen::VectorXd raw_weights(const EstimatorSpec& spec, const Point& x,
                            const std::vector<Point>& pts);

WeightVector estimator_weights(const EstimatorSpec& spec, const Point& x,
                               const LabeledSet& s);

// Sum of raw w_n(x, X_i) * (2 y_i - 1).
double signed_score(const EstimatorSpec& spec, const Point& x, const LabeledSet& s);

// Threshold rule: 1 iff the weighted one-mass strictly beats 1/2 (for k-NN,
// iff at least floor(k/2)+1 of the k nearest are ones). All-zero weights
// predict 0. FairCoin consumes exactly one draw on an exact tie.
int predict(const EstimatorSpec& spec, const Point& x, const LabeledSet& s,
            RngStream* tie_stream = nullptr);

// Histogram cell index for x in [0,1]; exact cell boundaries belong to the
// left cell. cell_count(h) is the number of cells covering [0,1].
int histogram_cell_count(double h);
int histogram_cell(double x, double h);

// Entry indices whose raw weight the nullification rule removes: any entry
// within r_null of another entry (Mutual zeroes both, LaterOnly zeroes the
// later list position).
std::vector<char> nullified_flags(const EstimatorSpec& spec,
                                  const std::vector<Point>& pts);

}  // namespace allab
