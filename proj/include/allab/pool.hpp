#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "allab/distributions.hpp"
#include "allab/rng.hpp"
#include "allab/schedules.hpp"
#include "allab/types.hpp"

namespace allab {

// A fixed set of unlabeled points with a hidden label table and a per-point
// reveal state. Points are immutable and sorted lexicographically; hidden
// labels are a pure function of the construction key, so rebuilding with the
// same (seed, replicate) reproduces the pool bit for bit.
class Pool {
 public:
  enum class Mark : std::uint8_t { Unqueried = 0, Zero = 1, One = 2 };

  Pool() = default;
  Pool(Eigen::MatrixXd pts, DistributionSpec dist, std::uint64_t label_key);

  int dim() const { return dist_.dim; }
  std::int64_t size() const { return pts_.rows(); }

  double coord(std::int64_t i) const { return pts_(i, 0); }
  Point point(std::int64_t i) const;

  // Hidden label; lazy Bernoulli(eta(x_i)) draw keyed by (label_key, i).
  int hidden_label(std::int64_t i) const;

  bool queried(std::int64_t i) const { return marks_[i] != Mark::Unqueried; }
  Mark mark(std::int64_t i) const { return marks_[i]; }
  std::int64_t queried_count() const { return queried_count_; }

  // Reveals the hidden label. A position can be revealed only once.
  int reveal(std::int64_t i);

  // Reveals with a caller-supplied label (labels-on-reveal coupling mode).
  void reveal_as(std::int64_t i, int y);

  const DistributionSpec& dist() const { return dist_; }

 private:
  Eigen::MatrixXd pts_;  // size x dim, rows sorted lexicographically
  std::vector<Mark> marks_;
  std::int64_t queried_count_ = 0;
  DistributionSpec dist_;
  std::uint64_t label_key_ = 0;
  bool labels_on_reveal_ = false;

  friend Pool build_pool_on_reveal(std::int64_t m, const DistributionSpec&,
                                   const RngContract&);
  friend Pool pool_from_points(Eigen::MatrixXd pts, const DistributionSpec& dist);
};

// Draws m_n(n_target) points from the marginal, sorts them, and attaches the
// hidden label table. All reveal states start unqueried.
Pool build_pool(std::int64_t n_target, const DistributionSpec& dist,
                const ScheduleSpec& sched, const RngContract& rng);

// Pool whose labels are assigned by reveal_as() instead of the hidden table.
Pool build_pool_on_reveal(std::int64_t m, const DistributionSpec& dist,
                          const RngContract& rng);

// Pool over explicit coordinates (must arrive sorted); labels are assigned by
// reveal_as(). Intended for constructing exact geometries.
Pool pool_from_points(Eigen::MatrixXd pts, const DistributionSpec& dist);

}  // namespace allab
