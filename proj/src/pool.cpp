#include "allab/pool.hpp"

#include <algorithm>
#include <numeric>

namespace allab {

namespace {

// Pools above this would not fit a desk-scale run.
constexpr std::int64_t kMaxPoolSize = 200'000'000;

Eigen::MatrixXd draw_sorted_points(std::int64_t m, int dim, RngStream stream) {
  Eigen::MatrixXd pts(m, dim);
  for (std::int64_t i = 0; i < m; ++i)
    for (int j = 0; j < dim; ++j) pts(i, j) = stream.next_u01();

  if (dim == 1) {
    std::sort(pts.data(), pts.data() + m);
    return pts;
  }
  std::vector<std::int64_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    for (int j = 0; j < dim; ++j) {
      if (pts(a, j) != pts(b, j)) return pts(a, j) < pts(b, j);
    }
    return a < b;
  });
  Eigen::MatrixXd sorted(m, dim);
  for (std::int64_t i = 0; i < m; ++i) sorted.row(i) = pts.row(order[i]);
  return sorted;
}

}  // namespace

Pool::Pool(Eigen::MatrixXd pts, DistributionSpec dist, std::uint64_t label_key)
    : pts_(std::move(pts)),
      marks_(pts_.rows(), Mark::Unqueried),
      dist_(std::move(dist)),
      label_key_(label_key) {}

Point Pool::point(std::int64_t i) const {
  Point p;
  p.dim = dim();
  for (int j = 0; j < dim(); ++j) p.c[j] = pts_(i, j);
  return p;
}

int Pool::hidden_label(std::int64_t i) const {
  if (labels_on_reveal_) throw Error("pool assigns labels on reveal");
  return keyed_u01(label_key_, static_cast<std::uint64_t>(i)) < dist_.eta_at(pts_(i, 0))
             ? 1
             : 0;
}

int Pool::reveal(std::int64_t i) {
  if (i < 0 || i >= size()) throw Error("pool index out of range");
  if (marks_[i] != Mark::Unqueried) throw Error("pool point already queried");
  const int y = hidden_label(i);
  marks_[i] = y ? Mark::One : Mark::Zero;
  ++queried_count_;
  return y;
}

void Pool::reveal_as(std::int64_t i, int y) {
  if (i < 0 || i >= size()) throw Error("pool index out of range");
  if (marks_[i] != Mark::Unqueried) throw Error("pool point already queried");
  marks_[i] = y ? Mark::One : Mark::Zero;
  ++queried_count_;
}

Pool build_pool(std::int64_t n_target, const DistributionSpec& dist,
                const ScheduleSpec& sched, const RngContract& rng) {
  if (n_target < 1) throw ConfigError("n_target must be >= 1");
  dist.validate();
  sched.validate();
  if (dist.dim != sched.dim)
    throw ConfigError("distribution and schedule dimension mismatch");
  const std::int64_t m = sched.m_at(n_target);
  if (m < n_target) throw ConfigError("pool rule yields m < n");
  if (m > kMaxPoolSize) throw ConfigError("pool size exceeds the desk-scale cap");
  return Pool(draw_sorted_points(m, dist.dim, rng.stream("pool_points")), dist,
              rng.key("pool_labels"));
}

Pool build_pool_on_reveal(std::int64_t m, const DistributionSpec& dist,
                          const RngContract& rng) {
  if (m < 1) throw ConfigError("pool size must be >= 1");
  if (m > kMaxPoolSize) throw ConfigError("pool size exceeds the desk-scale cap");
  Pool pool(draw_sorted_points(m, dist.dim, rng.stream("pool_points")), dist, 0);
  pool.labels_on_reveal_ = true;
  return pool;
}

Pool pool_from_points(Eigen::MatrixXd pts, const DistributionSpec& dist) {
  if (pts.rows() < 1) throw ConfigError("pool needs at least one point");
  for (std::int64_t i = 0; i + 1 < pts.rows(); ++i)
    if (pts(i, 0) > pts(i + 1, 0))
      throw ConfigError("explicit pool points must be sorted");
  Pool pool(std::move(pts), dist, 0);
  pool.labels_on_reveal_ = true;
  return pool;
}

}  // namespace allab
