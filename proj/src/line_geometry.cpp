#include "allab/line_geometry.hpp"

#include <algorithm>
#include <cmath>

namespace allab {

namespace {

struct KahanSum {
  double sum = 0, comp = 0;

  void add(double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

void require_distinct(const SortedLabeled& s) {
  for (std::int64_t i = 0; i + 1 < s.size(); ++i)
    if (s.xs[i] == s.xs[i + 1])
      throw DegenerateInputError("duplicate coordinates in 1D partition input");
}

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

Eigen::VectorXd CoveragePartition::lengths() const {
  Eigen::VectorXd out(cells());
  for (std::int64_t j = 0; j < cells(); ++j) out[j] = edges[j + 1] - edges[j];
  return out;
}

CoveragePartition coverage_1nn(const SortedLabeled& s) {
  if (s.size() == 0) throw InsufficientDataError("coverage needs at least one point");
  require_distinct(s);
  const std::int64_t n = s.size();
  CoveragePartition part;
  part.edges.resize(n + 1);
  part.edges[0] = 0.0;
  part.edges[n] = 1.0;
  for (std::int64_t i = 0; i + 1 < n; ++i)
    part.edges[i + 1] = (s.xs[i] + s.xs[i + 1]) / 2.0;
  part.owner.resize(n);
  for (std::int64_t i = 0; i < n; ++i) part.owner[i] = i;
  return part;
}

CoveragePartition k_cover_partition(const SortedLabeled& s, int k) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (s.size() < k) throw InsufficientDataError("k-coverage needs |S| >= k");
  require_distinct(s);
  const std::int64_t windows = s.size() - k + 1;
  CoveragePartition part;
  part.edges.resize(windows + 1);
  part.edges[0] = 0.0;
  part.edges[windows] = 1.0;
  for (std::int64_t w = 0; w + 1 < windows; ++w)
    part.edges[w + 1] = (s.xs[w] + s.xs[w + k]) / 2.0;
  part.owner.resize(windows);
  for (std::int64_t w = 0; w < windows; ++w) part.owner[w] = w;
  return part;
}

PredictionCells prediction_cells(const EstimatorSpec& spec, const LabeledSet& s) {
  spec.validate();
  if (spec.tie != TieRule::Threshold)
    throw UnsupportedError("exact prediction cells are defined for the threshold tie rule");
  if (!s.empty() && s[0].x.dim != 1)
    throw UnsupportedError("exact prediction cells are d = 1 only");

  PredictionCells out;
  switch (spec.kind) {
    case EstimatorSpec::Kind::Knn: {
      const SortedLabeled sl = sort_by_coordinate(s);
      const CoveragePartition part = k_cover_partition(sl, spec.k);
      std::vector<std::int64_t> ones_prefix(sl.size() + 1, 0);
      for (std::int64_t i = 0; i < sl.size(); ++i)
        ones_prefix[i + 1] = ones_prefix[i] + sl.ys[i];
      out.edges.assign(part.edges.data(), part.edges.data() + part.edges.size());
      out.label.resize(part.cells());
      for (std::int64_t w = 0; w < part.cells(); ++w) {
        const std::int64_t ones = ones_prefix[w + spec.k] - ones_prefix[w];
        out.label[w] = ones >= spec.k_prime() ? 1 : 0;
      }
      break;
    }
    case EstimatorSpec::Kind::Histogram:
    case EstimatorSpec::Kind::NullifiedHistogram: {
      const int cells = histogram_cell_count(spec.h);
      std::vector<std::int64_t> ones(cells, 0), total(cells, 0);
      std::vector<char> dead;
      if (spec.kind == EstimatorSpec::Kind::NullifiedHistogram) {
        std::vector<Point> pts;
        pts.reserve(s.entries.size());
        for (const auto& e : s.entries) pts.push_back(e.x);
        dead = nullified_flags(spec, pts);
      }
      for (std::int64_t i = 0; i < s.size(); ++i) {
        if (!dead.empty() && dead[i]) continue;
        const int c = histogram_cell(s[i].x.c[0], spec.h);
        ++total[c];
        ones[c] += s[i].y;
      }
      out.edges.resize(cells + 1);
      out.label.resize(cells);
      out.edges[0] = 0.0;
      for (int c = 0; c < cells; ++c) {
        out.edges[c + 1] = c + 1 == cells ? 1.0 : clip01((c + 1) * spec.h);
        // strict majority of live labels; empty cells and exact ties vote 0
        out.label[c] = 2 * ones[c] > total[c] ? 1 : 0;
      }
      break;
    }
    case EstimatorSpec::Kind::Kernel:
      throw UnsupportedError("kernel predictions have no finite cell decomposition; use mc_risk");
  }
  return out;
}

double predicted_one_measure(const EstimatorSpec& spec, const LabeledSet& s) {
  const PredictionCells cells = prediction_cells(spec, s);
  KahanSum acc;
  for (std::size_t j = 0; j < cells.label.size(); ++j)
    if (cells.label[j]) acc.add(cells.edges[j + 1] - cells.edges[j]);
  return acc.sum;
}

namespace {

double segment_error_mass(const DistributionSpec& dist, double lo, double hi,
                          int predicted) {
  // integral over [lo, hi] of eta if predicting 0, of 1 - eta if predicting 1
  switch (dist.kind) {
    case RegressionKind::ConstantEta:
      return (hi - lo) * (predicted ? 1.0 - dist.eta : dist.eta);
    case RegressionKind::ThresholdStep: {
      const double below = std::min(hi, dist.threshold) - std::min(lo, dist.threshold);
      const double above = (hi - lo) - below;
      return predicted ? below : above;
    }
    case RegressionKind::PiecewiseContinuous: {
      double total = 0.0;
      for (const auto& seg : dist.segments) {
        const double l = std::max(lo, seg.lo);
        const double h = std::min(hi, seg.hi);
        if (h <= l) continue;
        const double a = predicted ? 1.0 - seg.a : seg.a;
        const double b = predicted ? -seg.b : seg.b;
        total += a * (h - l) + b * (h * h - l * l) / 2.0;
      }
      return total;
    }
  }
  return 0.0;
}

}  // namespace

double exact_risk(const EstimatorSpec& spec, const LabeledSet& s,
                  const DistributionSpec& dist) {
  const PredictionCells cells = prediction_cells(spec, s);
  KahanSum acc;
  for (std::size_t j = 0; j < cells.label.size(); ++j)
    acc.add(segment_error_mass(dist, cells.edges[j], cells.edges[j + 1], cells.label[j]));
  return acc.sum;
}

McEstimate mc_risk(const EstimatorSpec& spec, const LabeledSet& s,
                   const DistributionSpec& dist, std::int64_t draws, RngStream& stream) {
  if (draws < 1) throw ConfigError("mc_risk needs draws >= 1");
  std::int64_t errors = 0;
  for (std::int64_t t = 0; t < draws; ++t) {
    Point x;
    x.dim = dist.dim;
    for (int j = 0; j < dist.dim; ++j) x.c[j] = stream.next_u01();
    const int y = stream.bernoulli(dist.eta_at(x.c[0])) ? 1 : 0;
    errors += predict(spec, x, s, &stream) != y;
  }
  McEstimate est;
  est.draws = draws;
  est.estimate = static_cast<double>(errors) / draws;
  est.se = std::sqrt(std::max(est.estimate * (1.0 - est.estimate), 1e-12) / draws);
  return est;
}

StructureMetrics structure_metrics(const Pool& pool,
                                   const std::vector<std::int64_t>& queried_sorted,
                                   const LabeledSet& s, int k, double cell_h) {
  if (pool.dim() != 1) throw UnsupportedError("structure metrics are d = 1 only");
  StructureMetrics sm;

  // interval decomposition over pool order
  for (std::size_t i = 0; i < queried_sorted.size();) {
    std::size_t j = i;
    while (j + 1 < queried_sorted.size() &&
           queried_sorted[j + 1] == queried_sorted[j] + 1)
      ++j;
    sm.intervals.emplace_back(queried_sorted[i], queried_sorted[j]);
    i = j + 1;
  }

  for (const auto& [a, b] : sm.intervals) {
    sm.interior_count += std::max<std::int64_t>(0, b - a - 1);
    for (std::int64_t i = a + 1; i <= b - 1; ++i)
      sm.interior_coverage_total += (pool.coord(i + 1) - pool.coord(i - 1)) / 2.0;
  }

  for (std::size_t j = 0; j + 1 < sm.intervals.size(); ++j)
    sm.d_n = std::max(sm.d_n, pool.coord(sm.intervals[j + 1].first) -
                                  pool.coord(sm.intervals[j].second));

  // open points: only unqueried neighbors of queried positions are candidates
  const int kp = k / 2 + 1;
  auto open_at = [&](std::int64_t idx) {
    if (idx < 0 || idx >= pool.size() || pool.queried(idx)) return false;
    for (int side = 0; side < 2; ++side) {
      const int dir = side == 0 ? 1 : -1;
      const std::int64_t nb = idx + dir;
      if (nb < 0 || nb >= pool.size() || !pool.queried(nb)) continue;
      bool all_ones = true;
      for (int t = 1; t <= kp && all_ones; ++t) {
        const std::int64_t q = idx + dir * t;
        all_ones = q >= 0 && q < pool.size() && pool.mark(q) == Pool::Mark::One;
      }
      if (!all_ones) return true;
    }
    return false;
  };
  std::vector<std::int64_t> candidates;
  candidates.reserve(2 * queried_sorted.size());
  for (std::int64_t q : queried_sorted) {
    if (q - 1 >= 0 && !pool.queried(q - 1)) candidates.push_back(q - 1);
    if (q + 1 < pool.size() && !pool.queried(q + 1)) candidates.push_back(q + 1);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  for (std::int64_t c : candidates) sm.o_n += open_at(c);

  if (cell_h > 0) {
    const int cells = histogram_cell_count(cell_h);
    sm.random_cell_counts = Eigen::VectorXi::Zero(cells);
    for (const auto& e : s.entries)
      if (e.source == Source::Random && e.y >= 0)
        sm.random_cell_counts[histogram_cell(e.x.c[0], cell_h)] += 1;
  }
  return sm;
}

CellOccupancy cell_occupancy(const LabeledSet& s, double h,
                             std::optional<Source> source_filter, std::int64_t M) {
  if (!(h > 0.0 && h <= 1.0)) throw ConfigError("h must lie in (0,1]");
  const int dim = s.empty() ? 1 : s[0].x.dim;
  const int per_axis = histogram_cell_count(h);
  std::int64_t total_cells = 1;
  for (int j = 0; j < dim; ++j) total_cells *= per_axis;

  CellOccupancy occ;
  occ.counts = Eigen::VectorXi::Zero(total_cells);
  for (const auto& e : s.entries) {
    if (e.y < 0) continue;
    if (source_filter && e.source != *source_filter) continue;
    std::int64_t flat = 0;
    for (int j = 0; j < dim; ++j)
      flat = flat * per_axis + histogram_cell(e.x.c[j], h);
    occ.counts[flat] += 1;
  }

  auto axis_len = [&](int cell) {
    const double lo = cell * h;
    const double hi = cell + 1 == per_axis ? 1.0 : (cell + 1) * h;
    return hi - lo;
  };
  double measure = 0.0;
  for (std::int64_t flat = 0; flat < total_cells; ++flat) {
    if (occ.counts[flat] > M) continue;
    double len = 1.0;
    std::int64_t rem = flat;
    for (int j = dim - 1; j >= 0; --j) {
      len *= axis_len(static_cast<int>(rem % per_axis));
      rem /= per_axis;
    }
    measure += len;
  }
  occ.measure_leq = measure;
  return occ;
}

}  // namespace allab
