#include "allab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace allab {

EstimatorSpec EstimatorSpec::knn(int k, TieRule tie) {
  EstimatorSpec e;
  e.kind = Kind::Knn;
  e.k = k;
  e.tie = tie;
  e.validate();
  return e;
}

EstimatorSpec EstimatorSpec::histogram(double h) {
  EstimatorSpec e;
  e.kind = Kind::Histogram;
  e.h = h;
  e.validate();
  return e;
}

EstimatorSpec EstimatorSpec::kernel(double h) {
  EstimatorSpec e;
  e.kind = Kind::Kernel;
  e.h = h;
  e.validate();
  return e;
}

EstimatorSpec EstimatorSpec::nullified_histogram(double h, double r_null,
                                                 NullPairing pairing) {
  EstimatorSpec e;
  e.kind = Kind::NullifiedHistogram;
  e.h = h;
  e.r_null = r_null;
  e.pairing = pairing;
  e.validate();
  return e;
}

void EstimatorSpec::validate() const {
  if (kind == Kind::Knn) {
    if (k < 1) throw ConfigError("k must be >= 1");
    return;
  }
  if (!(h > 0.0 && h <= 1.0)) throw ConfigError("h must lie in (0,1]");
  if (kind == Kind::NullifiedHistogram) {
    if (!(r_null > 0.0 && r_null < h))
      throw ConfigError("nullification radius must satisfy 0 < r_null < h");
  }
}

int histogram_cell_count(double h) {
  return static_cast<int>(std::ceil(1.0 / h - 1e-9));
}

int histogram_cell(double x, double h) {
  const int cells = histogram_cell_count(h);
  int j = static_cast<int>(std::floor(x / h));
  if (j > 0 && x == j * h) --j;  // exact boundaries belong to the left cell
  return std::clamp(j, 0, cells - 1);
}

std::vector<char> nullified_flags(const EstimatorSpec& spec,
                                  const std::vector<Point>& pts) {
  const std::int64_t n = static_cast<std::int64_t>(pts.size());
  std::vector<char> dead(n, 0);
  const double r2 = spec.r_null * spec.r_null;
  // Coordinate-sorted sweep; pairs further apart than r_null in the first
  // coordinate cannot be within r_null overall.
  std::vector<std::int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    return pts[a].c[0] < pts[b].c[0];
  });
  for (std::int64_t oi = 0; oi < n; ++oi) {
    for (std::int64_t oj = oi + 1; oj < n; ++oj) {
      const std::int64_t a = order[oi], b = order[oj];
      if (pts[b].c[0] - pts[a].c[0] > spec.r_null) break;
      if (sq_dist(pts[a], pts[b]) <= r2) {
        if (spec.pairing == NullPairing::Mutual) {
          dead[a] = dead[b] = 1;
        } else {
          dead[std::max(a, b)] = 1;
        }
      }
    }
  }
  return dead;
}

namespace {

struct KnnCandidate {
  double d2;
  const Point* p;
  std::int64_t pos;
};

// distance, then lexicographically smaller coordinate, then earlier position.
bool knn_before(const KnnCandidate& a, const KnnCandidate& b) {
  if (a.d2 != b.d2) return a.d2 < b.d2;
  for (int j = 0; j < a.p->dim; ++j) {
    if (a.p->c[j] != b.p->c[j]) return a.p->c[j] < b.p->c[j];
  }
  return a.pos < b.pos;
}

std::vector<std::int64_t> knn_indices(const Point& x, const std::vector<Point>& pts,
                                      int k) {
  std::vector<KnnCandidate> cand;
  cand.reserve(pts.size());
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(pts.size()); ++i)
    cand.push_back({sq_dist(x, pts[i]), &pts[i], i});
  std::nth_element(cand.begin(), cand.begin() + (k - 1), cand.end(), knn_before);
  std::vector<std::int64_t> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = cand[i].pos;
  return idx;
}

}  // namespace

Eigen::VectorXd raw_weights(const EstimatorSpec& spec, const Point& x,
                            const std::vector<Point>& pts) {
  const std::int64_t n = static_cast<std::int64_t>(pts.size());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  switch (spec.kind) {
    case EstimatorSpec::Kind::Knn: {
      if (n < spec.k)
        throw InsufficientDataError("k-NN weights need at least k training points");
      for (std::int64_t i : knn_indices(x, pts, spec.k)) w[i] = 1.0 / spec.k;
      break;
    }
    case EstimatorSpec::Kind::Histogram: {
      const int cell = histogram_cell(x.c[0], spec.h);
      for (std::int64_t i = 0; i < n; ++i) {
        bool same = histogram_cell(pts[i].c[0], spec.h) == cell;
        for (int j = 1; same && j < x.dim; ++j)
          same = histogram_cell(pts[i].c[j], spec.h) == histogram_cell(x.c[j], spec.h);
        if (same) w[i] = 1.0;
      }
      break;
    }
    case EstimatorSpec::Kind::Kernel: {
      const double h2 = spec.h * spec.h;
      for (std::int64_t i = 0; i < n; ++i) {
        const double d2 = sq_dist(x, pts[i]);
        if (d2 <= h2) w[i] = 1.0 - std::sqrt(d2) / (2.0 * spec.h);
      }
      break;
    }
    case EstimatorSpec::Kind::NullifiedHistogram: {
      EstimatorSpec plain = spec;
      plain.kind = EstimatorSpec::Kind::Histogram;
      w = raw_weights(plain, x, pts);
      const auto dead = nullified_flags(spec, pts);
      for (std::int64_t i = 0; i < n; ++i)
        if (dead[i]) w[i] = 0.0;
      break;
    }
  }
  return w;
}

namespace {

std::vector<Point> entry_points(const LabeledSet& s) {
  std::vector<Point> pts;
  pts.reserve(s.entries.size());
  for (const auto& e : s.entries) pts.push_back(e.x);
  return pts;
}

}  // namespace

WeightVector estimator_weights(const EstimatorSpec& spec, const Point& x,
                               const LabeledSet& s) {
  spec.validate();
  if (spec.kind == EstimatorSpec::Kind::Knn && s.size() < spec.k)
    throw InsufficientDataError("k-NN needs |S| >= k");
  return WeightVector{raw_weights(spec, x, entry_points(s))};
}

double signed_score(const EstimatorSpec& spec, const Point& x, const LabeledSet& s) {
  const Eigen::VectorXd w = estimator_weights(spec, x, s).raw;
  double score = 0.0;
  for (std::int64_t i = 0; i < s.size(); ++i)
    score += w[i] * (2.0 * s[i].y - 1.0);
  return score;
}

int predict(const EstimatorSpec& spec, const Point& x, const LabeledSet& s,
            RngStream* tie_stream) {
  spec.validate();
  if (spec.kind == EstimatorSpec::Kind::Knn) {
    if (s.size() < spec.k) throw InsufficientDataError("k-NN needs |S| >= k");
    const auto pts = entry_points(s);
    int ones = 0;
    for (std::int64_t i : knn_indices(x, pts, spec.k)) ones += s[i].y;
    if (2 * ones == spec.k && spec.tie == TieRule::FairCoin) {
      if (!tie_stream) throw Error("fair-coin tie rule needs a tie stream");
      return tie_stream->bernoulli(0.5) ? 1 : 0;
    }
    return ones >= spec.k_prime() ? 1 : 0;
  }

  const Eigen::VectorXd w = estimator_weights(spec, x, s).raw;
  double mass = 0.0, one_mass = 0.0;
  for (std::int64_t i = 0; i < s.size(); ++i) {
    mass += w[i];
    one_mass += w[i] * s[i].y;
  }
  if (mass <= 0.0) return 0;  // empty cell / everything nullified
  const double score = 2.0 * one_mass - mass;
  if (score == 0.0 && spec.tie == TieRule::FairCoin) {
    if (!tie_stream) throw Error("fair-coin tie rule needs a tie stream");
    return tie_stream->bernoulli(0.5) ? 1 : 0;
  }
  return score > 0.0 ? 1 : 0;
}

}  // namespace allab
