#include "allab/samplers.hpp"

#include <algorithm>
#include <cmath>

namespace allab {

void SamplerConfig::validate() const {
  sched.validate();
  dist.validate();
  if (sched.dim != dist.dim)
    throw ConfigError("schedule and distribution dimension mismatch");
  if (mode == SamplerMode::QuerySynthesis) {
    if (splitting) throw ConfigError("data splitting requires pool mode");
    if (base != BaseAlgorithm::PassiveUniform)
      throw ConfigError(
          "query synthesis supports only the passive-uniform base; the other bases are "
          "defined on a pool");
  } else if (base != BaseAlgorithm::PassiveUniform && dist.dim != 1) {
    throw ConfigError("open-point and boundary bases are line algorithms (d = 1)");
  }
}

bool is_open_point(const std::vector<ViewMark>& view, std::int64_t idx, int k) {
  const std::int64_t m = static_cast<std::int64_t>(view.size());
  if (idx < 0 || idx >= m || view[idx] != ViewMark::Unqueried) return false;
  const int kp = k / 2 + 1;
  for (int dir : {+1, -1}) {
    const std::int64_t nb = idx + dir;
    if (nb < 0 || nb >= m) continue;
    if (view[nb] != ViewMark::Zero && view[nb] != ViewMark::One) continue;
    bool all_ones = true;
    for (int t = 1; t <= kp && all_ones; ++t) {
      const std::int64_t q = idx + dir * t;
      all_ones = q >= 0 && q < m && view[q] == ViewMark::One;
    }
    if (!all_ones) return true;
  }
  return false;
}

std::vector<std::int64_t> detect_open_points(const Pool& pool, int k) {
  const std::int64_t m = pool.size();
  std::vector<ViewMark> view(m, ViewMark::Unqueried);
  std::vector<std::int64_t> queried;
  for (std::int64_t i = 0; i < m; ++i) {
    switch (pool.mark(i)) {
      case Pool::Mark::Zero:
        view[i] = ViewMark::Zero;
        queried.push_back(i);
        break;
      case Pool::Mark::One:
        view[i] = ViewMark::One;
        queried.push_back(i);
        break;
      default:
        break;
    }
  }
  std::vector<std::int64_t> open;
  std::int64_t last_pushed = -1;
  for (std::int64_t q : queried) {
    for (std::int64_t c : {q - 1, q + 1}) {
      if (c == last_pushed) continue;
      if (is_open_point(view, c, k)) {
        open.push_back(c);
        last_pushed = c;
      }
    }
  }
  std::sort(open.begin(), open.end());
  open.erase(std::unique(open.begin(), open.end()), open.end());
  return open;
}

SamplerStreams SamplerStreams::make(const RngContract& rng) {
  return SamplerStreams{rng.stream("sampler_z"), rng.stream("sampler_rand_idx"),
                        rng.stream("sampler_base"), rng.stream("sampler_synth_x"),
                        rng.stream("sampler_synth_y")};
}

SamplerState::SamplerState(Pool pool, const SamplerConfig& cfg)
    : pool_(std::move(pool)), splitting_(cfg.splitting) {
  view_.assign(pool_.size(), ViewMark::Unqueried);
  cur_k_ = cfg.sched.k_at(1);
  for (std::int64_t i = 0; i < pool_.size(); ++i) {
    if (pool_.mark(i) == Pool::Mark::Zero) view_[i] = ViewMark::Zero;
    if (pool_.mark(i) == Pool::Mark::One) view_[i] = ViewMark::One;
    if (pool_.queried(i)) queried_.insert(i);
  }
  for (std::int64_t q : queried_) {
    for (std::int64_t c : {q - 1, q + 1}) {
      if (view_open(c)) open_.insert(c);
    }
  }
}

void SamplerState::update_open_around(std::int64_t idx) {
  const int kp = cur_k_ / 2 + 1;
  for (std::int64_t j = idx - kp - 1; j <= idx + kp + 1; ++j) {
    if (j < 0 || j >= pool_.size()) continue;
    if (view_open(j)) {
      open_.insert(j);
    } else {
      open_.erase(j);
    }
  }
}

namespace {

// Nearest pool index to coordinate `target` within the inclusive index range
// [lo, hi]; ties break toward the smaller index.
std::int64_t nearest_in_range(const Pool& pool, double target, std::int64_t lo,
                              std::int64_t hi) {
  std::int64_t a = lo, b = hi;
  while (a < b) {
    const std::int64_t mid = a + (b - a) / 2;
    if (pool.coord(mid) < target) {
      a = mid + 1;
    } else {
      b = mid;
    }
  }
  // a is the first index with coord >= target (or hi if none)
  std::int64_t best = a;
  if (a - 1 >= lo) {
    const double da = std::abs(pool.coord(a) - target);
    const double db = std::abs(pool.coord(a - 1) - target);
    if (db <= da) best = a - 1;  // tie toward the smaller index
  }
  return best;
}

}  // namespace

std::int64_t adversarial_next(const SamplerState& state, int k) {
  (void)k;
  if (!state.open_.empty()) return *state.open_.begin();

  const Pool& pool = state.pool_;
  const std::int64_t m = pool.size();
  if (pool.queried_count() >= m) throw ExhaustionError("pool exhausted");

  if (state.queried_.empty()) {
    // Nothing labeled yet: midpoint of the largest gap between pool points.
    std::int64_t gap_left = 0;
    double gap = -1.0;
    for (std::int64_t i = 0; i + 1 < m; ++i) {
      const double g = pool.coord(i + 1) - pool.coord(i);
      if (g > gap) {
        gap = g;
        gap_left = i;
      }
    }
    if (m == 1) return 0;
    const double mid = (pool.coord(gap_left) + pool.coord(gap_left + 1)) / 2.0;
    return nearest_in_range(pool, mid, gap_left, gap_left + 1);
  }

  std::int64_t best_idx = -1;
  double best_dist = -1.0;
  auto consider = [&](std::int64_t idx, double dist) {
    if (dist > best_dist) {
      best_dist = dist;
      best_idx = idx;
    }
  };

  const std::int64_t first = *state.queried_.begin();
  const std::int64_t last = *state.queried_.rbegin();
  if (first > 0) consider(0, pool.coord(first) - pool.coord(0));
  std::int64_t prev = first;
  for (auto it = std::next(state.queried_.begin()); it != state.queried_.end(); ++it) {
    const std::int64_t b = *it;
    if (b > prev + 1) {
      const double mid = (pool.coord(prev) + pool.coord(b)) / 2.0;
      const std::int64_t cand = nearest_in_range(pool, mid, prev + 1, b - 1);
      consider(cand, std::min(pool.coord(cand) - pool.coord(prev),
                              pool.coord(b) - pool.coord(cand)));
    }
    prev = b;
  }
  if (last + 1 < m) consider(m - 1, pool.coord(m - 1) - pool.coord(last));
  if (best_idx < 0) throw ExhaustionError("no unqueried candidate");
  return best_idx;
}

std::int64_t greedy_next(const SamplerState& state) {
  const Pool& pool = state.pool_;
  const std::int64_t m = pool.size();

  // 1-NN decision boundaries: midpoints of coordinate-consecutive positions
  // with known, differing labels.
  std::vector<double> boundaries;
  std::int64_t prev = -1;
  ViewMark prev_mark = ViewMark::Unqueried;
  for (std::int64_t q : state.queried_) {
    const ViewMark mk = state.view_[q];
    if (mk != ViewMark::Zero && mk != ViewMark::One) continue;
    if (prev >= 0 && mk != prev_mark)
      boundaries.push_back((pool.coord(prev) + pool.coord(q)) / 2.0);
    prev = q;
    prev_mark = mk;
  }
  if (boundaries.empty()) return adversarial_next(state, 1);

  std::int64_t best_idx = -1;
  double best_dist = 0;
  for (const double b : boundaries) {
    const std::int64_t at = nearest_in_range(pool, b, 0, m - 1);
    // expand around the insertion region, skipping queried positions
    for (int dir : {0, -1, 1}) {
      std::int64_t c = at + dir;
      while (c >= 0 && c < m && pool.queried(c)) c += dir == 0 ? 1 : dir;
      if (c < 0 || c >= m) continue;
      const double d = std::abs(pool.coord(c) - b);
      if (best_idx < 0 || d < best_dist || (d == best_dist && c < best_idx)) {
        best_idx = c;
        best_dist = d;
      }
    }
  }
  if (best_idx < 0) throw ExhaustionError("pool exhausted");
  return best_idx;
}

namespace {

std::int64_t draw_unqueried(const Pool& pool, RngStream& stream) {
  const std::int64_t m = pool.size();
  const std::int64_t free = m - pool.queried_count();
  if (free <= 0) throw ExhaustionError("pool exhausted");
  if (free * 16 >= m) {
    for (;;) {
      const std::int64_t idx = static_cast<std::int64_t>(stream.below(m));
      if (!pool.queried(idx)) return idx;
    }
  }
  // Dense regime: draw a rank among the unqueried points and scan to it.
  std::int64_t rank = static_cast<std::int64_t>(stream.below(free));
  for (std::int64_t i = 0; i < m; ++i) {
    if (!pool.queried(i) && rank-- == 0) return i;
  }
  throw ExhaustionError("pool exhausted");
}

}  // namespace

std::int64_t SamplerState::reveal_routed(std::int64_t idx, const SamplerConfig& cfg,
                                         int z, int forced_label) {
  int y;
  if (forced_label >= 0) {
    pool_.reveal_as(idx, forced_label);
    y = forced_label;
  } else {
    y = pool_.reveal(idx);
  }

  const std::int64_t i = step_ + 1;
  const Point x = pool_.point(idx);
  const Source src = z ? Source::Random : Source::Active;

  bool label_to_s;
  if (!splitting_) {
    label_to_s = true;
  } else if (z) {
    label_to_s = true;  // random draws feed the prediction set
  } else {
    // The base algorithm routes its own queries; the adversarial and greedy
    // bases keep them for decision making, the passive base has no use for
    // them and passes them on.
    label_to_s = cfg.base == BaseAlgorithm::PassiveUniform;
  }

  if (label_to_s) {
    s_.add(x, y, src, i, z, idx);
    if (splitting_) {
      r_.add(x, -1, src, i, z, idx);  // position-only placeholder
      view_[idx] = ViewMark::Hidden;
    } else {
      view_[idx] = y ? ViewMark::One : ViewMark::Zero;
    }
  } else {
    r_.add(x, y, src, i, z, idx);
    view_[idx] = y ? ViewMark::One : ViewMark::Zero;
  }

  queried_.insert(idx);
  return idx;
}

std::int64_t SamplerState::advance_pool_step(const SamplerConfig& cfg, int z,
                                             SamplerStreams& streams, int forced_label) {
  const std::int64_t i = step_ + 1;
  const int nk = cfg.sched.k_at(i);
  if (nk != cur_k_) {
    // The open-point definition changed; rebuild from scratch.
    cur_k_ = nk;
    open_.clear();
    for (std::int64_t q : queried_) {
      for (std::int64_t c : {q - 1, q + 1}) {
        if (view_open(c)) open_.insert(c);
      }
    }
  }

  if (pool_.queried_count() >= pool_.size()) throw ExhaustionError("pool exhausted");

  std::int64_t idx;
  if (z) {
    idx = draw_unqueried(pool_, streams.rand_idx);
  } else {
    switch (cfg.base) {
      case BaseAlgorithm::AdversarialOpenPoint:
        idx = adversarial_next(*this, cur_k_);
        break;
      case BaseAlgorithm::PassiveUniform:
        idx = draw_unqueried(pool_, streams.base_idx);
        break;
      case BaseAlgorithm::GreedyUncertainty:
        idx = greedy_next(*this);
        break;
      default:
        throw ConfigError("unknown base algorithm");
    }
  }

  reveal_routed(idx, cfg, z, forced_label);
  z_history_.push_back(static_cast<std::int8_t>(z));
  step_ = i;
  s_partial_ += cfg.sched.p_at(i);
  update_open_around(idx);
  return idx;
}

void SamplerState::advance_synthesis_step(const SamplerConfig& cfg, int z,
                                          SamplerStreams& streams) {
  const std::int64_t i = step_ + 1;
  Point x;
  x.dim = cfg.dist.dim;
  RngStream& src = z ? streams.synth_x : streams.base_idx;
  for (int j = 0; j < x.dim; ++j) x.c[j] = src.next_u01();
  const int y = streams.synth_y.bernoulli(cfg.dist.eta_at(x.c[0])) ? 1 : 0;
  s_.add(x, y, z ? Source::Random : Source::Active, i, z, -1);
  z_history_.push_back(static_cast<std::int8_t>(z));
  step_ = i;
  s_partial_ += cfg.sched.p_at(i);
}

void augmented_step(SamplerState& state, const SamplerConfig& cfg,
                    SamplerStreams& streams) {
  if (cfg.splitting)
    throw ConfigError("use data_splitting_step when the splitting flag is set");
  const int z = streams.z.bernoulli(cfg.sched.p_at(state.step() + 1)) ? 1 : 0;
  if (cfg.mode == SamplerMode::Pool) {
    state.advance_pool_step(cfg, z, streams);
  } else {
    state.advance_synthesis_step(cfg, z, streams);
  }
}

void data_splitting_step(SamplerState& state, const SamplerConfig& cfg,
                         SamplerStreams& streams) {
  if (!cfg.splitting || cfg.mode != SamplerMode::Pool)
    throw ConfigError("data splitting requires pool mode with the splitting flag");
  const int z = streams.z.bernoulli(cfg.sched.p_at(state.step() + 1)) ? 1 : 0;
  state.advance_pool_step(cfg, z, streams);
}

std::vector<CheckpointRecord> run_sampler(const SamplerConfig& cfg, std::int64_t n,
                                          const std::vector<std::int64_t>& checkpoints,
                                          const RngContract& rng,
                                          const CheckpointCallback& on_checkpoint) {
  cfg.validate();
  if (n < 1) throw ConfigError("n must be >= 1");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > n)
      throw ConfigError("checkpoints must lie in [1, n]");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw ConfigError("checkpoints must be strictly increasing");
  }

  SamplerStreams streams = SamplerStreams::make(rng);
  Pool pool = cfg.mode == SamplerMode::Pool ? build_pool(n, cfg.dist, cfg.sched, rng)
                                            : Pool();
  SamplerState state(std::move(pool), cfg);

  std::vector<CheckpointRecord> records;
  auto ck = checkpoints.begin();
  for (std::int64_t i = 1; i <= n; ++i) {
    if (cfg.splitting) {
      data_splitting_step(state, cfg, streams);
    } else {
      augmented_step(state, cfg, streams);
    }
    if (ck != checkpoints.end() && *ck == i) {
      CheckpointRecord rec;
      rec.n = i;
      rec.k_n = cfg.sched.k_at(i);
      rec.s_n = state.s_partial();
      rec.h_n = cfg.sched.h_from_s(rec.s_n);
      rec.o_n = static_cast<std::int64_t>(state.open_index().size());
      rec.s_snapshot = state.s();
      if (on_checkpoint) on_checkpoint(state, rec);
      records.push_back(std::move(rec));
      ++ck;
    }
  }
  return records;
}

}  // namespace allab
