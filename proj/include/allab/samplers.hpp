#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <vector>

#include "allab/pool.hpp"
#include "allab/schedules.hpp"
#include "allab/types.hpp"

namespace allab {

enum class SamplerMode : std::uint8_t { Pool, QuerySynthesis };

enum class BaseAlgorithm : std::uint8_t {
  AdversarialOpenPoint,  // smallest open point, else furthest from labeled data
  PassiveUniform,
  GreedyUncertainty,  // unqueried point nearest a 1-NN decision boundary midpoint
};

struct SamplerConfig {
  SamplerMode mode = SamplerMode::Pool;
  BaseAlgorithm base = BaseAlgorithm::AdversarialOpenPoint;
  bool splitting = false;
  ScheduleSpec sched;
  DistributionSpec dist;

  void validate() const;
};

// Reveal state as seen by an algorithm: a position can be unqueried, carry a
// known label, or be queried with its label withheld (decision-set
// placeholders under data splitting).
enum class ViewMark : std::uint8_t { Unqueried = 0, Zero = 1, One = 2, Hidden = 3 };

// An unqueried position is open when some adjacent position is labeled and
// the k' = floor(k/2)+1 labels running away from it on that side are not all
// ones. Unqueried, hidden, or out-of-range positions break a run of ones.
bool is_open_point(const std::vector<ViewMark>& view, std::int64_t idx, int k);

std::vector<std::int64_t> detect_open_points(const Pool& pool, int k);

struct SamplerStreams {
  RngStream z;
  RngStream rand_idx;
  RngStream base_idx;
  RngStream synth_x;
  RngStream synth_y;

  static SamplerStreams make(const RngContract& rng);
};

// Full trajectory state of one sampler run. Owns the pool; the open-point
// index is maintained incrementally and always matches a from-scratch
// recomputation at the current k.
class SamplerState {
 public:
  SamplerState(Pool pool, const SamplerConfig& cfg);

  const Pool& pool() const { return pool_; }
  const LabeledSet& s() const { return s_; }
  const LabeledSet& r() const { return r_; }
  std::int64_t step() const { return step_; }
  const std::vector<std::int8_t>& z_history() const { return z_history_; }
  const std::set<std::int64_t>& open_index() const { return open_; }
  const std::set<std::int64_t>& queried_indices() const { return queried_; }
  int current_k() const { return cur_k_; }
  double s_partial() const { return s_partial_; }

  // View of reveal states the base algorithm is allowed to read. Without
  // splitting this mirrors the pool; with splitting, labels routed to the
  // prediction set appear as Hidden.
  const std::vector<ViewMark>& base_view() const { return view_; }

  std::int64_t unqueried_count() const { return pool_.size() - pool_.queried_count(); }

  // Internal advance used by the step functions and by coupled simulations
  // (forced z / forced label). Returns the queried pool index.
  std::int64_t advance_pool_step(const SamplerConfig& cfg, int z,
                                 SamplerStreams& streams, int forced_label = -1);

  void advance_synthesis_step(const SamplerConfig& cfg, int z, SamplerStreams& streams);

  friend std::int64_t adversarial_next(const SamplerState& state, int k);
  friend std::int64_t greedy_next(const SamplerState& state);

 private:
  std::int64_t reveal_routed(std::int64_t idx, const SamplerConfig& cfg, int z,
                             int forced_label);
  void update_open_around(std::int64_t idx);
  bool view_open(std::int64_t idx) const { return is_open_point(view_, idx, cur_k_); }

  Pool pool_;
  LabeledSet s_, r_;
  std::int64_t step_ = 0;
  std::vector<std::int8_t> z_history_;
  std::set<std::int64_t> open_;
  std::set<std::int64_t> queried_;
  std::vector<ViewMark> view_;
  int cur_k_ = 1;
  double s_partial_ = 0;
  bool splitting_ = false;
};

// Smallest open point; with no open point, the unqueried point furthest from
// any labeled position (ties toward the smaller index); with nothing queried
// yet, the point nearest the midpoint of the largest gap between pool points.
std::int64_t adversarial_next(const SamplerState& state, int k);

std::int64_t greedy_next(const SamplerState& state);

// One step of the augmented sampler: Z_i ~ Bernoulli(p_i); Z_i = 1 queries a
// uniform unqueried point (pool) or a fresh marginal draw (synthesis),
// Z_i = 0 defers to the base algorithm.
void augmented_step(SamplerState& state, const SamplerConfig& cfg, SamplerStreams& streams);

// Data-splitting variant: random draws are labeled into S with a placeholder
// in R; base-algorithm draws are routed by the base (never reading S labels).
void data_splitting_step(SamplerState& state, const SamplerConfig& cfg,
                         SamplerStreams& streams);

struct CheckpointRecord {
  std::int64_t n = 0;
  int k_n = 1;
  double h_n = 0;
  double s_n = 0;
  std::int64_t o_n = 0;
  LabeledSet s_snapshot;
};

using CheckpointCallback =
    std::function<void(const SamplerState&, const CheckpointRecord&)>;

// Advances the configured stepper n times, recording at each checkpoint.
// Deterministic given the contract. Checkpoints must be sorted, within [1, n].
std::vector<CheckpointRecord> run_sampler(const SamplerConfig& cfg, std::int64_t n,
                                          const std::vector<std::int64_t>& checkpoints,
                                          const RngContract& rng,
                                          const CheckpointCallback& on_checkpoint = {});

}  // namespace allab
