#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "allab/samplers.hpp"

using namespace allab;

namespace {

const DistributionSpec kEta02 = DistributionSpec::constant_eta(0.2);

Pool pattern_pool(const std::vector<int>& pattern) {
  // pattern entries: -1 unqueried, 0/1 revealed labels; evenly spaced points
  const int m = static_cast<int>(pattern.size());
  Eigen::MatrixXd pts(m, 1);
  for (int i = 0; i < m; ++i) pts(i, 0) = (i + 1.0) / (m + 1.0);
  Pool pool = pool_from_points(pts, kEta02);
  for (int i = 0; i < m; ++i)
    if (pattern[i] >= 0) pool.reveal_as(i, pattern[i]);
  return pool;
}

SamplerConfig adversarial_config(int k = 1) {
  SamplerConfig cfg;
  cfg.mode = SamplerMode::Pool;
  cfg.base = BaseAlgorithm::AdversarialOpenPoint;
  cfg.sched.k = KRule{KRule::Kind::Constant, k};
  cfg.dist = kEta02;
  return cfg;
}

std::vector<std::int64_t> scratch_open(const SamplerState& state, int k) {
  return detect_open_points(state.pool(), k);
}

}  // namespace

TEST_CASE("open point detection, k = 1") {
  // [?, 0, ?, 1, ?] -> {0, 2}
  const Pool p1 = pattern_pool({-1, 0, -1, 1, -1});
  CHECK(detect_open_points(p1, 1) == std::vector<std::int64_t>{0, 2});

  // a revealed 1 opens nothing at k = 1
  const Pool p2 = pattern_pool({-1, 1, -1});
  CHECK(detect_open_points(p2, 1).empty());
}

TEST_CASE("open point detection, k = 3 uses runs of k' = 2 ones") {
  // [?, 1, 1, 0, ?]: index 0 is shielded by the (1,1) run, index 4 is open
  const Pool p = pattern_pool({-1, 1, 1, 0, -1});
  CHECK(detect_open_points(p, 3) == std::vector<std::int64_t>{4});

  // an unqueried hole inside the run breaks it
  const Pool q = pattern_pool({-1, 1, -1, 1, 0});
  const auto open = detect_open_points(q, 3);
  CHECK(std::find(open.begin(), open.end(), 0) != open.end());
}

TEST_CASE("adversarial base picks the smallest open point") {
  Pool pool = pattern_pool({-1, 0, -1, 0, -1});
  const SamplerConfig cfg = adversarial_config();
  SamplerState state(std::move(pool), cfg);
  CHECK(adversarial_next(state, 1) == 0);
}

TEST_CASE("adversarial fallback maximizes distance to labeled data") {
  // queried at 0.5 (label 1), pool holds 0.1 and 0.9: tie -> smaller index
  Eigen::MatrixXd pts(3, 1);
  pts << 0.1, 0.5, 0.9;
  Pool pool = pool_from_points(pts, kEta02);
  pool.reveal_as(1, 1);
  const SamplerConfig cfg = adversarial_config();
  SamplerState state(std::move(pool), cfg);
  CHECK(state.open_index().empty());
  CHECK(adversarial_next(state, 1) == 0);
}

TEST_CASE("adversarial fallback with nothing labeled bisects the largest gap") {
  Eigen::MatrixXd pts(3, 1);
  pts << 0.25, 0.5, 0.75;  // exactly representable, so the gaps tie exactly
  Pool pool = pool_from_points(pts, kEta02);
  const SamplerConfig cfg = adversarial_config();
  SamplerState state(std::move(pool), cfg);
  // tie between the two inner gaps goes to the earlier one, whose midpoint is
  // equidistant from 0.25 and 0.5; the smaller index wins again
  CHECK(adversarial_next(state, 1) == 0);

  // a unique largest gap: its midpoint is equidistant from both endpoints,
  // so the left endpoint is selected
  Eigen::MatrixXd pts2(3, 1);
  pts2 << 0.1, 0.7, 0.8;
  SamplerState state2(pool_from_points(pts2, kEta02), cfg);
  CHECK(adversarial_next(state2, 1) == 0);
}

TEST_CASE("augmented step draws uniformly over the unqueried pool on Z = 1") {
  std::map<std::int64_t, int> counts;
  const int trials = 3000;
  for (int t = 0; t < trials; ++t) {
    Eigen::MatrixXd pts(3, 1);
    pts << 0.2, 0.5, 0.8;
    SamplerConfig cfg = adversarial_config();
    cfg.sched.p = PRule{PRule::Kind::Constant, 1.0};  // Z = 1 surely
    cfg.dist = kEta02;
    Pool pool(pts, kEta02, RngContract{1, static_cast<std::uint64_t>(t)}.key("labels"));
    SamplerState state(std::move(pool), cfg);
    SamplerStreams streams = SamplerStreams::make(RngContract{555, static_cast<std::uint64_t>(t)});
    augmented_step(state, cfg, streams);
    REQUIRE(state.s().size() == 1);
    counts[state.s()[0].pool_index]++;
    CHECK(state.s()[0].source == Source::Random);
    CHECK(state.s()[0].z == 1);
  }
  for (const auto& [idx, c] : counts) {
    CHECK(c > trials / 3 - 80);
    CHECK(c < trials / 3 + 80);
  }
}

TEST_CASE("z history concentrates around the schedule mass") {
  SamplerConfig cfg = adversarial_config();
  cfg.sched.m = MRule{MRule::Kind::Factor, 20.0, 0};
  const std::int64_t n = 2000;
  const auto recs = run_sampler(cfg, n, {n}, RngContract{2024, 0});
  REQUIRE(recs.size() == 1);
  double sum_z = 0;
  for (std::int64_t i = 0; i < n; ++i) sum_z += recs[0].s_snapshot[i].z;
  const double s_n = recs[0].s_n;
  CHECK(std::abs(sum_z - s_n) <= 3.0 * std::sqrt(s_n));
  // source tags match z
  for (std::int64_t i = 0; i < n; ++i)
    CHECK((recs[0].s_snapshot[i].z == 1) ==
          (recs[0].s_snapshot[i].source == Source::Random));
}

TEST_CASE("passive base with p = 1 tags everything random") {
  SamplerConfig cfg;
  cfg.base = BaseAlgorithm::PassiveUniform;
  cfg.sched.p = PRule{PRule::Kind::Constant, 1.0};
  cfg.sched.m = MRule{MRule::Kind::Factor, 4.0, 0};
  cfg.dist = kEta02;
  const auto recs = run_sampler(cfg, 200, {200}, RngContract{11, 0});
  for (const auto& e : recs[0].s_snapshot.entries) CHECK(e.source == Source::Random);
}

TEST_CASE("incremental open set equals from-scratch recomputation") {
  for (int k : {1, 2, 3}) {
    for (std::uint64_t seed : {1ULL, 2ULL}) {
      SamplerConfig cfg = adversarial_config(k);
      cfg.sched.m = MRule{MRule::Kind::Factor, 8.0, 0};
      SamplerStreams streams = SamplerStreams::make(RngContract{seed, 0});
      SamplerState state(build_pool(300, kEta02, cfg.sched, RngContract{seed, 0}), cfg);
      for (int i = 1; i <= 300; ++i) {
        augmented_step(state, cfg, streams);
        const auto scratch = scratch_open(state, state.current_k());
        const std::vector<std::int64_t> inc(state.open_index().begin(),
                                            state.open_index().end());
        REQUIRE(inc == scratch);
      }
    }
  }
}

TEST_CASE("querying an open point closes it") {
  SamplerConfig cfg = adversarial_config(1);
  cfg.sched.m = MRule{MRule::Kind::Factor, 10.0, 0};
  SamplerStreams streams = SamplerStreams::make(RngContract{77, 0});
  SamplerState state(build_pool(400, kEta02, cfg.sched, RngContract{77, 0}), cfg);
  for (int i = 1; i <= 400; ++i) {
    const bool had_open = !state.open_index().empty();
    const std::int64_t smallest = had_open ? *state.open_index().begin() : -1;
    augmented_step(state, cfg, streams);
    // the adversarial branch queried the smallest open point; it cannot
    // remain open once labeled (random interruptions query elsewhere)
    if (had_open && state.s().entries.back().z == 0) {
      CHECK(state.s().entries.back().pool_index == smallest);
      CHECK(state.open_index().count(smallest) == 0);
    }
  }
}

TEST_CASE("k = 1 open count moves by at most +2 and only on fresh zeros") {
  SamplerConfig cfg = adversarial_config(1);
  cfg.sched.m = MRule{MRule::Kind::Factor, 12.0, 0};
  SamplerStreams streams = SamplerStreams::make(RngContract{99, 0});
  SamplerState state(build_pool(500, kEta02, cfg.sched, RngContract{99, 0}), cfg);
  RngStream z_stream = RngContract{99, 0}.stream("test_z");
  for (int i = 1; i <= 500; ++i) {
    const std::set<std::int64_t> before = state.open_index();
    const int z = z_stream.bernoulli(cfg.sched.p_at(i)) ? 1 : 0;
    const std::int64_t idx = state.advance_pool_step(cfg, z, streams);
    const std::int64_t delta = static_cast<std::int64_t>(state.open_index().size()) -
                               static_cast<std::int64_t>(before.size());
    const int y = state.s().entries.back().y;
    CHECK(delta <= 2);
    if (delta > 0) {
      // only a non-open point revealed as 0 can raise the count
      CHECK(y == 0);
      CHECK(before.count(idx) == 0);
    }
  }
}

TEST_CASE("data splitting: routing, placeholders, conservation") {
  SamplerConfig cfg = adversarial_config(1);
  cfg.splitting = true;
  cfg.sched.m = MRule{MRule::Kind::Factor, 10.0, 0};
  SamplerStreams streams = SamplerStreams::make(RngContract{314, 0});
  SamplerState state(build_pool(300, kEta02, cfg.sched, RngContract{314, 0}), cfg);
  for (int i = 1; i <= 300; ++i) data_splitting_step(state, cfg, streams);

  // every random draw lands in S with a position-only placeholder in R
  std::int64_t placeholders = 0;
  for (const auto& e : state.r().entries) {
    if (e.y < 0) {
      ++placeholders;
      CHECK(state.base_view()[e.pool_index] == ViewMark::Hidden);
    }
  }
  CHECK(placeholders == state.s().size());
  for (const auto& e : state.s().entries) CHECK(e.z == 1);  // adversarial routes actives to R

  // conservation: |s| + |r without placeholders| = n
  CHECK(state.s().size() + state.r().labeled_count() == 300);

  // each queried pool point appears exactly once across s and r's labeled part
  std::set<std::int64_t> seen;
  for (const auto& e : state.s().entries) CHECK(seen.insert(e.pool_index).second);
  for (const auto& e : state.r().entries)
    if (e.y >= 0) CHECK(seen.insert(e.pool_index).second);
  CHECK(static_cast<std::int64_t>(seen.size()) == 300);
}

TEST_CASE("splitting requires pool mode and augmented_step rejects it") {
  SamplerConfig cfg = adversarial_config(1);
  cfg.splitting = true;
  SamplerStreams streams = SamplerStreams::make(RngContract{1, 0});
  SamplerState state(build_pool(10, kEta02, cfg.sched, RngContract{1, 0}), cfg);
  CHECK_THROWS_AS(augmented_step(state, cfg, streams), ConfigError);

  SamplerConfig synth;
  synth.mode = SamplerMode::QuerySynthesis;
  synth.base = BaseAlgorithm::AdversarialOpenPoint;
  synth.dist = kEta02;
  CHECK_THROWS_AS(synth.validate(), ConfigError);
}

TEST_CASE("query synthesis draws fresh points") {
  SamplerConfig cfg;
  cfg.mode = SamplerMode::QuerySynthesis;
  cfg.base = BaseAlgorithm::PassiveUniform;
  cfg.dist = kEta02;
  const auto recs = run_sampler(cfg, 500, {500}, RngContract{8, 0});
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].s_snapshot.size() == 500);
  for (const auto& e : recs[0].s_snapshot.entries) {
    CHECK(e.pool_index == -1);
    CHECK(e.x.x() >= 0.0);
    CHECK(e.x.x() <= 1.0);
  }
}

TEST_CASE("pool exhaustion raises") {
  SamplerConfig cfg = adversarial_config(1);
  cfg.sched.m = MRule{MRule::Kind::Constant, 1.0, 5};
  SamplerStreams streams = SamplerStreams::make(RngContract{21, 0});
  SamplerState state(build_pool(5, kEta02, cfg.sched, RngContract{21, 0}), cfg);
  for (int i = 1; i <= 5; ++i) augmented_step(state, cfg, streams);
  CHECK_THROWS_AS(augmented_step(state, cfg, streams), ExhaustionError);
}

TEST_CASE("run_sampler bookkeeping") {
  SamplerConfig cfg = adversarial_config(1);
  cfg.sched.m = MRule{MRule::Kind::Factor, 5.0, 0};
  const auto recs = run_sampler(cfg, 100, {50, 100}, RngContract{65, 0});
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].n == 50);
  CHECK(recs[1].n == 100);
  CHECK(recs[0].s_snapshot.size() == 50);
  CHECK(recs[1].s_snapshot.size() == 100);
  CHECK_THROWS_AS(run_sampler(cfg, 10, {0}, RngContract{65, 0}), ConfigError);
  CHECK_THROWS_AS(run_sampler(cfg, 10, {5, 5}, RngContract{65, 0}), ConfigError);
}

TEST_CASE("greedy base targets decision boundaries") {
  // labels 0 at 0.2, 1 at 0.6: boundary midpoint 0.4; nearest unqueried is 0.41
  Eigen::MatrixXd pts(5, 1);
  pts << 0.2, 0.41, 0.6, 0.8, 0.9;
  Pool pool = pool_from_points(pts, kEta02);
  pool.reveal_as(0, 0);
  pool.reveal_as(2, 1);
  SamplerConfig cfg = adversarial_config(1);
  cfg.base = BaseAlgorithm::GreedyUncertainty;
  SamplerState state(std::move(pool), cfg);
  CHECK(greedy_next(state) == 1);
}
