#include <doctest.h>

#include <sstream>

#include "allab/experiment.hpp"

using namespace allab;

namespace {

const char* kSmallConfig = R"(
# small adversarial run
name = smoke
dist = constant_eta
eta = 0.2
estimator = knn
k = 1
sampler = adversarial
mode = pool
p_rule = harmonic
k_rule = constant:1
m_rule = factor:8
n_max = 120
checkpoints = 60,120
replicates = 3
seed = 424242
out = out/smoke
)";

}  // namespace

TEST_CASE("config parsing round trip") {
  const auto cfg = parse_config_text(kSmallConfig, "inline");
  CHECK(cfg.name == "smoke");
  CHECK(cfg.dist.eta == doctest::Approx(0.2));
  CHECK(cfg.estimator.kind == EstimatorSpec::Kind::Knn);
  CHECK_FALSE(cfg.k_from_schedule);
  CHECK(cfg.estimator.k == 1);
  CHECK(cfg.sampler.base == BaseAlgorithm::AdversarialOpenPoint);
  CHECK(cfg.n_max == 120);
  CHECK(cfg.replicates == 3);
  CHECK(cfg.master_seed == 424242);
}

TEST_CASE("unknown keys and malformed values are config errors") {
  CHECK_THROWS_AS(parse_config_text("nonsense = 1\n", "inline"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("eta 0.2\n", "inline"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("n_max = twelve\n", "inline"), ConfigError);

  auto cfg = parse_config_text(kSmallConfig, "inline");
  CHECK_THROWS_AS(apply_override(cfg, "banana", "1"), ConfigError);
  apply_override(cfg, "replicates", "5");
  CHECK(cfg.replicates == 5);
}

TEST_CASE("piecewise regression parses from config text") {
  auto cfg = parse_config_text(kSmallConfig, "inline");
  apply_override(cfg, "dist", "piecewise");
  apply_override(cfg, "segments", "0:0.5:0.1:0.2 ; 0.5:1:0.2:0");
  cfg.validate();
  REQUIRE(cfg.dist.segments.size() == 2);
  CHECK(cfg.dist.eta_at(0.25) == doctest::Approx(0.15));
  CHECK(cfg.dist.eta_at(0.75) == doctest::Approx(0.2));
  CHECK(bayes_risk(cfg.dist) == doctest::Approx(0.1 * 0.5 + 0.2 * 0.25 / 2.0 + 0.2 * 0.5));
}

TEST_CASE("kernel estimators are rejected for exact-risk experiments") {
  auto cfg = parse_config_text(kSmallConfig, "inline");
  apply_override(cfg, "estimator", "kernel");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("run_experiment bookkeeping and determinism") {
  const auto cfg = parse_config_text(kSmallConfig, "inline");
  const auto records = run_experiment(cfg, 2);
  REQUIRE(records.size() == 6);  // 3 replicates x 2 checkpoints
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK_FALSE(records[i].failed);
    CHECK(records[i].exact_risk >= records[i].bayes_risk - 1e-12);
    CHECK(records[i].exact_risk <= 1.0);
  }
  CHECK(records[0].replicate == 0);
  CHECK(records[0].n == 60);
  CHECK(records[1].n == 120);

  // same seed, different thread counts: byte-identical CSV
  std::ostringstream a, b;
  write_csv(records, a);
  write_csv(run_experiment(cfg, 1), b);
  CHECK(a.str() == b.str());
}

TEST_CASE("csv round trip preserves records") {
  const auto cfg = parse_config_text(kSmallConfig, "inline");
  const auto records = run_experiment(cfg, 2);
  std::ostringstream out;
  write_csv(records, out);
  std::istringstream in(out.str());
  const auto back = read_csv(in);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].run_id == records[i].run_id);
    CHECK(back[i].n == records[i].n);
    CHECK(back[i].exact_risk == records[i].exact_risk);
    CHECK(back[i].s_n == records[i].s_n);
    CHECK(back[i].o_n == records[i].o_n);
  }
}

TEST_CASE("svg reports one panel per estimator/sampler pair") {
  std::vector<RiskRecord> records;
  for (int rep = 0; rep < 3; ++rep) {
    for (std::int64_t n : {100, 200}) {
      for (const char* est : {"knn[k=1]", "histogram[h=default]"}) {
        RiskRecord r;
        r.run_id = "two";
        r.replicate = rep;
        r.n = n;
        r.estimator = est;
        r.sampler = "adversarial[pool]";
        r.exact_risk = 0.3 + 0.01 * rep;
        r.p_one = 0.2;
        r.bayes_risk = 0.2;
        records.push_back(r);
      }
    }
  }
  std::ostringstream svg;
  write_svg_summary(records, svg);
  const std::string text = svg.str();
  CHECK(text.find("knn[k=1] / adversarial[pool]") != std::string::npos);
  CHECK(text.find("histogram[h=default] / adversarial[pool]") != std::string::npos);
  CHECK(text.find("1 - bayes = 0.8") != std::string::npos);
}

TEST_CASE("estimator and sampler labels") {
  auto cfg = parse_config_text(kSmallConfig, "inline");
  CHECK(cfg.estimator_label() == "knn[k=1]");
  CHECK(cfg.sampler_label() == "adversarial[pool]");
  apply_override(cfg, "estimator", "histogram");
  apply_override(cfg, "h", "schedule");
  CHECK(cfg.estimator_label() == "histogram[h=default]");
  apply_override(cfg, "splitting", "true");
  CHECK(cfg.sampler_label() == "adversarial[pool+split]");
}

TEST_CASE("nullified-histogram runs keep the 13-column schema") {
  auto cfg = parse_config_text(kSmallConfig, "inline");
  apply_override(cfg, "estimator", "nullified_histogram");
  apply_override(cfg, "h", "schedule");
  apply_override(cfg, "r_null", "0.0005");
  apply_override(cfg, "replicates", "1");
  CHECK(cfg.estimator_label() == "nullified_histogram[h=default;r_null=0.0005]");
  const auto records = run_experiment(cfg, 1);
  std::ostringstream out;
  write_csv(records, out);
  std::istringstream in(out.str());
  const auto back = read_csv(in);  // would throw if a label smuggled in a comma
  CHECK(back.size() == records.size());
  CHECK(back[0].estimator == cfg.estimator_label());
}

TEST_CASE("failed replicates produce error rows") {
  auto cfg = parse_config_text(kSmallConfig, "inline");
  apply_override(cfg, "m_rule", "constant:60");  // exhausts mid-run
  const auto records = run_experiment(cfg, 1);
  bool any_failed = false;
  for (const auto& r : records) any_failed = any_failed || r.failed;
  CHECK(any_failed);
}
