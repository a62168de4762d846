#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "allab/distributions.hpp"
#include "allab/estimators.hpp"
#include "allab/samplers.hpp"
#include "allab/schedules.hpp"

namespace allab {

struct ExperimentConfig {
  std::string name = "run";
  DistributionSpec dist;
  ScheduleSpec sched;
  SamplerConfig sampler;
  EstimatorSpec estimator;       // family template
  bool k_from_schedule = true;   // resolve k_n from the schedule at each checkpoint
  bool h_from_schedule = true;   // resolve h_n likewise
  std::int64_t n_max = 400;
  std::vector<std::int64_t> checkpoints;
  std::int64_t replicates = 1;
  std::uint64_t master_seed = 1;
  std::string out_dir = "out";

  void validate() const;

  EstimatorSpec estimator_at(std::int64_t n) const;
  std::string estimator_label() const;
  std::string sampler_label() const;
};

// Flat key = value file; '#' starts a comment; unknown keys are errors.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

// Applies one `key=value` override (the sweep mechanism); key must be a known
// config key.
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

struct RiskRecord {
  std::string run_id;
  std::int64_t replicate = 0;
  std::int64_t n = 0;
  std::string estimator;
  std::string sampler;
  double exact_risk = 0;
  double p_one = 0;
  std::int64_t o_n = 0;
  double interior_cov = 0;
  double d_n = 0;
  double s_n = 0;
  double bayes_risk = 0;
  std::uint64_t seed = 0;
  double wall_time_s = 0;  // not serialized; the CSV schema is fixed
  bool failed = false;
  std::string error;
};

// Runs every replicate (in parallel up to `threads`), one record per
// (replicate, checkpoint), sorted by (replicate, n). Output is independent of
// the thread count. A replicate failure produces one error record.
std::vector<RiskRecord> run_experiment(const ExperimentConfig& cfg, int threads = 1);

inline constexpr const char* kCsvHeader =
    "run_id,replicate,n,estimator,sampler,exact_risk,p_one,o_n,interior_cov,d_n,s_n,"
    "bayes_risk,seed";

// 17-significant-digit floats, '.' decimal point, no locale. Byte-stable for
// identical records.
void write_csv(const std::vector<RiskRecord>& records, std::ostream& out);

std::vector<RiskRecord> read_csv(std::istream& in);

// One panel per (estimator, sampler) pair: mean exact risk vs n with a
// min/max band and horizontal references at the Bayes risk and its mirror
// 1 - R* (the constant-noise inconsistency ceiling) when 0 < R* < 1/2.
void write_svg_summary(const std::vector<RiskRecord>& records, std::ostream& out);

// Convenience: run + write <out>/<name>.csv and .svg. Returns records.
std::vector<RiskRecord> simulate_to_files(const ExperimentConfig& cfg, int threads);

}  // namespace allab
