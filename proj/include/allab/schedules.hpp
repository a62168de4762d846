#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "allab/errors.hpp"

namespace allab {

// Mixing probabilities p_i for the augmented sampler.
struct PRule {
  enum class Kind : std::uint8_t { Harmonic, Constant, Power } kind = Kind::Harmonic;
  double value = 1.0;  // Constant: p; Power: exponent alpha (p_i = min(1, i^-alpha))
};

double p_rule_value(const PRule& p, std::int64_t i);

// Neighbor count k_n.
struct KRule {
  enum class Kind : std::uint8_t { LogLog, Constant } kind = Kind::LogLog;
  int value = 1;
};

// Cell side / bandwidth h_n.
struct HRule {
  enum class Kind : std::uint8_t { Default, Constant } kind = Kind::Default;
  double value = 0.25;  // Constant only; Default is s_n^(-1/(2d))
};

// Pool growth m_n.
struct MRule {
  enum class Kind : std::uint8_t { Square, Factor, Constant } kind = Kind::Square;
  double factor = 2.0;
  std::int64_t value = 0;
};

// Conditioning level H_n for the adversarial-infimum condition.
struct HnRule {
  enum class Kind : std::uint8_t { Default, Kn, Constant } kind = Kind::Default;
  std::int64_t value = 1;  // Constant only; Default is floor(sqrt(s_n / h_n^d))
};

struct ScheduleSpec {
  int dim = 1;
  PRule p;
  KRule k;
  HRule h;
  MRule m;
  HnRule H;

  void validate() const;

  double p_at(std::int64_t i) const;

  // Exact partial sum s_n = sum_{i<=n} p_i.
  double s_at(std::int64_t n) const;

  // max(1, floor(ln ln max(n,3))) under the default rule.
  int k_at(std::int64_t n) const;

  double h_at(std::int64_t n) const;
  double h_from_s(double s_n) const;

  std::int64_t m_at(std::int64_t n) const;

  std::int64_t H_at(std::int64_t n) const;
};

struct ScheduleDiagnostics {
  double s_n = 0;
  double p_n = 0;
  int k_n = 1;
  double h_n = 0;
  double k_over_s = 0;
  double hd_times_s = 0;  // h_n^d * s_n
  std::int64_t H_n = 0;
  double H_over_s = 0;
  std::vector<std::string> violations;  // monotonicity violations found up to n
};

// Evaluates the schedule at n and scans i = 1..n for violations of the
// required shape: p nonincreasing in (0,1], k >= 1 nondecreasing,
// h positive nonincreasing, m >= n.
ScheduleDiagnostics schedule_diagnostics(const ScheduleSpec& sched, std::int64_t n);

}  // namespace allab
