#include "allab/schedules.hpp"

#include <algorithm>
#include <cmath>

namespace allab {

void ScheduleSpec::validate() const {
  if (dim < 1 || dim > 3) throw ConfigError("schedule dim must be in {1,2,3}");
  switch (p.kind) {
    case PRule::Kind::Harmonic:
      break;
    case PRule::Kind::Constant:
      if (!(p.value > 0.0 && p.value <= 1.0))
        throw ConfigError("constant p must lie in (0,1]");
      break;
    case PRule::Kind::Power:
      if (!(p.value > 0.0 && p.value <= 1.0))
        throw ConfigError("power-rule exponent must lie in (0,1] to keep the sum divergent");
      break;
  }
  if (k.kind == KRule::Kind::Constant && k.value < 1)
    throw ConfigError("constant k must be >= 1");
  if (h.kind == HRule::Kind::Constant && !(h.value > 0.0 && h.value <= 1.0))
    throw ConfigError("constant h must lie in (0,1]");
  if (m.kind == MRule::Kind::Factor && m.factor < 1.0)
    throw ConfigError("pool factor must be >= 1");
  if (m.kind == MRule::Kind::Constant && m.value < 1)
    throw ConfigError("constant pool size must be >= 1");
  if (H.kind == HnRule::Kind::Constant && H.value < 0)
    throw ConfigError("constant H must be >= 0");
}

double p_rule_value(const PRule& p, std::int64_t i) {
  switch (p.kind) {
    case PRule::Kind::Harmonic:
      return 1.0 / static_cast<double>(i);
    case PRule::Kind::Constant:
      return p.value;
    case PRule::Kind::Power:
      return std::min(1.0, std::pow(static_cast<double>(i), -p.value));
  }
  return 0.0;
}

double ScheduleSpec::p_at(std::int64_t i) const { return p_rule_value(p, i); }

double ScheduleSpec::s_at(std::int64_t n) const {
  double s = 0.0;
  for (std::int64_t i = 1; i <= n; ++i) s += p_at(i);
  return s;
}

int ScheduleSpec::k_at(std::int64_t n) const {
  if (k.kind == KRule::Kind::Constant) return k.value;
  const double nn = static_cast<double>(std::max<std::int64_t>(n, 3));
  return std::max(1, static_cast<int>(std::floor(std::log(std::log(nn)))));
}

double ScheduleSpec::h_from_s(double s_n) const {
  if (h.kind == HRule::Kind::Constant) return h.value;
  return std::pow(std::max(s_n, 1e-12), -1.0 / (2.0 * dim));
}

double ScheduleSpec::h_at(std::int64_t n) const { return h_from_s(s_at(n)); }

std::int64_t ScheduleSpec::m_at(std::int64_t n) const {
  switch (m.kind) {
    case MRule::Kind::Square:
      return n * n;
    case MRule::Kind::Factor:
      return std::max<std::int64_t>(n, static_cast<std::int64_t>(std::llround(m.factor * static_cast<double>(n))));
    case MRule::Kind::Constant:
      return m.value;
  }
  return n;
}

std::int64_t ScheduleSpec::H_at(std::int64_t n) const {
  switch (H.kind) {
    case HnRule::Kind::Default: {
      const double s = s_at(n);
      const double hd = std::pow(h_from_s(s), dim);
      return static_cast<std::int64_t>(std::floor(std::sqrt(s / hd)));
    }
    case HnRule::Kind::Kn:
      return k_at(n);
    case HnRule::Kind::Constant:
      return H.value;
  }
  return 0;
}

ScheduleDiagnostics schedule_diagnostics(const ScheduleSpec& sched, std::int64_t n) {
  if (n < 1) throw ConfigError("diagnostics need n >= 1");
  ScheduleDiagnostics d;

  double s = 0.0;
  double prev_p = 1.0;
  int prev_k = 0;
  double prev_h = 2.0;
  bool p_bad = false, k_bad = false, h_bad = false, m_bad = false;
  for (std::int64_t i = 1; i <= n; ++i) {
    const double pi = sched.p_at(i);
    s += pi;
    if (pi <= 0.0 || pi > 1.0 || pi > prev_p + 1e-15) p_bad = true;
    prev_p = pi;

    const int ki = sched.k_at(i);
    if (ki < 1 || ki < prev_k) k_bad = true;
    prev_k = ki;

    const double hi = sched.h_from_s(s);
    if (hi <= 0.0 || hi > prev_h + 1e-15) h_bad = true;
    prev_h = hi;

    if (sched.m_at(i) < i) m_bad = true;
  }
  if (p_bad) d.violations.push_back("p_i not nonincreasing in (0,1]");
  if (k_bad) d.violations.push_back("k_n not a nondecreasing positive integer");
  if (h_bad) d.violations.push_back("h_n not positive nonincreasing");
  if (m_bad) d.violations.push_back("m_n < n");

  d.s_n = s;
  d.p_n = sched.p_at(n);
  d.k_n = sched.k_at(n);
  d.h_n = sched.h_from_s(s);
  d.k_over_s = static_cast<double>(d.k_n) / s;
  d.hd_times_s = std::pow(d.h_n, sched.dim) * s;
  d.H_n = sched.H_at(n);
  d.H_over_s = static_cast<double>(d.H_n) / s;
  return d;
}

}  // namespace allab
