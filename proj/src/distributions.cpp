#include "allab/distributions.hpp"

#include <algorithm>
#include <cmath>

namespace allab {

DistributionSpec DistributionSpec::constant_eta(double eta, int dim) {
  DistributionSpec d;
  d.dim = dim;
  d.kind = RegressionKind::ConstantEta;
  d.eta = eta;
  d.validate();
  return d;
}

DistributionSpec DistributionSpec::threshold_step(double t, int dim) {
  DistributionSpec d;
  d.dim = dim;
  d.kind = RegressionKind::ThresholdStep;
  d.threshold = t;
  d.validate();
  return d;
}

DistributionSpec DistributionSpec::piecewise(std::vector<EtaSegment> segs, int dim) {
  DistributionSpec d;
  d.dim = dim;
  d.kind = RegressionKind::PiecewiseContinuous;
  d.segments = std::move(segs);
  d.validate();
  return d;
}

void DistributionSpec::validate() const {
  if (dim < 1 || dim > 3) throw ConfigError("dim must be in {1,2,3}");
  switch (kind) {
    case RegressionKind::ConstantEta:
      if (!(eta > 0.0 && eta < 0.5))
        throw ConfigError("constant eta must satisfy 0 < eta < 1/2");
      break;
    case RegressionKind::ThresholdStep:
      if (!(threshold > 0.0 && threshold < 1.0))
        throw ConfigError("threshold must lie in (0,1)");
      break;
    case RegressionKind::PiecewiseContinuous: {
      if (segments.empty()) throw ConfigError("piecewise regression needs segments");
      double cursor = 0.0;
      for (const auto& seg : segments) {
        if (std::abs(seg.lo - cursor) > 1e-12)
          throw ConfigError("piecewise segments must tile [0,1] without gaps");
        if (!(seg.hi > seg.lo)) throw ConfigError("empty piecewise segment");
        const double lo_val = seg.a + seg.b * seg.lo;
        const double hi_val = seg.a + seg.b * seg.hi;
        if (std::min(lo_val, hi_val) < -1e-12 || std::max(lo_val, hi_val) > 1.0 + 1e-12)
          throw ConfigError("piecewise eta must stay within [0,1]");
        if (seg.b == 0.0 && seg.a == 0.5)
          throw ConfigError("piecewise eta identically 1/2 on a segment");
        cursor = seg.hi;
      }
      if (std::abs(cursor - 1.0) > 1e-12)
        throw ConfigError("piecewise segments must end at 1");
      break;
    }
  }
}

double DistributionSpec::eta_at(double x0) const {
  switch (kind) {
    case RegressionKind::ConstantEta:
      return eta;
    case RegressionKind::ThresholdStep:
      return x0 > threshold ? 1.0 : 0.0;
    case RegressionKind::PiecewiseContinuous:
      for (const auto& seg : segments) {
        if (x0 < seg.hi || &seg == &segments.back())
          return std::clamp(seg.a + seg.b * x0, 0.0, 1.0);
      }
      return 0.0;
  }
  return 0.0;
}

namespace {

// Integral of min(a + b x, 1 - a - b x) over [lo, hi], splitting where the
// affine eta crosses 1/2.
double min_integral(double lo, double hi, double a, double b) {
  auto seg_int = [&](double l, double h, bool use_eta) {
    const double ia = use_eta ? a : 1.0 - a;
    const double ib = use_eta ? b : -b;
    return ia * (h - l) + ib * (h * h - l * l) / 2.0;
  };
  if (b == 0.0) return seg_int(lo, hi, a <= 0.5);
  const double cross = (0.5 - a) / b;
  if (cross <= lo || cross >= hi) {
    const double mid = (lo + hi) / 2.0;
    return seg_int(lo, hi, a + b * mid <= 0.5);
  }
  const double lo_mid = (lo + cross) / 2.0;
  return seg_int(lo, cross, a + b * lo_mid <= 0.5) +
         seg_int(cross, hi, !(a + b * lo_mid <= 0.5));
}

}  // namespace

double bayes_risk(const DistributionSpec& dist) {
  switch (dist.kind) {
    case RegressionKind::ConstantEta:
      return dist.eta;
    case RegressionKind::ThresholdStep:
      return 0.0;
    case RegressionKind::PiecewiseContinuous: {
      double r = 0.0;
      for (const auto& seg : dist.segments) r += min_integral(seg.lo, seg.hi, seg.a, seg.b);
      return r;
    }
  }
  return 0.0;
}

}  // namespace allab
