#pragma once

#include <vector>

#include "allab/types.hpp"

namespace allab {

// Data-generating model: X uniform on [0,1]^d, Y | X ~ Bernoulli(eta(X)).
// Only three regression shapes are supported; they cover the constant-noise
// counterexamples, the noise-free step, and smooth noisy boundaries.
enum class RegressionKind : std::uint8_t {
  ConstantEta,          // eta(x) = eta, 0 < eta < 1/2
  ThresholdStep,        // eta(x) = 1{x_0 > t}, noise-free
  PiecewiseContinuous,  // eta(x) affine per segment of [0,1] in x_0
};

// eta(x) = a + b * x on [lo, hi).
struct EtaSegment {
  double lo = 0, hi = 1, a = 0, b = 0;
};

struct DistributionSpec {
  int dim = 1;
  RegressionKind kind = RegressionKind::ConstantEta;
  double eta = 0.2;        // ConstantEta
  double threshold = 0.5;  // ThresholdStep
  std::vector<EtaSegment> segments;

  static DistributionSpec constant_eta(double eta, int dim = 1);
  static DistributionSpec threshold_step(double t, int dim = 1);
  static DistributionSpec piecewise(std::vector<EtaSegment> segs, int dim = 1);

  // Throws ConfigError on invalid parameters (eta outside (0,1/2), segments
  // not covering [0,1], eta outside [0,1], a segment identically 1/2, ...).
  void validate() const;

  // P(Y = 1 | X = x); depends on the first coordinate only.
  double eta_at(double x0) const;
  double eta_at(const Point& p) const { return eta_at(p.c[0]); }

  // Bayes-optimal label at x.
  int bayes_label(double x0) const { return eta_at(x0) > 0.5 ? 1 : 0; }
};

// Closed-form integral of min(eta, 1 - eta) over the uniform marginal.
double bayes_risk(const DistributionSpec& dist);

}  // namespace allab
