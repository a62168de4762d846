#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "allab/distributions.hpp"
#include "allab/estimators.hpp"
#include "allab/rng.hpp"
#include "allab/schedules.hpp"

namespace allab {

// zeta(3/2) = sum_{t>=1} t^(-3/2); the constant in the k'-run race bound.
inline constexpr double kZeta32 = 2.6123753486854883;

// Adversarial in-ball weight-mass infimum instance. Fixed points flagged
// e = 1 keep their coordinates; e = 0 points and `n_adversarial` extra points
// are placed by the minimizing search.
struct GnInstance {
  EstimatorSpec est;
  Point x;
  double r = 0.1;
  std::vector<std::pair<Point, int>> fixed;  // (point, e_flag)
  int n_adversarial = 0;
  int grid_resolution = 64;

  void validate() const;
};

// Minimum over lattice placements of sum_i W_ni * 1{point_i in B(x,r)}.
// The lattice is the uniform grid augmented with +-1e-9 shifts around every
// fixed coordinate, cell edge, and ball edge, which is where the discontinuous
// optima of the implemented weight rules live.
double gn_oracle(const GnInstance& inst);

struct Condition1Options {
  int adversary_cap = 2;    // non-e points handed to the minimizer per draw
  int grid_resolution = 48;
  double min_acceptance = 1e-3;
};

struct Condition1Estimate {
  double mean = 0;
  double se = 0;
  std::int64_t accepted = 0;
  std::int64_t attempts = 0;
  std::int64_t h_n = 0;
};

// Monte Carlo estimate of E[g_n | #in-ball random draws >= H_n] with the
// non-conditioned points treated as adversarial (capped; see options).
Condition1Estimate estimate_condition1(const EstimatorSpec& family,
                                       const DistributionSpec& dist,
                                       const ScheduleSpec& sched, std::int64_t n,
                                       double r, std::int64_t mc, const RngContract& rng,
                                       const Condition1Options& opt = {});

struct BoundedSupRow {
  std::int64_t n = 0;
  double h_n = 0;
  double supp_diameter = 0;
  double max_raw_weight = 0;
  double mean_mass = 0;  // mean of sum_i w(X, X_i) Z_i
  double q10 = 0, q25 = 0, q50 = 0, q75 = 0, q90 = 0;  // quantiles of the same
};

struct BoundedSupReport {
  std::vector<BoundedSupRow> rows;
  bool ratio_form_ok = true;
  bool weight_bounded = true;    // max raw weight <= 1
  bool diameter_shrinks = true;  // supp diameter strictly decreasing along n_list
  // Lower quantile never falls and the mean strictly grows along n_list. The
  // histogram mass is integer-valued, so a strictly increasing q10 is not
  // observable at desk scale; the mean carries the strict trend instead.
  bool random_mass_grows = true;

  bool all_ok() const {
    return ratio_form_ok && weight_bounded && diameter_shrinks && random_mass_grows;
  }
};

// Finite-n diagnostics for the structural weight condition: bounded raw
// weights, shrinking support, and a growing lower quantile of the random
// weight mass as the finite surrogate for divergence in probability.
BoundedSupReport check_bounded_sup(const EstimatorSpec& family, const ScheduleSpec& sched,
                                   const std::vector<std::int64_t>& n_list, std::int64_t mc,
                                   const RngContract& rng);

struct RaceSpec {
  PRule p;          // nonincreasing mixing schedule
  double eta = 0.2;
  std::int64_t i0 = 100;
  int k_prime = 1;
  int a = 1, b = 1;
  std::int64_t mc_draws = 100000;
};

struct RaceResult {
  double p_t1_before = 0, se_before = 0;
  double p_tie = 0, se_tie = 0;
  double bound_before = 0;  // k'=1: p_{i0+1}/eta; k'>=2: zeta(3/2)/(2 sqrt(i0)) * (1/(1-eta)) * (1/eta^k' - 1)
  double bound_tie = 0;     // k'=1: p_{i0+1};   k'>=2: 1/i0
};

// Race between the first random draw after i0 and the first completed k'-run
// of ones. Estimates P(T1 < T2) and P(T1 = T2) with standard errors, next to
// the closed-form bounds.
RaceResult race_mc(const RaceSpec& rs, const RngContract& rng);

struct RecursionTable {
  int a = 0, b = 0;
  std::vector<std::vector<double>> recursion;    // [1..a][1..b]
  std::vector<std::vector<double>> closed_form;  // 3^(i+j) * p11^i
  bool recursion_below_closed = true;
};

// Recursive upper bounds for reaching a random draws before b disjoint
// k'-runs, checked against the closed form 3^(a+b) * p11^a.
RecursionTable race_recursion(double p11, double tie_term, int a, int b);

struct UPrimeResult {
  std::int64_t seeds = 0;
  std::int64_t horizon = 0;
  std::int64_t violations = 0;
  std::string first_violation_trace;
  std::int64_t zero_returns = 0;   // total completed cycles across seeds
  double mean_cycle_len = 0;
  std::int64_t max_cycle_len = 0;
  double p_terminal_gt4 = 0;  // fraction of seeds with O_n > 4 at the horizon
  double p_terminal_gt6 = 0;
  Eigen::VectorXd terminal_o;  // per-seed O at the horizon
};

// Couples the adversarial pool sampler to the idealized increment process on
// shared (Z_i, Y_i) streams and checks the per-step domination U_i <= U'_i
// whenever the open-point count stayed positive over the applicable window.
UPrimeResult uprime_sim(const ScheduleSpec& sched, double eta, int k_prime,
                        std::int64_t horizon, std::int64_t seeds, const RngContract& rng,
                        std::int64_t pool_factor = 200);

// Expected idealized increment per step at mixing probability p (constant-p
// closed form; k' = 1 uses the two-case process).
double uprime_mean(double p, double eta, int k_prime);

struct MajorityBoundResult {
  double worst_case = 0;   // max P(majority vote != reference coin) over corner etas
  double bound = 0;        // 2 min(eta,1-eta) + eps for k = 1; min(eta,1-eta) + 2/sqrt(k) else
  int worst_ones = 0;      // number of etas at eta+eps in the worst corner
};

// Exact enumeration of the majority-vote disagreement probability over corner
// configurations of [eta-eps, eta+eps]^k (the objective is affine in each
// eta_i, so corners are exhaustive). Fair-coin tie break for even k.
MajorityBoundResult majority_bound(int k, double eps, double eta);

}  // namespace allab
