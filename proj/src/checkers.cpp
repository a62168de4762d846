#include "allab/checkers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "allab/line_geometry.hpp"
#include "allab/pool.hpp"
#include "allab/samplers.hpp"

namespace allab {

void GnInstance::validate() const {
  est.validate();
  if (!(r > 0.0)) throw ConfigError("ball radius must be positive");
  if (x.dim < 1 || x.dim > 3) throw ConfigError("dim must be in {1,2,3}");
  if (n_adversarial < 0 || n_adversarial > 4)
    throw ConfigError("adversary count is capped at 4");
  if (grid_resolution < 2 || grid_resolution > 256)
    throw ConfigError("grid resolution must lie in [2, 256]");
  if (est.kind == EstimatorSpec::Kind::Knn &&
      static_cast<int>(fixed.size()) + n_adversarial < est.k)
    throw ConfigError("k-NN infimum instance needs at least k points overall");
  for (const auto& [p, e] : fixed) {
    if (p.dim != x.dim) throw ConfigError("fixed point dimension mismatch");
    if (e == 1 && sq_dist(p, x) > r * r * (1.0 + 1e-12))
      throw ConfigError("conditioned points must lie inside the ball");
  }
}

namespace {

constexpr double kEdgeNudge = 1e-9;

// Per-axis candidate positions: a uniform grid plus +-1e-9 shifts around the
// coordinates where the weight rules are discontinuous (fixed points, cell
// edges, ball edges, the query point itself).
std::vector<double> axis_candidates(const GnInstance& inst, int axis, int per_axis) {
  std::vector<double> c;
  c.reserve(per_axis + 12 + 3 * inst.fixed.size());
  for (int g = 0; g < per_axis; ++g)
    c.push_back(per_axis == 1 ? 0.5 : static_cast<double>(g) / (per_axis - 1));

  std::vector<double> specials;
  for (const auto& [p, e] : inst.fixed) specials.push_back(p.c[axis]);
  specials.push_back(inst.x.c[axis]);
  specials.push_back(inst.x.c[axis] - inst.r);
  specials.push_back(inst.x.c[axis] + inst.r);
  if (inst.est.kind == EstimatorSpec::Kind::Histogram ||
      inst.est.kind == EstimatorSpec::Kind::NullifiedHistogram) {
    const int cells = histogram_cell_count(inst.est.h);
    for (int j = 0; j <= cells; ++j) specials.push_back(j * inst.est.h);
  }
  for (double s : specials)
    for (double v : {s - kEdgeNudge, s, s + kEdgeNudge})
      if (v >= 0.0 && v <= 1.0) c.push_back(v);

  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

std::vector<Point> candidate_points(const GnInstance& inst) {
  const int dim = inst.x.dim;
  const int per_axis =
      std::max(2, static_cast<int>(std::floor(std::pow(
                      static_cast<double>(inst.grid_resolution), 1.0 / dim))));
  std::vector<std::vector<double>> axes(dim);
  for (int j = 0; j < dim; ++j) axes[j] = axis_candidates(inst, j, dim == 1 ? inst.grid_resolution : per_axis);

  std::vector<Point> pts;
  std::vector<int> idx(dim, 0);
  for (;;) {
    Point p;
    p.dim = dim;
    for (int j = 0; j < dim; ++j) p.c[j] = axes[j][idx[j]];
    pts.push_back(p);
    int j = dim - 1;
    while (j >= 0 && ++idx[j] == static_cast<int>(axes[j].size())) idx[j--] = 0;
    if (j < 0) break;
  }
  return pts;
}

double in_ball_weight_mass(const EstimatorSpec& est, const Point& x, double r,
                           const std::vector<Point>& pts) {
  const Eigen::VectorXd w = raw_weights(est, x, pts);
  const double total = w.sum();
  if (total <= 0.0) return 0.0;
  double mass = 0.0;
  const double r2 = r * r;
  for (std::int64_t i = 0; i < w.size(); ++i)
    if (w[i] > 0.0 && sq_dist(x, pts[i]) <= r2) mass += w[i];
  return mass / total;
}

}  // namespace

double gn_oracle(const GnInstance& inst) {
  inst.validate();

  std::vector<Point> base;
  int free_slots = inst.n_adversarial;
  for (const auto& [p, e] : inst.fixed) {
    if (e == 1) {
      base.push_back(p);
    } else {
      ++free_slots;  // unconditioned points are adversary-controlled
    }
  }

  if (free_slots == 0) return in_ball_weight_mass(inst.est, inst.x, inst.r, base);

  const std::vector<Point> cand = candidate_points(inst);
  const double combos = std::pow(static_cast<double>(cand.size()), free_slots);
  if (combos > 1e9) throw BudgetError("adversarial placement search exceeds budget");

  std::vector<Point> pts = base;
  pts.resize(base.size() + free_slots);
  double best = 2.0;

  // combinations with replacement: placements are order-insensitive
  std::vector<std::size_t> choice(free_slots, 0);
  auto evaluate = [&]() {
    for (int s = 0; s < free_slots; ++s) pts[base.size() + s] = cand[choice[s]];
    best = std::min(best, in_ball_weight_mass(inst.est, inst.x, inst.r, pts));
  };
  for (;;) {
    evaluate();
    if (best <= 0.0) return 0.0;
    int s = free_slots - 1;
    while (s >= 0 && choice[s] + 1 == cand.size()) --s;
    if (s < 0) break;
    const std::size_t next = choice[s] + 1;
    for (int t = s; t < free_slots; ++t) choice[t] = next;
  }
  return best;
}

Condition1Estimate estimate_condition1(const EstimatorSpec& family,
                                       const DistributionSpec& dist,
                                       const ScheduleSpec& sched, std::int64_t n,
                                       double r, std::int64_t mc, const RngContract& rng,
                                       const Condition1Options& opt) {
  family.validate();
  dist.validate();
  sched.validate();
  if (mc < 1) throw ConfigError("need at least one draw");

  EstimatorSpec est = family;
  if (family.kind == EstimatorSpec::Kind::Knn) {
    est.k = sched.k_at(n);
  } else {
    est.h = sched.h_from_s(sched.s_at(n));
  }
  est.validate();  // e.g. a schedule h below the family's nullification radius

  Condition1Estimate out;
  out.h_n = sched.H_at(n);

  RngStream xs = rng.stream("cond1_x");
  RngStream zs = rng.stream("cond1_z");
  RngStream xis = rng.stream("cond1_xi");

  double sum = 0.0, sum_sq = 0.0;
  const double r2 = r * r;
  std::vector<Point> e_points;
  while (out.accepted < mc) {
    ++out.attempts;
    if (out.attempts >= 1000 && out.accepted < static_cast<std::int64_t>(
                                                   opt.min_acceptance * out.attempts))
      throw ConditioningError("conditioning event accepted too rarely");

    Point x;
    x.dim = dist.dim;
    for (int j = 0; j < dist.dim; ++j) x.c[j] = xs.next_u01();

    e_points.clear();
    std::int64_t non_e = 0;
    for (std::int64_t i = 1; i <= n; ++i) {
      const int z = zs.bernoulli(sched.p_at(i)) ? 1 : 0;
      Point xi;
      xi.dim = dist.dim;
      for (int j = 0; j < dist.dim; ++j) xi.c[j] = xis.next_u01();
      if (z && sq_dist(x, xi) <= r2) {
        e_points.push_back(xi);
      } else {
        ++non_e;
      }
    }
    if (static_cast<std::int64_t>(e_points.size()) < out.h_n) continue;

    GnInstance inst;
    inst.est = est;
    inst.x = x;
    inst.r = r;
    for (const auto& p : e_points) inst.fixed.emplace_back(p, 1);
    inst.n_adversarial = static_cast<int>(
        std::min<std::int64_t>(opt.adversary_cap, non_e));
    inst.grid_resolution = opt.grid_resolution;
    const double g = gn_oracle(inst);
    sum += g;
    sum_sq += g * g;
    ++out.accepted;
  }

  out.mean = sum / out.accepted;
  const double var =
      std::max(0.0, sum_sq / out.accepted - out.mean * out.mean);
  out.se = std::sqrt(var / out.accepted);
  return out;
}

namespace {

double pair_weight(const EstimatorSpec& est, const Point& x, const Point& y) {
  switch (est.kind) {
    case EstimatorSpec::Kind::Histogram:
    case EstimatorSpec::Kind::NullifiedHistogram: {
      for (int j = 0; j < x.dim; ++j)
        if (histogram_cell(x.c[j], est.h) != histogram_cell(y.c[j], est.h)) return 0.0;
      return 1.0;
    }
    case EstimatorSpec::Kind::Kernel: {
      const double d2 = sq_dist(x, y);
      if (d2 > est.h * est.h) return 0.0;
      return 1.0 - std::sqrt(d2) / (2.0 * est.h);
    }
    default:
      throw UnsupportedError("pairwise weights exist for histogram and kernel rules");
  }
}

double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return 0.0;
  const double pos = q * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - lo;
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace

BoundedSupReport check_bounded_sup(const EstimatorSpec& family, const ScheduleSpec& sched,
                                   const std::vector<std::int64_t>& n_list, std::int64_t mc,
                                   const RngContract& rng) {
  if (family.kind != EstimatorSpec::Kind::Histogram &&
      family.kind != EstimatorSpec::Kind::Kernel)
    throw ConfigError("bounded-support diagnostics cover histogram and kernel rules");
  sched.validate();

  BoundedSupReport rep;
  RngStream xs = rng.stream("bsup_x");
  RngStream zs = rng.stream("bsup_z");
  RngStream xis = rng.stream("bsup_xi");

  for (std::int64_t n : n_list) {
    BoundedSupRow row;
    row.n = n;
    const double s_n = sched.s_at(n);
    row.h_n = sched.h_from_s(s_n);
    EstimatorSpec est = family;
    est.h = row.h_n;
    row.supp_diameter = family.kind == EstimatorSpec::Kind::Kernel
                            ? 2.0 * row.h_n
                            : row.h_n * std::sqrt(static_cast<double>(sched.dim));

    std::vector<double> mass(mc, 0.0);
    for (std::int64_t d = 0; d < mc; ++d) {
      Point x;
      x.dim = sched.dim;
      for (int j = 0; j < sched.dim; ++j) x.c[j] = xs.next_u01();
      double total = 0.0;
      for (std::int64_t i = 1; i <= n; ++i) {
        if (!zs.bernoulli(sched.p_at(i))) continue;
        Point xi;
        xi.dim = sched.dim;
        for (int j = 0; j < sched.dim; ++j) xi.c[j] = xis.next_u01();
        const double w = pair_weight(est, x, xi);
        row.max_raw_weight = std::max(row.max_raw_weight, w);
        total += w;
      }
      mass[d] = total;
    }
    std::sort(mass.begin(), mass.end());
    for (double v : mass) row.mean_mass += v;
    row.mean_mass /= static_cast<double>(mc);
    row.q10 = quantile_sorted(mass, 0.10);
    row.q25 = quantile_sorted(mass, 0.25);
    row.q50 = quantile_sorted(mass, 0.50);
    row.q75 = quantile_sorted(mass, 0.75);
    row.q90 = quantile_sorted(mass, 0.90);
    rep.rows.push_back(row);
  }

  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    if (rep.rows[i].max_raw_weight > 1.0 + 1e-12) rep.weight_bounded = false;
    if (i > 0) {
      if (!(rep.rows[i].supp_diameter < rep.rows[i - 1].supp_diameter))
        rep.diameter_shrinks = false;
      if (rep.rows[i].q10 < rep.rows[i - 1].q10 - 1e-9 ||
          !(rep.rows[i].mean_mass > rep.rows[i - 1].mean_mass))
        rep.random_mass_grows = false;
    }
  }
  return rep;
}

RaceResult race_mc(const RaceSpec& rs, const RngContract& rng) {
  if (rs.mc_draws < 10000) throw ConfigError("race estimates need at least 1e4 draws");
  if (rs.i0 < 1 || rs.k_prime < 1) throw ConfigError("bad race parameters");
  if (!(rs.eta > 0.0 && rs.eta < 1.0)) throw ConfigError("eta must lie in (0,1)");

  RngStream stream = rng.stream("race_mc");
  std::int64_t before = 0, ties = 0;
  for (std::int64_t d = 0; d < rs.mc_draws; ++d) {
    int run = 0;
    for (std::int64_t t = 1;; ++t) {
      const bool z = stream.bernoulli(p_rule_value(rs.p, rs.i0 + t));
      const bool y = stream.bernoulli(rs.eta);
      run = y ? run + 1 : 0;
      const bool t2 = run >= rs.k_prime;
      if (z || t2) {
        before += z && !t2;
        ties += z && t2;
        break;
      }
    }
  }

  RaceResult res;
  const double n = static_cast<double>(rs.mc_draws);
  res.p_t1_before = before / n;
  res.p_tie = ties / n;
  res.se_before = std::sqrt(std::max(res.p_t1_before * (1 - res.p_t1_before), 1e-12) / n);
  res.se_tie = std::sqrt(std::max(res.p_tie * (1 - res.p_tie), 1e-12) / n);
  if (rs.k_prime == 1) {
    const double p1 = p_rule_value(rs.p, rs.i0 + 1);
    res.bound_before = p1 / rs.eta;
    res.bound_tie = p1;
  } else {
    res.bound_before = kZeta32 / (2.0 * std::sqrt(static_cast<double>(rs.i0))) *
                       (1.0 / (1.0 - rs.eta)) *
                       (std::pow(rs.eta, -rs.k_prime) - 1.0);
    res.bound_tie = 1.0 / static_cast<double>(rs.i0);
  }
  return res;
}

RecursionTable race_recursion(double p11, double tie_term, int a, int b) {
  if (a < 1 || b < 1 || a > 8 || b > 8)
    throw ConfigError("recursion table is defined for 1 <= a, b <= 8");
  if (!(p11 >= 0.0 && p11 <= 1.0) || !(tie_term >= 0.0 && tie_term <= 1.0))
    throw ConfigError("probabilities must lie in [0,1]");

  RecursionTable tab;
  tab.a = a;
  tab.b = b;
  tab.recursion.assign(a + 1, std::vector<double>(b + 1, 0.0));
  tab.closed_form.assign(a + 1, std::vector<double>(b + 1, 0.0));

  for (int i = 1; i <= a; ++i) {
    for (int j = 1; j <= b; ++j) {
      double v;
      if (i == 1 && j == 1) {
        v = p11;
      } else if (i == 1) {
        v = p11 + (1.0 - p11) * tab.recursion[1][j - 1];
      } else if (j == 1) {
        v = p11 * tab.recursion[i - 1][1];
      } else {
        v = p11 * tab.recursion[i - 1][j] + tie_term * tab.recursion[i - 1][j - 1] +
            tab.recursion[i][j - 1];
      }
      tab.recursion[i][j] = v;
      tab.closed_form[i][j] = std::pow(3.0, i + j) * std::pow(p11, i);
      if (v > tab.closed_form[i][j]) tab.recursion_below_closed = false;
    }
  }
  return tab;
}

double uprime_mean(double p, double eta, int k_prime) {
  if (k_prime == 1) return 2.0 * p * (1.0 - eta) - (1.0 - p) * eta;
  return 2.0 * p -
         std::pow(1.0 - p, k_prime + 1) * std::pow(eta, k_prime) * (1.0 - eta);
}

UPrimeResult uprime_sim(const ScheduleSpec& sched, double eta, int k_prime,
                        std::int64_t horizon, std::int64_t seeds, const RngContract& rng,
                        std::int64_t pool_factor) {
  if (k_prime < 1) throw ConfigError("k' must be >= 1");
  if (horizon < 1 || horizon > 1000000) throw ConfigError("horizon must lie in [1, 1e6]");
  if (!(eta > 0.0 && eta < 0.5)) throw ConfigError("eta must lie in (0, 1/2)");

  // Smallest k whose majority threshold is k'.
  const int k = k_prime == 1 ? 1 : 2 * (k_prime - 1);

  SamplerConfig cfg;
  cfg.mode = SamplerMode::Pool;
  cfg.base = BaseAlgorithm::AdversarialOpenPoint;
  cfg.sched = sched;
  cfg.sched.k = KRule{KRule::Kind::Constant, k};
  cfg.dist = DistributionSpec::constant_eta(eta, 1);
  cfg.validate();

  UPrimeResult res;
  res.seeds = seeds;
  res.horizon = horizon;
  res.terminal_o.resize(seeds);

  std::int64_t cycle_count = 0;
  double cycle_total = 0;

  for (std::int64_t rep = 0; rep < seeds; ++rep) {
    const RngContract sub{rng.key("uprime_master"), static_cast<std::uint64_t>(rep)};
    RngStream z_stream = sub.stream("uprime_z");
    RngStream y_stream = sub.stream("uprime_y");
    SamplerStreams streams = SamplerStreams::make(sub);

    Pool pool = build_pool_on_reveal(pool_factor * horizon, cfg.dist, sub);
    SamplerState state(std::move(pool), cfg);

    std::vector<std::int8_t> zs(horizon + 1, 0), ys(horizon + 1, 0);
    std::vector<std::int32_t> o_hist(horizon + 1, 0);
    std::int64_t last_zero = 0;

    for (std::int64_t i = 1; i <= horizon; ++i) {
      const int z = z_stream.bernoulli(sched.p_at(i)) ? 1 : 0;
      const int y = y_stream.bernoulli(eta) ? 1 : 0;
      zs[i] = static_cast<std::int8_t>(z);
      ys[i] = static_cast<std::int8_t>(y);
      state.advance_pool_step(cfg, z, streams, y);
      const std::int64_t o = static_cast<std::int64_t>(state.open_index().size());
      o_hist[i] = static_cast<std::int32_t>(o);
      const std::int64_t u = o - o_hist[i - 1];

      int u_prime = 0;
      if (k_prime == 1) {
        if (z == 1 && y == 0) u_prime = 2;
        else if (z == 0 && y == 1) u_prime = -1;
      } else {
        if (z == 1) {
          u_prime = 2;
        } else if (i >= k_prime + 1) {
          bool run = true;
          for (int t = 0; t < k_prime && run; ++t) run = ys[i - t] == 1;
          bool calm = ys[i - k_prime] == 0;
          for (int t = 0; t <= k_prime && calm; ++t) calm = zs[i - t] == 0;
          if (run && calm) u_prime = -1;
        }
      }

      bool applicable;
      if (k_prime == 1) {
        applicable = o_hist[i - 1] != 0;
      } else {
        applicable = i >= k_prime + 3;
        for (std::int64_t l = i - k_prime - 2; applicable && l <= i - 1; ++l)
          applicable = o_hist[l] != 0;
      }
      if (applicable && u > u_prime) {
        ++res.violations;
        if (res.first_violation_trace.empty()) {
          std::ostringstream os;
          os << "seed=" << rep << " i=" << i << " U=" << u << " U'=" << u_prime
             << " z=" << z << " y=" << y << " O=" << o;
          res.first_violation_trace = os.str();
        }
      }

      if (o == 0) {
        ++res.zero_returns;
        const std::int64_t len = i - last_zero;
        cycle_total += static_cast<double>(len);
        ++cycle_count;
        res.max_cycle_len = std::max(res.max_cycle_len, len);
        last_zero = i;
      }
    }

    res.terminal_o[rep] = static_cast<double>(o_hist[horizon]);
    res.p_terminal_gt4 += o_hist[horizon] > 4;
    res.p_terminal_gt6 += o_hist[horizon] > 6;
  }

  res.mean_cycle_len = cycle_count ? cycle_total / cycle_count : 0.0;
  res.p_terminal_gt4 /= static_cast<double>(seeds);
  res.p_terminal_gt6 /= static_cast<double>(seeds);
  return res;
}

namespace {

// Binomial pmf vector for n trials at success probability p.
std::vector<double> binomial_pmf(int n, double p) {
  std::vector<double> pmf(n + 1, 0.0);
  pmf[0] = 1.0;
  for (int t = 0; t < n; ++t) {
    for (int i = t + 1; i >= 1; --i) pmf[i] = pmf[i] * (1 - p) + pmf[i - 1] * p;
    pmf[0] *= (1 - p);
  }
  return pmf;
}

}  // namespace

MajorityBoundResult majority_bound(int k, double eps, double eta) {
  if (k < 1 || k > 99) throw ConfigError("k must lie in [1, 99]");
  if (!(eta > 0.0 && eta < 1.0) || !(eps >= 0.0 && eps < 1.0))
    throw ConfigError("eta in (0,1), eps in [0,1) required");
  if (k > 1 && eta != 0.5 && eps > std::abs(1.0 - 2.0 * eta) / 4.0 + 1e-15)
    throw ConfigError("hypothesis requires eps <= |1-2 eta|/4 for k > 1");

  const double hi = std::min(1.0, eta + eps);
  const double lo = std::max(0.0, eta - eps);

  MajorityBoundResult res;
  res.worst_case = -1.0;
  // P(majority != reference) is affine in each eta_i, so the supremum is at a
  // corner; by exchangeability only the count at the upper corner matters.
  for (int j = 0; j <= k; ++j) {
    const std::vector<double> a = binomial_pmf(j, hi);
    const std::vector<double> b = binomial_pmf(k - j, lo);
    double p_major_one = 0.0;
    for (int u = 0; u <= j; ++u) {
      for (int v = 0; v <= k - j; ++v) {
        const int ones = u + v;
        if (2 * ones > k) {
          p_major_one += a[u] * b[v];
        } else if (2 * ones == k) {
          p_major_one += 0.5 * a[u] * b[v];  // fair-coin tie break
        }
      }
    }
    const double p_err = eta * (1.0 - p_major_one) + (1.0 - eta) * p_major_one;
    if (p_err > res.worst_case) {
      res.worst_case = p_err;
      res.worst_ones = j;
    }
  }

  res.bound = k == 1 ? 2.0 * std::min(eta, 1.0 - eta) + eps
                     : std::min(eta, 1.0 - eta) + 2.0 / std::sqrt(static_cast<double>(k));
  return res;
}

}  // namespace allab
