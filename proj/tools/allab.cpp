// allab - simulation laboratory for weighted-averaging classifiers under
// augmented active sampling: adversarial counterexamples, exact 1D risk,
// and numerical certification of the sufficiency conditions.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "allab/checkers.hpp"
#include "allab/experiment.hpp"

using namespace allab;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  std::string out;
};

int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(8u, std::max(1u, hw)));
}

void apply_globals(ExperimentConfig& cfg, const GlobalOpts& g) {
  // precedence: --seed flag, then AL_LAB_SEED, then the config value
  if (g.seed_set) {
    cfg.master_seed = g.seed;
  } else if (const char* env = std::getenv("AL_LAB_SEED")) {
    cfg.master_seed = std::strtoull(env, nullptr, 10);
  }
  if (!g.out.empty()) cfg.out_dir = g.out;
}

PRule parse_p_rule(const std::string& text) {
  ExperimentConfig tmp;
  apply_override(tmp, "p_rule", text);
  return tmp.sched.p;
}

EstimatorSpec parse_estimator(const std::string& name, int k, double h, double r_null) {
  if (name == "knn") return EstimatorSpec::knn(k);
  if (name == "histogram") return EstimatorSpec::histogram(h);
  if (name == "kernel") return EstimatorSpec::kernel(h);
  if (name == "nullified_histogram") return EstimatorSpec::nullified_histogram(h, r_null);
  throw ConfigError("unknown estimator: " + name);
}

int run_simulate(const std::string& path, const GlobalOpts& g) {
  ExperimentConfig cfg = parse_config_file(path);
  apply_globals(cfg, g);
  const int threads = g.threads > 0 ? g.threads : default_threads();
  const auto records = simulate_to_files(cfg, threads);
  std::int64_t failed = 0;
  for (const auto& r : records) {
    if (r.failed) {
      ++failed;
      std::cerr << "replicate " << r.replicate << " failed: " << r.error << "\n";
    }
  }
  std::cout << cfg.out_dir << "/" << cfg.name << ".csv (" << records.size()
            << " rows)\n";
  return failed ? 2 : 0;
}

int run_sweep(const std::string& path, const std::vector<std::string>& vary,
              const GlobalOpts& g) {
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  for (const auto& spec : vary) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw ConfigError("--vary expects key=v1,v2,...");
    std::vector<std::string> values;
    std::string cur;
    for (char c : spec.substr(eq + 1)) {
      if (c == ',') {
        values.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    values.push_back(cur);
    axes.emplace_back(spec.substr(0, eq), values);
  }

  std::vector<RiskRecord> all;
  std::vector<std::size_t> idx(axes.size(), 0);
  const int threads = g.threads > 0 ? g.threads : default_threads();
  std::string sweep_dir;
  bool done = false;
  while (!done) {
    ExperimentConfig cfg = parse_config_file(path);
    apply_globals(cfg, g);
    std::string suffix;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      apply_override(cfg, axes[a].first, axes[a].second[idx[a]]);
      suffix += "_" + axes[a].first + "=" + axes[a].second[idx[a]];
    }
    cfg.name += suffix;
    cfg.validate();
    sweep_dir = cfg.out_dir;
    const auto records = simulate_to_files(cfg, threads);
    all.insert(all.end(), records.begin(), records.end());
    std::cout << cfg.name << ": " << records.size() << " rows\n";

    done = true;
    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++idx[a] < axes[a].second.size()) {
        done = false;
        break;
      }
      idx[a] = 0;
    }
  }

  std::ofstream combined(sweep_dir + "/sweep.csv", std::ios::binary);
  if (!combined) throw IoError("cannot write sweep.csv");
  write_csv(all, combined);
  std::cout << sweep_dir << "/sweep.csv (" << all.size() << " rows)\n";
  return 0;
}

int run_report(const std::string& csv_path, const GlobalOpts& g) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open " + csv_path);
  const auto records = read_csv(in);
  std::filesystem::path out_path(csv_path);
  out_path.replace_extension(".svg");
  if (!g.out.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(g.out, ec);
    if (ec) throw IoError("cannot create output directory: " + g.out);
    out_path = std::filesystem::path(g.out) / out_path.filename();
  }
  std::ofstream svg(out_path, std::ios::binary);
  if (!svg) throw IoError("cannot write " + out_path.string());
  write_svg_summary(records, svg);
  std::cout << out_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"active-learning consistency laboratory"};
  app.require_subcommand(1);
  app.fallthrough();  // accept the global flags after the subcommand too

  GlobalOpts g;
  app.add_option("--seed", g.seed, "master seed (overrides config and AL_LAB_SEED)")
      ->each([&](const std::string&) { g.seed_set = true; });
  app.add_option("--threads", g.threads, "worker threads for replicates");
  app.add_option("--out", g.out, "output directory override");

  std::string config_path, csv_path;
  std::vector<std::string> vary;

  auto* simulate = app.add_subcommand("simulate", "run one experiment config");
  simulate->add_option("config", config_path, "config file")->required();

  auto* sweep = app.add_subcommand("sweep", "cross product of config overrides");
  sweep->add_option("config", config_path, "config file")->required();
  sweep->add_option("--vary", vary, "key=v1,v2,... (repeatable)")->required();

  auto* report = app.add_subcommand("report", "render an SVG summary from a CSV");
  report->add_option("csv", csv_path, "records CSV")->required();
  bool want_svg = false;
  report->add_flag("--svg", want_svg, "emit the SVG summary");

  // ---- check: condition diagnostics ----
  auto* check = app.add_subcommand("check", "condition checkers");
  bool do_gn = false, do_cond1 = false, do_bsup = false, check_assert = false;
  check->add_flag("--gn", do_gn, "adversarial in-ball weight infimum");
  check->add_flag("--cond1", do_cond1, "conditional expectation estimate");
  check->add_flag("--bounded-sup", do_bsup, "structural weight diagnostics");
  check->add_flag("--assert", check_assert, "exit 3 when a certified property fails");
  std::string est_name = "histogram";
  int est_k = 1;
  double est_h = 0.25, est_rnull = 0.01;
  double ball_r = 0.2, gn_x = 0.1;
  std::vector<double> e_points{0.05};
  int adv = 2, grid = 64;
  std::int64_t cond_n = 400, mc = 200;
  std::vector<std::int64_t> n_list{100, 400, 1600};
  std::string p_rule_text = "harmonic";
  check->add_option("--estimator", est_name, "knn|histogram|kernel|nullified_histogram");
  check->add_option("--k", est_k, "k for knn");
  check->add_option("--bw", est_h, "cell side / bandwidth");
  check->add_option("--r-null", est_rnull, "nullification radius");
  check->add_option("--x", gn_x, "query point");
  check->add_option("--r", ball_r, "ball radius");
  check->add_option("--e-points", e_points, "conditioned in-ball points")->delimiter(',');
  check->add_option("--adv", adv, "adversary point count / cap");
  check->add_option("--grid", grid, "lattice resolution");
  check->add_option("--n", cond_n, "sample-count horizon");
  check->add_option("--mc", mc, "monte carlo draws");
  check->add_option("--n-list", n_list, "horizons for bounded-sup")->delimiter(',');
  check->add_option("--p-rule", p_rule_text, "harmonic|constant:<p>|power:<a>");

  // ---- race: hitting-time machinery ----
  auto* race = app.add_subcommand("race", "hitting-time bounds and couplings");
  bool do_mc = false, do_rec = false, do_uprime = false, do_majority = false,
       race_assert = false;
  race->add_flag("--mc", do_mc, "race monte carlo vs closed-form bounds");
  race->add_flag("--recursion", do_rec, "recursive bound table");
  race->add_flag("--uprime", do_uprime, "open-point domination coupling");
  race->add_flag("--majority", do_majority, "majority-vote bound enumeration");
  race->add_flag("--assert", race_assert, "exit 3 when a bound check fails");
  std::int64_t i0 = 100, draws = 100000, horizon = 10000, seeds = 20;
  int k_prime = 1, rec_a = 2, rec_b = 4, maj_k = 9;
  double eta = 0.2, p11 = 0.01, tie_term = 0.002, maj_eps = 0.05;
  race->add_option("--i0", i0, "race start index");
  race->add_option("--eta", eta, "label-one probability");
  race->add_option("--kprime", k_prime, "run length k'");
  race->add_option("--draws", draws, "monte carlo draws");
  race->add_option("--p11", p11, "single-race probability");
  race->add_option("--tie", tie_term, "coupling (tie) term");
  race->add_option("--a", rec_a, "random-draw count a");
  race->add_option("--b", rec_b, "run count b");
  race->add_option("--horizon", horizon, "coupling horizon");
  race->add_option("--seeds", seeds, "coupling seeds");
  race->add_option("--maj-k", maj_k, "majority vote size");
  race->add_option("--eps", maj_eps, "per-coin probability slack");
  race->add_option("--p-rule", p_rule_text, "harmonic|constant:<p>|power:<a>");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(config_path, g);
    if (sweep->parsed()) return run_sweep(config_path, vary, g);
    if (report->parsed()) return run_report(csv_path, g);

    const std::uint64_t seed = g.seed_set ? g.seed : 20260808ULL;
    bool ok = true;

    if (check->parsed()) {
      if (!do_gn && !do_cond1 && !do_bsup)
        throw ConfigError("check needs one of --gn, --cond1, --bounded-sup");
      const EstimatorSpec est = parse_estimator(est_name, est_k, est_h, est_rnull);
      if (do_gn) {
        GnInstance inst;
        inst.est = est;
        inst.x = Point::scalar(gn_x);
        inst.r = ball_r;
        for (double e : e_points) inst.fixed.emplace_back(Point::scalar(e), 1);
        inst.n_adversarial = adv;
        inst.grid_resolution = grid;
        const double gval = gn_oracle(inst);
        std::cout << "g_n infimum = " << gval << "\n";
        if (check_assert) {
          GnInstance more = inst;
          more.n_adversarial = std::min(4, adv + 1);
          ok = ok && gn_oracle(more) <= gval + 1e-12;
        }
      }
      if (do_cond1) {
        ScheduleSpec sched;
        sched.p = parse_p_rule(p_rule_text);
        Condition1Options opt;
        opt.adversary_cap = adv;
        opt.grid_resolution = grid;
        const auto est1 = estimate_condition1(est, DistributionSpec::constant_eta(0.2),
                                              sched, cond_n, ball_r, mc,
                                              RngContract{seed, 0}, opt);
        std::cout << "E[g_n | >= H_n] = " << est1.mean << " +- " << est1.se
                  << "  (H_n = " << est1.h_n << ", accepted " << est1.accepted << "/"
                  << est1.attempts << ")\n";
      }
      if (do_bsup) {
        ScheduleSpec sched;
        sched.p = parse_p_rule(p_rule_text);
        const auto rep = check_bounded_sup(est, sched, n_list, mc, RngContract{seed, 0});
        std::cout << "n,h_n,supp_diam,max_w,mean_mass,q10,q50,q90\n";
        for (const auto& row : rep.rows)
          std::cout << row.n << ',' << row.h_n << ',' << row.supp_diameter << ','
                    << row.max_raw_weight << ',' << row.mean_mass << ',' << row.q10
                    << ',' << row.q50 << ',' << row.q90 << "\n";
        std::cout << "weight_bounded=" << rep.weight_bounded
                  << " diameter_shrinks=" << rep.diameter_shrinks
                  << " random_mass_grows=" << rep.random_mass_grows << "\n";
        ok = ok && rep.all_ok();
      }
      if (check_assert && !ok) return 3;
      return 0;
    }

    if (race->parsed()) {
      if (!do_mc && !do_rec && !do_uprime && !do_majority)
        throw ConfigError("race needs one of --mc, --recursion, --uprime, --majority");
      if (do_mc) {
        RaceSpec rs;
        rs.p = parse_p_rule(p_rule_text);
        rs.eta = eta;
        rs.i0 = i0;
        rs.k_prime = k_prime;
        rs.mc_draws = draws;
        const auto res = race_mc(rs, RngContract{seed, 0});
        std::cout << "P(T1<T2) = " << res.p_t1_before << " +- " << res.se_before
                  << " (bound " << res.bound_before << ")\n"
                  << "P(T1=T2) = " << res.p_tie << " +- " << res.se_tie << " (bound "
                  << res.bound_tie << ")\n";
        ok = ok && res.p_t1_before <= res.bound_before + 3 * res.se_before &&
             res.p_tie <= res.bound_tie + 3 * res.se_tie;
      }
      if (do_rec) {
        const auto tab = race_recursion(p11, tie_term, rec_a, rec_b);
        std::cout << "recursion p^(a,b) = " << tab.recursion[rec_a][rec_b]
                  << ", closed form = " << tab.closed_form[rec_a][rec_b] << "\n";
        ok = ok && tab.recursion_below_closed;
      }
      if (do_uprime) {
        ScheduleSpec sched;
        sched.p = parse_p_rule(p_rule_text);
        const auto res =
            uprime_sim(sched, eta, k_prime, horizon, seeds, RngContract{seed, 0});
        std::cout << "violations = " << res.violations
                  << ", zero returns = " << res.zero_returns
                  << ", mean cycle = " << res.mean_cycle_len
                  << ", P(O_n>4) = " << res.p_terminal_gt4
                  << ", P(O_n>6) = " << res.p_terminal_gt6 << "\n";
        if (res.violations)
          std::cout << "first violation: " << res.first_violation_trace << "\n";
        ok = ok && res.violations == 0;
      }
      if (do_majority) {
        const auto res = majority_bound(maj_k, maj_eps, eta);
        std::cout << "worst P(M_k != Z) = " << res.worst_case << " (bound " << res.bound
                  << ", worst corner has " << res.worst_ones << " high coins)\n";
        ok = ok && res.worst_case <= res.bound;
      }
      if (race_assert && !ok) return 3;
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
