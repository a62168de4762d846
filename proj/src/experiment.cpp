#include "allab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "allab/line_geometry.hpp"

namespace allab {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for '" + key + "': " + v);
  }
}

std::int64_t parse_int(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const std::int64_t d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for '" + key + "': " + v);
  }
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("bad boolean value for '" + key + "': " + v);
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  dist.validate();
  sched.validate();
  sampler.validate();
  if (n_max < 1) throw ConfigError("n_max must be >= 1");
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (checkpoints.empty()) throw ConfigError("at least one checkpoint is required");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > n_max)
      throw ConfigError("checkpoints must lie in [1, n_max]");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw ConfigError("checkpoints must be strictly increasing");
  }
  if (dist.dim != 1)
    throw ConfigError("experiments report exact risk and are limited to d = 1");
  if (estimator.kind == EstimatorSpec::Kind::Kernel)
    throw ConfigError(
        "kernel estimators have no exact risk decomposition; use the check "
        "subcommands for kernel diagnostics");
  if (estimator.tie != TieRule::Threshold)
    throw ConfigError("exact risk requires the threshold tie rule");
  // resolve schedule-driven parameters once to surface bad combinations early
  for (std::int64_t c : checkpoints) (void)estimator_at(c);
}

EstimatorSpec ExperimentConfig::estimator_at(std::int64_t n) const {
  EstimatorSpec est = estimator;
  if (est.kind == EstimatorSpec::Kind::Knn) {
    if (k_from_schedule) est.k = sched.k_at(n);
  } else if (h_from_schedule) {
    est.h = sched.h_from_s(sched.s_at(n));
  }
  est.validate();
  return est;
}

std::string ExperimentConfig::estimator_label() const {
  switch (estimator.kind) {
    case EstimatorSpec::Kind::Knn: {
      std::string k_str;
      if (!k_from_schedule) {
        k_str = std::to_string(estimator.k);
      } else {
        k_str = sched.k.kind == KRule::Kind::LogLog ? "loglog"
                                                    : std::to_string(sched.k.value);
      }
      return "knn[k=" + k_str + "]";
    }
    case EstimatorSpec::Kind::Histogram:
    case EstimatorSpec::Kind::Kernel:
    case EstimatorSpec::Kind::NullifiedHistogram: {
      std::string h_str = h_from_schedule
                              ? (sched.h.kind == HRule::Kind::Default
                                     ? "default"
                                     : fmt_short(sched.h.value))
                              : fmt_short(estimator.h);
      std::string base = estimator.kind == EstimatorSpec::Kind::Histogram ? "histogram"
                         : estimator.kind == EstimatorSpec::Kind::Kernel
                             ? "kernel"
                             : "nullified_histogram";
      std::string label = base + "[h=" + h_str;
      // ';' rather than ',' keeps the CSV at exactly 13 columns
      if (estimator.kind == EstimatorSpec::Kind::NullifiedHistogram)
        label += ";r_null=" + fmt_short(estimator.r_null);
      return label + "]";
    }
  }
  return "unknown";
}

std::string ExperimentConfig::sampler_label() const {
  std::string base;
  switch (sampler.base) {
    case BaseAlgorithm::AdversarialOpenPoint: base = "adversarial"; break;
    case BaseAlgorithm::PassiveUniform: base = "passive"; break;
    case BaseAlgorithm::GreedyUncertainty: base = "greedy"; break;
  }
  std::string mode = sampler.mode == SamplerMode::Pool ? "pool" : "synthesis";
  if (sampler.splitting) mode += "+split";
  return base + "[" + mode + "]";
}

namespace {

void set_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "name") {
    cfg.name = value;
  } else if (key == "dim") {
    const int d = static_cast<int>(parse_int(value, key));
    cfg.dist.dim = d;
    cfg.sched.dim = d;
  } else if (key == "dist") {
    if (value == "constant_eta") cfg.dist.kind = RegressionKind::ConstantEta;
    else if (value == "threshold_step") cfg.dist.kind = RegressionKind::ThresholdStep;
    else if (value == "piecewise") cfg.dist.kind = RegressionKind::PiecewiseContinuous;
    else throw ConfigError("unknown dist: " + value);
  } else if (key == "eta") {
    cfg.dist.eta = parse_double(value, key);
  } else if (key == "threshold") {
    cfg.dist.threshold = parse_double(value, key);
  } else if (key == "segments") {
    cfg.dist.segments.clear();
    for (const std::string& part : split(value, ';')) {
      const auto f = split(trim(part), ':');
      if (f.size() != 4) throw ConfigError("segment format is lo:hi:a:b");
      cfg.dist.segments.push_back(EtaSegment{parse_double(f[0], key), parse_double(f[1], key),
                                             parse_double(f[2], key), parse_double(f[3], key)});
    }
  } else if (key == "estimator") {
    if (value == "knn") cfg.estimator.kind = EstimatorSpec::Kind::Knn;
    else if (value == "histogram") cfg.estimator.kind = EstimatorSpec::Kind::Histogram;
    else if (value == "kernel") cfg.estimator.kind = EstimatorSpec::Kind::Kernel;
    else if (value == "nullified_histogram")
      cfg.estimator.kind = EstimatorSpec::Kind::NullifiedHistogram;
    else throw ConfigError("unknown estimator: " + value);
  } else if (key == "k") {
    if (value == "schedule") {
      cfg.k_from_schedule = true;
    } else {
      cfg.k_from_schedule = false;
      cfg.estimator.k = static_cast<int>(parse_int(value, key));
    }
  } else if (key == "h") {
    if (value == "schedule") {
      cfg.h_from_schedule = true;
    } else {
      cfg.h_from_schedule = false;
      cfg.estimator.h = parse_double(value, key);
    }
  } else if (key == "r_null") {
    cfg.estimator.r_null = parse_double(value, key);
  } else if (key == "tie_rule") {
    if (value == "threshold") cfg.estimator.tie = TieRule::Threshold;
    else if (value == "faircoin") cfg.estimator.tie = TieRule::FairCoin;
    else throw ConfigError("unknown tie_rule: " + value);
  } else if (key == "null_pairing") {
    if (value == "mutual") cfg.estimator.pairing = NullPairing::Mutual;
    else if (value == "later") cfg.estimator.pairing = NullPairing::LaterOnly;
    else throw ConfigError("unknown null_pairing: " + value);
  } else if (key == "sampler") {
    if (value == "adversarial") cfg.sampler.base = BaseAlgorithm::AdversarialOpenPoint;
    else if (value == "passive") cfg.sampler.base = BaseAlgorithm::PassiveUniform;
    else if (value == "greedy") cfg.sampler.base = BaseAlgorithm::GreedyUncertainty;
    else throw ConfigError("unknown sampler: " + value);
  } else if (key == "mode") {
    if (value == "pool") cfg.sampler.mode = SamplerMode::Pool;
    else if (value == "synthesis") cfg.sampler.mode = SamplerMode::QuerySynthesis;
    else throw ConfigError("unknown mode: " + value);
  } else if (key == "splitting") {
    cfg.sampler.splitting = parse_bool(value, key);
  } else if (key == "p_rule") {
    const auto f = split(value, ':');
    if (f[0] == "harmonic" && f.size() == 1) {
      cfg.sched.p = PRule{PRule::Kind::Harmonic, 1.0};
    } else if (f[0] == "constant" && f.size() == 2) {
      cfg.sched.p = PRule{PRule::Kind::Constant, parse_double(f[1], key)};
    } else if (f[0] == "power" && f.size() == 2) {
      cfg.sched.p = PRule{PRule::Kind::Power, parse_double(f[1], key)};
    } else {
      throw ConfigError("p_rule is harmonic | constant:<p> | power:<alpha>");
    }
  } else if (key == "k_rule") {
    const auto f = split(value, ':');
    if (f[0] == "loglog" && f.size() == 1) {
      cfg.sched.k = KRule{KRule::Kind::LogLog, 1};
    } else if (f[0] == "constant" && f.size() == 2) {
      cfg.sched.k = KRule{KRule::Kind::Constant, static_cast<int>(parse_int(f[1], key))};
    } else {
      throw ConfigError("k_rule is loglog | constant:<k>");
    }
  } else if (key == "h_rule") {
    const auto f = split(value, ':');
    if (f[0] == "default" && f.size() == 1) {
      cfg.sched.h = HRule{HRule::Kind::Default, 0.25};
    } else if (f[0] == "constant" && f.size() == 2) {
      cfg.sched.h = HRule{HRule::Kind::Constant, parse_double(f[1], key)};
    } else {
      throw ConfigError("h_rule is default | constant:<h>");
    }
  } else if (key == "m_rule") {
    const auto f = split(value, ':');
    if (f[0] == "square" && f.size() == 1) {
      cfg.sched.m = MRule{MRule::Kind::Square, 2.0, 0};
    } else if (f[0] == "factor" && f.size() == 2) {
      cfg.sched.m = MRule{MRule::Kind::Factor, parse_double(f[1], key), 0};
    } else if (f[0] == "constant" && f.size() == 2) {
      cfg.sched.m = MRule{MRule::Kind::Constant, 1.0, parse_int(f[1], key)};
    } else {
      throw ConfigError("m_rule is square | factor:<c> | constant:<m>");
    }
  } else if (key == "H_rule") {
    const auto f = split(value, ':');
    if (f[0] == "default" && f.size() == 1) {
      cfg.sched.H = HnRule{HnRule::Kind::Default, 1};
    } else if (f[0] == "kn" && f.size() == 1) {
      cfg.sched.H = HnRule{HnRule::Kind::Kn, 1};
    } else if (f[0] == "constant" && f.size() == 2) {
      cfg.sched.H = HnRule{HnRule::Kind::Constant, parse_int(f[1], key)};
    } else {
      throw ConfigError("H_rule is default | kn | constant:<v>");
    }
  } else if (key == "n_max") {
    cfg.n_max = parse_int(value, key);
  } else if (key == "checkpoints") {
    cfg.checkpoints.clear();
    for (const std::string& part : split(value, ','))
      cfg.checkpoints.push_back(parse_int(trim(part), key));
  } else if (key == "replicates") {
    cfg.replicates = parse_int(value, key);
  } else if (key == "seed") {
    cfg.master_seed = static_cast<std::uint64_t>(parse_int(value, key));
  } else if (key == "out") {
    cfg.out_dir = value;
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

}  // namespace

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  set_key(cfg, trim(key), trim(value));
  cfg.sampler.sched = cfg.sched;
  cfg.sampler.dist = cfg.dist;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.sampler.sched = cfg.sched;
  cfg.sampler.dist = cfg.dist;
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::vector<RiskRecord> run_experiment(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  const double bayes = bayes_risk(cfg.dist);
  const std::string est_label = cfg.estimator_label();
  const std::string samp_label = cfg.sampler_label();

  std::vector<std::vector<RiskRecord>> per_rep(cfg.replicates);

  auto run_replicate = [&](std::int64_t rep) {
    const auto t0 = std::chrono::steady_clock::now();
    RngContract contract{cfg.master_seed, static_cast<std::uint64_t>(rep)};
    std::vector<RiskRecord>& out = per_rep[rep];
    try {
      run_sampler(
          cfg.sampler, cfg.n_max, cfg.checkpoints, contract,
          [&](const SamplerState& state, const CheckpointRecord& rec) {
            const EstimatorSpec est = cfg.estimator_at(rec.n);
            RiskRecord row;
            row.run_id = cfg.name;
            row.replicate = rep;
            row.n = rec.n;
            row.estimator = est_label;
            row.sampler = samp_label;
            row.p_one = predicted_one_measure(est, rec.s_snapshot);
            row.exact_risk = exact_risk(est, rec.s_snapshot, cfg.dist);
            row.s_n = rec.s_n;
            row.bayes_risk = bayes;
            row.seed = cfg.master_seed;
            if (cfg.sampler.mode == SamplerMode::Pool) {
              const std::vector<std::int64_t> queried(state.queried_indices().begin(),
                                                      state.queried_indices().end());
              const StructureMetrics sm = structure_metrics(
                  state.pool(), queried, rec.s_snapshot, rec.k_n, rec.h_n);
              row.o_n = rec.o_n;
              row.interior_cov = sm.interior_coverage_total;
              row.d_n = sm.d_n;
            } else {
              row.o_n = 0;
              row.interior_cov = std::nan("");
              row.d_n = std::nan("");
            }
            row.wall_time_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
            out.push_back(std::move(row));
          });
    } catch (const std::exception& e) {
      RiskRecord row;
      row.run_id = cfg.name;
      row.replicate = rep;
      row.n = 0;
      row.estimator = est_label;
      row.sampler = samp_label;
      row.exact_risk = row.p_one = row.interior_cov = row.d_n = row.s_n = std::nan("");
      row.bayes_risk = bayes;
      row.seed = cfg.master_seed;
      row.failed = true;
      row.error = e.what();
      out.push_back(std::move(row));
    }
  };

  const int workers =
      std::max(1, std::min<int>(threads, static_cast<int>(cfg.replicates)));
  if (workers == 1) {
    for (std::int64_t rep = 0; rep < cfg.replicates; ++rep) run_replicate(rep);
  } else {
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const std::int64_t rep = next.fetch_add(1);
          if (rep >= cfg.replicates) return;
          run_replicate(rep);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  std::vector<RiskRecord> records;
  for (auto& v : per_rep)
    for (auto& r : v) records.push_back(std::move(r));
  std::sort(records.begin(), records.end(), [](const RiskRecord& a, const RiskRecord& b) {
    if (a.replicate != b.replicate) return a.replicate < b.replicate;
    return a.n < b.n;
  });
  return records;
}

void write_csv(const std::vector<RiskRecord>& records, std::ostream& out) {
  out << kCsvHeader << "\n";
  for (const auto& r : records) {
    out << r.run_id << ',' << r.replicate << ',' << r.n << ',' << r.estimator << ','
        << r.sampler << ',' << fmt17(r.exact_risk) << ',' << fmt17(r.p_one) << ','
        << r.o_n << ',' << fmt17(r.interior_cov) << ',' << fmt17(r.d_n) << ','
        << fmt17(r.s_n) << ',' << fmt17(r.bayes_risk) << ',' << r.seed << "\n";
  }
}

std::vector<RiskRecord> read_csv(std::istream& in) {
  std::vector<RiskRecord> records;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV");
  if (trim(line) != kCsvHeader) throw IoError("unexpected CSV header");
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 13) throw IoError("bad CSV row: " + line);
    RiskRecord r;
    r.run_id = f[0];
    r.replicate = parse_int(f[1], "replicate");
    r.n = parse_int(f[2], "n");
    r.estimator = f[3];
    r.sampler = f[4];
    r.exact_risk = parse_double(f[5], "exact_risk");
    r.p_one = parse_double(f[6], "p_one");
    r.o_n = parse_int(f[7], "o_n");
    r.interior_cov = parse_double(f[8], "interior_cov");
    r.d_n = parse_double(f[9], "d_n");
    r.s_n = parse_double(f[10], "s_n");
    r.bayes_risk = parse_double(f[11], "bayes_risk");
    r.seed = static_cast<std::uint64_t>(parse_int(f[12], "seed"));
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

struct PanelSeries {
  std::vector<std::int64_t> ns;
  std::vector<double> mean, lo, hi;
  double bayes = 0;
};

}  // namespace

void write_svg_summary(const std::vector<RiskRecord>& records, std::ostream& out) {
  if (records.empty()) throw ConfigError("no records to plot");

  std::map<std::pair<std::string, std::string>, PanelSeries> panels;
  for (const auto& r : records) {
    if (r.failed || std::isnan(r.exact_risk)) continue;
    auto& p = panels[{r.estimator, r.sampler}];
    p.bayes = r.bayes_risk;
    auto it = std::find(p.ns.begin(), p.ns.end(), r.n);
    std::size_t idx;
    if (it == p.ns.end()) {
      p.ns.push_back(r.n);
      p.mean.push_back(0);
      p.lo.push_back(1e300);
      p.hi.push_back(-1e300);
      idx = p.ns.size() - 1;
    } else {
      idx = static_cast<std::size_t>(it - p.ns.begin());
    }
    p.lo[idx] = std::min(p.lo[idx], r.exact_risk);
    p.hi[idx] = std::max(p.hi[idx], r.exact_risk);
  }
  // means in a second pass, per (panel, n)
  for (auto& [key, p] : panels) {
    for (std::size_t i = 0; i < p.ns.size(); ++i) {
      double sum = 0;
      std::int64_t cnt = 0;
      for (const auto& r : records) {
        if (r.failed || std::isnan(r.exact_risk)) continue;
        if (r.estimator == key.first && r.sampler == key.second && r.n == p.ns[i]) {
          sum += r.exact_risk;
          ++cnt;
        }
      }
      p.mean[i] = cnt ? sum / cnt : 0.0;
    }
    // order by n
    std::vector<std::size_t> ord(p.ns.size());
    for (std::size_t i = 0; i < ord.size(); ++i) ord[i] = i;
    std::sort(ord.begin(), ord.end(),
              [&](std::size_t a, std::size_t b) { return p.ns[a] < p.ns[b]; });
    PanelSeries q;
    q.bayes = p.bayes;
    for (std::size_t i : ord) {
      q.ns.push_back(p.ns[i]);
      q.mean.push_back(p.mean[i]);
      q.lo.push_back(p.lo[i]);
      q.hi.push_back(p.hi[i]);
    }
    p = q;
  }

  const int W = 640, PH = 300, ML = 60, MR = 20, MT = 40, MB = 40;
  const int H = PH * static_cast<int>(panels.size());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";

  int panel_idx = 0;
  for (const auto& [key, p] : panels) {
    const int top = PH * panel_idx++;
    const int x0 = ML, x1 = W - MR, y0 = top + MT, y1 = top + PH - MB;
    auto xpos = [&](std::size_t i) {
      if (p.ns.size() == 1) return (x0 + x1) / 2.0;
      return x0 + (x1 - x0) * static_cast<double>(i) / (p.ns.size() - 1);
    };
    auto ypos = [&](double risk) { return y1 - (y1 - y0) * std::clamp(risk, 0.0, 1.0); };

    out << "<text x=\"" << x0 << "\" y=\"" << top + 20 << "\" font-weight=\"bold\">"
        << key.first << " / " << key.second << "</text>\n";
    out << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << x1 - x0
        << "\" height=\"" << y1 - y0 << "\" fill=\"none\" stroke=\"#999\"/>\n";
    for (int g = 0; g <= 5; ++g) {
      const double r = g / 5.0;
      out << "<line x1=\"" << x0 << "\" y1=\"" << fmt_short(ypos(r)) << "\" x2=\"" << x1
          << "\" y2=\"" << fmt_short(ypos(r))
          << "\" stroke=\"#eee\"/><text x=\"" << x0 - 30 << "\" y=\""
          << fmt_short(ypos(r) + 4) << "\">" << fmt_short(r) << "</text>\n";
    }
    for (std::size_t i = 0; i < p.ns.size(); ++i) {
      out << "<text x=\"" << fmt_short(xpos(i) - 10) << "\" y=\"" << y1 + 16 << "\">"
          << p.ns[i] << "</text>\n";
    }

    // min/max band
    out << "<path d=\"M";
    for (std::size_t i = 0; i < p.ns.size(); ++i)
      out << fmt_short(xpos(i)) << ' ' << fmt_short(ypos(p.hi[i])) << ' '
          << (i + 1 < p.ns.size() ? "L" : "");
    for (std::size_t i = p.ns.size(); i-- > 0;)
      out << "L" << fmt_short(xpos(i)) << ' ' << fmt_short(ypos(p.lo[i])) << ' ';
    out << "Z\" fill=\"#cfe3ff\" stroke=\"none\" opacity=\"0.8\"/>\n";

    // mean line
    out << "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < p.ns.size(); ++i)
      out << fmt_short(xpos(i)) << ',' << fmt_short(ypos(p.mean[i])) << ' ';
    out << "\"/>\n";

    // reference lines: Bayes risk and its inconsistency mirror
    out << "<line x1=\"" << x0 << "\" y1=\"" << fmt_short(ypos(p.bayes)) << "\" x2=\""
        << x1 << "\" y2=\"" << fmt_short(ypos(p.bayes))
        << "\" stroke=\"#2a9d2a\" stroke-dasharray=\"6 3\"/>"
        << "<text x=\"" << x1 - 120 << "\" y=\"" << fmt_short(ypos(p.bayes) - 4)
        << "\" fill=\"#2a9d2a\">bayes = " << fmt_short(p.bayes) << "</text>\n";
    if (p.bayes > 0.0 && p.bayes < 0.5) {
      const double mirror = 1.0 - p.bayes;
      out << "<line x1=\"" << x0 << "\" y1=\"" << fmt_short(ypos(mirror)) << "\" x2=\""
          << x1 << "\" y2=\"" << fmt_short(ypos(mirror))
          << "\" stroke=\"#bf1f1f\" stroke-dasharray=\"6 3\"/>"
          << "<text x=\"" << x1 - 120 << "\" y=\"" << fmt_short(ypos(mirror) - 4)
          << "\" fill=\"#bf1f1f\">1 - bayes = " << fmt_short(mirror) << "</text>\n";
    }
  }
  out << "</svg>\n";
}

std::vector<RiskRecord> simulate_to_files(const ExperimentConfig& cfg, int threads) {
  std::vector<RiskRecord> records = run_experiment(cfg, threads);
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + cfg.out_dir);

  const std::string csv_path = cfg.out_dir + "/" + cfg.name + ".csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw IoError("cannot write " + csv_path);
  write_csv(records, csv);

  const std::string svg_path = cfg.out_dir + "/" + cfg.name + ".svg";
  std::ofstream svg(svg_path, std::ios::binary);
  if (!svg) throw IoError("cannot write " + svg_path);
  write_svg_summary(records, svg);
  return records;
}

}  // namespace allab
