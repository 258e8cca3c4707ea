#include "tamp/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "tamp/basis.hpp"
#include "tamp/error.hpp"
#include "tamp/graphpoly.hpp"
#include "tamp/stats.hpp"
#include "tamp/structure.hpp"

namespace tamp {

namespace {

constexpr std::uint64_t kAmpSeedSalt = 0xa076'1d64'78bd'642fULL;
constexpr double kVanish = 1e-12;

std::string scale_name(BlockScale s) { return s == BlockScale::per_block ? "per_block" : "literal"; }

BlockScale parse_scale(const std::string& s) {
  if (s == "per_block") return BlockScale::per_block;
  if (s == "literal") return BlockScale::literal;
  throw InvalidInput("unknown block_scale: " + s);
}

Diagram unrooted(Diagram d) {
  d.roots.clear();
  return d;
}

double slope_or_vanish(const std::vector<double>& ns, const std::vector<double>& ys) {
  bool all_zero = true;
  for (double y : ys) all_zero = all_zero && std::abs(y) <= kVanish;
  if (all_zero) return -std::numeric_limits<double>::infinity();
  return loglog_slope(ns, ys);
}

int trial_count(const ExperimentConfig& c) { return is_deterministic(c.ensemble) ? 1 : c.trials; }

std::ofstream open_csv(const std::string& path, const std::string& hash, const std::string& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "# config-hash=" << hash << "\n" << header << "\n";
  return out;
}

std::string opt(double x) { return std::isnan(x) ? "" : format_double(x); }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw InvalidInput("bad number: " + s);
    return v;
  } catch (const std::logic_error&) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw InvalidInput("bad number: " + s);
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::vector<int> ExperimentConfig::sweep() const {
  return dimension_sweep.empty() ? std::vector<int>{ensemble.n} : dimension_sweep;
}

std::vector<Diagram> ExperimentConfig::parsed_diagrams() const {
  std::vector<Diagram> out;
  for (const auto& s : diagrams) out.push_back(parse_diagram(s));
  return out;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw InvalidInput("config: trials must be >= 1");
  for (int n : sweep()) {
    EnsembleSpec s = ensemble;
    s.n = n;
    s.validate();
  }
  if (amp) amp->validate();
  if (!(threshold > 0)) throw InvalidInput("config: threshold must be positive");
}

void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"ensemble", c.ensemble},
           {"diagrams", c.diagrams},
           {"trials", c.trials},
           {"dimension_sweep", c.dimension_sweep},
           {"master_seed", c.master_seed},
           {"block_scale", scale_name(c.block_scale)},
           {"threshold", c.threshold},
           {"output_dir", c.output_dir},
           {"threads", c.threads}};
  if (c.amp) j["amp"] = *c.amp;
  if (c.target) j["target"] = *c.target;
}

void from_json(const json& j, ExperimentConfig& c) {
  c = ExperimentConfig{};
  c.ensemble = j.at("ensemble").get<EnsembleSpec>();
  c.diagrams = j.value("diagrams", std::vector<std::string>{});
  if (j.contains("amp")) c.amp = j.at("amp").get<AMPConfig>();
  c.trials = j.value("trials", 1);
  c.dimension_sweep = j.value("dimension_sweep", std::vector<int>{});
  c.output_dir = j.value("output_dir", std::string("."));
  c.master_seed = j.value("master_seed", std::uint64_t{0});
  if (j.contains("target")) c.target = j.at("target").get<CumulantTable>();
  c.block_scale = parse_scale(j.value("block_scale", std::string("per_block")));
  c.threshold = j.value("threshold", 4.0);
  c.threads = j.value("threads", 0);
}

std::string config_hash(const ExperimentConfig& c) {
  json j = c;
  j.erase("threads");
  j.erase("output_dir");
  return hash_hex(fnv1a(j.dump()));
}

bool is_deterministic(EnsembleKind k) {
  return k == EnsembleKind::hadamard || k == EnsembleKind::dst || k == EnsembleKind::dct;
}

bool is_deterministic(const EnsembleSpec& s) {
  return is_deterministic(s.kind) || (s.kind == EnsembleKind::punctured && is_deterministic(s.inner));
}

GeneratedMatrix trial_matrix(const ExperimentConfig& c, int n, int trial) {
  EnsembleSpec s = c.ensemble;
  s.n = n;
  s.seed = c.master_seed;
  s.stream = (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint32_t>(trial);
  return generate(s);
}

std::optional<CumulantTable> inferred_table(const EnsembleSpec& s) {
  switch (s.kind) {
    case EnsembleKind::goe:
    case EnsembleKind::wigner:
      return preset_table("goe");
    case EnsembleKind::rom:
    case EnsembleKind::r_rom:
      return preset_table("rom");
    case EnsembleKind::punctured:
      // punctured symmetric orthogonal matrices share the r-ROM limit
      return preset_table("rom");
    case EnsembleKind::orth_invariant:
      if (s.spectrum == "rademacher") return preset_table("rom");
      if (s.spectrum == "semicircle") return preset_table("goe");
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

std::optional<CumulantTable> analytic_table(const ExperimentConfig& c) {
  if (c.target) return as_cumulants(*c.target);
  return inferred_table(c.ensemble);
}

double z_target(const Diagram& d, const CumulantTable& t) {
  return cactus_traffic_value(unrooted(d), t).value;
}

double w_target(const Diagram& d, const CumulantTable& t) {
  double total = 0.0;
  for (const auto& [key, term] : w_to_z_coefficients(unrooted(d))) {
    total += static_cast<double>(term.coefficient) * cactus_traffic_value(term.diagram, t).value;
  }
  return total;
}

TrafficReport traffic_estimates(const ExperimentConfig& c) {
  c.validate();
  const auto diagrams = c.parsed_diagrams();
  const auto table = analytic_table(c);
  const int trials = trial_count(c);
  const size_t nd = diagrams.size();
  TrafficReport rep;
  std::map<std::pair<size_t, int>, std::vector<double>> means;  // (diagram, basis) -> per n
  for (int n : c.sweep()) {
    // values[trial][2*d + basis]
    std::vector<std::vector<double>> values(trials, std::vector<double>(2 * nd));
    parallel_for(trials, c.threads, [&](int trial) {
      GeneratedMatrix m = trial_matrix(c, n, trial);
      for (size_t k = 0; k < nd; ++k) {
        Diagram d = unrooted(diagrams[k]);
        values[trial][2 * k] = eval_w(d, m.values).scalar / n;
        values[trial][2 * k + 1] = eval_z(d, m.values).scalar / n;
      }
    });
    for (size_t k = 0; k < nd; ++k) {
      const bool connected = is_connected(diagrams[k]);
      for (int b = 0; b < 2; ++b) {
        std::vector<double> xs;
        for (const auto& v : values) xs.push_back(v[2 * k + b]);
        MeanSE ms = mean_se(xs);
        TrafficRow row{c.diagrams[k], n, b == 0 ? "w" : "z", ms.mean, ms.se, ms.count, std::nullopt};
        if (table && connected) row.target = b == 0 ? w_target(diagrams[k], *table) : z_target(diagrams[k], *table);
        rep.rows.push_back(row);
        means[{k, b}].push_back(ms.mean);
      }
    }
  }
  if (c.sweep().size() >= 2) {
    const auto sweep = c.sweep();
    std::vector<double> ns(sweep.begin(), sweep.end());
    for (size_t k = 0; k < nd; ++k) {
      for (int b = 0; b < 2; ++b) {
        rep.scaling.push_back({c.diagrams[k], b == 0 ? "w" : "z", slope_or_vanish(ns, means[{k, b}])});
      }
    }
  }
  return rep;
}

AuditReport cactus_audit(const ExperimentConfig& c) {
  c.validate();
  const auto diagrams = c.parsed_diagrams();
  static const std::vector<std::string> deloc_names = {"path1@0,1", "path2@0,2", "cycle2@0",
                                                       "cycle3@0", "bowtie@0"};
  std::vector<Diagram> deloc;
  for (const auto& s : deloc_names) deloc.push_back(parse_diagram(s));

  struct Plan {
    std::string cls;
    bool use_z;
  };
  std::vector<Plan> plan;
  for (const auto& d : diagrams) {
    DiagramClass k = classify(unrooted(d));
    if (k.cactus) {
      plan.push_back({"cactus", false});
    } else if (k.two_edge_connected) {
      plan.push_back({"2ec_non_cactus", true});
    } else {
      plan.push_back({"not_2ec", false});
    }
  }

  const int trials = trial_count(c);
  const size_t nd = diagrams.size();
  const size_t nl = deloc.size();
  AuditReport rep;
  std::vector<std::vector<double>> means(nd);
  for (int n : c.sweep()) {
    std::vector<std::vector<double>> values(trials, std::vector<double>(nd + nl + 1));
    parallel_for(trials, c.threads, [&](int trial) {
      GeneratedMatrix m = trial_matrix(c, n, trial);
      for (size_t k = 0; k < nd; ++k) {
        Diagram d = unrooted(diagrams[k]);
        values[trial][k] = (plan[k].use_z ? eval_z(d, m.values) : eval_w(d, m.values)).scalar / n;
      }
      DelocalizationReport dr = delocalization_audit(m.values, deloc);
      for (size_t k = 0; k < nl; ++k) values[trial][nd + k] = dr.entries[k].value;
      values[trial][nd + nl] = dr.norm;
    });
    auto column = [&](size_t col) {
      std::vector<double> xs;
      for (const auto& v : values) xs.push_back(v[col]);
      return mean_se(xs);
    };
    for (size_t k = 0; k < nd; ++k) {
      MeanSE ms = column(k);
      rep.rows.push_back({c.diagrams[k], plan[k].cls, plan[k].use_z ? "z" : "w", n, ms.mean, ms.se, ms.count});
      means[k].push_back(ms.mean);
    }
    for (size_t k = 0; k < nl; ++k) {
      MeanSE ms = column(nd + k);
      rep.deloc.push_back({n, deloc_names[k], ms.mean, ms.se});
    }
    MeanSE ms = column(nd + nl);
    rep.deloc.push_back({n, "opnorm", ms.mean, ms.se});
  }
  if (c.sweep().size() >= 2) {
    const auto sweep = c.sweep();
    std::vector<double> ns(sweep.begin(), sweep.end());
    for (size_t k = 0; k < nd; ++k) {
      rep.scaling.push_back({c.diagrams[k], plan[k].use_z ? "z" : "w", slope_or_vanish(ns, means[k])});
    }
  }
  return rep;
}

AmpRun run_amp_trials(const ExperimentConfig& c) {
  c.validate();
  if (!c.amp) throw InvalidInput("config: no amp section");
  const int n = c.sweep().front();
  std::optional<std::vector<int>> labels;
  if (c.ensemble.kind == EnsembleKind::block_goe || c.ensemble.kind == EnsembleKind::community)
    labels = block_labels(n, c.ensemble.q);
  std::optional<GeneratedMatrix> fixed;
  if (is_deterministic(c.ensemble)) fixed = trial_matrix(c, n, 0);

  AmpRun run;
  run.trials.resize(c.trials);
  parallel_for(c.trials, c.threads, [&](int trial) {
    AmpTrial& out = run.trials[trial];
    out.trial = trial;
    AMPConfig cfg = *c.amp;
    cfg.seed = c.master_seed ^ kAmpSeedSalt;
    cfg.stream = static_cast<std::uint64_t>(trial);
    try {
      if (fixed) {
        out.trace = run_amp(fixed->values, cfg);
      } else {
        GeneratedMatrix m = trial_matrix(c, n, trial);
        out.trace = run_amp(m.values, cfg);
      }
      out.moments = empirical_state(out.trace, labels);
    } catch (const DivergenceError& e) {
      out.diverged = true;
      out.message = e.what();
    }
  });
  std::vector<MomentReport> reports;
  for (const auto& t : run.trials) {
    if (t.diverged) {
      ++run.diverged;
    } else {
      reports.push_back(t.moments);
    }
  }
  if (!reports.empty()) run.moments = aggregate_moments(reports);
  return run;
}

SEKernel predict_kernel(const ExperimentConfig& c) {
  if (!c.amp) throw InvalidInput("config: no amp section");
  const AMPConfig& a = *c.amp;
  auto kappa = [&]() -> CumulantTable {
    if (!a.kappa.values.empty()) return a.kappa;
    auto t = analytic_table(c);
    if (!t) throw InvalidInput("config: no cumulant table for this ensemble; set amp.kappa");
    return *t;
  };
  switch (a.mode) {
    case OnsagerMode::exact_treelike: {
      // the treelike iteration feeds f_0 = 1 regardless of nonlinearities[0]
      std::vector<Polynomial> fs = a.nonlinearities;
      if (fs.size() == 1) fs.push_back(fs[0]);
      fs[0] = Polynomial({1.0});
      return se_orthogonal(fs, kappa(), a.T);
    }
    case OnsagerMode::scalar_kappa:
    case OnsagerMode::none:
      return se_orthogonal(a.nonlinearities, kappa(), a.T);
    case OnsagerMode::punctured_kappa:
      return se_punctured(a.nonlinearities, kappa(), a.T);
    case OnsagerMode::block_goe:
      return se_block_goe(a.nonlinearities, c.ensemble.sigma, a.T, c.block_scale);
    case OnsagerMode::community:
      return se_community(a.nonlinearities, kappa(), a.q, a.T);
  }
  throw InvalidInput("predict_kernel: bad mode");
}

SEKernel snapped(const SEKernel& k) {
  SEKernel out = k;
  for (auto& g : out.gammas) g = g.unaryExpr([](double x) { return std::abs(x) < 1e-14 ? 0.0 : x; });
  return out;
}

void write_traffic_csv(const std::string& path, const std::string& hash, const TrafficReport& r) {
  auto out = open_csv(path, hash, "diagram,n,basis,mean,se,trials,target");
  for (const auto& row : r.rows) {
    out << row.diagram << "," << row.n << "," << row.basis << "," << format_double(row.mean) << ","
        << opt(row.se) << "," << row.trials << "," << (row.target ? format_double(*row.target) : "")
        << "\n";
  }
}

void write_scaling_csv(const std::string& path, const std::string& hash,
                       const std::vector<ScalingRow>& rows) {
  auto out = open_csv(path, hash, "diagram,basis,exponent");
  for (const auto& row : rows) {
    out << row.diagram << "," << row.basis << "," << format_double(row.exponent) << "\n";
  }
}

void write_audit_csv(const std::string& path, const std::string& hash, const AuditReport& r) {
  auto out = open_csv(path, hash, "diagram,class,basis,n,mean,se,trials");
  for (const auto& row : r.rows) {
    out << row.diagram << "," << row.diagram_class << "," << row.basis << "," << row.n << ","
        << format_double(row.mean) << "," << opt(row.se) << "," << row.trials << "\n";
  }
}

void write_deloc_csv(const std::string& path, const std::string& hash, const AuditReport& r) {
  auto out = open_csv(path, hash, "n,diagram,mean,se");
  for (const auto& row : r.deloc) {
    out << row.n << "," << row.diagram << "," << format_double(row.mean) << "," << opt(row.se) << "\n";
  }
}

void write_moments_csv(const std::string& path, const std::string& hash,
                       const std::vector<MomentStat>& rows) {
  auto out = open_csv(path, hash, "block,stat,s,t,mean,se,trials");
  for (const auto& m : rows) {
    out << m.group << "," << m.stat << "," << m.s << "," << m.t << "," << format_double(m.mean) << ","
        << opt(m.se) << "," << m.trials << "\n";
  }
}

std::vector<MomentStat> read_moments_csv(const std::string& path, std::string* hash) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::vector<MomentStat> rows;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# config-hash=";
      if (hash && line.rfind(key, 0) == 0) *hash = line.substr(key.size());
      continue;
    }
    auto cells = split_csv(line);
    if (!header) {
      if (cells != std::vector<std::string>{"block", "stat", "s", "t", "mean", "se", "trials"})
        throw InvalidInput(path + ": unexpected header");
      header = true;
      continue;
    }
    if (cells.size() != 7) throw InvalidInput(path + ": expected 7 columns");
    MomentStat m;
    m.group = cells[0];
    m.stat = cells[1];
    try {
      m.s = std::stoi(cells[2]);
      m.t = std::stoi(cells[3]);
      m.trials = std::stoi(cells[6]);
    } catch (const std::logic_error&) {
      throw InvalidInput(path + ": bad integer field");
    }
    m.mean = parse_double(cells[4]);
    m.se = parse_double(cells[5]);
    rows.push_back(m);
  }
  if (!header) throw InvalidInput(path + ": missing header");
  return rows;
}

void write_verdict_csv(const std::string& path, const std::string& hash, const Verdict& v) {
  auto out = open_csv(path, hash, "block,stat,s,t,empirical,predicted,se,z,pass");
  for (const auto& r : v.rows) {
    out << r.group << "," << r.stat << "," << r.s << "," << r.t << "," << format_double(r.empirical) << ","
        << format_double(r.predicted) << "," << opt(r.se) << "," << format_double(r.z) << ","
        << (r.pass ? 1 : 0) << "\n";
  }
}

}  // namespace tamp
