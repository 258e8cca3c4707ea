#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "tamp/ensembles.hpp"
#include "tamp/error.hpp"
#include "tamp/experiment.hpp"
#include "tamp/json_io.hpp"
#include "tamp/matrix_io.hpp"

using namespace tamp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCompareFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;
constexpr int kExitDiverged = 4;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
};

struct RunFlags {
  std::string config;
  std::optional<int> trials;
  std::optional<int> n;
};

ExperimentConfig load_config(const RunFlags& f, const Globals& g) {
  ExperimentConfig c = json_get<ExperimentConfig>(read_json_file(f.config), f.config);
  if (g.seed) c.master_seed = *g.seed;
  if (g.threads) c.threads = *g.threads;
  if (g.out) c.output_dir = *g.out;
  if (f.trials) c.trials = *f.trials;
  if (f.n) {
    c.ensemble.n = *f.n;
    c.dimension_sweep = {*f.n};
  }
  c.validate();
  std::filesystem::create_directories(c.output_dir);
  return c;
}

std::string out_path(const ExperimentConfig& c, const std::string& name) {
  return (std::filesystem::path(c.output_dir) / name).string();
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::logic_error&) {
      throw InvalidInput("bad number in list: " + cell);
    }
  }
  return out;
}

int cmd_gen(const std::string& config, const std::string& kind, int n, std::optional<std::uint64_t> stream,
            const std::string& inner, int q, const std::string& sigma, const std::string& entry_law,
            const std::string& community_inner, const std::string& spectrum, const Globals& g) {
  json spec;
  if (!config.empty()) {
    json j = read_json_file(config);
    spec = j.contains("ensemble") ? j.at("ensemble") : j;
  }
  if (!kind.empty()) spec["kind"] = kind;
  if (n > 0) spec["n"] = n;
  if (g.seed) spec["seed"] = *g.seed;
  if (stream) spec["stream"] = *stream;
  if (!inner.empty()) spec["inner"] = inner;
  if (q > 0) spec["q"] = q;
  if (!sigma.empty()) spec["sigma"] = parse_list(sigma);
  if (!entry_law.empty()) spec["entry_law"] = entry_law;
  if (!community_inner.empty()) spec["community_inner"] = community_inner;
  if (!spectrum.empty()) spec["spectrum"] = spectrum;
  if (!spec.contains("kind")) throw InvalidInput("gen: --kind or --config is required");
  EnsembleSpec s = json_get<EnsembleSpec>(spec, "gen");

  GeneratedMatrix m = generate(s);
  std::string path = g.out.value_or(kind_name(s.kind) + "_" + std::to_string(s.n) + ".tamp");
  write_matrix(path, m.values);
  json side{{"spec", m.spec}, {"seed", m.spec.seed}, {"stream", m.spec.stream}, {"provenance", m.provenance}};
  write_json_file(path + ".json", side);

  const double asym = (m.values - m.values.transpose()).cwiseAbs().maxCoeff();
  std::cerr << "wrote " << path << " (" << s.n << "x" << s.n << "), max|M - M^T| = " << asym << "\n";
  if (s.kind == EnsembleKind::hadamard || s.kind == EnsembleKind::dst || s.kind == EnsembleKind::dct) {
    Matrix sq = m.values * m.values;
    sq.diagonal().array() -= 1.0;
    std::cerr << "max|M^2 - I| = " << sq.cwiseAbs().maxCoeff() << "\n";
  }
  return kExitOk;
}

int cmd_traffic(const ExperimentConfig& c) {
  TrafficReport r = traffic_estimates(c);
  const std::string hash = config_hash(c);
  write_traffic_csv(out_path(c, "traffic.csv"), hash, r);
  if (!r.scaling.empty()) write_scaling_csv(out_path(c, "scaling.csv"), hash, r.scaling);
  for (const auto& s : r.scaling) {
    std::cout << s.diagram << " " << s.basis << " exponent " << format_double(s.exponent) << "\n";
  }
  std::cout << "wrote " << out_path(c, "traffic.csv") << "\n";
  return kExitOk;
}

int cmd_cactus_audit(const ExperimentConfig& c) {
  AuditReport r = cactus_audit(c);
  const std::string hash = config_hash(c);
  write_audit_csv(out_path(c, "audit.csv"), hash, r);
  write_deloc_csv(out_path(c, "deloc.csv"), hash, r);
  if (!r.scaling.empty()) write_scaling_csv(out_path(c, "audit_scaling.csv"), hash, r.scaling);
  for (const auto& s : r.scaling) {
    std::cout << s.diagram << " " << s.basis << " exponent " << format_double(s.exponent) << "\n";
  }
  std::cout << "wrote " << out_path(c, "audit.csv") << "\n";
  return kExitOk;
}

int cmd_amp(const ExperimentConfig& c, bool traces) {
  AmpRun run = run_amp_trials(c);
  const std::string hash = config_hash(c);
  {
    std::ofstream out(out_path(c, "trials.csv"));
    out << "# config-hash=" << hash << "\ntrial,diverged,message\n";
    for (const auto& t : run.trials) {
      std::string msg = t.message;
      for (char& ch : msg) {
        if (ch == ',') ch = ';';
      }
      out << t.trial << "," << (t.diverged ? 1 : 0) << "," << msg << "\n";
    }
  }
  if (traces) {
    for (const auto& t : run.trials) {
      if (t.diverged) continue;
      std::string base = out_path(c, "trace_" + std::to_string(t.trial));
      write_matrix(base + ".tamp", t.trace.iterates);
      json side{{"trial", t.trial},
                {"config_hash", hash},
                {"mean_f", t.trace.mean_f},
                {"mean_fprime", t.trace.mean_fprime}};
      json gram = json::array();
      const Matrix& gm = t.moments.overall.gram;
      for (Eigen::Index i = 0; i < gm.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < gm.cols(); ++k) row.push_back(gm(i, k));
        gram.push_back(row);
      }
      side["gram"] = gram;
      write_json_file(base + ".json", side);
    }
  }
  if (run.diverged == static_cast<int>(run.trials.size())) {
    std::cerr << "all " << run.diverged << " trials diverged\n";
    return kExitDiverged;
  }
  write_moments_csv(out_path(c, "moments.csv"), hash, run.moments);
  for (const auto& m : run.moments) {
    if (m.group == "all" && m.stat == "xx" && m.s == m.t) {
      std::cout << "<x_" << m.t << "^2> = " << format_double(m.mean) << " +- " << format_double(m.se) << "\n";
    }
  }
  std::cout << "wrote " << out_path(c, "moments.csv") << "\n";
  if (run.diverged > 0) {
    std::cerr << run.diverged << " of " << run.trials.size() << " trials diverged\n";
    return kExitDiverged;
  }
  return kExitOk;
}

int cmd_se(const ExperimentConfig& c) {
  SEKernel k = snapped(predict_kernel(c));
  json j = k;
  write_json_file(out_path(c, "kernel.json"), j);
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_compare(const std::string& kernel_path, const std::string& moments_path, double threshold,
                const Globals& g) {
  SEKernel k = json_get<SEKernel>(read_json_file(kernel_path), kernel_path);
  std::string hash;
  auto moments = read_moments_csv(moments_path, &hash);
  int horizon = 0;
  for (const auto& m : moments) horizon = std::max(horizon, m.t);
  if (horizon != k.T) {
    throw InvalidInput("compare: moments reach t=" + std::to_string(horizon) + " but the kernel has T=" +
                       std::to_string(k.T));
  }
  Verdict v = compare_empirical(k, moments, threshold);
  std::string dir = g.out.value_or(".");
  std::filesystem::create_directories(dir);
  std::string path = (std::filesystem::path(dir) / "verdict.csv").string();
  write_verdict_csv(path, hash.empty() ? "unknown" : hash, v);
  for (const auto& r : v.rows) {
    if (!r.pass) {
      std::cout << "FAIL " << r.group << " " << r.stat << "(" << r.s << "," << r.t << "): empirical "
                << format_double(r.empirical) << ", predicted " << format_double(r.predicted) << ", z "
                << format_double(r.z) << "\n";
    }
  }
  std::cout << (v.pass ? "PASS" : "FAIL") << " max|z| = " << format_double(v.max_abs_z) << " over "
            << v.rows.size() << " rows; wrote " << path << "\n";
  return v.pass ? kExitOk : kExitCompareFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traffic distributions, AMP and state evolution experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed (overrides the config)");
  app.add_option("--threads", g.threads, "Worker threads for trials (0: all cores)");
  app.add_option("--out", g.out, "Output directory (gen: output file)");

  std::string gen_config, kind, inner, sigma, entry_law, community_inner, spectrum;
  int gen_n = 0, gen_q = 0;
  std::optional<std::uint64_t> stream;
  auto* gen = app.add_subcommand("gen", "Generate a matrix file");
  gen->add_option("--config", gen_config, "Ensemble JSON (or experiment config)");
  gen->add_option("--kind", kind, "goe, wigner, rom, r_rom, hadamard, dst, dct, punctured, block_goe, ...");
  gen->add_option("--n", gen_n, "Dimension");
  gen->add_option("--stream", stream, "Generation counter within the seed");
  gen->add_option("--inner", inner, "Inner kind for punctured");
  gen->add_option("--q", gen_q, "Blocks for block_goe and community");
  gen->add_option("--sigma", sigma, "Block variances, comma separated row-major");
  gen->add_option("--entry-law", entry_law, "wigner: normal or rademacher");
  gen->add_option("--community-inner", community_inner, "community: rom or semicircle");
  gen->add_option("--spectrum", spectrum, "orth_invariant: rademacher, semicircle or uniform");

  RunFlags rf;
  bool no_traces = false;
  auto add_run = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", rf.config, "Experiment config JSON")->required();
    sub->add_option("--trials", rf.trials, "Override the trial count");
    sub->add_option("--n", rf.n, "Override the dimension (single-point sweep)");
    return sub;
  };
  auto* traffic = add_run("traffic", "Estimate (1/n) w and (1/n) z per diagram");
  auto* audit = add_run("cactus-audit", "Cactus-property and delocalization audit");
  auto* amp = add_run("amp", "Run AMP trials and aggregate empirical moments");
  amp->add_flag("--no-traces", no_traces, "Skip writing per-trial iterate files");
  auto* se = add_run("se", "State-evolution kernel for the configured iteration");

  std::string kernel_path, moments_path;
  double threshold = 4.0;
  auto* compare = app.add_subcommand("compare", "Compare empirical moments with a kernel");
  compare->add_option("--kernel", kernel_path, "Kernel JSON from `se`")->required();
  compare->add_option("--moments", moments_path, "Moment CSV from `amp`")->required();
  compare->add_option("--threshold", threshold, "Largest allowed |z|");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen(gen_config, kind, gen_n, stream, inner, gen_q, sigma, entry_law, community_inner,
                     spectrum, g);
    }
    if (compare->parsed()) return cmd_compare(kernel_path, moments_path, threshold, g);
    ExperimentConfig c = load_config(rf, g);
    if (traffic->parsed()) return cmd_traffic(c);
    if (audit->parsed()) return cmd_cactus_audit(c);
    if (amp->parsed()) return cmd_amp(c, !no_traces);
    if (se->parsed()) return cmd_se(c);
  } catch (const BudgetError& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return kExitBudget;
  } catch (const SizeError& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
