#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tamp/amp.hpp"
#include "tamp/diagram.hpp"
#include "tamp/ensembles.hpp"
#include "tamp/freeprob.hpp"
#include "tamp/json_io.hpp"
#include "tamp/state_evolution.hpp"

namespace tamp {

struct ExperimentConfig {
  EnsembleSpec ensemble;
  std::vector<std::string> diagrams;  // catalog names or diagram{...} text
  std::optional<AMPConfig> amp;
  int trials = 1;
  std::vector<int> dimension_sweep;  // empty: just ensemble.n
  std::string output_dir = ".";
  std::uint64_t master_seed = 0;
  std::optional<CumulantTable> target;  // overrides the inferred analytic table
  BlockScale block_scale = BlockScale::per_block;
  double threshold = 4.0;
  int threads = 0;  // 0: hardware concurrency

  std::vector<int> sweep() const;
  std::vector<Diagram> parsed_diagrams() const;
  void validate() const;
};

void to_json(json& j, const ExperimentConfig& c);
void from_json(const json& j, ExperimentConfig& c);

// Hash of everything that affects results (threads and output_dir excluded).
std::string config_hash(const ExperimentConfig& c);

bool is_deterministic(EnsembleKind k);
bool is_deterministic(const EnsembleSpec& s);

// Matrix for one (n, trial), seeded by (master_seed, n, trial) only.
GeneratedMatrix trial_matrix(const ExperimentConfig& c, int n, int trial);

// Analytic limit table for the ensemble (cumulants), if it has one.
std::optional<CumulantTable> inferred_table(const EnsembleSpec& s);
std::optional<CumulantTable> analytic_table(const ExperimentConfig& c);

// lim (1/n) z_d and lim (1/n) w_d for a connected unrooted diagram.
double z_target(const Diagram& d, const CumulantTable& t);
double w_target(const Diagram& d, const CumulantTable& t);

struct TrafficRow {
  std::string diagram;
  int n = 0;
  std::string basis;  // "w" or "z"
  double mean = 0.0;
  double se = 0.0;  // NaN when absent
  int trials = 0;
  std::optional<double> target;
};
struct ScalingRow {
  std::string diagram;
  std::string basis;
  double exponent = 0.0;  // -inf when every estimate vanishes
};
struct TrafficReport {
  std::vector<TrafficRow> rows;
  std::vector<ScalingRow> scaling;
};

// (1/n) w and (1/n) z per diagram and n. Roots are dropped.
TrafficReport traffic_estimates(const ExperimentConfig& c);

struct AuditRow {
  std::string diagram;
  std::string diagram_class;  // cactus | 2ec_non_cactus | not_2ec
  std::string basis;
  int n = 0;
  double mean = 0.0;
  double se = 0.0;
  int trials = 0;
};
struct DelocRow {
  int n = 0;
  std::string diagram;  // "opnorm" for the operator norm
  double mean = 0.0;
  double se = 0.0;
};
struct AuditReport {
  std::vector<AuditRow> rows;
  std::vector<ScalingRow> scaling;
  std::vector<DelocRow> deloc;
};

// z for 2-edge-connected non-cactuses, w for the rest, plus delocalization
// of a fixed set of open and rooted cactuses.
AuditReport cactus_audit(const ExperimentConfig& c);

struct AmpTrial {
  int trial = 0;
  bool diverged = false;
  std::string message;
  AMPTrace trace;
  MomentReport moments;
};
struct AmpRun {
  std::vector<AmpTrial> trials;
  std::vector<MomentStat> moments;  // aggregated over non-diverged trials
  int diverged = 0;
};
AmpRun run_amp_trials(const ExperimentConfig& c);

// State-evolution kernel matching the configured iteration.
SEKernel predict_kernel(const ExperimentConfig& c);

// Entries below 1e-14 in magnitude set to zero, for reports.
SEKernel snapped(const SEKernel& k);

// CSV: "# config-hash=<hex>", then a header row.
void write_traffic_csv(const std::string& path, const std::string& hash, const TrafficReport& r);
void write_scaling_csv(const std::string& path, const std::string& hash,
                       const std::vector<ScalingRow>& rows);
void write_audit_csv(const std::string& path, const std::string& hash, const AuditReport& r);
void write_deloc_csv(const std::string& path, const std::string& hash, const AuditReport& r);
void write_moments_csv(const std::string& path, const std::string& hash,
                       const std::vector<MomentStat>& rows);
// Returns the rows and sets *hash to the comment's hash, if any.
std::vector<MomentStat> read_moments_csv(const std::string& path, std::string* hash = nullptr);
void write_verdict_csv(const std::string& path, const std::string& hash, const Verdict& v);

// Round-trippable shortest form.
std::string format_double(double x);

// Runs fn(i) for i in [0, count). Results must be written by index; the first
// failing index (lowest) is rethrown after all workers finish.
template <typename F>
void parallel_for(int count, int threads, F&& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, std::max(count, 1));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace tamp
