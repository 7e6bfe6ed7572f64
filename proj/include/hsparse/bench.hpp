#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsparse/balancer.hpp"
#include "hsparse/rng.hpp"
#include "hsparse/sampler.hpp"

namespace hsparse {

inline constexpr const char* kRunSchema = "# hsparse-bench run v1";
inline constexpr const char* kBisectSchema = "# hsparse-bench bisect v1";

struct BenchConfig {
  std::vector<int> n;
  std::vector<int> m;
  std::vector<int> max_card;
  std::vector<double> epsilon;
  int trials = 1;
  double constant_c = kDefaultConstantC;
  BalanceOptions balance;
  double weight_lo = 1.0;
  double weight_hi = 1.0;
  std::int64_t directions = 2000;       // random directions per verification
  std::optional<std::int64_t> m_override;
  Seed seed = 1;
  std::filesystem::path out;
  int threads = 0;                      // 0: HSPARSE_THREADS, else hardware
};

/// Throws InvalidArgument unless every list is nonempty and trials >= 1.
void validate(const BenchConfig& config);

/// One point of the n x m x D x epsilon grid, in that nesting order.
struct BenchCell {
  int index = 0;
  int n = 0;
  int m = 0;
  int max_card = 0;
  double epsilon = 0.0;
};
std::vector<BenchCell> expand_cells(const BenchConfig& config);

/// Seeds of one (cell, trial): instance generation, sampling, verification.
struct TrialSeeds {
  Seed instance = 0;
  Seed draw = 0;
  Seed verify = 0;
};
TrialSeeds trial_seeds(Seed master, int cell, int trial);

struct RunRecord {
  int cell = 0;
  int trial = 0;
  int n = 0;
  int m = 0;
  int max_card = 0;
  double epsilon = 0.0;
  Seed seed = 0;  // instance seed
  std::int64_t samples = 0;
  std::size_t distinct_edges = 0;
  double empirical_eps = 0.0;
  std::optional<double> cut_eps;
  double k = 0.0;
  double z = 0.0;
  double phi = 0.0;
  bool converged = false;
  int balance_iters = 0;
  double ms_generate = 0.0;
  double ms_balance = 0.0;
  double ms_plan = 0.0;
  double ms_draw = 0.0;
  double ms_verify = 0.0;
  std::string status = "ok";  // ok | failed
  std::string message;
};

RunRecord run_trial(const BenchConfig& config, const BenchCell& cell, int trial);

std::string run_csv_header();
std::string to_csv_row(const RunRecord& r);

struct BenchSummary {
  int written = 0;
  int skipped = 0;  // already present in the output file
  int failed = 0;
};

/// Runs every (cell, trial) not already recorded in config.out and appends
/// one row each. Rows are appended as trials finish, so an interrupted run
/// resumes from the completed rows.
BenchSummary run_bench(const BenchConfig& config);

/// Minimal passing sample count for one instance: the smallest M for which
/// the median empirical epsilon over `trials` fixed draw seeds is <= target.
struct BisectRecord {
  int cell = 0;
  int n = 0;
  int m = 0;
  int max_card = 0;
  double target = 0.0;
  int trials = 0;
  Seed seed = 0;
  std::int64_t min_samples = 0;
  double median_eps = 0.0;  // at min_samples
  double k = 0.0;
  double z = 0.0;
  bool converged = false;
  std::string status = "ok";
  std::string message;
};

BisectRecord bisect_cell(const BenchConfig& config, const BenchCell& cell, double target);
std::string bisect_csv_header();
std::string to_csv_row(const BisectRecord& r);
/// Bisects every cell (epsilon list ignored) and writes the CSV to config.out.
std::vector<BisectRecord> run_bisect(const BenchConfig& config, double target);

struct AffineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double operator()(double x) const { return intercept + slope * x; }
};
AffineFit fit_affine(std::span<const double> x, std::span<const double> y);

/// Minimal M against ln D, checked for monotonicity and closeness to an
/// affine fit in ln D.
struct TrendReport {
  std::vector<int> max_card;
  std::vector<double> min_samples;
  std::vector<double> fitted;
  AffineFit fit;
  bool nondecreasing = false;
  double worst_fit_factor = 0.0;  // max over rows of max(y/fit, fit/y)
};
TrendReport trend_report(std::span<const BisectRecord> records);

/// Calibration of the sample-size constant: the smallest C (to `resolution`)
/// for which every reference group passes. A group passes when at least
/// `pass_fraction` of its trials reach error <= epsilon.
struct CalibrationGroup {
  int n = 0;
  int m = 0;
  int max_card = 0;
  bool exhaustive_cuts = false;  // use the cut error instead of random directions
};

struct CalibrationConfig {
  std::vector<CalibrationGroup> groups;
  double epsilon = 0.5;
  int trials = 20;
  std::int64_t directions = 20000;
  double pass_fraction = 0.5;
  double c_lo = 1.0 / 64.0;
  double c_hi = 8.0;
  double resolution = 1.0 / 64.0;
  double weight_lo = 0.5;
  double weight_hi = 2.0;
  BalanceOptions balance;
  Seed seed = 1;
  int threads = 0;
};

struct GroupOutcome {
  CalibrationGroup group;
  int passes = 0;
  int trials = 0;
  double median_eps = 0.0;
  std::int64_t median_samples = 0;
  int converged = 0;
};

struct CalibrationResult {
  double constant_c = 0.0;
  std::vector<GroupOutcome> outcomes;  // at constant_c
};

/// Reference instances used both by calibration and by evaluate_constant.
struct PreparedInstance {
  Hypergraph hypergraph;
  SamplingPlan plan;
  bool converged = false;
  double k = 0.0;
  TrialSeeds seeds;
};

std::vector<std::vector<PreparedInstance>> prepare_groups(const CalibrationConfig& config);

/// Per-group pass counts at a given C.
std::vector<GroupOutcome> evaluate_constant(const CalibrationConfig& config,
                                            const std::vector<std::vector<PreparedInstance>>& prepared,
                                            double constant_c);

CalibrationResult calibrate_constant(const CalibrationConfig& config);

/// HSPARSE_THREADS when set and positive, else hardware concurrency.
int resolve_threads(int requested);

/// Runs fn(0..count-1) on a pool of `threads` workers.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace hsparse
