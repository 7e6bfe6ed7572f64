#include "hsparse/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "hsparse/error.hpp"
#include "hsparse/io.hpp"
#include "hsparse/verifier.hpp"

namespace hsparse {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string csv_escape(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const auto mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

// (cell, trial) keys of the data rows already present in a run CSV.
std::set<std::pair<int, int>> completed_rows(const std::filesystem::path& path) {
  std::set<std::pair<int, int>> done;
  std::ifstream in(path);
  std::string line;
  if (!std::getline(in, line)) return done;
  if (line != kRunSchema) throw Error(ErrorCode::Parse, path.string() + " is not a run CSV of this schema version");
  std::getline(in, line);  // column header
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string cell;
    std::string trial;
    if (std::getline(fields, cell, ',') && std::getline(fields, trial, ',')) {
      try {
        done.emplace(std::stoi(cell), std::stoi(trial));
      } catch (const std::exception&) {
        // A torn final line from an interrupted run is re-executed.
      }
    }
  }
  return done;
}

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HSPARSE_THREADS")) {
    const int value = std::atoi(env);
    if (value > 0) return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& worker : pool) worker.join();
  if (failure) std::rethrow_exception(failure);
}

void validate(const BenchConfig& config) {
  if (config.n.empty() || config.m.empty() || config.max_card.empty() || config.epsilon.empty()) {
    throw Error(ErrorCode::InvalidArgument, "bench lists for n, m, D and epsilon must be nonempty");
  }
  if (config.trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (config.directions < 1) throw Error(ErrorCode::InvalidArgument, "directions must be >= 1");
  for (double eps : config.epsilon) {
    if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon values must lie in (0, 1)");
  }
}

std::vector<BenchCell> expand_cells(const BenchConfig& config) {
  std::vector<BenchCell> cells;
  for (int n : config.n) {
    for (int m : config.m) {
      for (int d : config.max_card) {
        for (double eps : config.epsilon) {
          cells.push_back({static_cast<int>(cells.size()), n, m, d, eps});
        }
      }
    }
  }
  return cells;
}

TrialSeeds trial_seeds(Seed master, int cell, int trial) {
  const Seed cell_seed = derive_seed(master, static_cast<std::uint64_t>(cell));
  const Seed trial_seed = derive_seed(cell_seed, static_cast<std::uint64_t>(trial));
  return {derive_seed(trial_seed, 0), derive_seed(trial_seed, 1), derive_seed(trial_seed, 2)};
}

RunRecord run_trial(const BenchConfig& config, const BenchCell& cell, int trial) {
  RunRecord r;
  r.cell = cell.index;
  r.trial = trial;
  r.n = cell.n;
  r.m = cell.m;
  r.max_card = cell.max_card;
  r.epsilon = cell.epsilon;
  const auto seeds = trial_seeds(config.seed, cell.index, trial);
  r.seed = seeds.instance;
  try {
    auto t0 = Clock::now();
    const auto generated =
        random_hypergraph({cell.n, cell.m, cell.max_card, config.weight_lo, config.weight_hi, seeds.instance});
    const Hypergraph& h = generated.hypergraph;
    r.ms_generate = elapsed_ms(t0);

    t0 = Clock::now();
    const auto balanced = balance(h, config.balance);
    r.ms_balance = elapsed_ms(t0);
    r.k = balanced.report.final_k;
    r.z = balanced.report.final_z;
    r.phi = balanced.report.objective_trace.back();
    r.converged = balanced.report.converged;
    r.balance_iters = balanced.report.iterations;

    t0 = Clock::now();
    const auto plan = build_plan(h, balanced.split);
    r.samples = config.m_override ? *config.m_override
                                  : sample_count(h.num_vertices(), h.rank(), plan.z, cell.epsilon, config.constant_c);
    r.ms_plan = elapsed_ms(t0);

    t0 = Clock::now();
    const auto sparse = draw(h, plan, r.samples, seeds.draw);
    r.distinct_edges = sparse.distinct_edges();
    r.ms_draw = elapsed_ms(t0);

    t0 = Clock::now();
    const auto report = empirical_epsilon(h, sparse.to_hypergraph(h), config.directions, seeds.verify);
    r.empirical_eps = report.max_relative_error;
    r.cut_eps = report.cut_error;
    r.ms_verify = elapsed_ms(t0);
  } catch (const std::exception& ex) {
    r.status = "failed";
    r.message = ex.what();
  }
  return r;
}

std::string run_csv_header() {
  return "cell,trial,n,m,D,epsilon,seed,M,distinct_edges,empirical_eps,cut_eps,K,Z,Phi,converged,balance_iters,"
         "ms_generate,ms_balance,ms_plan,ms_draw,ms_verify,status,message";
}

std::string to_csv_row(const RunRecord& r) {
  std::ostringstream out;
  out << r.cell << ',' << r.trial << ',' << r.n << ',' << r.m << ',' << r.max_card << ',' << format_double(r.epsilon)
      << ',' << r.seed << ',' << r.samples << ',' << r.distinct_edges << ',' << format_double(r.empirical_eps) << ','
      << (r.cut_eps ? format_double(*r.cut_eps) : "") << ',' << format_double(r.k) << ',' << format_double(r.z)
      << ',' << format_double(r.phi) << ',' << (r.converged ? 1 : 0) << ',' << r.balance_iters << ','
      << r.ms_generate << ',' << r.ms_balance << ',' << r.ms_plan << ',' << r.ms_draw << ',' << r.ms_verify << ','
      << r.status << ',' << csv_escape(r.message);
  return out.str();
}

BenchSummary run_bench(const BenchConfig& config) {
  validate(config);
  if (config.out.empty()) throw Error(ErrorCode::InvalidArgument, "bench needs an output path");

  const auto done = std::filesystem::exists(config.out) ? completed_rows(config.out)
                                                        : std::set<std::pair<int, int>>{};
  const bool fresh = !std::filesystem::exists(config.out) || std::filesystem::file_size(config.out) == 0;
  std::ofstream out(config.out, std::ios::app);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + config.out.string());
  if (fresh) out << kRunSchema << '\n' << run_csv_header() << '\n' << std::flush;

  const auto cells = expand_cells(config);
  std::vector<std::pair<int, int>> jobs;
  BenchSummary summary;
  for (const auto& cell : cells) {
    for (int t = 0; t < config.trials; ++t) {
      if (done.count({cell.index, t})) {
        ++summary.skipped;
      } else {
        jobs.emplace_back(cell.index, t);
      }
    }
  }

  std::mutex writer;
  parallel_for(static_cast<int>(jobs.size()), resolve_threads(config.threads), [&](int k) {
    const auto [cell, trial] = jobs[k];
    const auto record = run_trial(config, cells[cell], trial);
    std::lock_guard lock(writer);
    out << to_csv_row(record) << '\n' << std::flush;
    ++summary.written;
    if (record.status != "ok") ++summary.failed;
  });
  return summary;
}

BisectRecord bisect_cell(const BenchConfig& config, const BenchCell& cell, double target) {
  BisectRecord r;
  r.cell = cell.index;
  r.n = cell.n;
  r.m = cell.m;
  r.max_card = cell.max_card;
  r.target = target;
  r.trials = config.trials;
  const auto seeds = trial_seeds(config.seed, cell.index, 0);
  r.seed = seeds.instance;
  try {
    const auto h =
        random_hypergraph({cell.n, cell.m, cell.max_card, config.weight_lo, config.weight_hi, seeds.instance})
            .hypergraph;
    const auto balanced = balance(h, config.balance);
    r.k = balanced.report.final_k;
    r.z = balanced.report.final_z;
    r.converged = balanced.report.converged;
    const auto plan = build_plan(h, balanced.split);
    // Common random numbers: every M is scored on the same directions and
    // the same per-trial draw seeds, which keeps the pass test close to
    // monotone in M.
    const DirectionProbe probe(h, config.directions, seeds.verify, false);

    auto median_eps = [&](std::int64_t m) {
      std::vector<double> errs(static_cast<std::size_t>(config.trials));
      for (int t = 0; t < config.trials; ++t) {
        const auto sparse = draw(h, plan, m, derive_seed(seeds.draw, static_cast<std::uint64_t>(t)));
        errs[t] = probe.evaluate(sparse.to_hypergraph(h)).max_relative_error;
      }
      return median(errs);
    };

    constexpr std::int64_t kCap = std::int64_t{1} << 26;
    std::int64_t lo = 0;  // largest known failing M
    std::int64_t hi = 8;
    double hi_eps = median_eps(hi);
    while (hi_eps > target) {
      lo = hi;
      hi *= 2;
      if (hi > kCap) throw Error(ErrorCode::InfeasibleParameters, "no passing M below 2^26");
      hi_eps = median_eps(hi);
    }
    // Resolve to 1% of M (or exactly, for small M).
    while (hi - lo > std::max<std::int64_t>(1, hi / 100)) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      const double eps = median_eps(mid);
      if (eps <= target) {
        hi = mid;
        hi_eps = eps;
      } else {
        lo = mid;
      }
    }
    r.min_samples = hi;
    r.median_eps = hi_eps;
  } catch (const std::exception& ex) {
    r.status = "failed";
    r.message = ex.what();
  }
  return r;
}

std::string bisect_csv_header() { return "cell,n,m,D,target,trials,seed,min_M,median_eps,K,Z,converged,status,message"; }

std::string to_csv_row(const BisectRecord& r) {
  std::ostringstream out;
  out << r.cell << ',' << r.n << ',' << r.m << ',' << r.max_card << ',' << format_double(r.target) << ',' << r.trials
      << ',' << r.seed << ',' << r.min_samples << ',' << format_double(r.median_eps) << ',' << format_double(r.k)
      << ',' << format_double(r.z) << ',' << (r.converged ? 1 : 0) << ',' << r.status << ','
      << csv_escape(r.message);
  return out.str();
}

std::vector<BisectRecord> run_bisect(const BenchConfig& config, double target) {
  BenchConfig cfg = config;
  cfg.epsilon = {target};
  validate(cfg);
  const auto cells = expand_cells(cfg);
  std::vector<BisectRecord> records(cells.size());
  parallel_for(static_cast<int>(cells.size()), resolve_threads(cfg.threads),
               [&](int k) { records[k] = bisect_cell(cfg, cells[k], target); });
  if (!cfg.out.empty()) {
    std::ostringstream text;
    text << kBisectSchema << '\n' << bisect_csv_header() << '\n';
    for (const auto& r : records) text << to_csv_row(r) << '\n';
    write_text_file(cfg.out, text.str());
  }
  return records;
}

AffineFit fit_affine(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw Error(ErrorCode::InvalidArgument, "fit needs matching nonempty data");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  AffineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

TrendReport trend_report(std::span<const BisectRecord> records) {
  std::vector<BisectRecord> rows;
  for (const auto& r : records) {
    if (r.status == "ok") rows.push_back(r);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.max_card < b.max_card; });

  TrendReport report;
  std::vector<double> log_d;
  for (const auto& r : rows) {
    report.max_card.push_back(r.max_card);
    report.min_samples.push_back(static_cast<double>(r.min_samples));
    log_d.push_back(std::log(static_cast<double>(r.max_card)));
  }
  if (rows.empty()) return report;
  report.fit = fit_affine(log_d, report.min_samples);
  report.nondecreasing = true;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double fitted = report.fit(log_d[k]);
    report.fitted.push_back(fitted);
    const double y = report.min_samples[k];
    const double factor = fitted > 0.0 && y > 0.0 ? std::max(y / fitted, fitted / y)
                                                  : std::numeric_limits<double>::infinity();
    report.worst_fit_factor = std::max(report.worst_fit_factor, factor);
    if (k > 0 && y < report.min_samples[k - 1]) report.nondecreasing = false;
  }
  return report;
}

std::vector<std::vector<PreparedInstance>> prepare_groups(const CalibrationConfig& config) {
  std::vector<std::vector<PreparedInstance>> prepared(config.groups.size());
  std::vector<std::pair<int, int>> jobs;
  for (std::size_t g = 0; g < config.groups.size(); ++g) {
    for (int t = 0; t < config.trials; ++t) jobs.emplace_back(static_cast<int>(g), t);
  }
  std::vector<std::optional<PreparedInstance>> slots(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), resolve_threads(config.threads), [&](int k) {
    const auto [g, t] = jobs[k];
    const auto& group = config.groups[g];
    const auto seeds = trial_seeds(config.seed, g, t);
    auto h = random_hypergraph({group.n, group.m, group.max_card, config.weight_lo, config.weight_hi, seeds.instance})
                 .hypergraph;
    auto balanced = balance(h, config.balance);
    auto plan = build_plan(h, balanced.split);
    slots[k] = PreparedInstance{std::move(h), std::move(plan), balanced.report.converged, balanced.report.final_k,
                                seeds};
  });
  // Jobs are in (group, trial) order.
  for (std::size_t k = 0; k < jobs.size(); ++k) prepared[jobs[k].first].push_back(std::move(*slots[k]));
  return prepared;
}

std::vector<GroupOutcome> evaluate_constant(const CalibrationConfig& config,
                                            const std::vector<std::vector<PreparedInstance>>& prepared,
                                            double constant_c) {
  std::vector<std::pair<int, int>> jobs;
  for (std::size_t g = 0; g < prepared.size(); ++g) {
    for (std::size_t t = 0; t < prepared[g].size(); ++t) jobs.emplace_back(static_cast<int>(g), static_cast<int>(t));
  }
  std::vector<double> errors(jobs.size());
  std::vector<std::int64_t> samples(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), resolve_threads(config.threads), [&](int k) {
    const auto [g, t] = jobs[k];
    const auto& inst = prepared[g][t];
    const auto& h = inst.hypergraph;
    samples[k] = sample_count(h.num_vertices(), h.rank(), inst.plan.z, config.epsilon, constant_c);
    const auto sparse = draw(h, inst.plan, samples[k], inst.seeds.draw).to_hypergraph(h);
    errors[k] = config.groups[g].exhaustive_cuts
                    ? cut_error_exhaustive(h, sparse)
                    : DirectionProbe(h, config.directions, inst.seeds.verify, false).evaluate(sparse).max_relative_error;
  });

  std::vector<GroupOutcome> outcomes(prepared.size());
  std::vector<std::vector<double>> errs(prepared.size());
  std::vector<std::vector<double>> ms(prepared.size());
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const auto g = static_cast<std::size_t>(jobs[k].first);
    auto& o = outcomes[g];
    o.group = config.groups[g];
    ++o.trials;
    if (errors[k] <= config.epsilon) ++o.passes;
    if (prepared[g][jobs[k].second].converged) ++o.converged;
    errs[g].push_back(errors[k]);
    ms[g].push_back(static_cast<double>(samples[k]));
  }
  for (std::size_t g = 0; g < outcomes.size(); ++g) {
    if (errs[g].empty()) continue;
    outcomes[g].median_eps = median(errs[g]);
    outcomes[g].median_samples = static_cast<std::int64_t>(median(ms[g]));
  }
  return outcomes;
}

namespace {

bool all_pass(const CalibrationConfig& config, const std::vector<GroupOutcome>& outcomes) {
  return std::all_of(outcomes.begin(), outcomes.end(), [&](const GroupOutcome& o) {
    return o.trials > 0 && o.passes >= config.pass_fraction * o.trials;
  });
}

}  // namespace

CalibrationResult calibrate_constant(const CalibrationConfig& config) {
  if (config.groups.empty() || config.trials < 1) throw Error(ErrorCode::InvalidArgument, "calibration needs groups");
  if (!(config.c_lo > 0.0) || !(config.c_hi > config.c_lo)) {
    throw Error(ErrorCode::InvalidArgument, "calibration needs 0 < c_lo < c_hi");
  }
  const auto prepared = prepare_groups(config);

  auto hi_outcomes = evaluate_constant(config, prepared, config.c_hi);
  if (!all_pass(config, hi_outcomes)) {
    throw Error(ErrorCode::InfeasibleParameters, "reference suite fails even at the upper end of the C range");
  }
  double lo = config.c_lo;
  double hi = config.c_hi;
  auto lo_outcomes = evaluate_constant(config, prepared, lo);
  if (all_pass(config, lo_outcomes)) return {lo, std::move(lo_outcomes)};
  while (hi - lo > config.resolution) {
    const double mid = 0.5 * (lo + hi);
    auto outcomes = evaluate_constant(config, prepared, mid);
    if (all_pass(config, outcomes)) {
      hi = mid;
      hi_outcomes = std::move(outcomes);
    } else {
      lo = mid;
    }
  }
  return {hi, std::move(hi_outcomes)};
}

}  // namespace hsparse
