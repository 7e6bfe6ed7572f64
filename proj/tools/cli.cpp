#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hsparse/balancer.hpp"
#include "hsparse/bench.hpp"
#include "hsparse/calibration.hpp"
#include "hsparse/error.hpp"
#include "hsparse/io.hpp"
#include "hsparse/sampler.hpp"
#include "hsparse/verifier.hpp"

namespace hsparse::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); }

// Flags shared by several subcommands.
struct Common {
  std::string seed_text = "1";
  double tol = 1e-2;
  int max_iters = 500;
  double support_eps = 1e-6;
  double epsilon = 0.5;
  double constant_c = kDefaultConstantC;
  std::optional<std::int64_t> m_override;
  std::string out;
  std::string format = "json";

  Seed seed() const { return parse_seed(seed_text); }
  BalanceOptions balance_options() const {
    BalanceOptions o;
    o.tol = tol;
    o.max_iters = max_iters;
    o.support_eps = support_eps;
    return o;
  }
};

void add_seed(CLI::App* app, Common& c) { app->add_option("--seed", c.seed_text, "64-bit seed, decimal or 0x-hex"); }
void add_balance_flags(CLI::App* app, Common& c) {
  app->add_option("--tol", c.tol, "stop once K <= 1 + tol")->check(CLI::PositiveNumber);
  app->add_option("--max-iters", c.max_iters, "balancer iteration cap")->check(CLI::NonNegativeNumber);
  app->add_option("--support-eps", c.support_eps, "coordinates above support-eps * w_e count toward K")
      ->check(CLI::NonNegativeNumber);
}
void add_sampling_flags(CLI::App* app, Common& c) {
  app->add_option("--epsilon", c.epsilon, "target approximation error")->check(CLI::Range(0.0, 1.0));
  app->add_option("--constant-C", c.constant_c, "sample-size constant C")->check(CLI::PositiveNumber);
  app->add_option("--M", c.m_override, "sample count override (skips the size formula)")->check(CLI::PositiveNumber);
}
void add_format(CLI::App* app, Common& c) {
  app->add_option("--format", c.format, "report format")->check(CLI::IsMember({"json", "csv"}));
}

// Flat report printed as a JSON object or a two-line CSV.
void emit(std::ostream& out, const std::string& format, const json& report) {
  if (format == "json") {
    out << report.dump(2) << '\n';
    return;
  }
  std::string header;
  std::string row;
  for (auto it = report.begin(); it != report.end(); ++it) {
    if (it->is_structured()) continue;
    if (!header.empty()) {
      header += ',';
      row += ',';
    }
    header += it.key();
    if (it->is_string()) {
      row += it->get<std::string>();
    } else if (it->is_number_float()) {
      row += format_double(it->get<double>());
    } else {
      row += it->dump();
    }
  }
  out << header << '\n' << row << '\n';
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json error_report_json(const ErrorReport& r) {
  return {{"empirical_eps", r.max_relative_error},
          {"argmax_class", std::string(to_string(r.argmax))},
          {"num_directions", r.num_directions},
          {"exhaustive_cuts", r.exhaustive_cuts},
          {"cut_eps", optional_number(r.cut_error)}};
}

void warn_if_unconverged(const BalanceReport& report, std::ostream& err) {
  if (!report.converged) {
    err << "warning: NotConverged: balancer stopped after " << report.iterations << " iterations with K = "
        << report.final_k << (report.stalled ? " (line search stalled)" : "") << "; proceeding with best iterate\n";
  }
}

std::vector<std::size_t> sampled_edge_list(const Sparsifier& s) {
  std::vector<std::size_t> edges;
  for (const auto& se : s.edges) edges.push_back(se.edge);
  return edges;
}

struct Commands {
  Common common;

  // gen
  int n = 0;
  int m = 0;
  int max_card = 2;
  double weight_lo = 1.0;
  double weight_hi = 1.0;

  // shared inputs
  std::string input;
  std::string sparsifier;
  std::string record;
  double target = 0.5;
  std::int64_t directions = 2000;

  // diag
  int gaussians = 2000;
  int norm_trials = 1000;
  int sign_draws = 200;

  // bench
  std::vector<int> bench_n{64};
  std::vector<int> bench_m{200};
  std::vector<int> bench_d{2, 4, 16};
  std::vector<double> bench_eps{0.5};
  int trials = 1;
  std::optional<double> bisect_target;
  bool calibrate = false;
  int threads = 0;
  bool trials_given = false;
  bool directions_given = false;

  int gen(std::ostream& out, std::ostream& err) {
    if (common.out.empty()) throw Error(ErrorCode::InvalidArgument, "gen needs --out");
    const auto g = random_hypergraph({n, m, max_card, weight_lo, weight_hi, common.seed()});
    json meta = {{"generator", "random_hypergraph"}, {"seed", common.seed()}, {"m_requested", m},
                 {"max_card", max_card}, {"connecting_edges_added", g.connecting_edges_added}};
    write_hypergraph_file(common.out, g.hypergraph, meta);
    out << "n=" << g.hypergraph.num_vertices() << " m=" << g.hypergraph.num_edges() << " D=" << g.hypergraph.rank()
        << '\n';
    if (g.connecting_edges_added > 0) {
      err << "note: appended " << g.connecting_edges_added << " bridge edges to connect the clique expansion\n";
    }
    return kSuccess;
  }

  int balance_cmd(std::ostream& out, std::ostream& err) {
    const auto h = read_hypergraph_file(input).hypergraph;
    const auto result = balance(h, common.balance_options());
    warn_if_unconverged(result.report, err);
    const auto& r = result.report;
    json report = {{"n", h.num_vertices()},
                   {"m", h.num_edges()},
                   {"D", h.rank()},
                   {"iterations", r.iterations},
                   {"converged", r.converged},
                   {"stalled", r.stalled},
                   {"K", r.final_k},
                   {"Z", r.final_z},
                   {"Phi", r.objective_trace.back()},
                   {"support_eps", r.support_eps}};
    if (!common.out.empty()) {
      json edges = json::array();
      const auto& layout = result.split.layout();
      for (std::size_t e = 0; e < h.num_edges(); ++e) {
        json pairs = json::array();
        const auto values = result.split.of_edge(e);
        const auto idx = layout.pairs_of(e);
        for (std::size_t k = 0; k < idx.size(); ++k) {
          const auto& p = layout.pairs[idx[k]];
          pairs.push_back({{"i", p.i}, {"j", p.j}, {"c", values[k]}, {"slack", r.zero_mass_slack[layout.edge_offsets[e] + k]}});
        }
        edges.push_back({{"edge", e}, {"alpha", r.alpha[e]}, {"pairs", pairs}});
      }
      json full = report;
      full["objective_trace"] = r.objective_trace;
      full["split"] = edges;
      write_text_file(common.out, full.dump(1) + "\n");
    }
    emit(out, common.format, report);
    return kSuccess;
  }

  int sparsify(std::ostream& out, std::ostream& err) {
    if (common.out.empty()) throw Error(ErrorCode::InvalidArgument, "sparsify needs --out");
    if (!(common.epsilon > 0.0 && common.epsilon < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1)");
    }
    const Seed seed = common.seed();
    const auto h = read_hypergraph_file(input).hypergraph;

    auto t0 = Clock::now();
    const auto balanced = balance(h, common.balance_options());
    const double ms_balance = ms_since(t0);
    warn_if_unconverged(balanced.report, err);

    t0 = Clock::now();
    const auto plan = build_plan(h, balanced.split);
    const std::int64_t samples =
        common.m_override ? *common.m_override
                          : sample_count(h.num_vertices(), h.rank(), plan.z, common.epsilon, common.constant_c);
    const double ms_plan = ms_since(t0);

    t0 = Clock::now();
    const auto sparse = draw(h, plan, samples, derive_seed(seed, 1));
    const auto sparse_h = sparse.to_hypergraph(h);
    const double ms_draw = ms_since(t0);

    t0 = Clock::now();
    const auto report = empirical_epsilon(h, sparse_h, directions, derive_seed(seed, 2));
    const double ms_verify = ms_since(t0);

    json source_edges = json::array();
    json counts = json::array();
    for (const auto& se : sparse.edges) {
      source_edges.push_back(se.edge);
      counts.push_back(se.count);
    }
    json meta = {{"seed", seed},           {"M", samples},          {"C", common.constant_c},
                 {"tol", common.tol},      {"epsilon", common.epsilon}, {"source_edges", source_edges},
                 {"counts", counts}};
    write_hypergraph_file(common.out, sparse_h, meta);

    json rec = {{"n", h.num_vertices()},
                {"m", h.num_edges()},
                {"D", h.rank()},
                {"epsilon", common.epsilon},
                {"C", common.constant_c},
                {"tol", common.tol},
                {"seed", seed},
                {"M", samples},
                {"M_override", common.m_override.has_value()},
                {"distinct_edges", sparse.distinct_edges()},
                {"empirical_eps", report.max_relative_error},
                {"cut_eps", optional_number(report.cut_error)},
                {"directions", report.num_directions},
                {"K", balanced.report.final_k},
                {"Z", plan.z},
                {"Phi", balanced.report.objective_trace.back()},
                {"converged", balanced.report.converged},
                {"balance_iterations", balanced.report.iterations},
                {"ms_balance", ms_balance},
                {"ms_plan", ms_plan},
                {"ms_draw", ms_draw},
                {"ms_verify", ms_verify}};
    json full = rec;
    full["mu"] = plan.mu;
    full["r_max"] = plan.r_max;
    const std::string sidecar = record.empty() ? common.out + ".run.json" : record;
    write_text_file(sidecar, full.dump(1) + "\n");
    emit(out, common.format, rec);
    return kSuccess;
  }

  int verify(std::ostream& out, std::ostream&) {
    const auto h = read_hypergraph_file(input).hypergraph;
    const auto sparse = read_hypergraph_file(sparsifier).hypergraph;
    if (h.num_vertices() != sparse.num_vertices()) {
      throw Error(ErrorCode::DimensionMismatch, "input and sparsifier have different vertex counts");
    }
    const auto report = empirical_epsilon(h, sparse, directions, common.seed());
    json j = error_report_json(report);
    j["target"] = target;
    j["pass"] = report.max_relative_error <= target;
    emit(out, common.format, j);
    return report.max_relative_error <= target ? kSuccess : kVerificationFailed;
  }

  int diag(std::ostream& out, std::ostream& err) {
    const Seed seed = common.seed();
    const auto h = read_hypergraph_file(input).hypergraph;
    const auto balanced = balance(h, common.balance_options());
    warn_if_unconverged(balanced.report, err);
    const auto plan = build_plan(h, balanced.split);
    const std::int64_t samples =
        common.m_override ? *common.m_override
                          : sample_count(h.num_vertices(), h.rank(), plan.z, common.epsilon, common.constant_c);
    const auto sparse = draw(h, plan, samples, derive_seed(seed, 1));
    const auto chain =
        chaining_diagnostics(h, balanced.split, plan, sampled_edge_list(sparse), gaussians, derive_seed(seed, 3));
    const auto norm = norm_domination_check(h, balanced.split, norm_trials, derive_seed(seed, 4));
    const auto sign = sign_process_diagnostic(h, plan, sparse, sign_draws, 200, derive_seed(seed, 5));
    json j = {{"n", h.num_vertices()},
              {"m", h.num_edges()},
              {"D", h.rank()},
              {"K", balanced.report.final_k},
              {"Z", plan.z},
              {"converged", balanced.report.converged},
              {"M", samples},
              {"distinct_edges", sparse.distinct_edges()},
              {"kappa", chain.kappa},
              {"kappa_se", chain.kappa_se},
              {"lambda", chain.lambda},
              {"lambda_se", chain.lambda_se},
              {"max_mean_norm", chain.max_mean_norm},
              {"A_2_to_inf", chain.a_two_to_inf},
              {"A_bound_holds", chain.a_bound_holds},
              {"gaussians", chain.num_gaussians},
              {"norm_domination_holds", norm.holds},
              {"norm_domination_worst_ratio", norm.worst_ratio},
              {"sign_process_mean_sup", sign.mean_sup},
              {"sign_process_se", sign.std_error}};
    emit(out, common.format, j);
    return kSuccess;
  }

  int bench(std::ostream& out, std::ostream& err) {
    if (calibrate) return run_calibration(out);
    BenchConfig cfg;
    cfg.n = bench_n;
    cfg.m = bench_m;
    cfg.max_card = bench_d;
    cfg.epsilon = bench_eps;
    cfg.trials = trials;
    cfg.constant_c = common.constant_c;
    cfg.balance = common.balance_options();
    cfg.weight_lo = weight_lo;
    cfg.weight_hi = weight_hi;
    cfg.directions = directions;
    cfg.m_override = common.m_override;
    cfg.seed = common.seed();
    cfg.out = common.out;
    cfg.threads = threads;
    if (cfg.out.empty()) throw Error(ErrorCode::InvalidArgument, "bench needs --out");

    if (bisect_target) {
      const auto records = run_bisect(cfg, *bisect_target);
      const auto trend = trend_report(records);
      out << std::setw(6) << "D" << std::setw(12) << "min_M" << std::setw(14) << "affine_fit" << '\n';
      for (std::size_t k = 0; k < trend.max_card.size(); ++k) {
        out << std::setw(6) << trend.max_card[k] << std::setw(12) << trend.min_samples[k] << std::setw(14)
            << std::fixed << std::setprecision(1) << trend.fitted[k] << '\n';
      }
      out << std::defaultfloat << "slope_per_lnD=" << trend.fit.slope << " intercept=" << trend.fit.intercept
          << " worst_fit_factor=" << trend.worst_fit_factor << " nondecreasing=" << (trend.nondecreasing ? 1 : 0)
          << '\n';
      for (const auto& r : records) {
        if (r.status != "ok") err << "cell " << r.cell << " failed: " << r.message << '\n';
      }
      return kSuccess;
    }
    const auto summary = run_bench(cfg);
    out << "rows_written=" << summary.written << " rows_skipped=" << summary.skipped
        << " rows_failed=" << summary.failed << '\n';
    return kSuccess;
  }

  int run_calibration(std::ostream& out) {
    CalibrationConfig cfg;
    cfg.groups = {{64, 2000, 2, false}, {64, 2000, 4, false}, {64, 2000, 16, false},
                  {12, 200, 2, true},   {12, 200, 4, true},   {12, 200, 8, true}};
    cfg.epsilon = bench_eps.front();
    if (trials_given) cfg.trials = trials;
    if (directions_given) cfg.directions = directions;
    cfg.balance = common.balance_options();
    cfg.seed = common.seed();
    cfg.threads = threads;
    const auto result = calibrate_constant(cfg);
    json groups = json::array();
    for (const auto& o : result.outcomes) {
      groups.push_back({{"n", o.group.n},
                        {"m", o.group.m},
                        {"D", o.group.max_card},
                        {"exhaustive_cuts", o.group.exhaustive_cuts},
                        {"passes", o.passes},
                        {"trials", o.trials},
                        {"median_eps", o.median_eps},
                        {"median_M", o.median_samples},
                        {"balanced", o.converged}});
    }
    json j = {{"constant_C", result.constant_c}, {"epsilon", cfg.epsilon}, {"trials", cfg.trials},
              {"directions", cfg.directions},    {"seed", cfg.seed},       {"groups", groups}};
    if (!common.out.empty()) write_text_file(common.out, j.dump(2) + "\n");
    out << j.dump(2) << '\n';
    return kSuccess;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral hypergraph sparsification by balanced effective resistances", "hsparse"};
  app.require_subcommand(1);
  Commands c;
  auto& common = c.common;

  auto* gen = app.add_subcommand("gen", "generate a random connected hypergraph");
  gen->add_option("--n", c.n, "vertex count")->required()->check(CLI::PositiveNumber);
  gen->add_option("--m", c.m, "hyperedge count")->required()->check(CLI::PositiveNumber);
  gen->add_option("--max-card", c.max_card, "max hyperedge cardinality D (>= 2)")->check(CLI::Range(2, 1 << 20));
  gen->add_option("--weight-lo", c.weight_lo, "lower end of the weight range")->check(CLI::PositiveNumber);
  gen->add_option("--weight-hi", c.weight_hi, "upper end of the weight range")->check(CLI::PositiveNumber);
  add_seed(gen, common);
  gen->add_option("--out", common.out, "output hypergraph file")->required();

  auto* bal = app.add_subcommand("balance", "balance effective resistances (log-det program)");
  bal->add_option("--input", c.input, "hypergraph file")->required();
  add_balance_flags(bal, common);
  bal->add_option("--out", common.out, "write the split and objective trace as JSON");
  add_format(bal, common);

  auto* sp = app.add_subcommand("sparsify", "balance, sample and reweight hyperedges");
  sp->add_option("--input", c.input, "hypergraph file")->required();
  add_balance_flags(sp, common);
  add_sampling_flags(sp, common);
  add_seed(sp, common);
  sp->add_option("--out", common.out, "output sparsifier file")->required();
  sp->add_option("--record", c.record, "run-record sidecar (default <out>.run.json)");
  sp->add_option("--directions", c.directions, "random directions for the empirical epsilon")
      ->check(CLI::PositiveNumber);
  add_format(sp, common);

  auto* ver = app.add_subcommand("verify", "empirically certify a sparsifier");
  ver->add_option("--input", c.input, "original hypergraph file")->required();
  ver->add_option("--sparsifier", c.sparsifier, "sparsifier file")->required();
  ver->add_option("--target", c.target, "pass iff empirical epsilon <= target")->check(CLI::NonNegativeNumber);
  ver->add_option("--directions", c.directions, "random directions")->check(CLI::PositiveNumber);
  add_seed(ver, common);
  add_format(ver, common);

  auto* bench = app.add_subcommand("bench", "sweep instance sizes and record sparsifier quality as CSV");
  bench->add_option("--n", c.bench_n, "vertex counts")->delimiter(',');
  bench->add_option("--m", c.bench_m, "hyperedge counts")->delimiter(',');
  bench->add_option("--max-card", c.bench_d, "max cardinalities D")->delimiter(',');
  bench->add_option("--epsilon", c.bench_eps, "target epsilons")->delimiter(',');
  bench->add_option("--trials", c.trials, "trials per cell")->check(CLI::PositiveNumber);
  bench->add_option("--constant-C", common.constant_c, "sample-size constant C")->check(CLI::PositiveNumber);
  bench->add_option("--M", common.m_override, "sample count override")->check(CLI::PositiveNumber);
  bench->add_option("--weight-lo", c.weight_lo, "lower end of the weight range")->check(CLI::PositiveNumber);
  bench->add_option("--weight-hi", c.weight_hi, "upper end of the weight range")->check(CLI::PositiveNumber);
  bench->add_option("--directions", c.directions, "random directions per verification")->check(CLI::PositiveNumber);
  bench->add_option("--bisect-target", c.bisect_target, "find the minimal M reaching this epsilon per cell")
      ->check(CLI::Range(0.0, 1.0));
  bench->add_flag("--calibrate", c.calibrate, "calibrate C on the reference suite instead of sweeping");
  bench->add_option("--threads", c.threads, "worker count (default: HSPARSE_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  add_balance_flags(bench, common);
  add_seed(bench, common);
  bench->add_option("--out", common.out, "output CSV (appended to and resumed if present)");

  auto* dg = app.add_subcommand("diag", "chaining diagnostics, norm domination and sign-process estimates");
  dg->add_option("--input", c.input, "hypergraph file")->required();
  add_balance_flags(dg, common);
  add_sampling_flags(dg, common);
  add_seed(dg, common);
  dg->add_option("--gaussians", c.gaussians, "Gaussian samples for kappa / lambda")->check(CLI::Range(2, 1 << 24));
  dg->add_option("--norm-trials", c.norm_trials, "random directions for norm domination")
      ->check(CLI::PositiveNumber);
  dg->add_option("--sign-draws", c.sign_draws, "sign vectors for the sign process")->check(CLI::Range(2, 1 << 24));
  add_format(dg, common);

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  }

  c.trials_given = bench->count("--trials") > 0;
  c.directions_given = bench->count("--directions") > 0;

  try {
    if (gen->parsed()) return c.gen(out, err);
    if (bal->parsed()) return c.balance_cmd(out, err);
    if (sp->parsed()) return c.sparsify(out, err);
    if (ver->parsed()) return c.verify(out, err);
    if (bench->parsed()) return c.bench(out, err);
    if (dg->parsed()) return c.diag(out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_numeric() ? kNumericFailure : kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericFailure;
  }
  return kUsageError;
}

}  // namespace hsparse::cli
