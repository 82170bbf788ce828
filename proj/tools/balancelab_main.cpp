// balancelab: command-line front end for the pairwise balancing simulator.
//
// Subcommands:
//   run       one seeded process, optional step trace / summary / token dump
//   ensemble  many replications in parallel, CSV/JSON reports
//   verify    internal consistency checks (exact arithmetic oracles)
//   fit       scaling regression over saved ensemble reports
//
// Exit codes: 0 success; 1 a run hit its step cap or a check failed;
// 2 bad usage or configuration; 3 file I/O failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "balancelab/checks.hpp"
#include "balancelab/harness.hpp"
#include "balancelab/io.hpp"
#include "balancelab/simulation.hpp"

namespace bl = balancelab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

// Shared knobs of the run/ensemble subcommands.
struct ProcessOpts {
  int n = 0;
  long long m = 0;
  long long d = 0;
  std::string dist = "point";
  std::string file;
  std::string mode = "stack";
  long long c = 10;
  std::uint64_t seed = 1;
  std::optional<long long> step_cap;
  std::string rounding = "away";
};

void add_process_options(CLI::App& sub, ProcessOpts& opts) {
  sub.add_option("--n", opts.n, "Number of nodes");
  sub.add_option("--m", opts.m, "Total number of tokens");
  sub.add_option("--dist", opts.dist, "Initial distribution")
      ->check(CLI::IsMember({"point", "uniform", "bimodal", "explicit"}))
      ->capture_default_str();
  sub.add_option("--d", opts.d, "Bimodal half-gap")->capture_default_str();
  sub.add_option("--file", opts.file, "Loads file for --dist explicit (one integer per line)");
  sub.add_option("--mode", opts.mode, "Token-selection rule")
      ->check(CLI::IsMember({"stack", "skip", "shuffle"}))
      ->capture_default_str();
  sub.add_option("--c", opts.c, "Band constant of the phase analysis")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub.add_option("--seed", opts.seed, "Base seed of the run")
      ->envname("BALANCELAB_SEED")
      ->capture_default_str();
  sub.add_option("--step-cap", opts.step_cap,
                 "Abort threshold in steps (default scales with n and the imbalance)");
  sub.add_option("--rounding", opts.rounding, "Tie rule for the rounded average")
      ->check(CLI::IsMember({"away", "even"}))
      ->capture_default_str();
}

bl::DistributionSpec make_dist(const CLI::App& sub, const ProcessOpts& opts) {
  if (opts.dist == "explicit") {
    if (opts.file.empty()) {
      throw std::invalid_argument("--dist explicit needs --file");
    }
    return bl::DistributionSpec::explicit_vector(bl::read_loads_file(opts.file));
  }
  if (sub.count("--n") == 0 || sub.count("--m") == 0) {
    throw std::invalid_argument("--dist " + opts.dist + " needs --n and --m");
  }
  if (opts.dist == "point") return bl::DistributionSpec::point_mass(opts.n, opts.m);
  if (opts.dist == "uniform") return bl::DistributionSpec::uniform_random(opts.n, opts.m);
  return bl::DistributionSpec::bimodal(opts.n, opts.m, opts.d);
}

bl::BalanceMode make_mode(const ProcessOpts& opts) {
  if (opts.mode == "stack") return bl::BalanceMode::stack();
  if (opts.mode == "skip") return bl::BalanceMode::skip();
  return bl::BalanceMode::shuffle_stack(opts.c);
}

bl::RoundingRule make_rounding(const ProcessOpts& opts) {
  return opts.rounding == "even" ? bl::RoundingRule::kHalfToEven
                                 : bl::RoundingRule::kHalfAwayFromZero;
}

// JSON-safe exact integer: plain number while it fits, decimal string beyond.
nlohmann::json json_int128(bl::Int128 v) {
  constexpr bl::Int128 kLimit = static_cast<bl::Int128>(1) << 62;
  if (v > -kLimit && v < kLimit) return static_cast<std::int64_t>(v);
  return bl::int128_to_string(v);
}

nlohmann::json json_phase(const std::optional<long long>& t) {
  if (t) return *t;
  return nullptr;
}

std::string digest_hex(const bl::LoadVector& lv) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(bl::fnv1a_digest(lv)));
  return buf;
}

struct RunOpts {
  ProcessOpts proc;
  std::uint64_t replication = 0;
  long long fixed_steps = -1;  // <0 means run to balance
  std::string granularity = "auto";
  long long every_k = 1;
  std::string trace_out;
  std::string summary_out;
  std::string tokens_out;
};

void print_summary_line(const char* name, const bl::SummaryStats& s) {
  std::cout << name << ": mean=" << s.mean << " median=" << s.median << " p95=" << s.p95
            << " (over " << s.count << " runs)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized pairwise load balancing laboratory"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value file");

  RunOpts run_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one seeded balancing process");
  add_process_options(*run_cmd, run_opts.proc);
  run_cmd->add_option("--rep", run_opts.replication, "Replication index (stream block)")
      ->capture_default_str();
  run_cmd->add_option("--steps", run_opts.fixed_steps,
                      "Run exactly this many steps instead of stopping at balance");
  run_cmd->add_option("--trace-granularity", run_opts.granularity,
                      "Which steps the trace keeps")
      ->check(CLI::IsMember({"auto", "none", "full", "every", "phases"}))
      ->capture_default_str();
  run_cmd->add_option("--every-k", run_opts.every_k, "Stride for --trace-granularity every")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run_cmd->add_option("--trace-out", run_opts.trace_out, "Write the step trace CSV here");
  run_cmd->add_option("--summary-out", run_opts.summary_out, "Write the run summary JSON here");
  run_cmd->add_option("--tokens-out", run_opts.tokens_out,
                      "Write the final token layout CSV here (forces token instrumentation)");

  ProcessOpts ens_proc;
  int ens_reps = 100;
  int ens_threads = 0;
  std::string ens_csv, ens_json;
  CLI::App* ens_cmd = app.add_subcommand("ensemble", "Run many replications and aggregate");
  add_process_options(*ens_cmd, ens_proc);
  ens_cmd->add_option("--reps", ens_reps, "Number of replications")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ens_cmd->add_option("--threads", ens_threads, "Worker threads (0 = hardware)")
      ->capture_default_str();
  ens_cmd->add_option("--csv-out", ens_csv, "Write the per-replication CSV here");
  ens_cmd->add_option("--json-out", ens_json, "Write the full ensemble JSON here");

  std::vector<std::string> verify_filter;
  std::uint64_t verify_seed = 1;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Run internal consistency checks");
  verify_cmd->add_option("--checks", verify_filter, "Subset of checks to run")
      ->delimiter(',');
  verify_cmd->add_option("--seed", verify_seed, "Seed for the randomized checks")
      ->envname("BALANCELAB_SEED")
      ->capture_default_str();

  std::vector<std::string> fit_files;
  std::string fit_out;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit the balancing-time scaling model");
  fit_cmd->add_option("files", fit_files, "Ensemble JSON reports (one per sweep point)")
      ->required()
      ->expected(-1);
  fit_cmd->add_option("--out", fit_out, "Write the fit JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run_cmd->parsed()) {
      const ProcessOpts& p = run_opts.proc;
      const bl::DistributionSpec dist = make_dist(*run_cmd, p);
      bl::Pcg32 gen(p.seed, bl::stream_for(run_opts.replication, bl::kGenerateChannel));

      bl::RunConfig rc;
      rc.initial = bl::generate_initial(dist, gen);
      rc.mode = make_mode(p);
      rc.c = p.c;
      rc.seed = p.seed;
      rc.replication = run_opts.replication;
      rc.step_cap = p.step_cap;
      rc.rounding = make_rounding(p);
      if (run_opts.fixed_steps >= 0) {
        rc.stop = bl::StopRule::kFixedSteps;
        rc.fixed_steps = run_opts.fixed_steps;
      }
      std::string granularity = run_opts.granularity;
      if (granularity == "auto") granularity = run_opts.trace_out.empty() ? "none" : "full";
      if (granularity == "none") rc.granularity = bl::TraceGranularity::kNone;
      if (granularity == "full") rc.granularity = bl::TraceGranularity::kFull;
      if (granularity == "every") rc.granularity = bl::TraceGranularity::kEveryK;
      if (granularity == "phases") rc.granularity = bl::TraceGranularity::kPhaseBoundaries;
      rc.every_k = run_opts.every_k;
      rc.instrument_tokens = !run_opts.tokens_out.empty() ||
                             rc.mode.kind != bl::BalanceMode::Kind::kStack;

      const bl::RunResult rr = bl::run(rc);

      if (!run_opts.trace_out.empty()) bl::write_trace_csv(run_opts.trace_out, rr.trace);
      if (!run_opts.tokens_out.empty()) {
        std::ofstream out(run_opts.tokens_out);
        if (!out) throw std::runtime_error("cannot open for writing: " + run_opts.tokens_out);
        const bl::TokenLayout& layout = *rr.final_layout;
        const long long ravg = bl::rounded_average(rr.final_state, rc.rounding);
        out << "token,node,height,normalized_height\n";
        for (int id = 0; id < static_cast<int>(layout.token_count()); ++id) {
          out << id << ',' << layout.node_of(id) << ',' << layout.height_of(id) << ','
              << bl::normalized_height(layout, id, ravg) << '\n';
        }
      }
      if (!run_opts.summary_out.empty()) {
        nlohmann::json j;
        j["config"] = {
            {"n", rc.initial.n()},
            {"m", rc.initial.total()},
            {"dist", p.dist},
            {"mode", p.mode},
            {"c", p.c},
            {"seed", p.seed},
            {"replication", run_opts.replication},
            {"step_cap", rc.step_cap ? nlohmann::json(*rc.step_cap) : nlohmann::json(nullptr)},
            {"rounding", p.rounding},
            {"stop", rc.stop == bl::StopRule::kFixedSteps ? "fixed-steps" : "almost-balanced"},
        };
        const bl::DerivedQuantities dq = bl::derive(rr.final_state, rc.rounding);
        nlohmann::json samples = nlohmann::json::array();
        if (!rr.trace.empty()) {
          const std::size_t last = rr.trace.size() - 1;
          std::size_t prev_index = rr.trace.size();  // sentinel
          for (int s = 0; s <= 32; ++s) {
            const std::size_t i = last * static_cast<std::size_t>(s) / 32;
            if (i == prev_index) continue;
            prev_index = i;
            samples.push_back({{"t", rr.trace[i].rec.t},
                               {"phi_times_n2", json_int128(rr.trace[i].phi_scaled)}});
          }
        }
        j["result"] = {
            {"steps", rr.steps},
            {"capped", rr.capped},
            {"t1", json_phase(rr.phases.t1)},
            {"t2", json_phase(rr.phases.t2)},
            {"t3", json_phase(rr.phases.t3)},
            {"initial_discrepancy", rr.initial_delta},
            {"final",
             {{"digest", digest_hex(rr.final_state)},
              {"max", rr.final_state.max_load()},
              {"min", rr.final_state.min_load()},
              {"discrepancy", dq.discrepancy},
              {"rounded_average", dq.rounded_average}}},
            {"phi_samples", std::move(samples)},
        };
        std::ofstream out(run_opts.summary_out);
        if (!out) throw std::runtime_error("cannot open for writing: " + run_opts.summary_out);
        out << j.dump(2) << "\n";
      }

      std::cout << "steps=" << rr.steps << " capped=" << (rr.capped ? "yes" : "no");
      auto show = [](const char* name, const std::optional<long long>& t) {
        std::cout << ' ' << name << '=';
        if (t) {
          std::cout << *t;
        } else {
          std::cout << '-';
        }
      };
      show("t1", rr.phases.t1);
      show("t2", rr.phases.t2);
      show("t3", rr.phases.t3);
      std::cout << " max=" << rr.final_state.max_load() << " min=" << rr.final_state.min_load()
                << " digest=" << digest_hex(rr.final_state) << "\n";
      return rr.capped ? kExitFailure : kExitOk;
    }

    if (ens_cmd->parsed()) {
      bl::ExperimentConfig ec;
      ec.dist = make_dist(*ens_cmd, ens_proc);
      ec.mode = make_mode(ens_proc);
      ec.c = ens_proc.c;
      ec.seed = ens_proc.seed;
      ec.replications = ens_reps;
      ec.step_cap = ens_proc.step_cap;
      ec.rounding = make_rounding(ens_proc);
      ec.threads = ens_threads;
      const bl::EnsembleResult result = bl::run_ensemble(ec);
      if (!ens_csv.empty()) bl::write_ensemble_csv(ens_csv, result);
      if (!ens_json.empty()) bl::write_ensemble_json(ens_json, result);
      std::cout << "n=" << result.n << " m=" << result.m << " dist=" << result.dist
                << " reps=" << result.replications << " cap_hits=" << result.cap_hits
                << " delta0_median=" << result.delta0_median << "\n";
      print_summary_line("t1", result.t1);
      print_summary_line("t2", result.t2);
      print_summary_line("t3", result.t3);
      return result.cap_hits == 0 ? kExitOk : kExitFailure;
    }

    if (verify_cmd->parsed()) {
      const std::vector<bl::CheckResult> results = bl::run_checks(verify_filter, verify_seed);
      bool all_pass = true;
      for (const bl::CheckResult& r : results) {
        all_pass = all_pass && r.pass;
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.instances
                  << " instances, " << r.violations << " violations";
        if (!r.detail.empty()) std::cout << " — " << r.detail;
        std::cout << "\n";
      }
      return all_pass ? kExitOk : kExitFailure;
    }

    // fit
    std::vector<bl::EnsembleResult> sweep;
    sweep.reserve(fit_files.size());
    for (const std::string& f : fit_files) sweep.push_back(bl::read_ensemble_json(f));
    const bl::ScalingFit fit = bl::fit_scaling(sweep);
    if (!fit_out.empty()) bl::write_scaling_fit_json(fit_out, fit);
    std::cout << "points=" << fit.x.size() << " slope=" << fit.slope
              << " intercept=" << fit.intercept << " r_squared=" << fit.r_squared << "\n";
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}
