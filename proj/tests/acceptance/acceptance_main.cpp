// End-to-end acceptance gate. Each criterion prints one [PASS]/[FAIL] line;
// the binary exits nonzero if any criterion fails. Every numeric claim is
// re-verified here from raw data with exact arithmetic, independently of the
// library's own bookkeeping wherever practical.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "balancelab/checks.hpp"
#include "balancelab/harness.hpp"
#include "balancelab/metrics.hpp"
#include "balancelab/process.hpp"
#include "balancelab/rational.hpp"
#include "balancelab/simulation.hpp"

using namespace balancelab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1fs", s);
  return buf;
}

// --- 1: exact oracles for the split, the drop, the identity, the bound ----

bool exact_oracle_suite(std::string& detail) {
  const auto start = Clock::now();
  Pcg32 rng(20240817, stream_for(0, kGenerateChannel));
  long long vectors = 0;
  long long pair_checks = 0;
  long long violations = 0;

  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.bounded(19));
    LoadVector lv;
    lv.loads.resize(static_cast<std::size_t>(n));
    for (auto& v : lv.loads) v = rng.bounded(101);
    ++vectors;

    const Rational phi = potential(lv);

    // The unordered-pair square sum equals n times the potential.
    if (!pairwise_square_sum_identity(lv)) ++violations;

    // The exhaustive one-step expectation respects (1 - 1/n) phi + 1/2.
    const Rational expected = expected_potential_after_step(lv);
    const Rational bound = phi * Rational(n - 1, n) + Rational(1, 2);
    if (expected > bound) ++violations;

    // The closed-form drop equals phi-before minus phi-after for all pairs,
    // and the split conserves the pair sum.
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const DropValue drop = potential_drop(lv, i, j);
        LoadVector after = lv;
        const auto split = balance_pair(lv.loads[static_cast<std::size_t>(i)],
                                        lv.loads[static_cast<std::size_t>(j)]);
        after.loads[static_cast<std::size_t>(i)] = split.first;
        after.loads[static_cast<std::size_t>(j)] = split.second;
        if (after.total() != lv.total()) ++violations;
        if (phi - potential(after) != drop.delta) ++violations;
        ++pair_checks;
      }
    }
  }

  const double elapsed = seconds_since(start);
  std::ostringstream os;
  os << vectors << " vectors, " << pair_checks << " pair drops, " << violations
     << " violations (" << fmt_seconds(elapsed) << ")";
  detail = os.str();
  return violations == 0 && elapsed < 10.0;
}

// --- 2: per-step monotonicity of full traces ------------------------------

bool trace_monotonicity(std::string& detail) {
  long long steps_checked = 0;
  long long violations = 0;

  for (int rep = 0; rep < 100; ++rep) {
    Pcg32 gen(20240817, stream_for(static_cast<std::uint64_t>(rep), kGenerateChannel));
    RunConfig rc;
    rc.initial = generate_initial(DistributionSpec::point_mass(32, 1024), gen);
    rc.seed = 20240817;
    rc.replication = static_cast<std::uint64_t>(rep);
    rc.granularity = TraceGranularity::kFull;
    const RunResult rr = run(rc);
    if (rr.capped) ++violations;

    LoadVector shadow = rc.initial;
    Int128 prev_phi = potential_scaled(shadow);
    long long prev_max = shadow.max_load();
    long long prev_min = shadow.min_load();
    for (const TraceRow& row : rr.trace) {
      const StepRecord& rec = row.rec;
      const auto u = static_cast<std::size_t>(rec.pair.u);
      const auto v = static_cast<std::size_t>(rec.pair.v);
      if (shadow.loads[u] != rec.load_u_before || shadow.loads[v] != rec.load_v_before)
        ++violations;
      const auto split = balance_pair(rec.load_u_before, rec.load_v_before);
      if (split.first != rec.load_u_after || split.second != rec.load_v_after) ++violations;
      shadow.loads[u] = rec.load_u_after;
      shadow.loads[v] = rec.load_v_after;

      if (shadow.total() != 1024) ++violations;
      if (potential_scaled(shadow) != row.phi_scaled) ++violations;
      if (shadow.max_load() != row.max || shadow.min_load() != row.min) ++violations;
      if (row.phi_scaled > prev_phi) ++violations;
      if (row.max > prev_max) ++violations;
      if (row.min < prev_min) ++violations;
      prev_phi = row.phi_scaled;
      prev_max = row.max;
      prev_min = row.min;
      ++steps_checked;
    }
    if (shadow.loads != rr.final_state.loads) ++violations;
  }

  std::ostringstream os;
  os << "100 traces, " << steps_checked << " steps, " << violations << " violations";
  detail = os.str();
  return violations == 0;
}

// --- 3: every uncapped run ends inside the three-value band ---------------

// Integer nearest to total/n computed from scratch with rational arithmetic
// (non-negative totals only, which is all the sweep produces).
Int128 band_center_oracle(long long total, int n, RoundingRule rule) {
  Int128 f = static_cast<Int128>(total) / n;
  const Rational avg(total, n);
  const Rational frac = avg - Rational(f, 1);
  if (frac < Rational(1, 2)) return f;
  if (frac > Rational(1, 2)) return f + 1;
  if (rule == RoundingRule::kHalfAwayFromZero) return f + 1;
  return (f % 2 == 0) ? f : f + 1;
}

bool termination_band(std::string& detail) {
  Pcg32 meta(20240818, stream_for(0, kGenerateChannel));
  long long runs = 0;
  long long violations = 0;

  for (int k = 0; k < 1000; ++k) {
    const int shape = k % 3;
    DistributionSpec spec;
    if (shape == 0) {
      const int n = 2 + static_cast<int>(meta.bounded(63));
      spec = DistributionSpec::point_mass(n, 1 + meta.bounded(4000));
    } else if (shape == 1) {
      const int n = 2 + static_cast<int>(meta.bounded(63));
      spec = DistributionSpec::uniform_random(n, meta.bounded(4000));
    } else {
      const int n = 2 * (1 + static_cast<int>(meta.bounded(32)));
      const long long avg = 1 + meta.bounded(60);
      spec = DistributionSpec::bimodal(n, n * avg, meta.bounded(static_cast<std::uint32_t>(avg + 1)));
    }

    RunConfig rc;
    Pcg32 gen(9000 + static_cast<std::uint64_t>(k), stream_for(0, kGenerateChannel));
    rc.initial = generate_initial(spec, gen);
    rc.seed = 9000 + static_cast<std::uint64_t>(k);
    rc.rounding = (k % 2 == 0) ? RoundingRule::kHalfAwayFromZero : RoundingRule::kHalfToEven;
    rc.granularity = TraceGranularity::kNone;
    const long long total_before = rc.initial.total();
    const RunResult rr = run(rc);
    ++runs;

    if (rr.capped) {
      ++violations;
      continue;
    }
    const LoadVector& fin = rr.final_state;
    if (fin.total() != total_before) ++violations;
    const Int128 center = round_nearest(static_cast<Int128>(fin.total()), fin.n(), rc.rounding);
    if (center != band_center_oracle(fin.total(), fin.n(), rc.rounding)) ++violations;
    for (long long load : fin.loads) {
      const Int128 l = load;
      if (l < center - 1 || l > center + 1) ++violations;
    }
  }

  std::ostringstream os;
  os << runs << " uncapped runs re-verified, " << violations << " violations";
  detail = os.str();
  return violations == 0;
}

// --- 4: settling time scales linearly in n log n + n log delta ------------

bool scaling_law(std::string& detail) {
  const auto start = Clock::now();
  std::vector<EnsembleResult> sweep;
  for (int n : {16, 32, 64, 128}) {
    ExperimentConfig ec;
    ec.dist = DistributionSpec::point_mass(n, static_cast<long long>(n) * n);
    ec.seed = 777;
    ec.replications = 200;
    ec.threads = 0;  // hardware concurrency
    sweep.push_back(run_ensemble(ec));
  }
  long long cap_hits = 0;
  for (const EnsembleResult& e : sweep) cap_hits += e.cap_hits;
  const ScalingFit fit = fit_scaling(sweep);
  const double elapsed = seconds_since(start);

  std::ostringstream os;
  os << "R^2=" << fit.r_squared << " slope=" << fit.slope << " over 4x200 runs, cap_hits="
     << cap_hits << " (" << fmt_seconds(elapsed) << ")";
  detail = os.str();
  return fit.r_squared >= 0.95 && fit.slope > 0 && cap_hits == 0 && elapsed < 300.0;
}

// --- 5: exhaustive reduction-event mass for tall stacks -------------------

bool reduction_event_mass(std::string& detail) {
  const CheckResult r = check_reduction_event_mass(200, 20240819);
  std::ostringstream os;
  os << r.instances << " configurations enumerated, " << r.violations << " below the 1/n mass";
  if (!r.detail.empty()) os << " — " << r.detail;
  detail = os.str();
  return r.pass && r.instances == 200;
}

// --- 6: the token-selection mode never influences the load process --------

bool mode_equivalence(std::string& detail) {
  const CheckResult r = check_mode_equivalence(50, 16, 256, 10000, 20240820);
  std::ostringstream os;
  os << r.instances << "/50 instances identical across the three modes, " << r.violations
     << " diverged";
  if (!r.detail.empty()) os << " — " << r.detail;
  detail = os.str();
  return r.pass && r.instances == 50;
}

// --- 7: negating the vector and swapping pair order mirrors the run -------

bool negation_coupling(std::string& detail) {
  Pcg32 rng(20240821, stream_for(0, kGenerateChannel));
  int held = 0;
  for (int k = 0; k < 50; ++k) {
    const int n = 2 + static_cast<int>(rng.bounded(23));
    LoadVector lv;
    lv.loads.resize(static_cast<std::size_t>(n));
    for (auto& v : lv.loads) v = static_cast<long long>(rng.bounded(101)) - 50;
    if (coupling_experiment(lv, 1000, 5000 + static_cast<std::uint64_t>(k))) ++held;
  }
  std::ostringstream os;
  os << held << "/50 signed vectors stayed exact mirrors over 1000 steps";
  detail = os.str();
  return held == 50;
}

// --- 8: near the potential floor, under half the nodes are overloaded -----

bool overload_counting(std::string& detail) {
  Pcg32 rng(20240822, stream_for(0, kGenerateChannel));
  long long vectors = 0;
  long long violations = 0;
  long long nonempty = 0;

  for (int trial = 0; trial < 500; ++trial) {
    const int n = 8 + static_cast<int>(rng.bounded(121));
    const long long base = rng.bounded(40);
    LoadVector lv;
    lv.loads.assign(static_cast<std::size_t>(n), base);
    const Int128 budget = static_cast<Int128>(n) * n * n;  // n^2 * phi <= n^3
    const bool spike = (trial % 2 == 0);
    const int attempts = (spike ? 2 : 3) * n;
    for (int a = 0; a < attempts; ++a) {
      const int to = spike ? 0 : static_cast<int>(rng.bounded(static_cast<std::uint32_t>(n)));
      const int from = static_cast<int>(rng.bounded(static_cast<std::uint32_t>(n)));
      if (from == to || lv.loads[static_cast<std::size_t>(from)] == 0) continue;
      lv.loads[static_cast<std::size_t>(from)] -= 1;
      lv.loads[static_cast<std::size_t>(to)] += 1;
      if (potential_scaled(lv) > budget) {
        lv.loads[static_cast<std::size_t>(from)] += 1;
        lv.loads[static_cast<std::size_t>(to)] -= 1;
      }
    }
    ++vectors;
    if (potential_scaled(lv) > budget) ++violations;  // conditioning failed

    const std::vector<int> s = overloaded_set(lv, 10);
    // Independent membership oracle in plain rational arithmetic.
    std::vector<int> oracle;
    const Rational threshold = average_load(lv) + Rational(10);
    for (int i = 0; i < n; ++i)
      if (Rational(lv.loads[static_cast<std::size_t>(i)]) >= threshold) oracle.push_back(i);
    if (s != oracle) ++violations;
    if (2 * static_cast<long long>(s.size()) >= n) ++violations;
    if (!s.empty()) ++nonempty;
  }

  std::ostringstream os;
  os << vectors << " conditioned vectors (" << nonempty << " with a nonempty overloaded set), "
     << violations << " violations";
  detail = os.str();
  return violations == 0;
}

// --- 9: pair selection covers nodes at the expected rate ------------------

bool selection_coverage(std::string& detail) {
  const int n = 256;
  const long long t_half = std::llround((n / 2.0) * std::log(static_cast<double>(n)));
  const long long t_tail = std::llround(8.0 * n * std::log(static_cast<double>(n)));
  const double f_half = selection_coverage_experiment(n, t_half, 500, 31415);
  const double f_tail = selection_coverage_experiment(n, t_tail, 500, 31415);
  std::ostringstream os;
  os << "miss frequency " << f_half << " at t=" << t_half << ", " << f_tail
     << " at t=" << t_tail << " (500 replications)";
  detail = os.str();
  return f_half >= 0.05 && f_half <= 0.95 && f_tail <= 0.01;
}

// --- 10: a floor/floor update is caught by the split cross-check ----------

bool mutation_detection(std::string& detail) {
  const auto floor_floor = [](long long a, long long b) {
    const auto split = balance_pair(a, b);
    return std::pair<long long, long long>{split.second, split.second};
  };
  const CheckResult r = check_split_update(1000, 20240823, floor_floor);
  std::ostringstream os;
  os << "floor/floor flagged on " << r.violations << "/" << r.instances << " cases";
  if (!r.detail.empty()) os << " — first: " << r.detail;
  detail = os.str();
  return !r.pass && r.violations > 0 &&
         r.detail.find("sum not conserved") != std::string::npos;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<bool(std::string&)> fn;
  };
  const std::vector<Criterion> criteria = {
      {"exact oracles (split, drop, identity, expectation bound)", exact_oracle_suite},
      {"trace monotonicity (potential, max, min, conservation)", trace_monotonicity},
      {"termination band re-verified from raw finals", termination_band},
      {"settling-time scaling law", scaling_law},
      {"reduction-event mass under the skip rule", reduction_event_mass},
      {"mode equivalence of the load process", mode_equivalence},
      {"negation coupling", negation_coupling},
      {"overloaded-set counting near the potential floor", overload_counting},
      {"selection coverage rates", selection_coverage},
      {"mutation detection (floor/floor split)", mutation_detection},
  };

  const auto start = Clock::now();
  int failed = 0;
  for (const Criterion& c : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failed;
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << c.name << ": " << detail << "\n";
    std::cout.flush();
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed in " << fmt_seconds(seconds_since(start)) << "\n";
  return failed == 0 ? 0 : 1;
}
