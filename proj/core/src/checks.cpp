#include "balancelab/checks.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <stdexcept>

#include "balancelab/harness.hpp"
#include "balancelab/metrics.hpp"
#include "balancelab/simulation.hpp"

namespace balancelab {

namespace {

LoadVector random_vector(Pcg32& rng, int n_lo, int n_hi, long long max_load) {
  const int n = n_lo + static_cast<int>(rng.bounded(static_cast<std::uint32_t>(n_hi - n_lo + 1)));
  LoadVector lv;
  lv.loads.resize(static_cast<std::size_t>(n));
  for (auto& v : lv.loads) v = rng.bounded(static_cast<std::uint32_t>(max_load + 1));
  return lv;
}

std::string loads_to_string(const LoadVector& lv) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < lv.loads.size(); ++i) {
    if (i != 0) os << ' ';
    os << lv.loads[i];
  }
  os << ']';
  return os.str();
}

void note_violation(CheckResult& r, const std::string& detail) {
  r.violations += 1;
  if (r.detail.empty()) r.detail = detail;
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace

CheckResult check_split_update(int trials, std::uint64_t seed, const PairUpdate& update) {
  CheckResult r;
  r.name = "split";
  Pcg32 rng(seed, stream_for(0, kGenerateChannel));
  for (int trial = 0; trial < trials; ++trial) {
    LoadVector lv = random_vector(rng, 2, 16, 50);
    const int n = lv.n();
    const int i = static_cast<int>(rng.bounded(static_cast<std::uint32_t>(n)));
    int j = static_cast<int>(rng.bounded(static_cast<std::uint32_t>(n - 1)));
    if (j >= i) ++j;
    const long long a = lv.loads[static_cast<std::size_t>(i)];
    const long long b = lv.loads[static_cast<std::size_t>(j)];
    const auto expected = balance_pair(a, b);
    const auto got = update ? update(a, b) : expected;

    r.instances += 1;
    const Int128 before = potential_scaled(lv);
    const DropValue drop = potential_drop(lv, i, j);
    LoadVector after = lv;
    after.loads[static_cast<std::size_t>(i)] = got.first;
    after.loads[static_cast<std::size_t>(j)] = got.second;
    const Int128 after_scaled = potential_scaled(after);

    std::string why;
    if (got.first + got.second != a + b) {
      why = "sum not conserved";
    } else if (got != expected) {
      why = "not the ceiling/floor split";
    } else {
      // Phi(before) - Phi(after) must equal the closed-form drop; compare in
      // the exact n^2-scaled integer domain.
      const Rational lhs(before - after_scaled, 1);
      const Rational rhs = drop.delta * Rational(static_cast<Int128>(n) * n, 1);
      if (lhs != rhs) why = "potential drop mismatch";
    }
    if (!why.empty()) {
      std::ostringstream os;
      os << why << " for pair (" << i << "," << j << ") of " << loads_to_string(lv);
      note_violation(r, os.str());
    }
  }
  r.pass = r.violations == 0;
  return r;
}

CheckResult check_pairwise_identity(int trials, std::uint64_t seed) {
  CheckResult r;
  r.name = "identity";
  Pcg32 rng(seed, stream_for(0, kGenerateChannel));
  for (int trial = 0; trial < trials; ++trial) {
    LoadVector lv = random_vector(rng, 2, 16, 50);
    r.instances += 1;
    if (!pairwise_square_sum_identity(lv)) {
      note_violation(r, "identity failed for " + loads_to_string(lv));
    }
  }
  r.pass = r.violations == 0;
  return r;
}

CheckResult check_expected_drop(int trials, std::uint64_t seed) {
  CheckResult r;
  r.name = "expected-drop";
  Pcg32 rng(seed, stream_for(0, kGenerateChannel));
  for (int trial = 0; trial < trials; ++trial) {
    LoadVector lv = random_vector(rng, 2, 8, 12);
    const int n = lv.n();
    r.instances += 1;
    const Rational phi = potential(lv);
    const Rational expected = expected_potential_after_step(lv);

    Rational drop_sum(0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j) drop_sum += potential_drop(lv, i, j).delta;
      }
    }
    const Rational mean_drop = drop_sum / Rational(static_cast<long long>(n) * (n - 1));
    if (expected != phi - mean_drop) {
      note_violation(r, "expectation disagrees with mean drop for " + loads_to_string(lv));
      continue;
    }
    const Rational bound = Rational(n - 1) / Rational(n) * phi + Rational(1, 2);
    if (!(expected <= bound)) {
      note_violation(r, "expectation bound violated for " + loads_to_string(lv));
    }
  }
  r.pass = r.violations == 0;
  return r;
}

CheckResult check_overload_selection(int trials, std::uint64_t seed) {
  CheckResult r;
  r.name = "overload";

  auto expect = [&r](const LoadVector& lv, long long c, const std::vector<int>& want) {
    r.instances += 1;
    if (overloaded_set(lv, c) != want) {
      note_violation(r, "wrong overloaded set for " + loads_to_string(lv));
    }
  };
  // Pinned instances, including both sides of the >= boundary.
  expect(LoadVector{{16, 0, 0, 0}}, 10, {0});
  expect(LoadVector{{12, 0, 0, 0}}, 10, {});
  expect(LoadVector{{14, 2, 0, 0}}, 10, {0});  // 14 == 16/4 + 10 exactly

  Pcg32 rng(seed, stream_for(0, kGenerateChannel));
  for (int trial = 0; trial < trials; ++trial) {
    LoadVector lv = random_vector(rng, 2, 16, 60);
    const long long c = 1 + rng.bounded(12);
    r.instances += 1;
    const Rational threshold = average_load(lv) + Rational(c);
    std::vector<int> oracle;
    for (int i = 0; i < lv.n(); ++i) {
      if (Rational(lv.loads[static_cast<std::size_t>(i)]) >= threshold) oracle.push_back(i);
    }
    if (overloaded_set(lv, c) != oracle) {
      note_violation(r, "overloaded set disagrees with rational oracle for " +
                            loads_to_string(lv));
    }
  }
  r.pass = r.violations == 0;
  return r;
}

CheckResult check_mode_equivalence(int trials, int n, long long m, long long steps,
                                   std::uint64_t seed) {
  CheckResult r;
  r.name = "modes";
  const std::array<BalanceMode, 3> modes = {BalanceMode::stack(), BalanceMode::skip(),
                                            BalanceMode::shuffle_stack(10)};
  for (int trial = 0; trial < trials; ++trial) {
    Pcg32 gen(seed, stream_for(static_cast<std::uint64_t>(trial), kGenerateChannel));
    const LoadVector initial = generate_initial(DistributionSpec::uniform_random(n, m), gen);
    r.instances += 1;

    std::array<std::uint64_t, 3> hashes{};
    std::array<LoadVector, 3> finals;
    std::array<PhaseTimes, 3> phases;
    bool layout_ok = true;
    for (std::size_t mi = 0; mi < modes.size(); ++mi) {
      RunConfig rc;
      rc.initial = initial;
      rc.mode = modes[mi];
      rc.seed = seed;
      rc.replication = static_cast<std::uint64_t>(trial);
      rc.stop = StopRule::kFixedSteps;
      rc.fixed_steps = steps;
      rc.granularity = TraceGranularity::kNone;
      rc.instrument_tokens = true;
      std::uint64_t h = 1469598103934665603ULL;
      auto observer = [&](const StepRecord& rec, const PhaseDetector&, const TokenLayout* layout) {
        h = mix(h, static_cast<std::uint64_t>(rec.t));
        h = mix(h, static_cast<std::uint64_t>(rec.pair.u));
        h = mix(h, static_cast<std::uint64_t>(rec.pair.v));
        h = mix(h, static_cast<std::uint64_t>(rec.load_u_after));
        h = mix(h, static_cast<std::uint64_t>(rec.load_v_after));
        if (layout == nullptr) {
          layout_ok = false;
          return;
        }
        if (layout->load(rec.pair.u) != rec.load_u_after ||
            layout->load(rec.pair.v) != rec.load_v_after) {
          layout_ok = false;
        }
        if (rec.t % 512 == 0 && !layout->validate()) layout_ok = false;
      };
      RunResult rr = run(rc, observer);
      hashes[mi] = h;
      finals[mi] = std::move(rr.final_state);
      phases[mi] = rr.phases;
    }
    if (!layout_ok) {
      note_violation(r, "layout lost track of the loads");
      continue;
    }
    const bool same_traj = hashes[0] == hashes[1] && hashes[0] == hashes[2];
    const bool same_final =
        finals[0].loads == finals[1].loads && finals[0].loads == finals[2].loads;
    auto same_times = [](const PhaseTimes& a, const PhaseTimes& b) {
      return a.t1 == b.t1 && a.t2 == b.t2 && a.t3 == b.t3;
    };
    if (!same_traj || !same_final || !same_times(phases[0], phases[1]) ||
        !same_times(phases[0], phases[2])) {
      note_violation(r, "modes diverged on a shared seed");
    }
  }
  r.pass = r.violations == 0;
  return r;
}

CheckResult check_skip_height_monotone(int trials, int n, long long m, long long steps,
                                       std::uint64_t seed) {
  CheckResult r;
  r.name = "skip-heights";
  for (int trial = 0; trial < trials; ++trial) {
    Pcg32 gen(seed, stream_for(static_cast<std::uint64_t>(trial), kGenerateChannel));
    const LoadVector initial = generate_initial(DistributionSpec::uniform_random(n, m), gen);
    r.instances += 1;

    const TokenLayout start = TokenLayout::from_loads(initial);
    std::vector<long long> prev(static_cast<std::size_t>(start.token_count()));
    for (int id = 0; id < static_cast<int>(prev.size()); ++id) {
      prev[static_cast<std::size_t>(id)] = start.height_of(id);
    }
    bool monotone = true;
    auto observer = [&](const StepRecord&, const PhaseDetector&, const TokenLayout* layout) {
      if (layout == nullptr) {
        monotone = false;
        return;
      }
      for (int id = 0; id < static_cast<int>(prev.size()); ++id) {
        const long long h = layout->height_of(id);
        if (h > prev[static_cast<std::size_t>(id)]) monotone = false;
        prev[static_cast<std::size_t>(id)] = h;
      }
    };
    RunConfig rc;
    rc.initial = initial;
    rc.mode = BalanceMode::skip();
    rc.seed = seed;
    rc.replication = static_cast<std::uint64_t>(trial);
    rc.stop = StopRule::kFixedSteps;
    rc.fixed_steps = steps;
    rc.granularity = TraceGranularity::kNone;
    rc.instrument_tokens = true;
    run(rc, observer);
    if (!monotone) note_violation(r, "a token height increased under the skip rule");
  }
  r.pass = r.violations == 0;
  return r;
}

CheckResult check_reduction_event_mass(int configs, std::uint64_t seed) {
  CheckResult r;
  r.name = "reduction";
  Pcg32 rng(seed, stream_for(0, kGenerateChannel));
  const long long c = 10;
  for (int cfg = 0; cfg < configs; ++cfg) {
    const int n = 8 + static_cast<int>(rng.bounded(25));  // [8, 32]
    const long long base = 3 + rng.bounded(8);
    const long long extra = 30 + rng.bounded(31);  // tall node: base + [30, 60]
    LoadVector lv;
    lv.loads.resize(static_cast<std::size_t>(n));
    lv.loads[0] = base + extra;
    for (int i = 1; i < n; ++i) {
      lv.loads[static_cast<std::size_t>(i)] = base - 1 + rng.bounded(3);
    }
    // A few mid-height nodes between the crowd and the overload threshold.
    const int mids = static_cast<int>(rng.bounded(static_cast<std::uint32_t>(n / 4 + 1)));
    for (int k = 0; k < mids; ++k) {
      const int i = 1 + static_cast<int>(rng.bounded(static_cast<std::uint32_t>(n - 1)));
      lv.loads[static_cast<std::size_t>(i)] = base + 3 + rng.bounded(6);
    }
    r.instances += 1;

    const long long ravg = rounded_average(lv);
    const TokenLayout layout = TokenLayout::from_loads(lv);
    const int tracked = layout.stack(0).back();
    const long long h_norm = lv.loads[0] - 1 - ravg;
    if (h_norm < 2 * c + 1) {
      note_violation(r, "construction broke the tall-stack precondition");
      continue;
    }
    const auto overloaded = overloaded_set(lv, c);
    if (2 * static_cast<int>(overloaded.size()) >= n) {
      note_violation(r, "construction broke the sparse-overload precondition");
      continue;
    }

    long long reductions = 0;
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) {
        if (x == y) continue;
        TokenLayout copy = layout;
        copy.apply_balanced_transfer(PairChoice{x, y}, BalanceMode::skip(), ravg);
        const long long h_new = copy.height_of(tracked) - ravg;
        if (20 * h_new <= 17 * h_norm) ++reductions;
      }
    }
    // Mass >= 1/n over the n(n-1) equally likely ordered pairs.
    if (reductions < n - 1) {
      std::ostringstream os;
      os << "reduction mass " << reductions << "/" << n * (n - 1) << " below 1/" << n << " for "
         << loads_to_string(lv);
      note_violation(r, os.str());
    }
  }
  r.pass = r.violations == 0;
  return r;
}

CheckResult check_negation_coupling(int trials, long long steps, std::uint64_t seed) {
  CheckResult r;
  r.name = "coupling";
  Pcg32 rng(seed, stream_for(0, kGenerateChannel));
  for (int trial = 0; trial < trials; ++trial) {
    LoadVector lv = random_vector(rng, 2, 16, 50);
    for (auto& v : lv.loads) v -= 25;  // signed loads on purpose
    r.instances += 1;
    if (!coupling_experiment(lv, steps, seed + static_cast<std::uint64_t>(trial) + 1)) {
      note_violation(r, "mirror trajectory diverged for " + loads_to_string(lv));
    }
  }
  r.pass = r.violations == 0;
  return r;
}

CheckResult check_termination_band(int trials, std::uint64_t seed) {
  CheckResult r;
  r.name = "termination";
  Pcg32 rng(seed, stream_for(0, kGenerateChannel));
  for (int trial = 0; trial < trials; ++trial) {
    LoadVector lv = random_vector(rng, 2, 12, 30);
    r.instances += 1;
    RunConfig rc;
    rc.initial = lv;
    rc.seed = seed;
    rc.replication = static_cast<std::uint64_t>(trial);
    rc.granularity = TraceGranularity::kNone;
    RunResult rr = run(rc);
    std::string why;
    if (rr.capped) {
      why = "hit the step cap";
    } else if (rr.final_state.total() != lv.total()) {
      why = "total load changed";
    } else if (!rr.phases.t3 || *rr.phases.t3 != rr.steps) {
      why = "stop time disagrees with the band predicate";
    } else {
      const long long a = rounded_average(rr.final_state);
      for (long long v : rr.final_state.loads) {
        if (v < a - 1 || v > a + 1) why = "final load outside the band";
      }
    }
    if (!why.empty()) note_violation(r, why + " for " + loads_to_string(lv));
  }
  r.pass = r.violations == 0;
  return r;
}

std::vector<std::string> check_names() {
  return {"split",       "identity", "expected-drop", "overload", "modes",
          "skip-heights", "reduction", "coupling",     "termination"};
}

std::vector<CheckResult> run_checks(const std::vector<std::string>& filter, std::uint64_t seed) {
  struct Entry {
    const char* name;
    std::function<CheckResult()> fn;
  };
  const std::vector<Entry> suite = {
      {"split", [&] { return check_split_update(500, seed); }},
      {"identity", [&] { return check_pairwise_identity(300, seed + 1); }},
      {"expected-drop", [&] { return check_expected_drop(150, seed + 2); }},
      {"overload", [&] { return check_overload_selection(300, seed + 3); }},
      {"modes", [&] { return check_mode_equivalence(3, 16, 256, 2500, seed + 4); }},
      {"skip-heights", [&] { return check_skip_height_monotone(5, 16, 192, 1500, seed + 5); }},
      {"reduction", [&] { return check_reduction_event_mass(50, seed + 6); }},
      {"coupling", [&] { return check_negation_coupling(20, 400, seed + 7); }},
      {"termination", [&] { return check_termination_band(200, seed + 8); }},
  };
  std::vector<CheckResult> results;
  if (filter.empty()) {
    for (const Entry& e : suite) results.push_back(e.fn());
    return results;
  }
  for (const std::string& want : filter) {
    const auto it = std::find_if(suite.begin(), suite.end(),
                                 [&](const Entry& e) { return want == e.name; });
    if (it == suite.end()) throw std::invalid_argument("unknown check: " + want);
    results.push_back(it->fn());
  }
  return results;
}

}  // namespace balancelab
