#include "balancelab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace balancelab {

DistributionSpec DistributionSpec::point_mass(int n, long long m) {
  DistributionSpec s;
  s.kind = Kind::kPointMass;
  s.n = n;
  s.m = m;
  return s;
}

DistributionSpec DistributionSpec::uniform_random(int n, long long m) {
  DistributionSpec s;
  s.kind = Kind::kUniformRandom;
  s.n = n;
  s.m = m;
  return s;
}

DistributionSpec DistributionSpec::bimodal(int n, long long m, long long d) {
  DistributionSpec s;
  s.kind = Kind::kBimodal;
  s.n = n;
  s.m = m;
  s.d = d;
  return s;
}

DistributionSpec DistributionSpec::explicit_vector(std::vector<long long> loads) {
  DistributionSpec s;
  s.kind = Kind::kExplicit;
  s.n = static_cast<int>(loads.size());
  s.m = std::accumulate(loads.begin(), loads.end(), 0LL);
  s.explicit_loads = std::move(loads);
  return s;
}

LoadVector generate_initial(const DistributionSpec& spec, Pcg32& rng) {
  if (spec.kind == DistributionSpec::Kind::kExplicit) {
    if (spec.explicit_loads.size() < 2) {
      throw std::invalid_argument("explicit distribution needs at least 2 loads");
    }
    for (long long v : spec.explicit_loads) {
      if (v < 0) throw std::invalid_argument("explicit distribution must be non-negative");
    }
    return LoadVector{spec.explicit_loads};
  }
  if (spec.n < 2) throw std::invalid_argument("distribution needs n >= 2");
  if (spec.m < 0) throw std::invalid_argument("distribution needs m >= 0");
  LoadVector lv;
  lv.loads.assign(static_cast<std::size_t>(spec.n), 0);
  switch (spec.kind) {
    case DistributionSpec::Kind::kPointMass:
      lv.loads[0] = spec.m;
      break;
    case DistributionSpec::Kind::kUniformRandom:
      for (long long unit = 0; unit < spec.m; ++unit) {
        lv.loads[rng.bounded(static_cast<std::uint32_t>(spec.n))] += 1;
      }
      break;
    case DistributionSpec::Kind::kBimodal: {
      if (spec.n % 2 != 0) throw std::invalid_argument("bimodal distribution needs even n");
      if (spec.m % spec.n != 0) {
        throw std::invalid_argument("bimodal distribution needs n to divide m");
      }
      const long long avg = spec.m / spec.n;
      if (spec.d < 0 || spec.d > avg) {
        throw std::invalid_argument("bimodal half-gap must lie in [0, m/n]");
      }
      for (int i = 0; i < spec.n / 2; ++i) lv.loads[static_cast<std::size_t>(i)] = avg + spec.d;
      for (int i = spec.n / 2; i < spec.n; ++i) lv.loads[static_cast<std::size_t>(i)] = avg - spec.d;
      break;
    }
    case DistributionSpec::Kind::kExplicit:
      break;  // handled above
  }
  return lv;
}

namespace {

const char* dist_name(DistributionSpec::Kind kind) {
  switch (kind) {
    case DistributionSpec::Kind::kPointMass: return "point";
    case DistributionSpec::Kind::kUniformRandom: return "uniform";
    case DistributionSpec::Kind::kBimodal: return "bimodal";
    case DistributionSpec::Kind::kExplicit: return "explicit";
  }
  return "?";
}

ReplicationRecord run_one(const ExperimentConfig& config, int rep, LoadVector* final_out) {
  Pcg32 gen(config.seed, stream_for(static_cast<std::uint64_t>(rep), kGenerateChannel));
  RunConfig rc;
  rc.initial = generate_initial(config.dist, gen);
  rc.mode = config.mode;
  rc.c = config.c;
  rc.seed = config.seed;
  rc.replication = static_cast<std::uint64_t>(rep);
  rc.step_cap = config.step_cap;
  rc.stop = StopRule::kAlmostBalanced;
  rc.granularity = TraceGranularity::kNone;
  rc.rounding = config.rounding;
  rc.instrument_tokens = false;  // layout never feeds back into loads
  RunResult rr = run(rc);
  ReplicationRecord rec;
  rec.replication = rep;
  rec.phases = rr.phases;
  rec.delta0 = rr.initial_delta;
  rec.capped = rr.capped;
  if (final_out != nullptr) *final_out = std::move(rr.final_state);
  return rec;
}

}  // namespace

SummaryStats summarize(const std::vector<long long>& values) {
  SummaryStats s;
  s.count = static_cast<long long>(values.size());
  if (values.empty()) return s;
  std::vector<long long> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  double sum = 0;
  for (long long v : sorted) sum += static_cast<double>(v);
  s.mean = sum / static_cast<double>(sorted.size());
  const std::size_t n = sorted.size();
  s.median = (static_cast<double>(sorted[(n - 1) / 2]) + static_cast<double>(sorted[n / 2])) / 2.0;
  const std::size_t rank =
      static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95 = static_cast<double>(sorted[std::max<std::size_t>(rank, 1) - 1]);
  return s;
}

EnsembleResult run_ensemble(const ExperimentConfig& config) {
  if (config.replications < 1) throw std::invalid_argument("replications must be >= 1");
  const int reps = config.replications;

  std::vector<ReplicationRecord> records(static_cast<std::size_t>(reps));
  std::vector<LoadVector> finals;
  if (config.keep_final_states) finals.resize(static_cast<std::size_t>(reps));

  int threads = config.threads;
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  threads = std::min(threads, reps);

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const int rep = next.fetch_add(1);
      if (rep >= reps || failed.load()) break;
      try {
        LoadVector* fout = config.keep_final_states
                               ? &finals[static_cast<std::size_t>(rep)]
                               : nullptr;
        records[static_cast<std::size_t>(rep)] = run_one(config, rep, fout);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!failed.exchange(true)) error = e.what();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error("replication failed: " + error);

  EnsembleResult result;
  result.n = config.dist.kind == DistributionSpec::Kind::kExplicit
                 ? static_cast<int>(config.dist.explicit_loads.size())
                 : config.dist.n;
  result.m = config.dist.m;
  result.dist = dist_name(config.dist.kind);
  result.bimodal_d = config.dist.d;
  result.mode = mode_kind_name(config.mode.kind);
  result.c = config.c;
  result.seed = config.seed;
  result.replications = reps;
  result.step_cap = config.step_cap;
  result.rounding = rounding_rule_name(config.rounding);
  result.records = std::move(records);
  if (config.keep_final_states) result.final_states = std::move(finals);

  std::vector<long long> t1s, t2s, t3s, deltas;
  for (const ReplicationRecord& rec : result.records) {
    if (rec.phases.t1) t1s.push_back(*rec.phases.t1);
    if (rec.phases.t2) t2s.push_back(*rec.phases.t2);
    if (rec.phases.t3) t3s.push_back(*rec.phases.t3);
    deltas.push_back(rec.delta0);
    if (rec.capped) result.cap_hits += 1;
  }
  result.t1 = summarize(t1s);
  result.t2 = summarize(t2s);
  result.t3 = summarize(t3s);
  result.delta0_median = summarize(deltas).median;
  return result;
}

ScalingFit fit_scaling(const std::vector<EnsembleResult>& sweep) {
  ScalingFit fit;
  for (const EnsembleResult& e : sweep) {
    if (e.t3.count == 0) {
      throw std::invalid_argument("sweep point has no completed replications");
    }
    if (e.n < 2 || e.delta0_median < 1.0) {
      throw std::invalid_argument("sweep point needs n >= 2 and initial discrepancy >= 1");
    }
    const double x = static_cast<double>(e.n) * std::log(static_cast<double>(e.n)) +
                     static_cast<double>(e.n) * std::log(e.delta0_median);
    fit.x.push_back(x);
    fit.median_t3.push_back(e.t3.median);
  }
  std::vector<double> distinct = fit.x;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 4) {
    throw std::invalid_argument("scaling fit needs at least 4 distinct sweep points");
  }

  const double count = static_cast<double>(fit.x.size());
  double mean_x = 0, mean_y = 0;
  for (std::size_t i = 0; i < fit.x.size(); ++i) {
    mean_x += fit.x[i];
    mean_y += fit.median_t3[i];
  }
  mean_x /= count;
  mean_y /= count;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < fit.x.size(); ++i) {
    const double dx = fit.x[i] - mean_x;
    const double dy = fit.median_t3[i] - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0) throw std::invalid_argument("scaling fit is degenerate");
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double ss_res = 0;
  for (std::size_t i = 0; i < fit.x.size(); ++i) {
    const double resid = fit.median_t3[i] - (fit.intercept + fit.slope * fit.x[i]);
    ss_res += resid * resid;
  }
  fit.r_squared = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

double selection_coverage_experiment(int n, long long steps, int replications,
                                     std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("coverage experiment needs n >= 2");
  if (steps < 0) throw std::invalid_argument("coverage experiment needs steps >= 0");
  if (replications < 1) throw std::invalid_argument("coverage experiment needs replications >= 1");
  int missed = 0;
  std::vector<char> touched(static_cast<std::size_t>(n));
  for (int rep = 0; rep < replications; ++rep) {
    Pcg32 rng(seed, stream_for(static_cast<std::uint64_t>(rep), kPairChannel));
    std::fill(touched.begin(), touched.end(), 0);
    int seen = 0;
    for (long long t = 0; t < steps && seen < n; ++t) {
      const PairChoice pc = sample_pair(rng, n);
      if (!touched[static_cast<std::size_t>(pc.u)]) {
        touched[static_cast<std::size_t>(pc.u)] = 1;
        ++seen;
      }
      if (!touched[static_cast<std::size_t>(pc.v)]) {
        touched[static_cast<std::size_t>(pc.v)] = 1;
        ++seen;
      }
    }
    if (seen < n) ++missed;
  }
  return static_cast<double>(missed) / static_cast<double>(replications);
}

bool coupling_experiment(const LoadVector& initial, long long steps, std::uint64_t seed) {
  LoadVector mirrored;
  mirrored.loads.reserve(initial.loads.size());
  for (long long v : initial.loads) mirrored.loads.push_back(-v);

  Pcg32 pair_rng(seed, stream_for(0, kPairChannel));
  Simulator sim(initial, Pcg32(seed, stream_for(0, kPairChannel)));
  Simulator neg(mirrored, Pcg32(seed, stream_for(0, kPairChannel)));
  const int n = static_cast<int>(initial.loads.size());
  for (long long t = 0; t < steps; ++t) {
    const PairChoice pc = sample_pair(pair_rng, n);
    sim.apply_pair(pc);
    neg.apply_pair(PairChoice{pc.v, pc.u});
    const auto& a = sim.state().loads;
    const auto& b = neg.state().loads;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] != -b[i]) return false;
    }
  }
  return true;
}

}  // namespace balancelab
