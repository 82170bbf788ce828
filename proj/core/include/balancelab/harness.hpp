#pragma once

#include <optional>
#include <string>
#include <vector>

#include "balancelab/simulation.hpp"

namespace balancelab {

// Initial-condition family for experiments. Generated vectors always sum to
// m, have length n, and are non-negative.
struct DistributionSpec {
  enum class Kind { kPointMass, kUniformRandom, kBimodal, kExplicit };

  Kind kind = Kind::kPointMass;
  int n = 2;
  long long m = 0;
  long long d = 0;                        // bimodal half-gap
  std::vector<long long> explicit_loads;  // kExplicit only

  static DistributionSpec point_mass(int n, long long m);
  static DistributionSpec uniform_random(int n, long long m);
  static DistributionSpec bimodal(int n, long long m, long long d);
  static DistributionSpec explicit_vector(std::vector<long long> loads);
};

LoadVector generate_initial(const DistributionSpec& spec, Pcg32& rng);

struct ExperimentConfig {
  DistributionSpec dist;
  BalanceMode mode = BalanceMode::stack();
  long long c = 10;
  std::uint64_t seed = 1;
  int replications = 1;
  std::optional<long long> step_cap;
  RoundingRule rounding = RoundingRule::kHalfAwayFromZero;
  int threads = 0;  // 0 means hardware concurrency
  bool keep_final_states = false;
};

struct ReplicationRecord {
  int replication = 0;
  PhaseTimes phases;
  long long delta0 = 0;
  bool capped = false;
};

struct SummaryStats {
  double mean = 0;
  double median = 0;
  double p95 = 0;  // nearest-rank
  long long count = 0;
};

struct EnsembleResult {
  // Config echo.
  int n = 0;
  long long m = 0;
  std::string dist;
  long long bimodal_d = 0;
  std::string mode;
  long long c = 10;
  std::uint64_t seed = 1;
  int replications = 0;
  std::optional<long long> step_cap;
  std::string rounding;

  std::vector<ReplicationRecord> records;
  SummaryStats t1;
  SummaryStats t2;
  SummaryStats t3;
  double delta0_median = 0;
  int cap_hits = 0;
  std::vector<LoadVector> final_states;  // only when requested
};

// Runs `replications` independent seeded runs (in parallel when asked) and
// aggregates their phase times. Deterministic for a fixed config: every
// replication owns its own stream block and aggregation order is by
// replication index.
EnsembleResult run_ensemble(const ExperimentConfig& config);

// Summary statistics over the non-capped replications; median/p95 of the
// requested phase time.
SummaryStats summarize(const std::vector<long long>& values);

struct ScalingFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  // The fitted table, one row per sweep point.
  std::vector<double> x;
  std::vector<double> median_t3;
};

// Ordinary least squares of median t3 against x = n ln n + n ln delta over a
// sweep of ensembles. Needs at least four distinct (n, delta) points and a
// non-degenerate spread of x.
ScalingFit fit_scaling(const std::vector<EnsembleResult>& sweep);

// Fraction of `replications` runs in which some node is never selected
// during the first `steps` pair draws.
double selection_coverage_experiment(int n, long long steps, int replications,
                                     std::uint64_t seed);

// Runs the process from `initial` and its negation with order-swapped pairs
// and reports whether the trajectories stayed exact mirrors for all of the
// first `steps` steps.
bool coupling_experiment(const LoadVector& initial, long long steps, std::uint64_t seed);

}  // namespace balancelab
