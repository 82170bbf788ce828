#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "balancelab/harness.hpp"
#include "balancelab/simulation.hpp"

namespace balancelab {

// Step trace as CSV with the fixed column set
//   t,u,v,load_u_before,load_v_before,load_u_after,load_v_after,phi_times_n2,max,min
// where phi_times_n2 is the exact integer n^2 * potential.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace);

// One integer load per line; blank lines and '#' comment lines are skipped.
std::vector<long long> read_loads_file(const std::string& path);

// Per-replication table with the fixed column set
//   replication,seed,t1,t2,t3,delta0,capped
// Phase times that were never reached are left empty; capped is 0/1.
void write_ensemble_csv(std::ostream& out, const EnsembleResult& result);
void write_ensemble_csv(const std::string& path, const EnsembleResult& result);

// Full ensemble round-trip (config echo, per-replication records, summaries).
std::string ensemble_to_json(const EnsembleResult& result);
void write_ensemble_json(const std::string& path, const EnsembleResult& result);
EnsembleResult read_ensemble_json(const std::string& path);

std::string scaling_fit_to_json(const ScalingFit& fit);
void write_scaling_fit_json(const std::string& path, const ScalingFit& fit);

}  // namespace balancelab
