#include "balancelab/io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace balancelab {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "t,u,v,load_u_before,load_v_before,load_u_after,load_v_after,"
         "phi_times_n2,max,min\n";
  for (const TraceRow& row : trace) {
    const StepRecord& r = row.rec;
    out << r.t << ',' << r.pair.u << ',' << r.pair.v << ',' << r.load_u_before << ','
        << r.load_v_before << ',' << r.load_u_after << ',' << r.load_v_after << ','
        << int128_to_string(row.phi_scaled) << ',' << row.max << ',' << row.min << '\n';
  }
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace) {
  std::ofstream out = open_out(path);
  write_trace_csv(out, trace);
}

std::vector<long long> read_loads_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open loads file: " + path);
  std::vector<long long> loads;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos || line[begin] == '#') continue;
    std::size_t end = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(begin, end - begin + 1);
    try {
      std::size_t used = 0;
      const long long value = std::stoll(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      loads.push_back(value);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected an integer load, got '" + token + "'");
    }
  }
  return loads;
}

void write_ensemble_csv(std::ostream& out, const EnsembleResult& result) {
  out << "replication,seed,t1,t2,t3,delta0,capped\n";
  for (const ReplicationRecord& rec : result.records) {
    out << rec.replication << ',' << result.seed << ',';
    if (rec.phases.t1) out << *rec.phases.t1;
    out << ',';
    if (rec.phases.t2) out << *rec.phases.t2;
    out << ',';
    if (rec.phases.t3) out << *rec.phases.t3;
    out << ',' << rec.delta0 << ',' << (rec.capped ? 1 : 0) << '\n';
  }
}

void write_ensemble_csv(const std::string& path, const EnsembleResult& result) {
  std::ofstream out = open_out(path);
  write_ensemble_csv(out, result);
}

namespace {

nlohmann::json phase_or_null(const std::optional<long long>& t) {
  if (t) return *t;
  return nullptr;
}

nlohmann::json summary_json(const SummaryStats& s) {
  return {{"mean", s.mean}, {"median", s.median}, {"p95", s.p95}, {"count", s.count}};
}

SummaryStats summary_from_json(const nlohmann::json& j) {
  SummaryStats s;
  s.mean = j.at("mean").get<double>();
  s.median = j.at("median").get<double>();
  s.p95 = j.at("p95").get<double>();
  s.count = j.at("count").get<long long>();
  return s;
}

}  // namespace

std::string ensemble_to_json(const EnsembleResult& result) {
  nlohmann::json j;
  j["config"] = {
      {"n", result.n},
      {"m", result.m},
      {"dist", result.dist},
      {"bimodal_d", result.bimodal_d},
      {"mode", result.mode},
      {"c", result.c},
      {"seed", result.seed},
      {"replications", result.replications},
      {"step_cap", result.step_cap ? nlohmann::json(*result.step_cap) : nlohmann::json(nullptr)},
      {"rounding", result.rounding},
  };
  j["summary"] = {
      {"t1", summary_json(result.t1)},
      {"t2", summary_json(result.t2)},
      {"t3", summary_json(result.t3)},
      {"delta0_median", result.delta0_median},
      {"cap_hits", result.cap_hits},
  };
  nlohmann::json records = nlohmann::json::array();
  for (const ReplicationRecord& rec : result.records) {
    records.push_back({
        {"replication", rec.replication},
        {"t1", phase_or_null(rec.phases.t1)},
        {"t2", phase_or_null(rec.phases.t2)},
        {"t3", phase_or_null(rec.phases.t3)},
        {"delta0", rec.delta0},
        {"capped", rec.capped},
    });
  }
  j["records"] = std::move(records);
  return j.dump(2) + "\n";
}

void write_ensemble_json(const std::string& path, const EnsembleResult& result) {
  std::ofstream out = open_out(path);
  out << ensemble_to_json(result);
}

EnsembleResult read_ensemble_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ensemble file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  try {
    EnsembleResult result;
    const nlohmann::json& cfg = j.at("config");
    result.n = cfg.at("n").get<int>();
    result.m = cfg.at("m").get<long long>();
    result.dist = cfg.at("dist").get<std::string>();
    result.bimodal_d = cfg.at("bimodal_d").get<long long>();
    result.mode = cfg.at("mode").get<std::string>();
    result.c = cfg.at("c").get<long long>();
    result.seed = cfg.at("seed").get<std::uint64_t>();
    result.replications = cfg.at("replications").get<int>();
    if (!cfg.at("step_cap").is_null()) result.step_cap = cfg.at("step_cap").get<long long>();
    result.rounding = cfg.at("rounding").get<std::string>();
    const nlohmann::json& summary = j.at("summary");
    result.t1 = summary_from_json(summary.at("t1"));
    result.t2 = summary_from_json(summary.at("t2"));
    result.t3 = summary_from_json(summary.at("t3"));
    result.delta0_median = summary.at("delta0_median").get<double>();
    result.cap_hits = summary.at("cap_hits").get<int>();
    for (const nlohmann::json& rj : j.at("records")) {
      ReplicationRecord rec;
      rec.replication = rj.at("replication").get<int>();
      if (!rj.at("t1").is_null()) rec.phases.t1 = rj.at("t1").get<long long>();
      if (!rj.at("t2").is_null()) rec.phases.t2 = rj.at("t2").get<long long>();
      if (!rj.at("t3").is_null()) rec.phases.t3 = rj.at("t3").get<long long>();
      rec.delta0 = rj.at("delta0").get<long long>();
      rec.capped = rj.at("capped").get<bool>();
      result.records.push_back(std::move(rec));
    }
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": malformed ensemble file: " + e.what());
  }
}

std::string scaling_fit_to_json(const ScalingFit& fit) {
  nlohmann::json points = nlohmann::json::array();
  for (std::size_t i = 0; i < fit.x.size(); ++i) {
    points.push_back({{"x", fit.x[i]}, {"median_t3", fit.median_t3[i]}});
  }
  nlohmann::json j = {
      {"slope", fit.slope},
      {"intercept", fit.intercept},
      {"r_squared", fit.r_squared},
      {"points", std::move(points)},
  };
  return j.dump(2) + "\n";
}

void write_scaling_fit_json(const std::string& path, const ScalingFit& fit) {
  std::ofstream out = open_out(path);
  out << scaling_fit_to_json(fit);
}

}  // namespace balancelab
