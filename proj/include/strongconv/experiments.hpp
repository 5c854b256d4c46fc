#pragma once

// Experiment scenarios, their JSON configuration, and persisted run records.
//
// Seeds: replica i at size k of scenario s draws from
//   SeedSpec{seed}.child(s).child(k).child(i)
// with s the scenario number (ht-strong = 1, ..., witness = 9).

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace strongconv {

inline constexpr const char* kArtifactVersion = "strongconv 0.1.0";

/// Scenario ids in order: ht-strong, asym-free, tensor-probe, collapse,
/// entropy-probe, concentration, nonamen-gap, haar-variant, witness.
const std::vector<std::string>& scenario_ids();

/// 1-based scenario number; throws std::invalid_argument for unknown ids.
int scenario_number(const std::string& id);

struct ScenarioSpec {
  std::string id;
  std::vector<int> ks;
  int r = 2;
  int reps = 20;
  int degree_cap = 4;
  double tolerance = 1e-10;
  int q_max = 8;
  std::vector<std::string> polys;
  std::vector<std::string> tensor_polys;       // generators 1..r left leg, r+1..2r right leg
  std::vector<std::vector<std::string>> maps;  // pushforwards f = (f_1, ..., f_m)
  std::vector<double> epsilons;
  std::string ensemble = "gue";
  std::string statistic = "trace_moment";
  std::vector<double> weights;
  std::map<std::string, std::vector<std::pair<double, double>>> supports;
  int restarts = 4;
  int max_iters = 500;
  double microstate_epsilon = 0.0;  // 0 disables the microstate filter
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when polynomials do not parse, the k list
  /// is empty or not strictly ascending, or a count is out of range.
  void validate() const;
};

/// Per-scenario defaults for every field the config leaves out.
ScenarioSpec default_spec(const std::string& id);

/// Fields present in `config` override default_spec(id).
ScenarioSpec spec_from_json(const std::string& id, const nlohmann::json& config);
nlohmann::json to_json(const ScenarioSpec& spec);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  friend bool operator==(const Table&, const Table&) = default;
};

struct RunRecord {
  std::string scenario;
  ScenarioSpec params;
  std::string seed;  // SeedSpec text form of the scenario root
  std::map<std::string, Table> tables;
  std::vector<std::string> notes;  // budget clamps and other in-record reports
  double wall_clock_seconds = 0.0;
  int threads = 1;
  std::string version = kArtifactVersion;
};

RunRecord run_scenario(const ScenarioSpec& spec, int threads = 1);

nlohmann::json to_json(const RunRecord& record);
RunRecord record_from_json(const nlohmann::json& j);

/// Writes record.json and one <table>.csv per table into `dir`.
void emit(const RunRecord& record, const std::filesystem::path& dir);

/// CSV text of a table: header line, then one line per row. Numbers use the
/// shortest round-trip form; null cells are empty.
std::string to_csv(const Table& table);

}  // namespace strongconv
