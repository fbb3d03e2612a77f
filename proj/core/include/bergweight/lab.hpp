#pragma once

// Experiment runner: JSON config in, result.json plus one CSV per table out.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bergweight/spec_io.hpp"

namespace bergweight {

struct PointSampling {
  int count = 50;
  std::uint64_t seed = 1;
};

struct ExperimentConfig {
  std::string experiment;
  std::vector<int> k_grid;
  Json filtration;
  Json metric;
  Json metric1;
  Json g;
  Json symbol;
  std::vector<double> p_list;
  PointSampling points;
  std::map<std::string, double> tolerances;
  Json params = Json::object();
  std::string output;
  /// Effective document after defaults were merged in.
  Json document;
};

using Cell = std::variant<double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

struct Verdict {
  std::string id;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string relation;  ///< how measured is compared with threshold
};

struct ExperimentResult {
  std::string experiment;
  std::string tag;
  Json config;
  std::uint64_t seed = 0;
  std::vector<Table> tables;
  std::vector<Verdict> verdicts;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;
  int threads = 1;

  bool passed() const;
  const Verdict* verdict(const std::string& id) const;
  const Table* table(const std::string& name) const;
};

struct CatalogEntry {
  std::string id;
  std::string tag;    ///< theorem tag carried by every assertion of the experiment
  std::string claim;  ///< what the sweep checks
  Json default_config;
};

const std::vector<CatalogEntry>& list_experiments();
const CatalogEntry* find_experiment(const std::string& id);

struct Diagnostics {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

/// Reads a JSON file; syntax errors are reported with line and column.
Json read_json_file(const std::filesystem::path& path);
/// Merges defaults and checks schema; throws ConfigInvalid or ExperimentUnknown.
ExperimentConfig parse_config(const Json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Schema and semantic checks without running; never throws.
Diagnostics validate_document(const Json& doc);
Diagnostics validate_config(const std::filesystem::path& path);

struct RunOptions {
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

std::string table_csv(const Table& table);
Json result_json(const ExperimentResult& result);
/// Writes result.json and <table>.csv into `dir`, creating it if needed.
void write_result(const ExperimentResult& result, const std::filesystem::path& dir);

/// Threads from BERGWEIGHT_THREADS, or 1.
int default_threads();

/// Runs fn(i) for i in [0, n) on up to `threads` workers; the first failure
/// by index is rethrown after all workers finish.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

namespace lab {

/// Trend rule: last <= first * ratio (optionally with monotone decrease).
/// When |first| <= floor the check becomes |last| <= floor.
Verdict trend_verdict(const std::string& id, const std::vector<double>& values, double ratio, bool monotone,
                      double floor = 1e-12);
Verdict at_most(const std::string& id, double measured, double threshold);
Verdict at_least(const std::string& id, double measured, double threshold);

/// Deterministic sample points: s and theta uniform.
std::vector<PointP1> sample_points(const PointSampling& sampling);

struct Context {
  const ExperimentConfig& config;
  int threads;
  ExperimentResult& result;

  double tolerance(const std::string& key) const;
  double param(const std::string& key, double fallback) const;
  int param_int(const std::string& key, int fallback) const;
  bool param_bool(const std::string& key, bool fallback) const;
  std::vector<int> param_ints(const std::string& key, std::vector<int> fallback) const;
  std::vector<double> param_numbers(const std::string& key, std::vector<double> fallback) const;
  std::string param_string(const std::string& key, const std::string& fallback) const;
  const Json* param_json(const std::string& key) const;
};

using ExperimentFn = std::function<void(Context&)>;
const std::map<std::string, ExperimentFn>& experiment_registry();

}  // namespace lab

}  // namespace bergweight
