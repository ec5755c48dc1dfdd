#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stapkit/instance.hpp"
#include "stapkit/oracles.hpp"
#include "stapkit/stap_greedy.hpp"

namespace stapkit {

enum class Algorithm { kStapGreedy, kUplink, kNwGreedy };

Algorithm parse_algorithm(std::string_view name);
std::string_view algorithm_name(Algorithm a);

struct BenchInput {
  std::string id;
  StapInstance instance;
};

struct BenchOptions {
  std::vector<Algorithm> algorithms{Algorithm::kStapGreedy};
  GreedyOptions greedy;
  bool oracle = false;
  OracleBudget budget;
  int jobs = 1;
};

struct BenchRow {
  std::string instance;
  std::string algorithm;
  Rational cost;
  std::optional<Rational> oracle_cost;
  std::optional<Rational> ratio;
  int iterations = 0;
  double wall_ms = 0;
  bool feasible = false;      // re-verified independently of the solver
  bool theory_faithful = false;
  std::string failure;        // empty when every assertion held
};

struct BenchReport {
  std::vector<BenchRow> rows;
  int failures() const;
};

// Runs every applicable algorithm on every instance; rows come out in
// input order whatever the job count. Algorithms that do not match an
// instance's variant are skipped.
BenchReport run_bench(const std::vector<BenchInput>& inputs, const BenchOptions& options);

inline constexpr int kCsvVersion = 1;
void write_csv(std::ostream& out, const BenchReport& report);
// Superset of the CSV with aggregate statistics.
std::string report_json(const BenchReport& report, bool include_wall_time = true);

}  // namespace stapkit
