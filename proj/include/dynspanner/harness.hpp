#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dynspanner/light_spanner.hpp"
#include "dynspanner/metric.hpp"

namespace dynspanner::harness {

enum class Generator { uniform, path, clustered, file };
enum class Ops { insert_only, mixed, sliding };
enum class CheckPolicy { none, final, every_k, every_update };

Generator parse_generator(const std::string& s);
Ops parse_ops(const std::string& s);
CheckPolicy parse_check(const std::string& s);
Mode parse_mode(const std::string& s);

struct ScenarioConfig {
  Generator generator = Generator::uniform;
  std::size_t n = 64;
  std::size_t dim = 2;
  double eps = 0.5;
  double phi = 1024;
  std::uint64_t seed = 1;
  Ops ops = Ops::insert_only;
  // mixed: number of updates after the initial n insertions, and the
  // chance that each one is a deletion
  std::size_t updates = 0;
  double p_delete = 0.4;
  // sliding: points kept alive
  std::size_t window = 0;
  Mode mode = Mode::exact;
  CheckPolicy check = CheckPolicy::final;
  std::size_t check_every = 1;
  std::string points_file;
  // writes time_ns as 0 so repeated runs are byte-identical
  bool no_timing = false;
  bool inject_fault = false;
};

struct Update {
  OpKind op;
  PointId id;
  // coordinates for insertions; empty for deletions
  std::vector<double> coords;
};

struct Stream {
  std::size_t dim = 0;
  double phi = 1;
  std::vector<Update> updates;
};

// Deterministic for a fixed config. Generated points keep pairwise distance
// in [1, phi]; throws std::invalid_argument when that is infeasible.
Stream generate(const ScenarioConfig& config);

struct CheckCounts {
  std::size_t checks = 0;
  std::size_t invariant = 0;
  std::size_t stretch = 0;
  std::size_t net = 0;
  std::size_t locality = 0;
  std::size_t estimates = 0;

  std::size_t total() const { return invariant + stretch + net + locality + estimates; }
};

struct RunSummary {
  std::size_t updates = 0;
  std::size_t points = 0;
  double lightness = 0;
  double max_stretch = 0;
  double mst_weight = 0;
  double light_weight = 0;
  double net_spanner_weight = 0;
  std::size_t edge_count = 0;
  std::size_t max_recourse = 0;
  double mean_recourse = 0;
  std::int64_t max_time_ns = 0;
  double mean_time_ns = 0;
  std::size_t violations = 0;
  CheckCounts counts;
};

struct RunResult {
  RunSummary summary;
  // one JSON object per update
  std::vector<std::string> lines;
  // human-readable details of every failed check, capped
  std::vector<std::string> problems;
};

RunResult run(const ScenarioConfig& config);
RunResult run(const ScenarioConfig& config, const Stream& stream);

std::string summary_json(const RunSummary& summary);

struct SweepRow {
  std::size_t n;
  double net_lightness;
  double light_lightness;
};

// Inserts all points for each n and records w(S)/w(MST) and w(L)/w(MST).
// phi is raised to the next power of two that fits each n.
std::vector<SweepRow> lightness_sweep(const ScenarioConfig& base,
                                      const std::vector<std::size_t>& sizes);

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace dynspanner::harness
