#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphblow/dynamics.hpp"
#include "graphblow/graph.hpp"
#include "graphblow/nonlinearity.hpp"

namespace graphblow {

/// Textual description of one simulation; keys mirror the `simulate` flags.
struct RunSpec {
  std::string graph = "path:3";
  std::string problem = "cauchy";
  std::string omega = "all";
  std::string f = "power";
  double alpha = 1.0;
  std::string init;
  double init_scale = 1.0;
  double t_max = 10.0;
  double tol = 1e-8;
  double u_blow = 1e12;
  double dt_init = 1e-3;
  double dt_min = 1e-14;
  double dt_max = 0.1;
  std::size_t stride = 1;
  std::optional<std::size_t> truncation;
  std::optional<std::int64_t> source;  // vertex label
  std::optional<double> sample_interval;
  /// Volume-growth degree; enables the thm1 column of sweep manifests.
  std::optional<double> m;
};

/// Sets a RunSpec field from a `key = value` pair. Throws on unknown keys.
void set_run_key(RunSpec& spec, std::string_view key, std::string_view value);

/// Omega forms: all, ball:<v>:<r>, list:<file> (vertex labels).
DomainDecomposition parse_omega(const WeightedGraph& g, std::string_view text);

/// Initial data forms: const:<c>, delta:<v>:<c>, file:<path>.
GraphFunction parse_init(const WeightedGraph& g, std::string_view text);

struct ResolvedRun {
  WeightedGraph graph;
  SimulationConfig config;
  Nonlinearity nl;
};

ResolvedRun resolve_run(const RunSpec& spec);

struct SweepConfig {
  RunSpec base;
  std::vector<double> alpha;
  std::vector<double> init_scale;
  std::vector<std::size_t> truncation;
  std::filesystem::path output_dir = "sweep_out";
  std::size_t parallelism = 1;
  std::size_t cap = 10000;

  std::size_t size() const;
};

/// Sections [base], [axes], [output]; `key = value` lines; `#` comments.
/// Axis values are comma separated.
SweepConfig parse_sweep_config(std::istream& in);
SweepConfig read_sweep_config(const std::string& path);

struct ManifestRow {
  std::size_t index = 0;
  double alpha = 0.0;
  double init_scale = 1.0;
  std::optional<std::size_t> truncation;
  std::string file;
  Verdict verdict = Verdict::horizon;
  std::optional<double> T_est;
  std::string thm1 = "NA";
  std::string thm2 = "NA";
  double wall_seconds = 0.0;
};

struct RunManifest {
  std::vector<ManifestRow> rows;
};

/// The run specs of the cartesian product, in manifest order (alpha
/// slowest, truncation fastest). Throws when the product exceeds the cap.
std::vector<RunSpec> expand_sweep(const SweepConfig& cfg);

/// Runs every point on a worker pool, writes run_<i>.csv and manifest.csv.
/// GRAPHBLOW_THREADS overrides cfg.parallelism.
RunManifest run_sweep(const SweepConfig& cfg);

void write_manifest(std::ostream& out, const RunManifest& manifest);

}  // namespace graphblow
