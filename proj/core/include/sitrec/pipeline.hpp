// File I/O and the ingest -> graph -> solve -> aggregate driver, plus the
// synthetic benchmark runners used by the `sitrec bench` subcommands.
//
// Input is comma-separated text with a header row: an id column, any number
// of real feature columns, an optional label column (empty = unlabeled) and
// optional latitude/longitude/timestamp columns. Labels map to 1-based ids
// in order of first appearance; the novel class is written as c+1.
#pragma once

#include "sitrec/core_model.hpp"
#include "sitrec/evaluation.hpp"
#include "sitrec/spacetime.hpp"
#include "sitrec/ssl_solvers.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sitrec::pipeline {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kDataError = 3,
  kNumericalError = 4,
};

/// Exit code for an exception escaping a pipeline stage.
int exit_code_for(const std::exception& e);

/// Wraps a stage failure as "[stage] message" and keeps the exit code.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::exception& cause);
  const std::string& stage() const { return stage_; }
  int exit_code() const { return code_; }

 private:
  std::string stage_;
  int code_;
};

struct PipelineConfig {
  std::filesystem::path input;
  std::filesystem::path output_dir = "out";
  SolverConfig solver;
  GraphKind graph = GraphKind::Can;
  double u_labeled = 100.0;
  double u_unlabeled = 0.01;
  std::string id_column = "id";
  std::string label_column = "label";
  std::string lat_column = "lat";
  std::string lon_column = "lon";
  std::string time_column = "timestamp";
  spacetime::Resolution resolution;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Applies a JSON config file on top of `base` (file values win). Unknown
/// keys are rejected with ConfigError.
PipelineConfig apply_config_file(const std::filesystem::path& path, PipelineConfig base);

struct Dataset {
  std::vector<std::string> ids;
  std::vector<std::string> feature_names;
  FeatureMatrix x;
  PriorLabels labels;
  std::vector<std::string> class_names;  // index = 0-based class id
};

/// Parses a delimited feature file. Throws DataError naming the line on
/// ragged rows, non-numeric or non-finite features and duplicate ids.
Dataset ingest(const std::filesystem::path& path, const PipelineConfig& config);

/// Writes `data` in the format ingest reads; numbers use the shortest
/// round-trip representation, so ingest(export) reproduces it exactly.
void export_dataset(const Dataset& data, const std::filesystem::path& path,
                    const PipelineConfig& config = {});

struct PipelineOutcome {
  Dataset data;
  SimilarityGraph graph;
  SolveResult result;
  std::optional<spacetime::SituationSummary> summary;
};

/// Runs all stages and writes assignments.csv, softlabels.csv, labels.csv,
/// summary.json, timings.json and, when metadata exists, spacetime.csv and
/// spacetime.json into config.output_dir. Throws StageError.
PipelineOutcome run_pipeline(const PipelineConfig& config);

/// Shortest round-trip decimal form of v.
std::string format_number(double v);

// --- synthetic benchmarks ----------------------------------------------------

struct BenchOptions {
  eval::SyntheticSpec spec;
  SolverConfig solver;
  GraphKind graph = GraphKind::Can;
  double u_labeled = 100.0;
  double u_unlabeled = 0.01;
  std::filesystem::path output_dir = "bench";
  unsigned threads = 0;
};

/// One report_<method>.csv / .json per method plus reports.csv.
std::vector<eval::EvalReport> bench_eval(const BenchOptions& opts);

/// grid_<method>.csv tables and grid_best.json.
eval::GridResult bench_grid(const BenchOptions& opts, const eval::GridSpec& grids);

/// robustness.csv (per-seed rows and a mean row) and robustness.json.
eval::RobustnessSummary bench_robustness(const BenchOptions& opts, int seeds);

/// Writes a synthetic dataset as an ingestible CSV. With `with_meta`, items
/// get deterministic pseudo-random coordinates and timestamps.
void write_synthetic(const eval::SyntheticData& data, const std::filesystem::path& path,
                     bool with_meta, std::uint64_t seed);

}  // namespace sitrec::pipeline
