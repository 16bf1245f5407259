#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tmrc/config.hpp"
#include "tmrc/embedding.hpp"
#include "tmrc/sampling.hpp"

namespace tmrc {

namespace fs = std::filesystem;

/// Where each stage reads and writes. Defaults live in the output directory;
/// single-stage subcommands may point any slot elsewhere.
struct ArtifactPaths {
  fs::path bursts, cloud, model, rc, trajectory, spectrum_full, eigenvectors_full, projected_dir, comparison,
      diagnostics_dir, manifest;

  static ArtifactPaths in(const fs::path& dir);
};

struct StageRecord {
  std::string name;
  std::string status;  // ran, skipped, resumed
  double seconds = 0.0;
  std::vector<fs::path> outputs;
};

struct FileRecord {
  fs::path path;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string config_hash;
  std::map<std::string, std::uint64_t> seeds;
  std::vector<StageRecord> stages;
  std::vector<FileRecord> files;
  std::string failed_stage;
  std::string error;
};

struct RunOptions {
  /// Run only this stage (must be a name from stage_names()).
  std::optional<std::string> only;
  /// Skip stages whose outputs already exist.
  bool resume = false;
  /// Write manifest.json into the output directory.
  bool write_manifest = true;
};

/// Runs the enabled stages in order. On failure the partial manifest is
/// written and the error is rethrown with the stage name prefixed.
RunManifest run_pipeline(const ExperimentConfig& config, const ArtifactPaths& paths, const RunOptions& options = {});

void write_manifest(const fs::path& path, const RunManifest& manifest);

// Building blocks shared by the stages and the acceptance harness.
ObservableSet make_observables(const ExperimentConfig& config);
EvaluationSet make_evaluation_set(const ExperimentConfig& config, const ArtifactPaths& paths);
/// RC values at trajectory states, extended from the rc-eval points by the
/// nearest evaluation point in state space.
PointMatrix rc_on_states(const PointMatrix& rc_points, const PointMatrix& rc_values, const PointMatrix& states);

}  // namespace tmrc
