#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tmrc/dynamics.hpp"

namespace tmrc {

/// Flat "key = value" text grouped under [section] headers. '#' starts a
/// comment. Lookups of absent keys throw ConfigError naming section and key.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  const std::string& get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key, const std::string& fallback) const;
  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key, double fallback) const;
  std::size_t count(const std::string& section, const std::string& key) const;
  std::size_t count_or(const std::string& section, const std::string& key, std::size_t fallback) const;
  std::uint64_t seed(const std::string& section, const std::string& key) const;
  bool flag_or(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& section, const std::string& key) const;
  std::vector<std::size_t> counts(const std::string& section, const std::string& key) const;
  /// Keys of one section, in sorted order.
  std::vector<std::string> keys(const std::string& section) const;

  void set(const std::string& section, const std::string& key, const std::string& value);
  /// Sorted "section.key=value" lines; the basis of the config hash.
  std::string canonical() const;

 private:
  std::string origin_;
  std::map<std::string, std::map<std::string, std::string>> entries_;
};

inline constexpr int kConfigSchemaVersion = 1;

enum class EvalSource { Grid, Trajectory };
enum class ObservableSource { Reference, Random, Explicit };

struct ReferenceCoordinate {
  std::string name;
  Eigen::VectorXd coefficients;  // linear coordinate x -> c . x
};

struct ExperimentConfig {
  KeyValueConfig raw;

  // [system]
  std::string potential;
  std::size_t dim = 2;
  double beta = 1.0;
  std::vector<double> params;
  // [integrator]
  IntegratorConfig integrator;
  // [eval]
  EvalSource eval_source = EvalSource::Grid;
  std::vector<double> eval_lo, eval_hi;
  std::vector<std::size_t> eval_shape;
  std::size_t eval_count = 0;
  bool eval_random = false;
  std::uint64_t eval_seed = 0;
  // [bursts]
  std::size_t replicates = 0;
  double burst_lag = 0.0;
  std::uint64_t burst_seed = 0;
  bool streaming = true;
  // [observables]
  ObservableSource observable_source = ObservableSource::Reference;
  std::size_t observable_count = 0;
  std::uint64_t observable_seed = 0;
  Eigen::MatrixXd observable_coefficients;
  // [diffmap]
  double sigma = 0.0;  // <= 0: median neighbor scale
  double cutoff = 4.0;
  std::size_t r = 1;
  std::size_t extra = 4;
  std::size_t dense_limit = 3000;
  // [equilibrium]
  std::size_t traj_steps = 0;
  double tau = 0.01;
  Eigen::VectorXd origin;
  std::uint64_t traj_seed = 0;
  // [ulam]
  std::vector<double> ulam_lo, ulam_hi;
  std::vector<std::size_t> ulam_counts;
  std::size_t ulam_lag_steps = 1;
  std::size_t ulam_top = 10;
  bool symmetrize = true;
  // [projected]
  std::vector<std::size_t> projected_bins;
  std::size_t projected_top = 6;
  std::vector<ReferenceCoordinate> references;
  // [diagnostics]
  bool diag_dimension = false;
  std::size_t dimension_neighbors = 20;
  double dimension_explained = 0.9;
  bool dimension_noise = true;
  bool diag_parametrization = false;
  std::size_t parametrization_vectors = 9;
  std::size_t parametrization_bins = 40;
  bool diag_committor = false;
  std::size_t committor_replicates = 1000;
  double committor_tmax = 1000.0;
  double committor_radius = 0.3;
  std::uint64_t committor_seed = 0;
  // [stages]
  std::map<std::string, bool> stages;
  // [output]
  std::filesystem::path out_dir = "out";
  std::size_t threads = 0;

  double ulam_lag() const { return static_cast<double>(ulam_lag_steps) * tau; }
  bool stage_enabled(const std::string& name) const;
  PotentialSystem system() const;
  std::string hash() const;
  /// Sets every stage seed to k plus a fixed per-stage offset.
  void override_seeds(std::uint64_t k);
};

/// Stage names in pipeline order.
const std::vector<std::string>& stage_names();

ExperimentConfig parse_experiment(const KeyValueConfig& raw);
ExperimentConfig load_experiment(const std::filesystem::path& path);

}  // namespace tmrc
