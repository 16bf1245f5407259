#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tmrc/embedding.hpp"
#include "tmrc/manifold.hpp"
#include "tmrc/sampling.hpp"
#include "tmrc/spectrum.hpp"

namespace tmrc::io {

namespace fs = std::filesystem;

// Decimal tables: "# key=value" metadata lines, one header line of column
// names, then comma-separated rows printed with 17 significant digits.
struct Table {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  PointMatrix data;

  const std::string& require(const std::string& key) const;
  double number(const std::string& key) const;
  std::size_t column(const std::string& name) const;
};

std::string format_double(double v);
void write_table(const fs::path& path, const Table& table);
/// `schema` describes the expected layout and is quoted in every IoError.
Table read_table(const fs::path& path, const std::string& schema);

std::string sha256_file(const fs::path& path);
std::string sha256_string(const std::string& data);

// Burst ensembles and trajectories are stored as little-endian float64
// binaries behind a fixed header.
enum class BinaryKind : std::uint32_t { Bursts = 1, Trajectory = 2 };

struct BinaryHeader {
  BinaryKind kind = BinaryKind::Bursts;
  std::uint64_t dim = 0;
  std::uint64_t rows = 0;    // evaluation points or trajectory length
  std::uint64_t blocks = 0;  // replicates per point (bursts)
  double time = 0.0;         // lag (bursts) or recording interval (trajectory)
  std::uint64_t seed = 0;
};

void write_bursts(const fs::path& path, const std::vector<BurstEnsemble>& bursts, std::uint64_t seed);
std::vector<BurstEnsemble> read_bursts(const fs::path& path);

void write_trajectory(const fs::path& path, const EquilibriumTrajectory& traj);
EquilibriumTrajectory read_trajectory(const fs::path& path);

/// Columns x_1..x_n, z_1..z_k, se_1..se_k; meta lag.
void write_cloud(const fs::path& path, const EmbeddedCloud& cloud);
EmbeddedCloud read_cloud(const fs::path& path);

/// Columns z_1..z_k, psi_0..psi_s; meta sigma, cutoff, r, weak_separation,
/// eigenvalues, isolated.
void write_model(const fs::path& path, const DiffusionMapModel& model);
DiffusionMapModel read_model(const fs::path& path);

/// Columns x_1..x_n, xi_1..xi_r.
void write_rc_values(const fs::path& path, const PointMatrix& points, const PointMatrix& values);
struct RcValues {
  PointMatrix points;
  PointMatrix values;
};
RcValues read_rc_values(const fs::path& path);

/// Columns index, eigenvalue, timescale, flag; meta lag, dominant, active, empty_rows.
void write_spectrum(const fs::path& path, const SpectrumReport& report);
SpectrumReport read_spectrum(const fs::path& path);

void write_comparison(const fs::path& path, const SpectrumComparison& cmp);

/// Square matrix as CSV with columns c_0..c_{m-1}.
void write_matrix(const fs::path& path, const Eigen::MatrixXd& m);

/// One integer cell index per row under the column "cell".
std::vector<std::size_t> read_cells(const fs::path& path);
void write_cells(const fs::path& path, const std::vector<std::size_t>& cells);

}  // namespace tmrc::io
