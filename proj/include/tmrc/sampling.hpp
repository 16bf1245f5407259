#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tmrc/dynamics.hpp"

namespace tmrc {

/// Row-major point storage: one state (or embedded point) per row.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Provenance { Grid, TrajectorySubsample, Explicit };

struct EvaluationSet {
  PointMatrix points;
  Provenance provenance = Provenance::Explicit;
  // Grid only.
  std::vector<double> lo, hi;
  std::vector<std::size_t> shape;
  // TrajectorySubsample only: source row of each point.
  std::vector<std::size_t> source_index;

  std::size_t size() const noexcept { return static_cast<std::size_t>(points.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points.cols()); }
};

/// Tensor-product lattice including both endpoints of every axis. Row-major
/// ordering: the last axis varies fastest.
EvaluationSet make_grid(std::span<const double> lo, std::span<const double> hi,
                        std::span<const std::size_t> shape);

EvaluationSet explicit_points(PointMatrix points);

struct BurstEnsemble {
  Eigen::VectorXd start;
  double lag = 0.0;
  PointMatrix endpoints;  // M x n
};

/// One ensemble per evaluation point. Replicate m of point i uses
/// RngStream(seed, burst_stream_id(i, m)), so the result does not depend on
/// the thread count.
std::vector<BurstEnsemble> sample_bursts(const PotentialSystem& sys, const IntegratorConfig& cfg,
                                         const EvaluationSet& eval, std::size_t replicates, double lag,
                                         std::uint64_t seed, NoiseMode mode = NoiseMode::Random);

/// Receives a contiguous block of endpoints (rows x n, row-major) for one
/// evaluation point. Blocks for a point arrive in replicate order on a single
/// thread; different points may be folded concurrently.
using EndpointFold = std::function<void(std::size_t point, const double* endpoints, std::size_t rows)>;

/// Streaming variant of sample_bursts: endpoints are handed to `fold` in
/// blocks of at most `block` replicates and never stored.
void sample_bursts_streaming(const PotentialSystem& sys, const IntegratorConfig& cfg,
                             const EvaluationSet& eval, std::size_t replicates, double lag,
                             std::uint64_t seed, const EndpointFold& fold,
                             NoiseMode mode = NoiseMode::Random, std::size_t block = 1024);

struct EquilibriumTrajectory {
  PointMatrix states;  // N x n; row j is the state after (j+1) recording intervals
  double tau = 0.0;
  Eigen::VectorXd origin;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(states.rows()); }
};

/// N recorded states spaced tau apart, starting one interval after x0.
EquilibriumTrajectory run_equilibrium(const PotentialSystem& sys, const IntegratorConfig& cfg,
                                      const Eigen::VectorXd& x0, std::size_t steps, double tau,
                                      std::uint64_t seed);

enum class SubsampleStrategy { Stride, UniformRandom };

/// Stride takes rows 0, s, 2s, ... with s = floor(N/k); UniformRandom draws k
/// distinct rows (returned in increasing order).
EvaluationSet subsample(const EquilibriumTrajectory& traj, std::size_t count,
                        SubsampleStrategy strategy = SubsampleStrategy::Stride, std::uint64_t seed = 0);

}  // namespace tmrc
