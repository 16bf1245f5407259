#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <vector>

#include "tmrc/embedding.hpp"

namespace tmrc {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Truncated Gaussian similarity W_ij = exp(-|z_i - z_j|^2 / sigma) for
/// |z_i - z_j|^2 / sigma <= cutoff, structurally zero otherwise.
struct KernelMatrix {
  SparseMatrix w;
  double sigma = 0.0;
  double cutoff = 0.0;
  /// Rows without off-diagonal entries; they keep W_ii = 1.
  std::vector<std::size_t> isolated;
};

KernelMatrix build_kernel(const PointMatrix& z, double sigma, double cutoff = 4.0);

/// Median over points of the squared distance to the `neighbor`-th nearest
/// other point.
double median_neighbor_scale(const PointMatrix& z, std::size_t neighbor = 10);

/// Row-stochastic P = Dt^-1 Wt with Wt = D^-1 W D^-1 (density-normalized).
SparseMatrix diffusion_transition_matrix(const SparseMatrix& w);

/// Number of connected components of the kernel graph.
std::size_t connected_components(const SparseMatrix& w);

struct DiffusionMapModel {
  PointMatrix training;           // l x k embedded training points
  double sigma = 0.0;
  double cutoff = 0.0;
  Eigen::VectorXd eigenvalues;    // gamma_0 >= gamma_1 >= ...
  Eigen::MatrixXd eigenvectors;   // l x (s+1); column i is psi_i
  std::size_t r = 0;
  /// gamma_{r+1} / gamma_r > 0.9: the requested coordinates are weakly separated.
  bool weak_separation = false;
  std::vector<std::size_t> isolated;

  std::size_t size() const noexcept { return static_cast<std::size_t>(training.rows()); }
  /// Psi(z_i) = (gamma_1 psi_1(i), ..., gamma_r psi_r(i)).
  PointMatrix coordinates() const;
};

struct DiffusionMapOptions {
  std::size_t r = 1;
  /// Eigenpairs beyond r+1 to report (for the separation check and diagnostics).
  std::size_t extra = 4;
  /// Clouds up to this size use a dense eigensolver, larger ones Lanczos.
  std::size_t dense_limit = 3000;
};

/// Computes the leading eigenpairs of P through its symmetric conjugate
/// Dt^-1/2 Wt Dt^-1/2. Eigenvectors are signed so the first nonzero entry is
/// positive. Throws DisconnectedCloudError when gamma = 1 has multiplicity > 1.
DiffusionMapModel fit_diffmap(const KernelMatrix& kernel, const PointMatrix& training,
                              const DiffusionMapOptions& options);

/// Convenience: kernel scale from median_neighbor_scale when sigma <= 0.
DiffusionMapModel fit_diffmap(const PointMatrix& training, double sigma, double cutoff,
                              const DiffusionMapOptions& options);

enum class ExtensionRule { NearestNeighbor };

struct ReactionCoordinate {
  DiffusionMapModel model;
  PointMatrix values;  // l x r
  ExtensionRule extension = ExtensionRule::NearestNeighbor;

  static ReactionCoordinate from_model(DiffusionMapModel model);
};

/// Value rows of the Euclidean-nearest reference row for each query (ties to
/// the lowest index).
PointMatrix nearest_neighbor_values(const PointMatrix& reference, const PointMatrix& values,
                                    const PointMatrix& queries);

/// Reaction coordinate at embedded query points by nearest-neighbor extension
/// over the training cloud.
PointMatrix evaluate_rc(const ReactionCoordinate& rc, const PointMatrix& queries);

struct DimensionEstimate {
  std::vector<std::size_t> local;      // per point
  std::vector<std::size_t> histogram;  // histogram[c] = points with local dimension c
  std::size_t vote = 0;                // mode; ties resolve to the smaller dimension
};

/// Local PCA over each point's m nearest neighbors (the point included); the
/// local dimension is the smallest c whose leading c eigenvalues explain at
/// least `explained` of the neighborhood variance.
DimensionEstimate dimension_diagnostic(const PointMatrix& z, std::size_t m, double explained = 0.9);

/// Same, after removing the mean Monte Carlo noise power of the neighborhood
/// from every local eigenvalue. Neighborhoods left without signal get local
/// dimension 0 and do not take part in the vote.
DimensionEstimate dimension_diagnostic(const PointMatrix& z, const PointMatrix& std_error, std::size_t m,
                                       double explained = 0.9);

}  // namespace tmrc
