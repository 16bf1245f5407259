#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tmrc/dynamics.hpp"
#include "tmrc/sampling.hpp"
#include "tmrc/spectrum.hpp"

namespace tmrc {

/// Empirical conditional expectation of f given the RC value, with RC bins
/// taken from an UlamPartition over the RC range.
struct BinnedConditional {
  UlamPartition bins;
  std::vector<std::size_t> bin_of;   // per sample; UlamPartition::kOutside if excluded
  std::vector<double> means;         // per bin; NaN marks an empty bin
  std::vector<std::size_t> weights;  // samples per bin
  std::size_t excluded = 0;

  bool empty(std::size_t bin) const { return weights[bin] == 0; }
  /// Projects per-sample values g through the same bin membership. Excluded
  /// samples map to NaN.
  Eigen::VectorXd project(std::span<const double> g) const;
  /// Projection of the f the object was built from, per sample.
  Eigen::VectorXd projected() const;
};

BinnedConditional binned_projection(const PointMatrix& rc, std::span<const double> f, const UlamPartition& bins);

struct ProjectionReport {
  double idempotence_gap = 0.0;
  double self_adjointness_gap = 0.0;
  double expansiveness_gap = 0.0;
};

/// Gaps of the three orthogonal-projection properties for the binned
/// estimator, measured with empirical (uniform sample) weights on the
/// non-excluded samples. g is the second test function of the adjointness pair.
ProjectionReport projection_property_check(const BinnedConditional& bc, std::span<const double> f,
                                           std::span<const double> g);

struct PerturbationReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double bound = 0.0;        // eps / sqrt(1 - eps^2)
  double max_gap = 0.0;      // worst |lambda - lambda_Q| over trials
  double max_leak = 0.0;     // worst |Q^perp u| realized
};

/// Randomized check that QTQ keeps an eigenvalue near lambda when the
/// eigenvector u of a symmetric non-expansive T nearly lies in range(Q).
/// `leak` fixes |Q^perp u| for every trial; otherwise it is eps * U(0,1).
PerturbationReport perturbation_oracle(std::size_t size, std::size_t subspace, double eps, std::size_t trials,
                                       std::uint64_t seed, std::optional<double> leak = std::nullopt);

/// 1 - (pooled within-bin variance) / (total variance) of phi over RC bins.
/// Samples outside every bin are ignored. A constant phi scores 1.
double parametrization_score(std::span<const double> phi, const PointMatrix& rc, const UlamPartition& bins);

/// Values of eigenvector column `index` at each sample by cell membership;
/// samples outside the partition get NaN.
std::vector<double> eigenvector_on_samples(const SpectrumReport& report, const CellAssignment& cells,
                                           std::size_t index);

struct Core {
  Eigen::VectorXd center;
  double radius = 0.0;
};

/// Balls of the given radius around the known minima of a shipped potential.
std::vector<Core> default_cores(const PotentialSystem& sys, double radius = 0.3);

struct CommittorEstimate {
  Eigen::VectorXd x;
  std::vector<Core> cores;
  Eigen::VectorXd q;               // over decided replicates; sums to 1
  std::vector<std::size_t> hits;   // replicates absorbed per core
  std::size_t replicates = 0;
  std::size_t undecided = 0;
  double t_max = 0.0;
  bool inconclusive = false;       // undecided fraction above one half
  std::string warning;

  double undecided_fraction() const {
    return replicates == 0 ? 0.0 : static_cast<double>(undecided) / static_cast<double>(replicates);
  }
  /// Binomial standard error of q_i.
  double std_error(std::size_t i) const;
};

/// Replicate m uses RngStream(seed, burst_stream_id(point_index, m)).
CommittorEstimate committor_estimate(const PotentialSystem& sys, const IntegratorConfig& cfg, const Eigen::VectorXd& x,
                                     const std::vector<Core>& cores, std::size_t replicates, double t_max,
                                     std::uint64_t seed, std::size_t point_index = 0);

}  // namespace tmrc
