#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "tmrc/sampling.hpp"

namespace tmrc {

enum class ObservableKind { LinearRandom, LinearExplicit };

/// Linear observables eta_i(x) = A_i . x, one per row of a k x n matrix.
struct ObservableSet {
  ObservableKind kind = ObservableKind::LinearExplicit;
  Eigen::MatrixXd coefficients;
  std::uint64_t seed = 0;  // LinearRandom only

  std::size_t k() const noexcept { return static_cast<std::size_t>(coefficients.rows()); }
  std::size_t n() const noexcept { return static_cast<std::size_t>(coefficients.cols()); }
  /// out[i] = A_i . x
  void evaluate(const double* x, double* out) const noexcept;
};

/// Entries i.i.d. Uniform[-1, 1] from `seed`, redrawn until A has full rank
/// min(k, n). Throws ImprobableFailureError after 100 rank-deficient draws.
ObservableSet make_random_observables(std::size_t k, std::size_t n, std::uint64_t seed);

/// Throws ArgumentError unless A has full rank min(k, n).
ObservableSet make_explicit_observables(Eigen::MatrixXd coefficients);

/// The three planar observables used for all two-dimensional examples:
/// (-0.2630, -0.3186), (-0.2246, 0.0969), (0.1564, 0.0783).
ObservableSet planar_reference_observables();

/// Running mean and second central moment of k-vectors, merged block-wise
/// (Chan et al.) so that folding the same blocks in the same order is exact.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(std::size_t k = 0);
  /// values is rows x k, row-major.
  void add_block(const double* values, std::size_t rows);
  std::size_t count() const noexcept { return count_; }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  /// Sample standard deviation over sqrt(count); zero for count < 2.
  Eigen::VectorXd standard_error() const;

 private:
  std::size_t count_ = 0;
  Eigen::VectorXd mean_;
  Eigen::VectorXd m2_;
};

struct KoopmanEstimate {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_error;
};

/// Block size used when folding endpoints; dense and streaming embedding use
/// the same blocking and therefore agree bit-for-bit.
inline constexpr std::size_t kEmbeddingBlock = 1024;

/// Component i is the endpoint average of eta_i, an estimate of the Koopman
/// operator applied to eta_i at the ensemble start.
KoopmanEstimate koopman_estimate(const ObservableSet& obs, const BurstEnsemble& ensemble);

struct EmbeddedCloud {
  PointMatrix x;       // l x n evaluation points
  PointMatrix z;       // l x k embedded points
  PointMatrix std_error;  // l x k Monte Carlo standard errors
  double lag = 0.0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(z.rows()); }
  std::size_t k() const noexcept { return static_cast<std::size_t>(z.cols()); }
};

/// Stacks koopman_estimate rows in evaluation-point order.
EmbeddedCloud embed_cloud(const ObservableSet& obs, const std::vector<BurstEnsemble>& bursts);

/// Simulates and embeds in one pass without storing endpoints.
EmbeddedCloud embed_streaming(const PotentialSystem& sys, const IntegratorConfig& cfg,
                              const EvaluationSet& eval, const ObservableSet& obs, std::size_t replicates,
                              double lag, std::uint64_t seed, NoiseMode mode = NoiseMode::Random);

}  // namespace tmrc
