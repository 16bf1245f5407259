#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tmrc/sampling.hpp"

namespace tmrc {

enum class PartitionSpace { FullState, RCRange };

/// Uniform tensor-product boxes over [lo, hi] per axis, indexed row-major
/// (last axis fastest). Interior boundaries belong to the lower-index cell;
/// lo and hi themselves are inside the domain.
class UlamPartition {
 public:
  static constexpr std::size_t kOutside = std::numeric_limits<std::size_t>::max();

  static UlamPartition full_state(std::vector<double> lo, std::vector<double> hi, std::vector<std::size_t> counts);
  static UlamPartition rc_range(std::vector<double> lo, std::vector<double> hi, std::vector<std::size_t> counts);
  /// RCRange partition over the bounding box of `values`, widened by
  /// `margin` (relative to the extent) on each side.
  static UlamPartition rc_bounding(const PointMatrix& values, std::vector<std::size_t> counts, double margin = 1e-9);

  PartitionSpace space() const noexcept { return space_; }
  std::size_t dim() const noexcept { return lo_.size(); }
  std::size_t cell_count() const noexcept { return total_; }
  const std::vector<double>& lo() const noexcept { return lo_; }
  const std::vector<double>& hi() const noexcept { return hi_; }
  const std::vector<std::size_t>& counts() const noexcept { return counts_; }

  std::size_t cell_of(const double* point) const noexcept;
  Eigen::VectorXd center(std::size_t cell) const;

 private:
  UlamPartition(PartitionSpace space, std::vector<double> lo, std::vector<double> hi, std::vector<std::size_t> counts);

  PartitionSpace space_;
  std::vector<double> lo_, hi_;
  std::vector<std::size_t> counts_;
  std::size_t total_ = 0;
};

struct CellAssignment {
  std::vector<std::size_t> cells;  // UlamPartition::kOutside for out-of-domain points
  std::size_t outside = 0;
};

CellAssignment assign_cells(const UlamPartition& partition, const PointMatrix& points);

struct TransitionCounts {
  Eigen::MatrixXd counts;  // integer-valued
  std::size_t lag_steps = 0;
  std::size_t skipped = 0;  // pairs with an out-of-domain endpoint
};

/// counts(i, j) = #{s : cell[s] = i, cell[s + lag] = j}. Throws
/// EmptyCountsError if every pair was skipped.
TransitionCounts count_transitions(std::span<const std::size_t> cells, std::size_t cell_count, std::size_t lag_steps);

struct TransitionMatrix {
  Eigen::MatrixXd counts;      // symmetrized if requested
  Eigen::MatrixXd stochastic;  // row-normalized; empty rows become identity rows
  double lag = 0.0;
  bool symmetrized = false;
  std::vector<std::size_t> empty_rows;
};

TransitionMatrix to_stochastic(const Eigen::MatrixXd& counts, bool symmetrize, double lag = 0.0);

struct SpectrumReport {
  Eigen::VectorXd eigenvalues;  // descending by real part
  Eigen::VectorXd timescales;   // +inf for lambda >= 1 - 1e-12, NaN for lambda <= 0
  double lag = 0.0;
  std::size_t dominant = 0;     // index d of the largest ratio gap lambda_d / lambda_{d+1}
  /// Right eigenvectors over all cells (columns), zero outside the active
  /// set. Filled only on request.
  Eigen::MatrixXd eigenvectors;
  /// States in the largest strongly connected set, used for the eigenproblem.
  std::vector<std::size_t> active;
  std::vector<std::size_t> empty_rows;
};

double implied_timescale(double lambda, double lag) noexcept;

/// Top-k eigenvalues (real parts) of the row-stochastic matrix restricted to
/// its largest strongly connected set. Symmetrized matrices are solved through
/// the reversible similarity transform, which makes the spectrum real.
/// With connected_only = false every state takes part, including empty rows
/// (identity rows) and disconnected blocks.
SpectrumReport eigenvalues(const TransitionMatrix& tm, std::size_t top, bool with_vectors = false,
                           bool connected_only = true);

/// Full Ulam estimate from a trajectory: assign, count at `lag_steps`,
/// normalize, solve.
SpectrumReport ulam_spectrum(const PointMatrix& trajectory, const UlamPartition& partition, std::size_t lag_steps,
                             double lag, std::size_t top, bool symmetrize = true, bool with_vectors = false);

/// Projected operator from RC values along an equilibrium trajectory.
SpectrumReport project_and_discretize(const PointMatrix& rc_values, const UlamPartition& partition,
                                      std::size_t lag_steps, double lag, std::size_t top, bool symmetrize = true);

struct NamedSpectrum {
  std::string name;
  SpectrumReport report;
};

struct SpectrumComparison {
  std::vector<std::string> names;   // first entry is the reference
  Eigen::MatrixXd eigenvalues;      // rows = index i, cols = report
  Eigen::MatrixXd abs_delta;        // |lambda_i - lambda_i(reference)|
  Eigen::MatrixXd timescale_ratio;  // t_i / t_i(reference)
  /// (report, index) pairs where lambda_i exceeds the reference by > tolerance.
  std::vector<std::pair<std::size_t, std::size_t>> flags;
};

/// Aligns reports index by index against the first. Throws ArgumentError if
/// the lags differ.
SpectrumComparison compare_spectra(const std::vector<NamedSpectrum>& reports, double tolerance = 1e-8);

}  // namespace tmrc
