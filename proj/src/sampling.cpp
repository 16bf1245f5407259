#include "tmrc/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tmrc/errors.hpp"
#include "tmrc/parallel.hpp"

namespace tmrc {

namespace {

constexpr std::size_t kMaxGridPoints = 10'000'000;

}  // namespace

EvaluationSet make_grid(std::span<const double> lo, std::span<const double> hi,
                        std::span<const std::size_t> shape) {
  const std::size_t dim = shape.size();
  if (dim == 0 || lo.size() != dim || hi.size() != dim)
    throw ArgumentError("grid bounds and shape must have the same positive length");
  std::size_t total = 1;
  for (std::size_t a = 0; a < dim; ++a) {
    if (!(lo[a] < hi[a])) throw ArgumentError("grid axis needs lo < hi");
    if (shape[a] < 2) throw ArgumentError("grid axis needs at least 2 points");
    if (shape[a] > kMaxGridPoints || total > kMaxGridPoints / shape[a])
      throw SizeError("grid exceeds 1e7 points");
    total *= shape[a];
  }

  EvaluationSet set;
  set.provenance = Provenance::Grid;
  set.lo.assign(lo.begin(), lo.end());
  set.hi.assign(hi.begin(), hi.end());
  set.shape.assign(shape.begin(), shape.end());
  set.points.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(dim));

  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t p = 0; p < total; ++p) {
    for (std::size_t a = 0; a < dim; ++a) {
      const std::size_t c = shape[a];
      const double v = idx[a] + 1 == c ? hi[a]
                                       : lo[a] + (hi[a] - lo[a]) * (static_cast<double>(idx[a]) /
                                                                     static_cast<double>(c - 1));
      set.points(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(a)) = v;
    }
    for (std::size_t a = dim; a-- > 0;) {
      if (++idx[a] < shape[a]) break;
      idx[a] = 0;
    }
  }
  return set;
}

EvaluationSet explicit_points(PointMatrix points) {
  if (!points.allFinite()) throw ArgumentError("evaluation points must be finite");
  EvaluationSet set;
  set.points = std::move(points);
  set.provenance = Provenance::Explicit;
  return set;
}

void sample_bursts_streaming(const PotentialSystem& sys, const IntegratorConfig& cfg,
                             const EvaluationSet& eval, std::size_t replicates, double lag,
                             std::uint64_t seed, const EndpointFold& fold, NoiseMode mode,
                             std::size_t block) {
  if (replicates == 0) throw ArgumentError("burst replicate count must be positive");
  if (eval.dim() != sys.dim()) throw ArgumentError("evaluation points do not match the system dimension");
  if (block == 0) block = 1;
  const std::size_t steps = steps_for(lag, cfg);
  const std::size_t n = sys.dim();

  parallel_for(eval.size(), [&](std::size_t point) {
    const auto start = eval.points.row(static_cast<Eigen::Index>(point));
    std::vector<double> states;
    std::vector<RngStream> streams;
    for (std::size_t lo = 0; lo < replicates; lo += block) {
      const std::size_t hi = std::min(replicates, lo + block);
      states.resize((hi - lo) * n);
      streams.clear();
      for (std::size_t r = lo; r < hi; ++r) {
        streams.emplace_back(seed, burst_stream_id(point, r));
        std::copy(start.data(), start.data() + n, states.begin() + static_cast<std::ptrdiff_t>((r - lo) * n));
      }
      try {
        propagate(sys, cfg, states, streams, steps, mode);
      } catch (const InstabilityError& e) {
        std::ostringstream os;
        os << "burst from evaluation point " << point << ": " << e.what();
        throw InstabilityError(os.str());
      }
      fold(point, states.data(), hi - lo);
    }
  });
}

std::vector<BurstEnsemble> sample_bursts(const PotentialSystem& sys, const IntegratorConfig& cfg,
                                         const EvaluationSet& eval, std::size_t replicates, double lag,
                                         std::uint64_t seed, NoiseMode mode) {
  const auto n = static_cast<Eigen::Index>(sys.dim());
  std::vector<BurstEnsemble> out(eval.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].start = eval.points.row(static_cast<Eigen::Index>(i)).transpose();
    out[i].lag = lag;
    out[i].endpoints.resize(static_cast<Eigen::Index>(replicates), n);
  }
  std::vector<std::size_t> filled(out.size(), 0);
  sample_bursts_streaming(sys, cfg, eval, replicates, lag, seed,
                          [&](std::size_t point, const double* endpoints, std::size_t rows) {
                            double* dst = out[point].endpoints.data() + filled[point] * static_cast<std::size_t>(n);
                            std::copy(endpoints, endpoints + rows * static_cast<std::size_t>(n), dst);
                            filled[point] += rows;
                          },
                          mode);
  return out;
}

EquilibriumTrajectory run_equilibrium(const PotentialSystem& sys, const IntegratorConfig& cfg,
                                      const Eigen::VectorXd& x0, std::size_t steps, double tau,
                                      std::uint64_t seed) {
  if (steps == 0) throw ArgumentError("equilibrium trajectory needs at least one step");
  if (static_cast<std::size_t>(x0.size()) != sys.dim())
    throw ArgumentError("initial state does not match the system dimension");
  const std::size_t sub = steps_for(tau, cfg);
  const std::size_t n = sys.dim();

  EquilibriumTrajectory traj;
  traj.tau = tau;
  traj.origin = x0;
  traj.seed = seed;
  traj.states.resize(static_cast<Eigen::Index>(steps), static_cast<Eigen::Index>(n));

  RngStream rng(seed, auxiliary_stream_id(0));
  std::vector<double> x(x0.data(), x0.data() + n);
  for (std::size_t j = 0; j < steps; ++j) {
    try {
      propagate(sys, cfg, x, {&rng, 1}, sub);
    } catch (const InstabilityError& e) {
      std::ostringstream os;
      os << "equilibrium trajectory at record " << j << ": " << e.what();
      throw InstabilityError(os.str());
    }
    std::copy(x.begin(), x.end(), traj.states.data() + j * n);
  }
  return traj;
}

EvaluationSet subsample(const EquilibriumTrajectory& traj, std::size_t count, SubsampleStrategy strategy,
                        std::uint64_t seed) {
  const std::size_t total = traj.size();
  if (count == 0) throw ArgumentError("subsample size must be positive");
  if (count > total) throw ArgumentError("subsample size exceeds trajectory length");

  std::vector<std::size_t> rows(count);
  if (strategy == SubsampleStrategy::Stride) {
    const std::size_t stride = total / count;
    for (std::size_t i = 0; i < count; ++i) rows[i] = i * stride;
  } else {
    // Partial Fisher-Yates over row indices.
    std::vector<std::size_t> pool(total);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    RngStream rng(seed, auxiliary_stream_id(1));
    for (std::size_t i = 0; i < count; ++i) {
      const double u = rng.next_uniform();
      const std::size_t j = i + std::min(total - i - 1, static_cast<std::size_t>(u * static_cast<double>(total - i)));
      std::swap(pool[i], pool[j]);
    }
    rows.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(rows.begin(), rows.end());
  }

  EvaluationSet set;
  set.provenance = Provenance::TrajectorySubsample;
  set.source_index = rows;
  set.points.resize(static_cast<Eigen::Index>(count), traj.states.cols());
  for (std::size_t i = 0; i < count; ++i)
    set.points.row(static_cast<Eigen::Index>(i)) = traj.states.row(static_cast<Eigen::Index>(rows[i]));
  return set;
}

}  // namespace tmrc
