#include "tmrc/embedding.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

#include "tmrc/errors.hpp"

namespace tmrc {

namespace {

bool full_rank(const Eigen::MatrixXd& a) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.rank() == std::min(a.rows(), a.cols());
}

}  // namespace

void ObservableSet::evaluate(const double* x, double* out) const noexcept {
  const auto rows = coefficients.rows();
  const auto cols = coefficients.cols();
  for (Eigen::Index i = 0; i < rows; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < cols; ++j) s += coefficients(i, j) * x[j];
    out[i] = s;
  }
}

ObservableSet make_random_observables(std::size_t k, std::size_t n, std::uint64_t seed) {
  if (k == 0 || n == 0) throw ArgumentError("observable count and dimension must be positive");
  RngStream rng(seed, auxiliary_stream_id(2));
  for (int attempt = 0; attempt < 100; ++attempt) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = 2.0 * rng.next_uniform() - 1.0;
    if (full_rank(a)) return {ObservableKind::LinearRandom, std::move(a), seed};
  }
  throw ImprobableFailureError("100 consecutive random observable draws were rank deficient");
}

ObservableSet make_explicit_observables(Eigen::MatrixXd coefficients) {
  if (coefficients.size() == 0) throw ArgumentError("observable matrix is empty");
  if (!coefficients.allFinite()) throw ArgumentError("observable coefficients must be finite");
  if (!full_rank(coefficients)) throw ArgumentError("observable coefficient matrix is rank deficient");
  return {ObservableKind::LinearExplicit, std::move(coefficients), 0};
}

ObservableSet planar_reference_observables() {
  Eigen::MatrixXd a(3, 2);
  a << -0.2630, -0.3186,
       -0.2246, 0.0969,
        0.1564, 0.0783;
  return make_explicit_observables(std::move(a));
}

MomentAccumulator::MomentAccumulator(std::size_t k)
    : mean_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k))),
      m2_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k))) {}

void MomentAccumulator::add_block(const double* values, std::size_t rows) {
  if (rows == 0) return;
  const auto k = mean_.size();
  // Sums are taken relative to the block's first row, so a constant block has
  // an exact mean and zero spread.
  const Eigen::Map<const Eigen::VectorXd> shift(values, k);
  Eigen::VectorXd bmean = Eigen::VectorXd::Zero(k);
  for (std::size_t r = 0; r < rows; ++r)
    for (Eigen::Index i = 0; i < k; ++i)
      bmean[i] += values[r * static_cast<std::size_t>(k) + static_cast<std::size_t>(i)] - shift[i];
  bmean /= static_cast<double>(rows);
  bmean += shift;
  Eigen::VectorXd bm2 = Eigen::VectorXd::Zero(k);
  for (std::size_t r = 0; r < rows; ++r)
    for (Eigen::Index i = 0; i < k; ++i) {
      const double d = values[r * static_cast<std::size_t>(k) + static_cast<std::size_t>(i)] - bmean[i];
      bm2[i] += d * d;
    }

  if (count_ == 0) {
    mean_ = bmean;
    m2_ = bm2;
    count_ = rows;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(rows);
  const double total = na + nb;
  const Eigen::VectorXd delta = bmean - mean_;
  mean_ += delta * (nb / total);
  m2_ += bm2 + delta.cwiseProduct(delta) * (na * nb / total);
  count_ += rows;
}

Eigen::VectorXd MomentAccumulator::standard_error() const {
  if (count_ < 2) return Eigen::VectorXd::Zero(mean_.size());
  const double n = static_cast<double>(count_);
  return (m2_ / (n - 1.0)).cwiseSqrt() / std::sqrt(n);
}

namespace {

// Folds endpoint rows into `acc` in kEmbeddingBlock chunks of observable values.
void fold_endpoints(const ObservableSet& obs, const double* endpoints, std::size_t rows,
                    MomentAccumulator& acc, std::vector<double>& scratch) {
  const std::size_t n = obs.n();
  const std::size_t k = obs.k();
  for (std::size_t lo = 0; lo < rows; lo += kEmbeddingBlock) {
    const std::size_t hi = std::min(rows, lo + kEmbeddingBlock);
    scratch.resize((hi - lo) * k);
    for (std::size_t r = lo; r < hi; ++r) obs.evaluate(endpoints + r * n, scratch.data() + (r - lo) * k);
    acc.add_block(scratch.data(), hi - lo);
  }
}

}  // namespace

KoopmanEstimate koopman_estimate(const ObservableSet& obs, const BurstEnsemble& ensemble) {
  if (ensemble.endpoints.rows() == 0) throw ArgumentError("burst ensemble is empty");
  if (static_cast<std::size_t>(ensemble.endpoints.cols()) != obs.n())
    throw ArgumentError("observables do not match the ensemble dimension");
  MomentAccumulator acc(obs.k());
  std::vector<double> scratch;
  fold_endpoints(obs, ensemble.endpoints.data(), static_cast<std::size_t>(ensemble.endpoints.rows()), acc, scratch);
  return {acc.mean(), acc.standard_error()};
}

EmbeddedCloud embed_cloud(const ObservableSet& obs, const std::vector<BurstEnsemble>& bursts) {
  if (bursts.empty()) throw ArgumentError("no burst ensembles to embed");
  const double lag = bursts.front().lag;
  const auto n = bursts.front().start.size();
  for (const auto& b : bursts) {
    if (b.lag != lag) throw ArgumentError("burst ensembles have inconsistent lag times");
    if (b.start.size() != n) throw ArgumentError("burst ensembles have inconsistent dimensions");
  }
  const auto l = static_cast<Eigen::Index>(bursts.size());
  const auto k = static_cast<Eigen::Index>(obs.k());
  EmbeddedCloud cloud;
  cloud.lag = lag;
  cloud.x.resize(l, n);
  cloud.z.resize(l, k);
  cloud.std_error.resize(l, k);
  for (Eigen::Index i = 0; i < l; ++i) {
    const auto est = koopman_estimate(obs, bursts[static_cast<std::size_t>(i)]);
    cloud.x.row(i) = bursts[static_cast<std::size_t>(i)].start.transpose();
    cloud.z.row(i) = est.mean.transpose();
    cloud.std_error.row(i) = est.std_error.transpose();
  }
  return cloud;
}

EmbeddedCloud embed_streaming(const PotentialSystem& sys, const IntegratorConfig& cfg,
                              const EvaluationSet& eval, const ObservableSet& obs, std::size_t replicates,
                              double lag, std::uint64_t seed, NoiseMode mode) {
  if (obs.n() != sys.dim()) throw ArgumentError("observables do not match the system dimension");
  const std::size_t l = eval.size();
  std::vector<MomentAccumulator> accs(l, MomentAccumulator(obs.k()));
  std::vector<std::vector<double>> scratch(l);
  sample_bursts_streaming(
      sys, cfg, eval, replicates, lag, seed,
      [&](std::size_t point, const double* endpoints, std::size_t rows) {
        fold_endpoints(obs, endpoints, rows, accs[point], scratch[point]);
        if (accs[point].count() == replicates) scratch[point] = {};
      },
      mode, kEmbeddingBlock);

  EmbeddedCloud cloud;
  cloud.lag = lag;
  cloud.x = eval.points;
  cloud.z.resize(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(obs.k()));
  cloud.std_error.resizeLike(cloud.z);
  for (std::size_t i = 0; i < l; ++i) {
    cloud.z.row(static_cast<Eigen::Index>(i)) = accs[i].mean().transpose();
    cloud.std_error.row(static_cast<Eigen::Index>(i)) = accs[i].standard_error().transpose();
  }
  return cloud;
}

}  // namespace tmrc
