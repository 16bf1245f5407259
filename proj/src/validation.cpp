#include "tmrc/validation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tmrc/errors.hpp"
#include "tmrc/parallel.hpp"
#include "tmrc/rng.hpp"

namespace tmrc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Per-bin means around the first member of each bin, so a bin of identical
// values reproduces that value exactly.
std::vector<double> bin_means(const std::vector<std::size_t>& bin_of, std::size_t cells, std::span<const double> v) {
  std::vector<double> shift(cells, kNaN), sum(cells, 0.0);
  std::vector<std::size_t> n(cells, 0);
  for (std::size_t i = 0; i < bin_of.size(); ++i) {
    const std::size_t b = bin_of[i];
    if (b == UlamPartition::kOutside) continue;
    if (n[b] == 0) shift[b] = v[i];
    sum[b] += v[i] - shift[b];
    ++n[b];
  }
  for (std::size_t b = 0; b < cells; ++b)
    if (n[b] > 0) shift[b] += sum[b] / static_cast<double>(n[b]);
  return shift;
}

}  // namespace

Eigen::VectorXd BinnedConditional::project(std::span<const double> g) const {
  if (g.size() != bin_of.size()) throw ArgumentError("projected values must match the sample count");
  const auto m = bin_means(bin_of, bins.cell_count(), g);
  Eigen::VectorXd out(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = bin_of[i] == UlamPartition::kOutside ? kNaN : m[bin_of[i]];
  return out;
}

Eigen::VectorXd BinnedConditional::projected() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(bin_of.size()));
  for (std::size_t i = 0; i < bin_of.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = bin_of[i] == UlamPartition::kOutside ? kNaN : means[bin_of[i]];
  return out;
}

BinnedConditional binned_projection(const PointMatrix& rc, std::span<const double> f, const UlamPartition& bins) {
  if (rc.rows() == 0) throw ArgumentError("binned projection needs at least one sample");
  if (static_cast<std::size_t>(rc.rows()) != f.size()) throw ArgumentError("rc values and f values differ in length");
  BinnedConditional bc{bins, {}, {}, {}, 0};
  const auto a = assign_cells(bins, rc);
  bc.bin_of = a.cells;
  bc.excluded = a.outside;
  bc.weights.assign(bins.cell_count(), 0);
  for (std::size_t b : bc.bin_of)
    if (b != UlamPartition::kOutside) ++bc.weights[b];
  bc.means = bin_means(bc.bin_of, bins.cell_count(), f);
  return bc;
}

ProjectionReport projection_property_check(const BinnedConditional& bc, std::span<const double> f,
                                           std::span<const double> g) {
  if (f.size() != bc.bin_of.size() || g.size() != bc.bin_of.size())
    throw ArgumentError("test functions must match the sample count");
  const Eigen::VectorXd pf = bc.project(f);
  const Eigen::VectorXd pg = bc.project(g);
  const Eigen::VectorXd ppf = bc.project(std::span<const double>(pf.data(), static_cast<std::size_t>(pf.size())));

  ProjectionReport rep;
  double pf_g = 0.0, f_pg = 0.0, npf = 0.0, nf = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (bc.bin_of[i] == UlamPartition::kOutside) continue;
    const auto k = static_cast<Eigen::Index>(i);
    rep.idempotence_gap = std::max(rep.idempotence_gap, std::abs(ppf[k] - pf[k]));
    pf_g += pf[k] * g[i];
    f_pg += f[i] * pg[k];
    npf += pf[k] * pf[k];
    nf += f[i] * f[i];
    ++n;
  }
  if (n > 0) {
    const double w = 1.0 / static_cast<double>(n);
    rep.self_adjointness_gap = std::abs(pf_g * w - f_pg * w);
    rep.expansiveness_gap = std::max(0.0, std::sqrt(npf * w) - std::sqrt(nf * w));
  }
  return rep;
}

namespace {

Eigen::MatrixXd random_orthogonal(std::size_t s, RngStream& rng) {
  const auto n = static_cast<Eigen::Index>(s);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    std::vector<double> col(s);
    rng.fill_normals(col);
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = col[static_cast<std::size_t>(i)];
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Eigen::VectorXd random_unit_orthogonal_to(const Eigen::MatrixXd& basis, Eigen::Index cols, RngStream& rng) {
  const Eigen::Index n = basis.rows();
  for (int attempt = 0; attempt < 16; ++attempt) {
    std::vector<double> raw(static_cast<std::size_t>(n));
    rng.fill_normals(raw);
    Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(raw.data(), n);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index c = 0; c < cols; ++c) v -= basis.col(c).dot(v) * basis.col(c);
    const double nv = v.norm();
    if (nv > 1e-6) return v / nv;
  }
  throw ImprobableFailureError("could not draw a direction outside the current subspace");
}

struct TrialOutcome {
  double gap = 0.0;
  double leak = 0.0;
};

TrialOutcome perturbation_trial(std::size_t s, std::size_t q, double eps, std::optional<double> leak,
                                RngStream& rng) {
  const auto n = static_cast<Eigen::Index>(s);
  for (int attempt = 0; attempt < 10; ++attempt) {
    const Eigen::MatrixXd u_basis = random_orthogonal(s, rng);
    Eigen::VectorXd lambda(n);
    for (Eigen::Index i = 0; i < n; ++i) lambda[i] = 2.0 * rng.next_uniform() - 1.0;
    const Eigen::MatrixXd t = u_basis * lambda.asDiagonal() * u_basis.transpose();
    const Eigen::VectorXd u = u_basis.col(0);

    const double delta = leak ? *leak : eps * rng.next_uniform();
    Eigen::MatrixXd b(n, static_cast<Eigen::Index>(q));
    Eigen::MatrixXd tmp(n, 1);
    tmp.col(0) = u;
    Eigen::VectorXd b1 = std::sqrt(1.0 - delta * delta) * u;
    if (delta > 0.0 && q < s) b1 += delta * random_unit_orthogonal_to(tmp, 1, rng);
    b.col(0) = b1.normalized();
    // The remaining directions must not pick up any more of u, or the leak
    // would shrink below delta; keep them orthogonal to u as well.
    Eigen::MatrixXd span(n, static_cast<Eigen::Index>(q) + 1);
    span.col(0) = u;
    span.col(1) = (b1 - u.dot(b1) * u);
    const bool has_perp = span.col(1).norm() > 1e-12;
    Eigen::Index fixed = 1;
    if (has_perp) {
      span.col(1).normalize();
      fixed = 2;
    }
    for (std::size_t c = 1; c < q; ++c) {
      Eigen::VectorXd v;
      if (q == s) {
        v = random_unit_orthogonal_to(b, static_cast<Eigen::Index>(c), rng);
      } else {
        v = random_unit_orthogonal_to(span, fixed, rng);
        span.col(fixed++) = v;
      }
      b.col(static_cast<Eigen::Index>(c)) = v;
    }
    const Eigen::MatrixXd proj = b * b.transpose();
    const double realized = (u - proj * u).norm();
    if (!leak && realized >= eps) continue;

    const Eigen::MatrixXd tq = proj * t * proj;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (tq + tq.transpose()), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("dense eigensolver failed in the perturbation oracle");
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) gap = std::min(gap, std::abs(es.eigenvalues()[i] - lambda[0]));
    return {gap, realized};
  }
  throw ImprobableFailureError("could not construct a projection with the requested leak");
}

}  // namespace

PerturbationReport perturbation_oracle(std::size_t size, std::size_t subspace, double eps, std::size_t trials,
                                       std::uint64_t seed, std::optional<double> leak) {
  if (subspace == 0 || subspace > size) throw ArgumentError("subspace dimension must lie in [1, size]");
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("eps must lie in (0, 1)");
  if (leak && !(*leak >= 0.0 && *leak < 1.0)) throw ArgumentError("leak must lie in [0, 1)");
  if (subspace == size && leak && *leak > 0.0) throw ArgumentError("a full-rank projection cannot leak");

  std::vector<TrialOutcome> out(trials);
  parallel_for(trials, [&](std::size_t i) {
    RngStream rng(seed, burst_stream_id(i, 0));
    out[i] = perturbation_trial(size, subspace, eps, leak, rng);
  });

  PerturbationReport rep;
  rep.trials = trials;
  rep.bound = eps / std::sqrt(1.0 - eps * eps);
  for (const auto& o : out) {
    rep.max_gap = std::max(rep.max_gap, o.gap);
    rep.max_leak = std::max(rep.max_leak, o.leak);
    const double bound_here = leak ? std::max(*leak, 0.0) / std::sqrt(1.0 - *leak * *leak) : rep.bound;
    if (o.gap >= std::max(bound_here, 1e-12)) ++rep.violations;
  }
  return rep;
}

double parametrization_score(std::span<const double> phi, const PointMatrix& rc, const UlamPartition& bins) {
  if (static_cast<std::size_t>(rc.rows()) != phi.size()) throw ArgumentError("eigenvector and rc values differ in length");
  const auto bc = binned_projection(rc, phi, bins);
  double mean = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < phi.size(); ++i)
    if (bc.bin_of[i] != UlamPartition::kOutside) {
      mean += phi[i];
      ++n;
    }
  if (n == 0) throw ArgumentError("no sample falls inside the bins");
  mean /= static_cast<double>(n);
  double total = 0.0, within = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (bc.bin_of[i] == UlamPartition::kOutside) continue;
    total += (phi[i] - mean) * (phi[i] - mean);
    const double d = phi[i] - bc.means[bc.bin_of[i]];
    within += d * d;
  }
  if (total == 0.0) return 1.0;
  return std::clamp(1.0 - within / total, 0.0, 1.0);
}

std::vector<double> eigenvector_on_samples(const SpectrumReport& report, const CellAssignment& cells,
                                           std::size_t index) {
  if (index >= static_cast<std::size_t>(report.eigenvectors.cols()))
    throw ArgumentError("eigenvector index not available in the report");
  std::vector<double> out(cells.cells.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t c = cells.cells[i];
    out[i] = c == UlamPartition::kOutside || c >= static_cast<std::size_t>(report.eigenvectors.rows())
                 ? kNaN
                 : report.eigenvectors(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(index));
  }
  return out;
}

std::vector<Core> default_cores(const PotentialSystem& sys, double radius) {
  const auto n = static_cast<Eigen::Index>(sys.dim());
  std::vector<Core> cores;
  auto planar = [&](double a, double b) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    c[0] = a;
    c[1] = b;
    cores.push_back({c, radius});
  };
  switch (sys.kind()) {
    case PotentialKind::CurvedDoubleWell:
      planar(-1.0, 0.0);
      planar(1.0, 0.0);
      break;
    case PotentialKind::Circular: {
      const int wells = static_cast<int>(sys.params().at(0));
      for (int j = 0; j < wells; ++j) {
        const double theta = (2.0 * j + 1.0) * std::numbers::pi / wells;
        planar(std::cos(theta), std::sin(theta));
      }
      break;
    }
    case PotentialKind::QuadHilly:
    case PotentialKind::QuadFlat:
      planar(1.0, 1.0);
      planar(1.0, -1.0);
      planar(-1.0, -1.0);
      planar(-1.0, 1.0);
      break;
    case PotentialKind::Harmonic:
      cores.push_back({Eigen::VectorXd::Zero(n), radius});
      break;
    case PotentialKind::Zero:
      throw ArgumentError("the zero potential has no minima to place cores at");
  }
  return cores;
}

double CommittorEstimate::std_error(std::size_t i) const {
  const std::size_t decided = replicates - undecided;
  if (decided == 0) return 0.0;
  const double p = q[static_cast<Eigen::Index>(i)];
  return std::sqrt(p * (1.0 - p) / static_cast<double>(decided));
}

CommittorEstimate committor_estimate(const PotentialSystem& sys, const IntegratorConfig& cfg, const Eigen::VectorXd& x,
                                     const std::vector<Core>& cores, std::size_t replicates, double t_max,
                                     std::uint64_t seed, std::size_t point_index) {
  const std::size_t dim = sys.dim();
  if (static_cast<std::size_t>(x.size()) != dim) throw ArgumentError("start point dimension mismatch");
  if (cores.empty()) throw ArgumentError("at least one core is required");
  if (replicates == 0) throw ArgumentError("committor needs at least one replicate");
  for (const auto& c : cores) {
    if (static_cast<std::size_t>(c.center.size()) != dim || !(c.radius > 0.0))
      throw ArgumentError("core centers must match the state dimension and radii be positive");
  }
  for (std::size_t a = 0; a < cores.size(); ++a)
    for (std::size_t b = a + 1; b < cores.size(); ++b)
      if ((cores[a].center - cores[b].center).norm() < cores[a].radius + cores[b].radius)
        throw ArgumentError("cores must be disjoint");
  const std::size_t steps = steps_for(t_max, cfg);

  auto core_of = [&](const double* p) -> std::size_t {
    for (std::size_t c = 0; c < cores.size(); ++c) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        const double d = p[j] - cores[c].center[static_cast<Eigen::Index>(j)];
        d2 += d * d;
      }
      if (d2 <= cores[c].radius * cores[c].radius) return c;
    }
    return cores.size();
  };

  const std::size_t none = cores.size();
  std::vector<std::size_t> outcome(replicates, none);
  const std::size_t start_core = core_of(x.data());
  const double h = cfg.step;
  const double scale = std::sqrt(2.0 * h / sys.beta());
  if (start_core != none) {
    std::fill(outcome.begin(), outcome.end(), start_core);
  } else {
    parallel_for(replicates, [&](std::size_t m) {
      RngStream rng(seed, burst_stream_id(point_index, m));
      std::vector<double> state(x.data(), x.data() + dim), grad(dim), noise(dim);
      for (std::size_t s = 0; s < steps; ++s) {
        sys.gradient_unchecked(state.data(), grad.data());
        rng.fill_normals(noise);
        for (std::size_t j = 0; j < dim; ++j) {
          state[j] = state[j] - h * grad[j] + scale * noise[j];
          if (!std::isfinite(state[j]) || std::abs(state[j]) > kBlowUpThreshold)
            throw InstabilityError("committor replicate " + std::to_string(m) + " blew up at step " +
                                   std::to_string(s + 1));
        }
        const std::size_t c = core_of(state.data());
        if (c != none) {
          outcome[m] = c;
          return;
        }
      }
    });
  }

  CommittorEstimate est;
  est.x = x;
  est.cores = cores;
  est.replicates = replicates;
  est.t_max = t_max;
  est.hits.assign(cores.size(), 0);
  for (std::size_t o : outcome) {
    if (o == none)
      ++est.undecided;
    else
      ++est.hits[o];
  }
  est.q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cores.size()));
  const std::size_t decided = replicates - est.undecided;
  if (decided > 0) {
    for (std::size_t c = 0; c < cores.size(); ++c)
      est.q[static_cast<Eigen::Index>(c)] = static_cast<double>(est.hits[c]) / static_cast<double>(decided);
  }
  if (2 * est.undecided > replicates) {
    est.inconclusive = true;
    est.warning = "inconclusive: " + std::to_string(est.undecided) + " of " + std::to_string(replicates) +
                  " replicates reached no core before t_max";
  }
  return est;
}

}  // namespace tmrc
