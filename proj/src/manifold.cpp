#include "tmrc/manifold.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "tmrc/errors.hpp"
#include "tmrc/lanczos.hpp"
#include "tmrc/parallel.hpp"
#include "tmrc/simd/kernels.hpp"

namespace tmrc {

namespace {

std::size_t rows_of(const PointMatrix& m) { return static_cast<std::size_t>(m.rows()); }
std::size_t cols_of(const PointMatrix& m) { return static_cast<std::size_t>(m.cols()); }

// Squared distances from row i of z to every row.
void row_sqdists(const PointMatrix& z, std::size_t i, std::vector<double>& out) {
  const std::size_t l = rows_of(z);
  const std::size_t k = cols_of(z);
  out.resize(l);
  simd::active().sqdist_rows(z.data() + i * k, z.data(), l, k, out.data());
}

// Indices of the m nearest rows to row i (i itself included), ordered by
// (distance, index).
std::vector<std::size_t> nearest_indices(const std::vector<double>& d, std::size_t m) {
  std::vector<std::size_t> idx(d.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) { return d[a] < d[b] || (d[a] == d[b] && a < b); };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m), idx.end(), less);
  idx.resize(m);
  return idx;
}

}  // namespace

KernelMatrix build_kernel(const PointMatrix& z, double sigma, double cutoff) {
  if (!(sigma > 0.0)) throw ArgumentError("kernel scale sigma must be positive");
  if (!(cutoff > 0.0)) throw ArgumentError("kernel cutoff must be positive");
  const std::size_t l = rows_of(z);
  if (l == 0) throw ArgumentError("kernel needs at least one point");

  std::vector<std::vector<std::pair<std::size_t, double>>> rows(l);
  parallel_for(l, [&](std::size_t i) {
    std::vector<double> d;
    row_sqdists(z, i, d);
    auto& row = rows[i];
    for (std::size_t j = 0; j < l; ++j) {
      const double s = d[j] / sigma;
      if (s <= cutoff) row.emplace_back(j, std::exp(-s));
    }
  });

  KernelMatrix out;
  out.sigma = sigma;
  out.cutoff = cutoff;
  std::size_t nnz = 0;
  for (const auto& r : rows) nnz += r.size();
  out.w.resize(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l));
  out.w.reserve(static_cast<Eigen::Index>(nnz));
  for (std::size_t i = 0; i < l; ++i) {
    out.w.startVec(static_cast<Eigen::Index>(i));
    for (const auto& [j, v] : rows[i])
      out.w.insertBack(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    if (rows[i].size() <= 1) out.isolated.push_back(i);
  }
  out.w.finalize();
  return out;
}

double median_neighbor_scale(const PointMatrix& z, std::size_t neighbor) {
  const std::size_t l = rows_of(z);
  if (l < 2) throw ArgumentError("kernel scale needs at least two points");
  const std::size_t rank = std::min(neighbor, l - 1);
  std::vector<double> kth(l);
  parallel_for(l, [&](std::size_t i) {
    std::vector<double> d;
    row_sqdists(z, i, d);
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(rank), d.end());
    kth[i] = d[rank];
  });
  std::sort(kth.begin(), kth.end());
  const double med = l % 2 == 1 ? kth[l / 2] : 0.5 * (kth[l / 2 - 1] + kth[l / 2]);
  if (!(med > 0.0)) throw ArgumentError("median neighbor distance is zero; cloud is degenerate");
  return med;
}

SparseMatrix diffusion_transition_matrix(const SparseMatrix& w) {
  const Eigen::VectorXd d = w * Eigen::VectorXd::Ones(w.cols());
  SparseMatrix wt = w;
  for (Eigen::Index i = 0; i < wt.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(wt, i); it; ++it) it.valueRef() = it.value() / (d[it.row()] * d[it.col()]);
  const Eigen::VectorXd dt = wt * Eigen::VectorXd::Ones(wt.cols());
  for (Eigen::Index i = 0; i < wt.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(wt, i); it; ++it) it.valueRef() = it.value() / dt[it.row()];
  return wt;
}

std::size_t connected_components(const SparseMatrix& w) {
  const auto l = static_cast<std::size_t>(w.rows());
  std::vector<char> seen(l, 0);
  std::size_t components = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < l; ++s) {
    if (seen[s]) continue;
    ++components;
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (SparseMatrix::InnerIterator it(w, static_cast<Eigen::Index>(i)); it; ++it) {
        const auto j = static_cast<std::size_t>(it.col());
        if (it.value() > 0.0 && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
  }
  return components;
}

PointMatrix DiffusionMapModel::coordinates() const {
  const auto l = static_cast<Eigen::Index>(size());
  PointMatrix out(l, static_cast<Eigen::Index>(r));
  for (std::size_t c = 1; c <= r; ++c)
    out.col(static_cast<Eigen::Index>(c - 1)) =
        eigenvalues[static_cast<Eigen::Index>(c)] * eigenvectors.col(static_cast<Eigen::Index>(c));
  return out;
}

DiffusionMapModel fit_diffmap(const KernelMatrix& kernel, const PointMatrix& training,
                              const DiffusionMapOptions& options) {
  const SparseMatrix& w = kernel.w;
  const auto l = static_cast<std::size_t>(w.rows());
  if (l == 0 || w.rows() != w.cols()) throw ArgumentError("kernel matrix must be square and nonempty");
  if (rows_of(training) != l) throw ArgumentError("training cloud does not match the kernel size");
  if (options.r == 0 || options.r + 1 > l) throw ArgumentError("diffusion map needs 1 <= r < cloud size");

  const std::size_t comps = connected_components(w);
  if (comps > 1) {
    std::ostringstream os;
    os << "kernel graph has " << comps << " connected components (eigenvalue 1 is repeated); "
       << "increase the cutoff R or the scale sigma";
    throw DisconnectedCloudError(os.str());
  }

  const Eigen::VectorXd d = w * Eigen::VectorXd::Ones(w.cols());
  if (!(d.minCoeff() > 0.0)) throw ArgumentError("kernel has a row with nonpositive sum");
  SparseMatrix s = w;
  for (Eigen::Index i = 0; i < s.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(s, i); it; ++it) it.valueRef() = it.value() / (d[it.row()] * d[it.col()]);
  const Eigen::VectorXd dt = s * Eigen::VectorXd::Ones(s.cols());
  const Eigen::VectorXd root = dt.cwiseSqrt();
  for (Eigen::Index i = 0; i < s.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(s, i); it; ++it)
      it.valueRef() = it.value() / (root[it.row()] * root[it.col()]);

  const std::size_t nev = std::min(l, options.r + 1 + options.extra);
  Eigen::VectorXd values(static_cast<Eigen::Index>(nev));
  Eigen::MatrixXd vectors(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(nev));

  if (l <= options.dense_limit) {
    const Eigen::MatrixXd dense = Eigen::MatrixXd(s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    if (es.info() != Eigen::Success) throw NumericError("dense diffusion map eigensolver failed");
    for (std::size_t q = 0; q < nev; ++q) {
      const auto src = static_cast<Eigen::Index>(l - 1 - q);
      values[static_cast<Eigen::Index>(q)] = es.eigenvalues()[src];
      vectors.col(static_cast<Eigen::Index>(q)) = es.eigenvectors().col(src);
    }
  } else {
    const auto res = lanczos_largest(
        [&](const double* x, double* y) {
          Eigen::Map<const Eigen::VectorXd> xv(x, static_cast<Eigen::Index>(l));
          Eigen::Map<Eigen::VectorXd> yv(y, static_cast<Eigen::Index>(l));
          yv.noalias() = s * xv;
        },
        l, nev, 1e-9, 2000);
    if (!res.converged) throw NumericError("Lanczos did not converge for the diffusion map eigenproblem");
    values = res.values;
    vectors = res.vectors;
  }

  if (nev > 1 && values[1] >= 1.0 - 1e-8) {
    throw DisconnectedCloudError(
        "diffusion map eigenvalue 1 is repeated within 1e-8; increase the cutoff R or the scale sigma");
  }

  DiffusionMapModel model;
  model.training = training;
  model.sigma = kernel.sigma;
  model.cutoff = kernel.cutoff;
  model.r = options.r;
  model.isolated = kernel.isolated;
  model.eigenvalues = values;
  model.eigenvectors.resize(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(nev));
  for (std::size_t q = 0; q < nev; ++q) {
    Eigen::VectorXd psi = vectors.col(static_cast<Eigen::Index>(q)).cwiseQuotient(root);
    const double scale = psi.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      if (std::abs(psi[i]) > 1e-12 * scale) {
        if (psi[i] < 0.0) psi = -psi;
        break;
      }
    }
    model.eigenvectors.col(static_cast<Eigen::Index>(q)) = psi;
  }
  if (nev > options.r + 1) {
    const double gr = values[static_cast<Eigen::Index>(options.r)];
    const double gn = values[static_cast<Eigen::Index>(options.r + 1)];
    model.weak_separation = gr != 0.0 && gn / gr > 0.9;
  }
  return model;
}

DiffusionMapModel fit_diffmap(const PointMatrix& training, double sigma, double cutoff,
                              const DiffusionMapOptions& options) {
  if (!(sigma > 0.0)) sigma = median_neighbor_scale(training);
  return fit_diffmap(build_kernel(training, sigma, cutoff), training, options);
}

ReactionCoordinate ReactionCoordinate::from_model(DiffusionMapModel model) {
  ReactionCoordinate rc;
  rc.values = model.coordinates();
  rc.model = std::move(model);
  return rc;
}

PointMatrix nearest_neighbor_values(const PointMatrix& reference, const PointMatrix& values,
                                    const PointMatrix& queries) {
  if (reference.rows() == 0) throw StateError("nearest-neighbor extension over an empty reference set");
  if (reference.rows() != values.rows()) throw ArgumentError("reference and value rows differ");
  if (queries.cols() != reference.cols()) throw ArgumentError("query dimension does not match the reference");
  const std::size_t q = rows_of(queries);
  const std::size_t k = cols_of(reference);
  PointMatrix out(static_cast<Eigen::Index>(q), values.cols());
  parallel_for(q, [&](std::size_t i) {
    const std::size_t j = simd::active().nearest_row(queries.data() + i * k, reference.data(), rows_of(reference), k, nullptr);
    out.row(static_cast<Eigen::Index>(i)) = values.row(static_cast<Eigen::Index>(j));
  });
  return out;
}

PointMatrix evaluate_rc(const ReactionCoordinate& rc, const PointMatrix& queries) {
  if (rc.model.size() == 0) throw StateError("reaction coordinate has no fitted model");
  return nearest_neighbor_values(rc.model.training, rc.values, queries);
}

namespace {

DimensionEstimate local_dimensions(const PointMatrix& z, const PointMatrix* noise, std::size_t m,
                                   double explained) {
  const std::size_t l = rows_of(z);
  const std::size_t k = cols_of(z);
  if (m < k + 1) throw ArgumentError("neighborhood size must be at least embedding dimension + 1");
  if (l < m) throw ArgumentError("cloud is smaller than the neighborhood size");
  if (noise && (noise->rows() != z.rows() || noise->cols() != z.cols()))
    throw ArgumentError("standard error matrix must match the cloud shape");

  DimensionEstimate est;
  est.local.assign(l, 0);
  parallel_for(l, [&](std::size_t i) {
    std::vector<double> d;
    row_sqdists(z, i, d);
    const auto nb = nearest_indices(d, m);
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
    for (std::size_t a = 0; a < m; ++a) pts.row(static_cast<Eigen::Index>(a)) = z.row(static_cast<Eigen::Index>(nb[a]));
    const Eigen::RowVectorXd mean = pts.colwise().mean();
    pts.rowwise() -= mean;
    const Eigen::MatrixXd cov = pts.transpose() * pts / static_cast<double>(m - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = es.eigenvalues().reverse();
    if (noise) {
      // The trace of the noise covariance bounds the noise power along any single direction.
      double floor = 0.0;
      for (std::size_t a = 0; a < m; ++a) floor += noise->row(static_cast<Eigen::Index>(nb[a])).squaredNorm();
      ev.array() -= floor / static_cast<double>(m);
    }
    ev = ev.cwiseMax(0.0);
    const double total = ev.sum();
    if (!(total > 0.0)) return;
    double cum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      cum += ev[static_cast<Eigen::Index>(c)];
      if (cum >= explained * total * (1.0 - 1e-12)) {
        est.local[i] = c + 1;
        return;
      }
    }
    est.local[i] = k;
  });

  est.histogram.assign(k + 1, 0);
  for (auto c : est.local) ++est.histogram[c];
  const auto first = est.histogram.begin() + (noise ? 1 : 0);
  if (noise && std::all_of(first, est.histogram.end(), [](std::size_t n) { return n == 0; })) {
    est.vote = 0;
  } else {
    est.vote = static_cast<std::size_t>(std::max_element(first, est.histogram.end()) - est.histogram.begin());
  }
  return est;
}

}  // namespace

DimensionEstimate dimension_diagnostic(const PointMatrix& z, std::size_t m, double explained) {
  return local_dimensions(z, nullptr, m, explained);
}

DimensionEstimate dimension_diagnostic(const PointMatrix& z, const PointMatrix& std_error, std::size_t m,
                                       double explained) {
  return local_dimensions(z, &std_error, m, explained);
}

}  // namespace tmrc
