#include "tmrc/lanczos.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tmrc/errors.hpp"
#include "tmrc/rng.hpp"
#include "tmrc/simd/kernels.hpp"

namespace tmrc {

namespace {

void orthogonalize(const Eigen::MatrixXd& basis, std::size_t cols, double* w, std::size_t n) {
  const auto& k = simd::active();
  // Two passes of classical Gram-Schmidt.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < cols; ++i) {
      const double* v = basis.col(static_cast<Eigen::Index>(i)).data();
      const double c = k.dot(w, v, n);
      k.axpy(-c, v, w, n);
    }
  }
}

double norm(const double* w, std::size_t n) { return std::sqrt(simd::active().dot(w, w, n)); }

}  // namespace

LanczosResult lanczos_largest(const SymmetricApply& apply, std::size_t n, std::size_t nev, double tol,
                              std::size_t max_iter, std::uint64_t seed) {
  if (n == 0 || nev == 0 || nev > n) throw ArgumentError("lanczos: need 0 < nev <= n");
  if (max_iter == 0) max_iter = std::min<std::size_t>(n, std::max<std::size_t>(1000, 20 * nev));
  max_iter = std::min(max_iter, n);
  max_iter = std::max(max_iter, nev);

  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd basis(N, static_cast<Eigen::Index>(max_iter + 1));
  std::vector<double> alpha, beta;
  RngStream rng(seed, auxiliary_stream_id(3));

  auto random_direction = [&](std::size_t filled) -> bool {
    for (int attempt = 0; attempt < 8; ++attempt) {
      double* v = basis.col(static_cast<Eigen::Index>(filled)).data();
      for (std::size_t i = 0; i < n; ++i) v[i] = rng.next_uniform() - 0.5;
      orthogonalize(basis, filled, v, n);
      const double nv = norm(v, n);
      if (nv > 1e-8) {
        for (std::size_t i = 0; i < n; ++i) v[i] /= nv;
        return true;
      }
    }
    return false;
  };

  random_direction(0);
  std::vector<double> w(n);
  LanczosResult result;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;

  std::size_t m = 0;
  for (std::size_t j = 0; j < max_iter; ++j) {
    const double* vj = basis.col(static_cast<Eigen::Index>(j)).data();
    apply(vj, w.data());
    const double a = simd::active().dot(w.data(), vj, n);
    alpha.push_back(a);
    orthogonalize(basis, j + 1, w.data(), n);
    double b = norm(w.data(), n);
    m = j + 1;

    bool exhausted = m == n;
    if (!exhausted) {
      double* next = basis.col(static_cast<Eigen::Index>(j + 1)).data();
      if (b > 1e-10) {
        for (std::size_t i = 0; i < n; ++i) next[i] = w[i] / b;
      } else {
        b = 0.0;
        if (!random_direction(j + 1)) exhausted = true;
      }
    }
    beta.push_back(b);

    const bool check = exhausted || m == max_iter || (m >= nev && (m % 10 == 0));
    if (!check) continue;

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
      t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = alpha[i];
      if (i + 1 < m) {
        t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = beta[i];
        t(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = beta[i];
      }
    }
    tri.compute(t);
    // Ascending order: wanted pairs are the last nev columns.
    bool ok = m >= nev;
    for (std::size_t q = 0; ok && q < nev; ++q) {
      const auto col = static_cast<Eigen::Index>(m - 1 - q);
      const double resid = std::abs(b * tri.eigenvectors()(static_cast<Eigen::Index>(m - 1), col));
      if (resid > tol) ok = false;
    }
    if (ok || exhausted || m == max_iter) {
      result.converged = ok || exhausted;
      break;
    }
  }

  const std::size_t take = std::min(nev, m);
  result.iterations = m;
  result.values.resize(static_cast<Eigen::Index>(take));
  result.vectors.resize(N, static_cast<Eigen::Index>(take));
  const Eigen::MatrixXd ritz =
      basis.leftCols(static_cast<Eigen::Index>(m)) * tri.eigenvectors().rightCols(static_cast<Eigen::Index>(take));
  for (std::size_t q = 0; q < take; ++q) {
    const auto src = static_cast<Eigen::Index>(take - 1 - q);
    result.values[static_cast<Eigen::Index>(q)] = tri.eigenvalues()[static_cast<Eigen::Index>(m - 1 - q)];
    result.vectors.col(static_cast<Eigen::Index>(q)) = ritz.col(src).normalized();
  }
  return result;
}

}  // namespace tmrc
