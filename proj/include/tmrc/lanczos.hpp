#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>

namespace tmrc {

struct LanczosResult {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns, unit norm
  std::size_t iterations = 0;
  bool converged = false;
};

/// y = A x for a symmetric operator of size n.
using SymmetricApply = std::function<void(const double* x, double* y)>;

/// Largest-algebraic eigenpairs of a symmetric operator by Lanczos with full
/// reorthogonalization. Invariant subspaces are handled by restarting from a
/// fresh random direction, so repeated eigenvalues are resolved. Converged
/// when every wanted Ritz residual is below tol.
LanczosResult lanczos_largest(const SymmetricApply& apply, std::size_t n, std::size_t nev, double tol = 1e-10,
                              std::size_t max_iter = 0, std::uint64_t seed = 0x1a2b3c4dULL);

}  // namespace tmrc
