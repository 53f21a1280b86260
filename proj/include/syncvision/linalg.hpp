#pragma once

#include <cstddef>
#include <vector>

namespace syncvision::linalg {

/// Dense row-major symmetric matrix eigen-decomposition result.
/// `vectors` holds eigenvectors as rows (vectors[k*n + i] is component i of
/// eigenvector k), ordered by descending eigenvalue.
struct SymmetricEigen {
  std::size_t n = 0;
  std::vector<double> values;
  std::vector<double> vectors;
  int sweeps = 0;
  bool converged = false;
};

/// Cyclic Jacobi rotation method. `a` is n*n row-major and must be symmetric.
/// Stops when the off-diagonal Frobenius norm falls below
/// `tolerance` * (Frobenius norm of a), or after `max_sweeps`.
SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t n,
                            double tolerance = 1e-10, int max_sweeps = 100);

/// Solves the square system A x = b by Gaussian elimination with partial
/// pivoting. Returns false when a pivot falls below `singular_tol` relative to
/// the largest entry of A.
bool solve_linear(std::vector<double> a, std::vector<double> b, std::size_t n,
                  std::vector<double>& x, double singular_tol = 1e-12);

}  // namespace syncvision::linalg
