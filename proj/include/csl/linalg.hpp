// linalg.hpp
// Thin LAPACK wrappers for dense symmetric/Hermitian eigenproblems used by
// the Hessian and Bloch modules (sizes up to a few thousand).
#pragma once

#include "csl/types.hpp"

namespace csl {

// Ascending eigenvalues of a real symmetric matrix; fills vectors (columns)
// when requested.  Throws std::runtime_error on LAPACK failure.
Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& A);
Eigen::VectorXd sym_eigensystem(const Eigen::MatrixXd& A, Eigen::MatrixXd& vectors);

// Ascending eigenvalues of a complex Hermitian matrix.
Eigen::VectorXd herm_eigenvalues(const Eigen::MatrixXcd& A);
Eigen::VectorXd herm_eigensystem(const Eigen::MatrixXcd& A, Eigen::MatrixXcd& vectors);

} // namespace csl
