#include "csl/linalg.hpp"

#include <lapacke.h>
#include <stdexcept>

namespace csl {

namespace {

Eigen::VectorXd dsyev(const Eigen::MatrixXd& A, char jobz, Eigen::MatrixXd* vecs) {
    int n = int(A.rows());
    Eigen::MatrixXd work = A;
    Eigen::VectorXd w(n);
    int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, jobz, 'L', n, work.data(), n, w.data());
    if (info != 0) throw std::runtime_error("dsyev failed, info=" + std::to_string(info));
    if (vecs) *vecs = work;
    return w;
}

Eigen::VectorXd zheev(const Eigen::MatrixXcd& A, char jobz, Eigen::MatrixXcd* vecs) {
    int n = int(A.rows());
    Eigen::MatrixXcd work = A;
    Eigen::VectorXd w(n);
    int info = LAPACKE_zheev(LAPACK_COL_MAJOR, jobz, 'L', n,
                             reinterpret_cast<lapack_complex_double*>(work.data()), n,
                             w.data());
    if (info != 0) throw std::runtime_error("zheev failed, info=" + std::to_string(info));
    if (vecs) *vecs = work;
    return w;
}

} // namespace

Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& A) { return dsyev(A, 'N', nullptr); }

Eigen::VectorXd sym_eigensystem(const Eigen::MatrixXd& A, Eigen::MatrixXd& vectors) {
    return dsyev(A, 'V', &vectors);
}

Eigen::VectorXd herm_eigenvalues(const Eigen::MatrixXcd& A) { return zheev(A, 'N', nullptr); }

Eigen::VectorXd herm_eigensystem(const Eigen::MatrixXcd& A, Eigen::MatrixXcd& vectors) {
    return zheev(A, 'V', &vectors);
}

} // namespace csl
