#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace eopt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thin SVD M = U diag(s) V^T with s descending; U is p x (p^n), V is n x (p^n).
struct SpectralDecomposition {
  Vector singular_values;
  Matrix left_vectors;
  Matrix right_vectors;
};

/// Full thin SVD via LAPACK divide-and-conquer. Throws NumericalError on
/// non-finite input or when LAPACK fails to converge.
SpectralDecomposition full_svd(const Matrix& m);

/// Eigenvalues of M M^T when rows <= cols (M^T M otherwise), descending;
/// i.e. the squared singular values without vectors.
std::vector<double> gram_eigenvalues(const Matrix& m);

/// Symmetric eigendecomposition, eigenvalues descending with matching columns.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};
SymmetricEigen symmetric_eigen(const Matrix& sym, bool with_vectors = true);

/// True when the linked BLAS multiplies correctly (checked once per process
/// against a naive product). Every decomposition below throws NumericalError
/// when it does not.
bool blas_self_check();

/// Name of the BLAS kernel set in use, or "unknown" for a non-OpenBLAS build.
std::string blas_corename();

/// For executables: when the BLAS self-check fails and OPENBLAS_CORETYPE is
/// unset, re-executes the current program once with a generic kernel set.
/// OpenBLAS picks its kernels at load time, so this cannot be done in-process.
void reexec_if_blas_broken(char** argv);

/// Q factor (m x k, orthonormal columns) of the QR factorization of an m x k
/// matrix with m >= k, with column signs fixed so that diag(R) >= 0.
Matrix orthonormal_q(Matrix m);

}  // namespace eopt
