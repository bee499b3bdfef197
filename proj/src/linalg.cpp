#include "eopt/linalg.hpp"

#include <lapacke.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "eopt/errors.hpp"

namespace eopt {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NumericalError(std::string(what) + ": input has non-finite entries");
}

void check_info(lapack_int info, const char* routine) {
  if (info < 0) throw std::invalid_argument(std::string(routine) + ": illegal argument " +
                                            std::to_string(-info));
  if (info > 0) throw NumericalError(std::string(routine) + " failed to converge");
}

}  // namespace

extern "C" char* openblas_get_corename(void) __attribute__((weak));

namespace {

bool run_blas_check() {
  // Large enough to reach the blocked kernels.
  const Eigen::Index n = 260;
  const Eigen::Index k = 300;
  Matrix a(n, k);
  Matrix b(k, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      a(i, j) = std::sin(0.37 * static_cast<double>(i) + 1.3 * static_cast<double>(j));
      b(j, i) = std::cos(0.11 * static_cast<double>(j) - 0.7 * static_cast<double>(i));
    }
  const Matrix c = a * b;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double acc = 0.0;
      for (Eigen::Index l = 0; l < k; ++l) acc += a(i, l) * b(l, j);
      worst = std::max(worst, std::abs(acc - c(i, j)));
    }
  return worst < 1e-9;
}

void ensure_blas() {
  if (!blas_self_check())
    throw NumericalError("the linked BLAS (kernel set '" + blas_corename() +
                         "') returns wrong matrix products; set OPENBLAS_CORETYPE=Haswell");
}

}  // namespace

bool blas_self_check() {
  static const bool ok = run_blas_check();
  return ok;
}

std::string blas_corename() {
  if (openblas_get_corename == nullptr) return "unknown";
  const char* name = openblas_get_corename();
  return name ? name : "unknown";
}

void reexec_if_blas_broken(char** argv) {
  if (blas_self_check() || std::getenv("OPENBLAS_CORETYPE") != nullptr) return;
  const std::string core = blas_corename() == "cooperlake" ? "SkylakeX" : "Haswell";
  ::setenv("OPENBLAS_CORETYPE", core.c_str(), 1);
  ::execv("/proc/self/exe", argv);
  // execv only returns on failure; the decompositions will report the problem.
}

SpectralDecomposition full_svd(const Matrix& m) {
  require_finite(m, "full_svd");
  ensure_blas();
  const lapack_int rows = static_cast<lapack_int>(m.rows());
  const lapack_int cols = static_cast<lapack_int>(m.cols());
  const lapack_int k = std::min(rows, cols);
  SpectralDecomposition out;
  if (k == 0) {
    out.left_vectors = Matrix(m.rows(), 0);
    out.right_vectors = Matrix(m.cols(), 0);
    return out;
  }
  Matrix work = m;
  out.singular_values.resize(k);
  out.left_vectors.resize(rows, k);
  Matrix vt(k, cols);
  const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', rows, cols, work.data(), rows,
                                         out.singular_values.data(), out.left_vectors.data(),
                                         rows, vt.data(), k);
  check_info(info, "dgesdd");
  out.right_vectors = vt.transpose();
  return out;
}

SymmetricEigen symmetric_eigen(const Matrix& sym, bool with_vectors) {
  require_finite(sym, "symmetric_eigen");
  ensure_blas();
  if (sym.rows() != sym.cols()) throw std::invalid_argument("symmetric_eigen: matrix not square");
  const lapack_int n = static_cast<lapack_int>(sym.rows());
  SymmetricEigen out;
  Matrix work = sym;
  Vector w(n);
  if (n > 0) {
    // The two-stage reduction only supports eigenvalues, where it is several
    // times faster for large n.
    const lapack_int info =
        with_vectors
            ? LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, work.data(), n, w.data())
            : LAPACKE_dsyevd_2stage(LAPACK_COL_MAJOR, 'N', 'U', n, work.data(), n, w.data());
    check_info(info, "dsyevd");
  }
  // LAPACK returns ascending order.
  out.values = w.reverse();
  if (with_vectors) out.vectors = work.rowwise().reverse();
  return out;
}

std::vector<double> gram_eigenvalues(const Matrix& m) {
  require_finite(m, "gram_eigenvalues");
  ensure_blas();
  Matrix gram;
  if (m.rows() <= m.cols()) {
    gram = Matrix::Zero(m.rows(), m.rows());
    gram.selfadjointView<Eigen::Upper>().rankUpdate(m);
  } else {
    gram = Matrix::Zero(m.cols(), m.cols());
    gram.selfadjointView<Eigen::Upper>().rankUpdate(m.transpose());
  }
  const SymmetricEigen eig = symmetric_eigen(gram, false);
  std::vector<double> values(eig.values.data(), eig.values.data() + eig.values.size());
  // Rounding can leave tiny negative eigenvalues of a PSD matrix.
  for (double& v : values) v = std::max(v, 0.0);
  return values;
}

Matrix orthonormal_q(Matrix m) {
  const lapack_int rows = static_cast<lapack_int>(m.rows());
  const lapack_int cols = static_cast<lapack_int>(m.cols());
  if (rows < cols) throw std::invalid_argument("orthonormal_q: need rows >= cols");
  if (cols == 0) return m;
  require_finite(m, "orthonormal_q");
  ensure_blas();
  Vector tau(cols);
  check_info(LAPACKE_dgeqrf(LAPACK_COL_MAJOR, rows, cols, m.data(), rows, tau.data()), "dgeqrf");
  Vector signs(cols);
  for (lapack_int j = 0; j < cols; ++j) signs(j) = m(j, j) < 0.0 ? -1.0 : 1.0;
  check_info(LAPACKE_dorgqr(LAPACK_COL_MAJOR, rows, cols, cols, m.data(), rows, tau.data()),
             "dorgqr");
  return m * signs.asDiagonal();
}

}  // namespace eopt
