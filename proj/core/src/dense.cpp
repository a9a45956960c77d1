#include "obdeg/dense.hpp"

#include <cmath>
#include <string>

#include <lapacke.h>

#include "obdeg/errors.hpp"

namespace obdeg {

namespace {

void check_square(const Eigen::MatrixXd& A, const char* what) {
  if (A.rows() != A.cols()) throw Error(ErrorKind::input, std::string(what) + " must be square");
  if (!A.allFinite()) throw Error(ErrorKind::numerical, std::string(what) + " has non-finite entries");
}

}  // namespace

std::vector<GeneralizedEigenvalue> generalized_eigenvalues(Eigen::MatrixXd A, Eigen::MatrixXd B) {
  check_square(A, "A");
  check_square(B, "B");
  if (A.rows() != B.rows()) throw Error(ErrorKind::input, "A and B differ in size");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  std::vector<double> ar(n), ai(n), be(n);
  double dummy = 0.0;
  const lapack_int info = LAPACKE_dggev3(LAPACK_COL_MAJOR, 'N', 'N', n, A.data(), n, B.data(), n,
                                         ar.data(), ai.data(), be.data(), &dummy, 1, &dummy, 1);
  if (info != 0)
    throw Error(ErrorKind::numerical, "QZ iteration failed (dggev3 info=" + std::to_string(info) + ")");
  std::vector<GeneralizedEigenvalue> out(n);
  for (lapack_int k = 0; k < n; ++k) out[k] = {ar[k], ai[k], be[k]};
  return out;
}

std::vector<std::complex<double>> eigenvalues(Eigen::MatrixXd A) {
  check_square(A, "A");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  std::vector<double> wr(n), wi(n);
  double dummy = 0.0;
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, A.data(), n, wr.data(),
                                        wi.data(), &dummy, 1, &dummy, 1);
  if (info != 0)
    throw Error(ErrorKind::numerical, "QR iteration failed (dgeev info=" + std::to_string(info) + ")");
  std::vector<std::complex<double>> out(n);
  for (lapack_int k = 0; k < n; ++k) out[k] = {wr[k], wi[k]};
  return out;
}

Eigen::VectorXd singular_values(Eigen::MatrixXd A) {
  if (!A.allFinite()) throw Error(ErrorKind::numerical, "matrix has non-finite entries");
  const lapack_int m = static_cast<lapack_int>(A.rows());
  const lapack_int n = static_cast<lapack_int>(A.cols());
  Eigen::VectorXd s(std::min(m, n));
  double dummy = 0.0;
  const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, A.data(), m, s.data(), &dummy,
                                         1, &dummy, 1);
  if (info != 0)
    throw Error(ErrorKind::numerical, "SVD failed (dgesdd info=" + std::to_string(info) + ")");
  return s;
}

LuSummary lu_summary(Eigen::MatrixXd A) {
  check_square(A, "A");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  const double anorm = A.cwiseAbs().colwise().sum().maxCoeff();
  std::vector<lapack_int> ipiv(n);
  const lapack_int info = LAPACKE_dgetrf(LAPACK_COL_MAJOR, n, n, A.data(), n, ipiv.data());
  if (info < 0) throw Error(ErrorKind::numerical, "LU factorization failed");
  if (info > 0) return {0, -std::numeric_limits<double>::infinity(), 0.0};
  int sign = 1;
  double logdet = 0.0;
  for (lapack_int k = 0; k < n; ++k) {
    const double d = A(k, k);
    if (d < 0.0) sign = -sign;
    if (ipiv[k] != k + 1) sign = -sign;
    logdet += std::log(std::abs(d));
  }
  double rcond = 0.0;
  LAPACKE_dgecon(LAPACK_COL_MAJOR, '1', n, A.data(), n, anorm, &rcond);
  return {sign, logdet, rcond};
}

}  // namespace obdeg
