#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace obdeg {

// Thin wrappers over LAPACK drivers for the dense problems at desk scale.

struct GeneralizedEigenvalue {
  double alpha_re;
  double alpha_im;
  double beta;
};

// Generalized eigenvalues of A x = lambda B x (QZ, dggev3). lambda = alpha / beta.
std::vector<GeneralizedEigenvalue> generalized_eigenvalues(Eigen::MatrixXd A, Eigen::MatrixXd B);

// Eigenvalues of a general real matrix (Hessenberg QR, dgeev).
std::vector<std::complex<double>> eigenvalues(Eigen::MatrixXd A);

// Singular values in decreasing order (dgesdd).
Eigen::VectorXd singular_values(Eigen::MatrixXd A);

struct LuSummary {
  int det_sign;         // 0 when singular
  double log_abs_det;
  double rcond;         // reciprocal 1-norm condition estimate
};

LuSummary lu_summary(Eigen::MatrixXd A);

}  // namespace obdeg
