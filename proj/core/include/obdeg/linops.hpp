#pragma once

#include <functional>
#include <vector>

#include "obdeg/errors.hpp"
#include "obdeg/problem.hpp"

namespace obdeg {

// Square discretization of the fourth-order operator
//   L1 w = a_st D_iist w - N a_st D_st w                    (interior rows)
//   L2 w = a_st D_sti w gamma_i                               (boundary rows)
//   L3 w = b_i Delta_T(D_i w) - N b_i D_i w - N w             (boundary rows)
// Unknowns are the nodal values followed by one ghost value per boundary
// node (the ghost ring at s = 1 + ds); rows are [L1; L2; L3].
struct LNOperator {
  DomainPtr domain;
  double N = 0.0;
  SparseMatrix matrix;
  std::vector<Mat2> a;  // every node
  std::vector<Vec2> b;  // boundary nodes

  Eigen::Index size() const { return matrix.rows(); }
  Eigen::Index interior_rows() const { return static_cast<Eigen::Index>(domain->interior_count()); }
  Eigen::Index boundary_rows() const { return static_cast<Eigen::Index>(domain->boundary_count()); }
};

struct LNRows {
  Eigen::VectorXd l1, l2, l3;
};

// Nodal values followed by ghost values.
Eigen::VectorXd extended_sample(const DiscreteDomain& domain, const std::function<double(const Vec2&)>& fn);
// Ghost values by cubic extrapolation along each ray.
Eigen::VectorXd extend_by_extrapolation(const ScalarField& u);

LNOperator assemble_LN(DomainPtr domain, const std::vector<Mat2>& a, const std::vector<Vec2>& b,
                       double N);
LNRows apply_LN(const LNOperator& op, const Eigen::VectorXd& w_ext);

// Surjectivity family of the injectivity argument (a = I, b = gamma):
// boundary row (1-t) Delta_T(gamma.Dw + w) + t gamma_i Delta_T(D_i w) - N (gamma.Dw + w).
LNOperator assemble_Mt(DomainPtr domain, double N, double t);

struct SingularValueCheck {
  double sigma_min;
  double sigma_max;
  bool invertible;  // sigma_min > tol * sigma_max
};
SingularValueCheck certify_invertible(const SparseMatrix& m, double tol = 1e-10);

struct ThresholdResult {
  double N0;
  std::vector<SingularValueSample> profile;
};

// Scans N over {1, 2, 4, ..., <= N_max}; N0 is the smallest grid value from
// which every larger grid value is certified invertible.
ThresholdResult find_N0(DomainPtr domain, const std::vector<Mat2>& a, const std::vector<Vec2>& b,
                        double N_max, double tol = 1e-10);

// Largest real part of the finite eigenvalues of
//   a_ij u_ij + d_i u_i + c u = mu u in the interior, beta.Du + l u = 0 on the boundary.
struct SemifinitenessResult {
  double mu_star;
  std::size_t finite_eigenvalues;
  double matrix_scale;
};
SemifinitenessResult semifiniteness_mu(const LinearPair& pair);

// Reciprocal condition estimate of the shifted system at mu (0 when singular).
double shifted_rcond(const LinearPair& pair, double mu);

double resolvent_symbol_bound(double N, int K_max);

// Solves a_st D_st w = 0, b.Dw + w = g and returns
// (|w|_{L2(bd)} + |Dw|_{L2(bd)}) / |g|_{L2(bd)}.
double rellich_ratio(DomainPtr domain, const std::vector<Mat2>& a, const std::vector<Vec2>& b,
                     const BoundaryField& g);

// Solves a_st D_st w = phi in the interior with the third boundary row
// b_i Delta_T(D_i w) - N b.Dw - N w = 0 and returns |w|_{H2,h} / |phi|_{L2,h}.
double kernel_estimate_ratio(DomainPtr domain, const std::vector<Mat2>& a,
                             const std::vector<Vec2>& b, double N, const ScalarField& phi);

double h2_norm(const ScalarField& w);
double l2_norm(const ScalarField& w);

// L^{u,N}[u] + R^{u,N}[u] = (S o F, T o G)[u].
struct FrozenSplit {
  LNOperator L;
  LNRows l_part;   // L applied to the extrapolated extension of u
  LNRows r_part;   // remainder
  LNRows composed; // (Delta F, gamma.DF + F, Delta_T G - G)
  // Remainders without the N-terms: C_*, E_*, H_*.
  Eigen::VectorXd c_star, e_star, h_star;
};

FrozenSplit frozen_split(const ObliqueProblem& prob, const ScalarField& u, double N);

}  // namespace obdeg
