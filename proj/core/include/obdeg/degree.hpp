#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "obdeg/problem.hpp"

namespace obdeg {

struct DegreeDiagnostics {
  std::size_t matrix_size = 0;
  std::size_t finite_eigenvalues = 0;
  std::size_t infinite_eigenvalues = 0;
  std::size_t complex_negative = 0;  // Re < 0, |Im| > tol |lambda|; always even
  double nearest_to_zero = 0.0;      // smallest |lambda| among finite eigenvalues
  double matrix_scale = 0.0;         // infinity norm of the interior block
  std::size_t negative_clusters = 0;  // groups of coincident negative real eigenvalues
  bool defective = false;             // some cluster has geometric < algebraic multiplicity
  double wall_seconds = 0.0;
};

struct DegreeReport {
  std::size_t dim_E_minus = 0;
  std::vector<double> negative_real_eigenvalues;
  int degree = 0;
  DegreeDiagnostics diagnostics;
};

struct EigenOptions {
  double real_tolerance = 1e-8;      // |Im| <= tol |lambda| counts as real
  double degeneracy_tolerance = 1e-8; // |lambda| <= tol * scale is degenerate
  double infinite_beta = 1e-12;      // |beta| <= tol * |alpha| (normalized) is infinite
};

// All finite eigenvalues of -A x = lambda M x, M = diag(I_interior, 0).
std::vector<std::complex<double>> pair_eigenvalues(const LinearPair& pair,
                                                   const EigenOptions& opts = {});

DegreeReport negative_eigencount(const LinearPair& pair, const EigenOptions& opts = {});
DegreeReport degree_linear(const LinearPair& pair, const EigenOptions& opts = {});

struct ZeroOptions {
  double residual_tolerance = 1e-6;
  double distinct_tolerance = 1e-4;
  EigenOptions eigen;
};

DegreeReport degree_at_zero(const ObliqueProblem& prob, const ScalarField& u,
                            const ZeroOptions& opts = {});
DegreeReport degree_sum(const ObliqueProblem& prob, const std::vector<ScalarField>& zeros,
                        const ZeroOptions& opts = {});

using ProblemFamily = std::function<ObliqueProblem(double t)>;
// Returns the zeros of prob given the zeros tracked at the previous sample
// (empty on the first call).
using ZeroTracker = std::function<std::vector<ScalarField>(const ObliqueProblem& prob,
                                                           const std::vector<ScalarField>& previous)>;

struct HomotopySample {
  double t;
  std::size_t zero_count;
  int degree_sum;
  std::vector<int> zero_degrees;
  double min_ellipticity;
  double min_obliqueness;
};

struct HomotopyInvarianceReport {
  std::vector<HomotopySample> samples;
  bool constant = true;
  // First interval [t_k, t_{k+1}] across which degree_sum changed, if any.
  double change_lo = 0.0;
  double change_hi = 0.0;
};

HomotopyInvarianceReport homotopy_invariance_check(const ProblemFamily& family,
                                                   const std::vector<double>& t_samples,
                                                   const ZeroTracker& tracker,
                                                   const ZeroOptions& opts = {});

struct ProductFormulaReport {
  int lhs = 0;                 // degree_sum of the combined problem
  int rhs = 0;                 // (-1)^{dim E^-(F1,G1)} * sum sign det(I + K)
  std::size_t dim_E_minus_linear = 0;
  std::vector<int> det_signs;  // per zero
  bool equal = false;
};

// prob2 supplies the perturbation (F2, G2); the combined problem is
// (F1 + F2, G1 + G2) with (F1, G1) the linear pair.
ObliqueProblem combine(const LinearPair& pair, const ObliqueProblem& prob2);

ProductFormulaReport product_formula_check(const LinearPair& pair, const ObliqueProblem& prob2,
                                           const std::vector<ScalarField>& zeros,
                                           const ZeroOptions& opts = {});

}  // namespace obdeg
