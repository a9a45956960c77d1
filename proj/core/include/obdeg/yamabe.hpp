#pragma once

#include <string>

#include "obdeg/continuation.hpp"
#include "obdeg/degree.hpp"
#include "obdeg/problem.hpp"

namespace obdeg {

enum class SectionDomain { ball, annulus };

// Conformally flat sigma_1 boundary-Yamabe toy on a 2D radial section of the
// unit ball in R^n. n enters through the exponents and the radial weight
// r^{n-1} of the Laplacian: Delta_n u = Delta u + (n - 2) x.Du / |x|^2.
struct YamabeConfig {
  int n = 3;
  double c = 0.0;    // prescribed boundary mean curvature constant
  double h_g = 1.0;  // background boundary mean curvature, outer normal
  SectionDomain domain = SectionDomain::ball;
  int n_r = 16;
  int n_theta = 32;

  // Throws configuration errors for n < 3, an annulus or a bad mesh, and
  // unsupported_regime for c < 0.
  void validate() const;
  double interior_exponent() const { return (n + 2.0) / (n - 2.0); }
  double boundary_exponent() const { return static_cast<double>(n) / (n - 2.0); }
  double conformal_exponent() const { return 4.0 / (n - 2.0); }
};

// sigma_1(A_{g_u}) = 1 for g_u = u^{4/(n-2)} |dx|^2 reads -Delta u = kappa u^{(n+2)/(n-2)}.
double yamabe_kappa(int n);

SectionDomain parse_section_domain(const std::string& name);
std::string to_string(SectionDomain d);

DomainPtr yamabe_domain(const YamabeConfig& cfg);

// Interior: -Delta_n u - kappa u^{(n+2)/(n-2)}.
// Boundary: u^{-n/(n-2)} (du/dnu + (n-2)/2 h_g u) - c.
// Throws Error(positivity) if u <= 0 at some node.
SplitField yamabe_residual(const ScalarField& u, const YamabeConfig& cfg);

// The pair as an elliptic ObliqueProblem: F = Delta_n u + kappa u^q (the
// negated interior residual), G = the boundary residual, with c scaled by c_scale.
ObliqueProblem yamabe_problem(DomainPtr domain, const YamabeConfig& cfg, double c_scale = 1.0);

// Constant start for Newton at c = 0: the flux balance n kappa beta = kappa beta^q
// of the c = 0 problem on the unit ball gives beta = n^{(n-2)/4}.
double yamabe_initial_constant(int n);

struct YamabeOptions {
  ContinuationSchedule schedule;
  ZeroOptions zero;
  bool compute_degree = true;  // dense eigensolve, the dominant cost above ~1000 nodes
};

struct YamabeResult {
  ScalarField u;
  SolvePath path;       // continuation in c, t = c / cfg.c
  DegreeReport degree;  // degree_at_zero at u
  double kappa = 0.0;
  double initial_constant = 0.0;
  double residual = 0.0;  // sup norm of yamabe_residual at u
  double newton_tolerance = 0.0;  // after raising to hessian_roundoff
};

// Newton at c = 0 from the constant start, then continuation in c up to cfg.c.
// The Newton tolerance is raised to hessian_roundoff(domain, start constant).
YamabeResult solve_yamabe(const YamabeConfig& cfg, const YamabeOptions& opts = {});

}  // namespace obdeg
