#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "obdeg/degree.hpp"
#include "obdeg/problem.hpp"

namespace obdeg {

using ParameterMap = std::map<std::string, double>;

// Seeded probe states for the derivative consistency check: about half on
// boundary nodes, z uniform in [z_lo, z_hi], p and r uniform in [-1, 1].
std::vector<ProbeState> random_probes(const DiscreteDomain& domain, std::uint64_t seed,
                                      std::size_t count, double z_lo = -1.0, double z_hi = 1.0);

// f = tr r + c z - source, g = p.gamma + robin z - boundary_value.
struct LaplaceRobinParams {
  double c = 0.0;
  double robin = 1.0;
  double source = 0.0;
  double boundary_value = 0.0;
};
ObliqueProblem laplace_robin_problem(DomainPtr domain, const LaplaceRobinParams& params = {});

// f = tr r + alpha h(z), g = p.gamma - kappa h(z), h(z) = z - z^3 + shift.
// Every real root of h is a constant zero.
struct SemilinearParams {
  double alpha = 1.0;
  double kappa = 0.5;
  double shift = 0.0;
};
ObliqueProblem semilinear_robin_problem(DomainPtr domain, const SemilinearParams& params = {});
std::vector<double> semilinear_constant_zeros(const SemilinearParams& params);

// "quadratic": u = |x|^2 with f = tr r - 4, g = p.gamma + z - (2 x.gamma + |x|^2).
// "cubic": u = 0.5 + 0.4 sin x cos y with f = tr r - z^3 - s(x), g = p.gamma + z - q(x).
std::vector<std::string> manufactured_ids();
ObliqueProblem manufactured_problem(DomainPtr domain, const std::string& id);
ScalarField manufactured_solution(DomainPtr domain, const std::string& id);

// Semilinear problem with shift(t) = s0 + t (s1 - s0); for the defaults two
// constant zeros merge near t = 0.685 and disappear.
ProblemFamily fold_family(DomainPtr domain, SemilinearParams base = {}, double s0 = -0.3,
                          double s1 = 0.7);
// f_t = tr r + (1-t)(q - z) + t alpha h(z), g_t = p.gamma + (1-t)(z - q) - t kappa h(z).
ProblemFamily linear_to_semilinear_family(DomainPtr domain, SemilinearParams base = {},
                                          double q = 1.2);
// f_t = tr r + t lambda_max e^z, g = p.gamma + z.
ProblemFamily bratu_family(DomainPtr domain, double lambda_max = 0.55);

// Built-in problems and families addressable by name. Unknown parameter keys
// are configuration errors. "reflector" is the t = 1 slice of the built-in
// manufactured reflector (parameter eps); "yamabe-sigma1" takes n, c, h_g.
std::vector<std::string> problem_names();
ObliqueProblem make_problem(const std::string& name, DomainPtr domain, const ParameterMap& params = {});
std::vector<std::string> family_names();
ProblemFamily make_family(const std::string& name, DomainPtr domain, const ParameterMap& params = {});

}  // namespace obdeg
