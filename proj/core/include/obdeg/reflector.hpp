#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "obdeg/continuation.hpp"
#include "obdeg/problem.hpp"

namespace obdeg {

// Positive intensity with its gradient.
struct Intensity {
  std::string name;
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> gradient;

  static Intensity constant(double c);
  // base + amplitude * exp(-|y - center|^2 / (2 width^2))
  static Intensity gaussian(double base, double amplitude, Vec2 center, double width);
};

// A smooth field given by closed forms, used for manufactured solutions and
// the initial reflector.
struct AnalyticField {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> gradient;
  std::function<Mat2(const Vec2&)> hessian;

  ScalarField sample(DomainPtr domain) const;
};

// u0(x) = a + b |x|^2.
struct InitialReflector {
  double a = 1.0;
  double b = 0.25;

  AnalyticField field() const;
};

// Target region with its defining function phi*: the signed distance to the
// boundary, negative inside.
class TargetRegion {
 public:
  static TargetRegion disk(Vec2 center, double radius);
  // Closed periodic cubic spline through the knots (unit parameter spacing);
  // orientation is normalized to counterclockwise.
  static TargetRegion closed_curve(std::vector<Vec2> knots);

  double signed_distance(const Vec2& y) const;
  Vec2 gradient(const Vec2& y) const;
  bool contains(const Vec2& y) const { return signed_distance(y) < 0.0; }
  double integrate(const std::function<double(const Vec2&)>& fn) const;
  double area() const;
  // Lower-left and upper-right corners.
  std::pair<Vec2, Vec2> bounding_box() const;

  bool is_disk() const { return knots_.empty(); }
  const Vec2& center() const { return center_; }
  double radius() const { return radius_; }
  const std::vector<Vec2>& knots() const { return knots_; }

 private:
  struct CurvePoint {
    Vec2 point, tangent, second;
  };
  CurvePoint curve_at(std::size_t segment, double s) const;
  CurvePoint closest_point(const Vec2& y) const;

  Vec2 center_ = Vec2::Zero();
  double radius_ = 0.0;
  std::vector<Vec2> knots_;
  std::vector<Vec2> second_;
};

// T(x, z, p) = 2p / (|p|^2 - (z - p.x)^2).
Vec2 reflection_map(const Vec2& x, double z, const Vec2& p);
// Total derivative of x -> T(x, u(x), Du(x)) given z = u, p = Du, r = D2u.
Mat2 reflection_jacobian(const Vec2& x, double z, const Vec2& p, const Mat2& r);
// det DT in closed form: -(4/Q^3)(|p|^2 + w^2 + 2w x.p) det r, w = z - p.x.
double reflection_jacobian_det(const Vec2& x, double z, const Vec2& p, const Mat2& r);

struct ReflectorProblem {
  DomainPtr domain;                          // Omega, closure inside the unit ball
  TargetRegion target;                       // Omega*
  ScalarField rho;                           // incident intensity on Omega
  std::function<double(const Vec2&)> rho_at; // closed form of rho, when known
  Intensity rho_star;                        // reflected intensity
  double eps = 0.0;
  InitialReflector initial;                  // u0

  void validate() const;
  // rho on Omega as an evaluator: the closed form when available, else the
  // interpolated nodal field.
  std::function<double(const Vec2&)> incident() const;
  ScalarField u0() const { return initial.field().sample(domain); }
};

// log det DT_u + log rho*(T_u) - log rho - eps (u - u0) at interior nodes.
Eigen::VectorXd ma_residual(const ScalarField& u, const ReflectorProblem& prob);
// phi*(T_u(x)) at boundary nodes.
BoundaryField boundary_defect(const ScalarField& u, const ReflectorProblem& prob);
// int_Omega rho - int_Omega* rho*.
double mass_balance(const ReflectorProblem& prob);

// rho := rho*(T_{u*}) det DT_{u*} with the discrete jet of u*, target := the
// closed curve through T_{u*} of the boundary nodes. u* is then an exact discrete
// zero at eps = 0.
ReflectorProblem manufacture(const ScalarField& u_star, const Intensity& rho_star);
// Same construction from closed forms: rho uses exact derivatives and the
// target curve samples T_{u*} on boundary_samples points of the boundary curve.
ReflectorProblem manufacture(DomainPtr domain, const AnalyticField& u_star,
                             const Intensity& rho_star, std::size_t boundary_samples = 4096);

// Built-in manufactured example: u* = 1 + |x|^2/4 + 0.04 x1^3 + 0.03 x1 x2 and
// rho* = 1 + 0.3 exp(-|y - (0.1, 0)|^2 / 0.32), on domains inside |x| < 0.6.
AnalyticField example_reflector_solution();
Intensity example_target_intensity();

// The pair (F, G) at eps = prob.eps as an ObliqueProblem on prob.domain.
ObliqueProblem reflector_oblique_problem(const ReflectorProblem& prob);

struct ReflectorOptions {
  // The Newton tolerance is raised to hessian_roundoff(domain) when that is larger.
  ContinuationSchedule schedule = [] {
    ContinuationSchedule s;
    s.newton.tolerance = 1e-8;
    return s;
  }();
  double stop_tolerance = 1e-8;  // early stop on successive eps-solutions
  double mass_tolerance = 1e-2;  // relative to int rho
};

struct ReflectorDiagnostics {
  SolvePath homotopy;                 // t-path at eps_schedule[0]
  std::vector<double> eps_used;
  std::vector<double> eps_differences;  // sup |u_k - u_{k-1}| along the schedule
  std::vector<int> eps_iterations;
  double newton_tolerance = 0.0;      // tolerance after the roundoff floor
  bool stopped_early = false;
  double min_u_minus_u0 = 0.0;
  double max_u_minus_u0 = 0.0;
  bool u_minus_u0_vanishes = false;   // changes sign or vanishes somewhere
  double min_det = 0.0;               // min det DT over interior nodes
  double final_defect = 0.0;          // sup |phi*(T_u)| on the boundary
  double lambda = 0.0;
  double chi = 0.0;
};

struct ReflectorResult {
  ScalarField u;
  std::vector<ScalarField> eps_solutions;
  ReflectorDiagnostics diagnostics;
};

// Continues in t over the foliation at eps_schedule[0] from u0 on the disk
// slice, then warm-starts down the eps schedule on Omega.
ReflectorResult solve_reflector(const ReflectorProblem& prob, const DomainFoliation& foliation,
                                const std::vector<double>& eps_schedule,
                                const ReflectorOptions& opts = {});

std::vector<double> default_eps_schedule();

// Monte-Carlo transport of rho by T_u compared against rho* on a grid of
// bins covering the target.
struct PushforwardReport {
  std::size_t samples = 0;
  std::size_t bins = 0;
  double l1_discrepancy = 0.0;   // sum_bins |mass_mc - mass_ref| / total
  double outside_fraction = 0.0; // transported samples with phi* > 0
};

PushforwardReport pushforward_check(const ScalarField& u, const ReflectorProblem& prob,
                                    std::size_t samples = 100000, std::uint64_t seed = 1,
                                    int bins_per_axis = 8);

}  // namespace obdeg
