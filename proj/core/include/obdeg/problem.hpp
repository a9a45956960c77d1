#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "obdeg/calculus.hpp"

namespace obdeg {

// What an evaluator knows about the node it is evaluated at.
struct NodeInfo {
  std::size_t index;
  Vec2 x;
  Vec2 normal;  // outward unit normal on boundary nodes, zero in the interior
  bool on_boundary;
};

struct InteriorPartials {
  Mat2 d_r;   // symmetric: df = sum_st d_r(s,t) dr_st for symmetric dr
  Vec2 d_p;
  double d_z;
};

struct BoundaryPartials {
  Vec2 d_p;
  double d_z;
};

using InteriorFn = std::function<double(const NodeInfo&, double z, const Vec2& p, const Mat2& r)>;
using BoundaryFn = std::function<double(const NodeInfo&, double z, const Vec2& p)>;
using InteriorPartialsFn =
    std::function<InteriorPartials(const NodeInfo&, double z, const Vec2& p, const Mat2& r)>;
using BoundaryPartialsFn =
    std::function<BoundaryPartials(const NodeInfo&, double z, const Vec2& p)>;

// A state at which the derivative evaluators are cross-checked.
struct ProbeState {
  std::size_t node;
  double z;
  Vec2 p;
  Mat2 r;
};

struct ProblemDefinition {
  std::string name;
  DomainPtr domain;
  InteriorFn f;
  BoundaryFn g;
  // Analytic partials; when absent a central-difference fallback is used and
  // the problem is flagged.
  InteriorPartialsFn df;
  BoundaryPartialsFn dg;
  std::vector<ProbeState> probes;
};

struct DerivativeCheck {
  std::size_t states_checked = 0;
  double max_relative_error = 0.0;
};

// The nonlinear pair (F, G): F[u] = f(x, u, Du, D2u) in the interior,
// G[u] = g(x, u, Du) on the boundary.
class ObliqueProblem {
 public:
  // Runs the derivative consistency check on the supplied probe states.
  explicit ObliqueProblem(ProblemDefinition def, double check_tolerance = 1e-6);

  const std::string& name() const { return def_.name; }
  const DomainPtr& domain() const { return def_.domain; }
  bool uses_fallback_derivatives() const { return fallback_f_ || fallback_g_; }
  const DerivativeCheck& derivative_check() const { return check_; }

  NodeInfo node_info(std::size_t k) const;
  double f(const NodeInfo& n, double z, const Vec2& p, const Mat2& r) const;
  double g(const NodeInfo& n, double z, const Vec2& p) const;
  InteriorPartials df(const NodeInfo& n, double z, const Vec2& p, const Mat2& r) const;
  BoundaryPartials dg(const NodeInfo& n, double z, const Vec2& p) const;

  const ProblemDefinition& definition() const { return def_; }

 private:
  std::function<double(const Mat2&)> f_at(const NodeInfo& n, double z, const Vec2& p) const;

  ProblemDefinition def_;
  bool fallback_f_ = false;
  bool fallback_g_ = false;
  DerivativeCheck check_;
};

// Frozen-coefficient linear pair: interior a:D2v + d.Dv + c v, boundary b.Dv + l v.
struct LinearPair {
  DomainPtr domain;
  std::vector<Mat2> a;  // interior nodes
  std::vector<Vec2> d;  // interior nodes
  Eigen::VectorXd c;    // interior nodes
  std::vector<Vec2> b;  // boundary nodes
  Eigen::VectorXd l;    // boundary nodes

  void validate() const;
  // Rows in node order (interior rows, then boundary rows).
  SparseMatrix assemble() const;
  SplitField apply(const ScalarField& v) const;
};

// Constant-coefficient pair (a = I, d = 0, c, b = beta * gamma, l) on a domain.
LinearPair laplace_robin_pair(DomainPtr domain, double c = 0.0, double robin = 1.0);

// Jet of u at every node: value, discrete gradient and Hessian.
struct FieldJet {
  Eigen::VectorXd z;
  std::vector<Vec2> p;
  std::vector<Mat2> r;
};
FieldJet jet_of(const ScalarField& u);

SplitField residual(const ObliqueProblem& prob, const ScalarField& u);
LinearPair linearize(const ObliqueProblem& prob, const ScalarField& u);
// Sparse Jacobian of the discrete residual at u (same as linearize(...).assemble()).
SparseMatrix jacobian(const ObliqueProblem& prob, const ScalarField& u);

double ellipticity_margin(const LinearPair& pair);
double obliqueness_margin(const LinearPair& pair);
double ellipticity_margin(const ObliqueProblem& prob, const ScalarField& u);
double obliqueness_margin(const ObliqueProblem& prob, const ScalarField& u);

}  // namespace obdeg
