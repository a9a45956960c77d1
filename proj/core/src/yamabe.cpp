#include "obdeg/yamabe.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "obdeg/errors.hpp"
#include "obdeg/registry.hpp"

namespace obdeg {

namespace {

double positive_power(double z, double q) {
  if (!(z > 0.0)) throw EvaluatorFailure("conformal factor must be positive");
  return std::pow(z, q);
}

}  // namespace

void YamabeConfig::validate() const {
  if (n < 3) throw Error(ErrorKind::configuration, "yamabe: dimension n must be at least 3");
  if (!std::isfinite(c) || !std::isfinite(h_g))
    throw Error(ErrorKind::configuration, "yamabe: c and h_g must be finite");
  if (c < 0.0)
    throw Error(ErrorKind::unsupported_regime,
                "yamabe: c < 0 is unsupported; the a priori second-derivative estimates "
                "behind the degree need c >= 0");
  if (domain == SectionDomain::annulus)
    throw Error(ErrorKind::configuration, "yamabe: annulus sections are not supported by the polar mesh");
  if (n_r < 4 || n_theta < 8 || n_theta % 2 != 0)
    throw Error(ErrorKind::configuration, "yamabe: mesh needs n_r >= 4 and even n_theta >= 8");
}

double yamabe_kappa(int n) { return (n - 2.0) / 2.0; }

SectionDomain parse_section_domain(const std::string& name) {
  if (name == "ball") return SectionDomain::ball;
  if (name == "annulus") return SectionDomain::annulus;
  throw Error(ErrorKind::configuration, "unknown yamabe domain '" + name + "'");
}

std::string to_string(SectionDomain d) { return d == SectionDomain::ball ? "ball" : "annulus"; }

DomainPtr yamabe_domain(const YamabeConfig& cfg) {
  cfg.validate();
  return build_disk(cfg.n_r, cfg.n_theta, 1.0);
}

double yamabe_initial_constant(int n) { return std::pow(static_cast<double>(n), (n - 2.0) / 4.0); }

ObliqueProblem yamabe_problem(DomainPtr domain, const YamabeConfig& cfg, double c_scale) {
  cfg.validate();
  const double kappa = yamabe_kappa(cfg.n);
  const double q = cfg.interior_exponent();
  const double m = cfg.boundary_exponent();
  const double weight = cfg.n - 2.0;
  const double hk = 0.5 * (cfg.n - 2.0) * cfg.h_g;
  const double c = c_scale * cfg.c;

  ProblemDefinition def;
  def.name = "yamabe-sigma1";
  def.domain = domain;
  def.f = [=](const NodeInfo& nd, double z, const Vec2& p, const Mat2& r) {
    return r.trace() + weight * nd.x.dot(p) / nd.x.squaredNorm() + kappa * positive_power(z, q);
  };
  def.df = [=](const NodeInfo& nd, double z, const Vec2&, const Mat2&) {
    return InteriorPartials{Mat2::Identity(), Vec2(weight * nd.x / nd.x.squaredNorm()),
                            kappa * q * positive_power(z, q - 1.0)};
  };
  def.g = [=](const NodeInfo& nd, double z, const Vec2& p) {
    return positive_power(z, -m) * (p.dot(nd.normal) + hk * z) - c;
  };
  def.dg = [=](const NodeInfo& nd, double z, const Vec2& p) {
    const double w = positive_power(z, -m);
    const double flux = p.dot(nd.normal) + hk * z;
    return BoundaryPartials{Vec2(w * nd.normal), w * hk - m * w / z * flux};
  };
  def.probes = random_probes(*domain, 0x5eed, 8, 0.5, 2.0);
  return ObliqueProblem(std::move(def));
}

SplitField yamabe_residual(const ScalarField& u, const YamabeConfig& cfg) {
  cfg.validate();
  const Eigen::VectorXd& v = u.values();
  for (Eigen::Index k = 0; k < v.size(); ++k)
    if (!(v[k] > 0.0)) {
      std::ostringstream os;
      os << "yamabe: conformal factor is not positive at node " << k << " (u = " << v[k] << ")";
      throw Error(ErrorKind::positivity, os.str());
    }
  SplitField r = residual(yamabe_problem(u.domain(), cfg), u);
  r.interior = -r.interior;
  return r;
}

YamabeResult solve_yamabe(const YamabeConfig& cfg, const YamabeOptions& opts) {
  cfg.validate();
  const DomainPtr domain = yamabe_domain(cfg);
  YamabeResult out{ScalarField(domain, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(domain->node_count()))),
                   {}, {}, yamabe_kappa(cfg.n), yamabe_initial_constant(cfg.n), 0.0};

  ContinuationSchedule schedule = opts.schedule;
  schedule.newton.tolerance =
      std::max(schedule.newton.tolerance, hessian_roundoff(*domain, out.initial_constant));
  out.newton_tolerance = schedule.newton.tolerance;
  const ScalarField start(domain, Eigen::VectorXd::Constant(
                                      static_cast<Eigen::Index>(domain->node_count()), out.initial_constant));
  const NewtonResult at_zero = newton_solve(yamabe_problem(domain, cfg, 0.0), start, schedule.newton);
  if (cfg.c == 0.0) {
    out.path.entries.push_back({0.0, at_zero.u, at_zero.diagnostics.iterations, at_zero.diagnostics.final_residual,
                                at_zero.diagnostics.lambda, at_zero.diagnostics.chi});
  } else {
    out.path = continue_homotopy([&](double t) { return yamabe_problem(domain, cfg, t); }, at_zero.u,
                                 schedule);
  }
  out.u = out.path.entries.back().u;
  const ObliqueProblem prob = yamabe_problem(domain, cfg);
  if (opts.compute_degree) out.degree = degree_at_zero(prob, out.u, opts.zero);
  out.residual = yamabe_residual(out.u, cfg).sup_norm();
  return out;
}

}  // namespace obdeg
