#include "obdeg/reflector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <boost/math/quadrature/gauss.hpp>

#include "obdeg/errors.hpp"
#include "obdeg/interpolation.hpp"

namespace obdeg {

namespace {

using Gauss8 = boost::math::quadrature::gauss<double, 8>;
using Gauss20 = boost::math::quadrature::gauss<double, 20>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double denominator_floor(const Vec2& p) { return 1e-12 * (1.0 + p.squaredNorm()); }

// T and its partial derivatives in (z, p) together with log det DT and its
// partials in (z, p, r).
struct Reflection {
  Vec2 T;
  Vec2 T_z;
  Mat2 T_p;  // column j: dT / dp_j
  double det;
  double logdet;
  double logdet_z;
  Vec2 logdet_p;
  Mat2 logdet_r;
};

enum class ReflectStatus { ok, degenerate, nonpositive_det };

ReflectStatus reflect(const Vec2& x, double z, const Vec2& p, const Mat2& r, Reflection& out) {
  const double w = z - p.dot(x);
  const double Q = p.squaredNorm() - w * w;
  if (!(std::abs(Q) > denominator_floor(p))) return ReflectStatus::degenerate;
  const double P = p.squaredNorm() + w * w + 2.0 * w * x.dot(p);
  const double det_r = r.determinant();
  out.T = 2.0 * p / Q;
  const double Q_z = -2.0 * w;
  const Vec2 Q_p = 2.0 * p + 2.0 * w * x;
  out.T_z = -2.0 * p * Q_z / (Q * Q);
  out.T_p = (2.0 / Q) * Mat2::Identity() - (2.0 / (Q * Q)) * p * Q_p.transpose();
  out.det = -4.0 * P * det_r / (Q * Q * Q);
  if (!(out.det > 0.0) || !std::isfinite(out.det)) return ReflectStatus::nonpositive_det;
  out.logdet = std::log(out.det);
  const double P_z = 2.0 * w + 2.0 * x.dot(p);
  const Vec2 P_p = 2.0 * p - 2.0 * x.dot(p) * x;
  out.logdet_z = P_z / P - 3.0 * Q_z / Q;
  out.logdet_p = P_p / P - 3.0 * Q_p / Q;
  out.logdet_r = r.inverse();
  out.logdet_r(0, 1) = out.logdet_r(1, 0) = 0.5 * (out.logdet_r(0, 1) + out.logdet_r(1, 0));
  return ReflectStatus::ok;
}

Reflection reflect_or_fail(const Vec2& x, double z, const Vec2& p, const Mat2& r) {
  Reflection out;
  switch (reflect(x, z, p, r, out)) {
    case ReflectStatus::degenerate:
      throw EvaluatorFailure("degenerate reflection denominator");
    case ReflectStatus::nonpositive_det:
      throw EvaluatorFailure("det DT is not positive");
    case ReflectStatus::ok:
      break;
  }
  return out;
}

Vec2 reflect_point_or_fail(const Vec2& x, double z, const Vec2& p) {
  const double w = z - p.dot(x);
  const double Q = p.squaredNorm() - w * w;
  if (!(std::abs(Q) > denominator_floor(p))) throw EvaluatorFailure("degenerate reflection denominator");
  return 2.0 * p / Q;
}

// Partials of T only (for the boundary operator).
void reflect_first_order(const Vec2& x, double z, const Vec2& p, Vec2& T, Vec2& T_z, Mat2& T_p) {
  const double w = z - p.dot(x);
  const double Q = p.squaredNorm() - w * w;
  if (!(std::abs(Q) > denominator_floor(p))) throw EvaluatorFailure("degenerate reflection denominator");
  T = 2.0 * p / Q;
  const double Q_z = -2.0 * w;
  const Vec2 Q_p = 2.0 * p + 2.0 * w * x;
  T_z = -2.0 * p * Q_z / (Q * Q);
  T_p = (2.0 / Q) * Mat2::Identity() - (2.0 / (Q * Q)) * p * Q_p.transpose();
}

double positive_intensity(const Intensity& I, const Vec2& y) {
  const double v = I.value(y);
  if (!(v > 0.0) || !std::isfinite(v)) throw EvaluatorFailure("reflected intensity is not positive at T_u");
  return v;
}

// Interior and boundary evaluators of the slice problem
//   F_t = log det DT - log(t rho / rho*(T) + (1-t) d0) - eps (u - u0),
//   G_t = (1-t) phi0(T) + t phi1(T).
// At t = 1 the interior form is written as log det DT + log rho*(T) - log rho - eps (u - u0).
struct SliceData {
  double t = 1.0;
  double eps = 0.0;
  std::function<double(const Vec2&)> rho;
  Intensity rho_star;
  AnalyticField u0;
  std::shared_ptr<const TargetRegion> phi0;  // unused at t = 1
  std::shared_ptr<const TargetRegion> phi1;
};

double d0_at(const AnalyticField& u0, const Vec2& x) {
  return reflection_jacobian_det(x, u0.value(x), u0.gradient(x), u0.hessian(x));
}

ProblemDefinition slice_definition(DomainPtr domain, std::shared_ptr<const SliceData> sd,
                                   std::vector<ProbeState> probes) {
  ProblemDefinition def;
  def.name = "reflector";
  def.domain = std::move(domain);
  def.probes = std::move(probes);
  def.f = [sd](const NodeInfo& n, double z, const Vec2& p, const Mat2& r) {
    const Reflection R = reflect_or_fail(n.x, z, p, r);
    const double eps_term = sd->eps == 0.0 ? 0.0 : sd->eps * (z - sd->u0.value(n.x));
    const double rs = positive_intensity(sd->rho_star, R.T);
    if (sd->t == 1.0) return R.logdet + std::log(rs) - std::log(sd->rho(n.x)) - eps_term;
    const double m = sd->t * sd->rho(n.x) / rs + (1.0 - sd->t) * d0_at(sd->u0, n.x);
    if (!(m > 0.0)) throw EvaluatorFailure("homotopy density is not positive");
    return R.logdet - std::log(m) - eps_term;
  };
  def.df = [sd](const NodeInfo& n, double z, const Vec2& p, const Mat2& r) {
    const Reflection R = reflect_or_fail(n.x, z, p, r);
    const double rs = positive_intensity(sd->rho_star, R.T);
    const Vec2 grad_rs = sd->rho_star.gradient(R.T);
    InteriorPartials d;
    d.d_r = R.logdet_r;
    if (sd->t == 1.0) {
      const Vec2 glog = grad_rs / rs;
      d.d_z = R.logdet_z + glog.dot(R.T_z) - sd->eps;
      d.d_p = R.logdet_p + R.T_p.transpose() * glog;
    } else {
      const double rho = sd->rho(n.x);
      const double m = sd->t * rho / rs + (1.0 - sd->t) * d0_at(sd->u0, n.x);
      // dm = -t rho / rs^2 grad rho* . dT
      const Vec2 gm = -sd->t * rho / (rs * rs) * grad_rs;
      d.d_z = R.logdet_z - gm.dot(R.T_z) / m - sd->eps;
      d.d_p = R.logdet_p - R.T_p.transpose() * gm / m;
    }
    return d;
  };
  def.g = [sd](const NodeInfo& n, double z, const Vec2& p) {
    const Vec2 T = reflect_point_or_fail(n.x, z, p);
    if (sd->t == 1.0) return sd->phi1->signed_distance(T);
    return (1.0 - sd->t) * sd->phi0->signed_distance(T) + sd->t * sd->phi1->signed_distance(T);
  };
  def.dg = [sd](const NodeInfo& n, double z, const Vec2& p) {
    Vec2 T, T_z;
    Mat2 T_p;
    reflect_first_order(n.x, z, p, T, T_z, T_p);
    Vec2 grad = sd->phi1->gradient(T);
    if (sd->t != 1.0) grad = (1.0 - sd->t) * sd->phi0->gradient(T) + sd->t * grad;
    return BoundaryPartials{T_p.transpose() * grad, grad.dot(T_z)};
  };
  return def;
}

// Admissible probe states: the jet of an analytic field at a few nodes.
std::vector<ProbeState> analytic_probes(const DiscreteDomain& dom, const AnalyticField& u) {
  std::vector<ProbeState> probes;
  const std::size_t n_i = dom.interior_count();
  for (std::size_t q = 0; q < 4; ++q) {
    for (std::size_t k : {q * n_i / 4 + n_i / 8, dom.boundary_node(q * dom.boundary_count() / 4)}) {
      const Vec2 x = dom.point(k);
      probes.push_back({k, u.value(x), u.gradient(x), u.hessian(x)});
    }
  }
  return probes;
}

TargetRegion image_disk(const AnalyticField& u0, double r0) {
  const Vec2 x(r0, 0.0);
  const Vec2 T = reflection_map(x, u0.value(x), u0.gradient(x));
  return TargetRegion::disk(Vec2::Zero(), T.norm());
}

}  // namespace

Intensity Intensity::constant(double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::configuration, "intensity must be positive");
  return {"constant", [c](const Vec2&) { return c; }, [](const Vec2&) { return Vec2(Vec2::Zero()); }};
}

Intensity Intensity::gaussian(double base, double amplitude, Vec2 center, double width) {
  if (!(base > 0.0) || !(base + std::min(0.0, amplitude) > 0.0) || !(width > 0.0))
    throw Error(ErrorKind::configuration, "gaussian intensity must stay positive");
  const double s2 = 2.0 * width * width;
  return {"gaussian",
          [=](const Vec2& y) { return base + amplitude * std::exp(-(y - center).squaredNorm() / s2); },
          [=](const Vec2& y) {
            return Vec2(-2.0 / s2 * amplitude * std::exp(-(y - center).squaredNorm() / s2) * (y - center));
          }};
}

ScalarField AnalyticField::sample(DomainPtr domain) const {
  return ScalarField::sample(std::move(domain), value);
}

AnalyticField InitialReflector::field() const {
  const double a_ = a, b_ = b;
  return {[a_, b_](const Vec2& x) { return a_ + b_ * x.squaredNorm(); },
          [b_](const Vec2& x) { return Vec2(2.0 * b_ * x); },
          [b_](const Vec2&) { return Mat2(2.0 * b_ * Mat2::Identity()); }};
}

TargetRegion TargetRegion::disk(Vec2 center, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::configuration, "target disk radius must be positive");
  TargetRegion t;
  t.center_ = center;
  t.radius_ = radius;
  return t;
}

TargetRegion TargetRegion::closed_curve(std::vector<Vec2> knots) {
  const std::size_t m = knots.size();
  if (m < 4) throw Error(ErrorKind::configuration, "target curve needs at least 4 points");
  double area2 = 0.0;
  for (std::size_t k = 0; k < m; ++k) area2 += cross(knots[k], knots[(k + 1) % m]);
  if (area2 == 0.0) throw Error(ErrorKind::configuration, "target curve encloses zero area");
  if (area2 < 0.0) std::reverse(knots.begin(), knots.end());

  // Periodic cubic spline with unit knot spacing:
  // M[k-1] + 4 M[k] + M[k+1] = 6 (P[k+1] - 2 P[k] + P[k-1]).
  Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::MatrixXd rhs(static_cast<Eigen::Index>(m), 2);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t km = (k + m - 1) % m, kp = (k + 1) % m;
    const auto r = static_cast<Eigen::Index>(k);
    trips.emplace_back(r, r, 4.0);
    trips.emplace_back(r, static_cast<Eigen::Index>(km), 1.0);
    trips.emplace_back(r, static_cast<Eigen::Index>(kp), 1.0);
    const Vec2 d2 = 6.0 * (knots[kp] - 2.0 * knots[k] + knots[km]);
    rhs(r, 0) = d2.x();
    rhs(r, 1) = d2.y();
  }
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  const Eigen::MatrixXd M = lu.solve(rhs);

  TargetRegion t;
  t.knots_ = std::move(knots);
  t.second_.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    t.second_[k] = Vec2(M(static_cast<Eigen::Index>(k), 0), M(static_cast<Eigen::Index>(k), 1));
    t.center_ += t.knots_[k];
  }
  t.center_ /= static_cast<double>(m);
  return t;
}

TargetRegion::CurvePoint TargetRegion::curve_at(std::size_t k, double s) const {
  const std::size_t m = knots_.size();
  const std::size_t k1 = (k + 1) % m;
  const Vec2& P0 = knots_[k];
  const Vec2& P1 = knots_[k1];
  const Vec2& M0 = second_[k];
  const Vec2& M1 = second_[k1];
  const double r = 1.0 - s;
  CurvePoint c;
  c.point = r * P0 + s * P1 + ((r * r * r - r) * M0 + (s * s * s - s) * M1) / 6.0;
  c.tangent = P1 - P0 + ((1.0 - 3.0 * r * r) * M0 + (3.0 * s * s - 1.0) * M1) / 6.0;
  c.second = r * M0 + s * M1;
  return c;
}

TargetRegion::CurvePoint TargetRegion::closest_point(const Vec2& y) const {
  const std::size_t m = knots_.size();
  std::size_t nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < m; ++k) {
    const double d = (knots_[k] - y).squaredNorm();
    if (d < best) {
      best = d;
      nearest = k;
    }
  }
  // Newton on |c(s) - y|^2 over the two segments adjacent to the nearest knot.
  CurvePoint winner = curve_at(nearest, 0.0);
  best = (winner.point - y).squaredNorm();
  for (std::size_t k : {(nearest + m - 1) % m, nearest}) {
    double s = k == nearest ? 0.0 : 1.0;
    CurvePoint c = curve_at(k, s);
    for (int it = 0; it < 30; ++it) {
      const Vec2 e = c.point - y;
      const double g = e.dot(c.tangent);
      double h = c.tangent.squaredNorm() + e.dot(c.second);
      if (!(h > 0.0)) h = c.tangent.squaredNorm();
      const double next = std::clamp(s - g / h, 0.0, 1.0);
      const double step = std::abs(next - s);
      s = next;
      c = curve_at(k, s);
      if (step < 1e-15) break;
    }
    const double d = (c.point - y).squaredNorm();
    if (d < best) {
      best = d;
      winner = c;
    }
  }
  return winner;
}

double TargetRegion::signed_distance(const Vec2& y) const {
  if (is_disk()) return (y - center_).norm() - radius_;
  const CurvePoint c = closest_point(y);
  const Vec2 outward = Vec2(c.tangent.y(), -c.tangent.x()).normalized();
  const double d = (y - c.point).norm();
  return (y - c.point).dot(outward) >= 0.0 ? d : -d;
}

Vec2 TargetRegion::gradient(const Vec2& y) const {
  if (is_disk()) {
    const Vec2 d = y - center_;
    const double n = d.norm();
    return n > 0.0 ? Vec2(d / n) : Vec2(1.0, 0.0);
  }
  // At the foot point y - c is normal to the curve, so the gradient of the
  // signed distance is the outward unit normal there.
  const CurvePoint c = closest_point(y);
  return Vec2(c.tangent.y(), -c.tangent.x()).normalized();
}

double TargetRegion::integrate(const std::function<double(const Vec2&)>& fn) const {
  if (is_disk()) {
    // Gauss in the radius, trapezoid (spectral for periodic data) in the angle.
    const int n_theta = 128;
    double acc = 0.0;
    for (int q = 0; q < n_theta; ++q) {
      const double th = kTwoPi * q / n_theta;
      const Vec2 e(std::cos(th), std::sin(th));
      acc += Gauss20::integrate([&](double r) { return r * fn(center_ + r * e); }, 0.0, radius_);
    }
    return acc * kTwoPi / n_theta;
  }
  // Signed fan from the knot centroid: y = A + u (c(s) - A) has Jacobian
  // u cross(c(s) - A, c'(s)).
  double acc = 0.0;
  const Vec2& A = center_;
  for (std::size_t k = 0; k < knots_.size(); ++k) {
    acc += Gauss8::integrate(
        [&](double s) {
          const CurvePoint c = curve_at(k, s);
          const Vec2 e = c.point - A;
          return cross(e, c.tangent) *
                 Gauss8::integrate([&](double u) { return u * fn(A + u * e); }, 0.0, 1.0);
        },
        0.0, 1.0);
  }
  return acc;
}

double TargetRegion::area() const {
  if (is_disk()) return std::numbers::pi * radius_ * radius_;
  return integrate([](const Vec2&) { return 1.0; });
}

std::pair<Vec2, Vec2> TargetRegion::bounding_box() const {
  if (is_disk()) return {center_ - Vec2(radius_, radius_), center_ + Vec2(radius_, radius_)};
  Vec2 lo = knots_.front(), hi = knots_.front();
  for (std::size_t k = 0; k < knots_.size(); ++k) {
    for (double s : {0.0, 0.25, 0.5, 0.75}) {
      const Vec2 p = curve_at(k, s).point;
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  return {lo, hi};
}

Vec2 reflection_map(const Vec2& x, double z, const Vec2& p) {
  const double w = z - p.dot(x);
  const double Q = p.squaredNorm() - w * w;
  if (!(std::abs(Q) > denominator_floor(p)))
    throw Error(ErrorKind::degenerate_reflection, "|Du|^2 - (u - Du.x)^2 vanishes");
  return 2.0 * p / Q;
}

Mat2 reflection_jacobian(const Vec2& x, double z, const Vec2& p, const Mat2& r) {
  const double w = z - p.dot(x);
  const double Q = p.squaredNorm() - w * w;
  if (!(std::abs(Q) > denominator_floor(p)))
    throw Error(ErrorKind::degenerate_reflection, "|Du|^2 - (u - Du.x)^2 vanishes");
  const Vec2 v = p + w * x;
  return (2.0 / Q) * (Mat2::Identity() - (2.0 / Q) * p * v.transpose()) * r;
}

double reflection_jacobian_det(const Vec2& x, double z, const Vec2& p, const Mat2& r) {
  const double w = z - p.dot(x);
  const double Q = p.squaredNorm() - w * w;
  if (!(std::abs(Q) > denominator_floor(p)))
    throw Error(ErrorKind::degenerate_reflection, "|Du|^2 - (u - Du.x)^2 vanishes");
  const double P = p.squaredNorm() + w * w + 2.0 * w * x.dot(p);
  return -4.0 * P * r.determinant() / (Q * Q * Q);
}

void ReflectorProblem::validate() const {
  if (!domain) throw Error(ErrorKind::configuration, "reflector problem without domain");
  for (const Vec2& x : domain->points())
    if (!(x.norm() < 1.0))
      throw Error(ErrorKind::configuration, "reflector domain must lie inside the unit ball");
  if (!rho.domain() || rho.domain() != domain)
    throw Error(ErrorKind::configuration, "incident intensity is not defined on the domain");
  for (std::size_t k = 0; k < rho.size(); ++k)
    if (!(rho[k] > 0.0) || !std::isfinite(rho[k]))
      throw Error(ErrorKind::data, "incident intensity must be positive at node " + std::to_string(k));
  if (!rho_star.value || !rho_star.gradient)
    throw Error(ErrorKind::configuration, "reflected intensity needs value and gradient");
  const auto [lo, hi] = target.bounding_box();
  const Vec2 pad = 0.05 * (hi - lo);
  for (int i = 0; i <= 16; ++i)
    for (int j = 0; j <= 16; ++j) {
      const Vec2 y = lo - pad + Vec2((hi - lo + 2 * pad).x() * i / 16.0, (hi - lo + 2 * pad).y() * j / 16.0);
      if (!(rho_star.value(y) > 0.0))
        throw Error(ErrorKind::data, "reflected intensity must be positive near the target");
    }
  if (!(eps >= 0.0)) throw Error(ErrorKind::configuration, "eps must be nonnegative");
  const AnalyticField u0f = initial.field();
  for (std::size_t k = 0; k < domain->node_count(); ++k) {
    const Vec2 x = domain->point(k);
    if (!(reflection_jacobian_det(x, u0f.value(x), u0f.gradient(x), u0f.hessian(x)) > 0.0))
      throw Error(ErrorKind::configuration, "initial reflector is not admissible on the domain");
  }
}

std::function<double(const Vec2&)> ReflectorProblem::incident() const {
  if (rho_at) return rho_at;
  auto interp = std::make_shared<const FieldInterpolator>(rho);
  return [interp](const Vec2& x) { return (*interp)(x); };
}

Eigen::VectorXd ma_residual(const ScalarField& u, const ReflectorProblem& prob) {
  if (u.domain() != prob.domain) throw Error(ErrorKind::input, "field on another domain");
  const auto& dom = *prob.domain;
  const FieldJet jet = jet_of(u);
  const AnalyticField u0 = prob.initial.field();
  Eigen::VectorXd out(static_cast<Eigen::Index>(dom.interior_count()));
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < dom.interior_count(); ++k) {
    const auto K = static_cast<Eigen::Index>(k);
    const Vec2 x = dom.point(k);
    Reflection R;
    const ReflectStatus st = reflect(x, jet.z[K], jet.p[k], jet.r[k], R);
    if (st == ReflectStatus::degenerate)
      throw Error(ErrorKind::degenerate_reflection, "degenerate reflection at node " + std::to_string(k));
    if (st == ReflectStatus::nonpositive_det) {
      bad.push_back(k);
      continue;
    }
    double v = R.logdet + std::log(prob.rho_star.value(R.T)) - std::log(prob.rho[k]);
    if (prob.eps != 0.0) v -= prob.eps * (jet.z[K] - u0.value(x));
    out[K] = v;
  }
  if (!bad.empty()) throw InadmissibleStateError(bad, "det DT_u is not positive");
  return out;
}

BoundaryField boundary_defect(const ScalarField& u, const ReflectorProblem& prob) {
  if (u.domain() != prob.domain) throw Error(ErrorKind::input, "field on another domain");
  const auto& dom = *prob.domain;
  const FieldJet jet = jet_of(u);
  Eigen::VectorXd out(static_cast<Eigen::Index>(dom.boundary_count()));
  for (std::size_t b = 0; b < dom.boundary_count(); ++b) {
    const std::size_t k = dom.boundary_node(b);
    const Vec2 T = reflection_map(dom.point(k), jet.z[static_cast<Eigen::Index>(k)], jet.p[k]);
    out[static_cast<Eigen::Index>(b)] = prob.target.signed_distance(T);
  }
  return BoundaryField(prob.domain, std::move(out));
}

double mass_balance(const ReflectorProblem& prob) {
  return prob.domain->integrate(prob.rho.values()) - prob.target.integrate(prob.rho_star.value);
}

namespace {

// u0 = a + b|x|^2 with b fixed and a chosen so that int rho (u* - u0) = 0:
// the eps -> 0 limit selects the solution with this normalization.
InitialReflector normalized_initial(const DiscreteDomain& dom, const Eigen::VectorXd& rho,
                                    const Eigen::VectorXd& u_star, double b) {
  Eigen::VectorXd r2(rho.size());
  for (Eigen::Index k = 0; k < rho.size(); ++k) r2[k] = dom.point(static_cast<std::size_t>(k)).squaredNorm();
  const double mass = dom.integrate(rho);
  const double a = dom.integrate(rho.cwiseProduct(u_star - b * r2)) / mass;
  return {a, b};
}

}  // namespace

ReflectorProblem manufacture(const ScalarField& u_star, const Intensity& rho_star) {
  const DomainPtr& domain = u_star.domain();
  const auto& dom = *domain;
  const FieldJet jet = jet_of(u_star);
  Eigen::VectorXd rho(static_cast<Eigen::Index>(dom.node_count()));
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < dom.node_count(); ++k) {
    const auto K = static_cast<Eigen::Index>(k);
    const Vec2 T = reflection_map(dom.point(k), jet.z[K], jet.p[k]);
    const double det = reflection_jacobian_det(dom.point(k), jet.z[K], jet.p[k], jet.r[k]);
    if (!(det > 0.0)) bad.push_back(k);
    rho[K] = rho_star.value(T) * det;
  }
  if (!bad.empty()) throw InadmissibleStateError(bad, "manufactured field has det DT <= 0");
  std::vector<Vec2> image;
  for (std::size_t b = 0; b < dom.boundary_count(); ++b) {
    const std::size_t k = dom.boundary_node(b);
    image.push_back(reflection_map(dom.point(k), jet.z[static_cast<Eigen::Index>(k)], jet.p[k]));
  }
  ReflectorProblem prob;
  prob.domain = domain;
  prob.target = TargetRegion::closed_curve(std::move(image));
  prob.rho_star = rho_star;
  prob.initial = normalized_initial(dom, rho, u_star.values(), 0.25);
  prob.rho = ScalarField(domain, std::move(rho));
  return prob;
}

ReflectorProblem manufacture(DomainPtr domain, const AnalyticField& u_star, const Intensity& rho_star,
                             std::size_t boundary_samples) {
  const auto& dom = *domain;
  auto rho_at = [u_star, rho_star](const Vec2& x) {
    const double z = u_star.value(x);
    const Vec2 p = u_star.gradient(x);
    return rho_star.value(reflection_map(x, z, p)) * reflection_jacobian_det(x, z, p, u_star.hessian(x));
  };
  std::vector<std::size_t> bad;
  Eigen::VectorXd rho(static_cast<Eigen::Index>(dom.node_count()));
  for (std::size_t k = 0; k < dom.node_count(); ++k) {
    rho[static_cast<Eigen::Index>(k)] = rho_at(dom.point(k));
    if (!(rho[static_cast<Eigen::Index>(k)] > 0.0)) bad.push_back(k);
  }
  if (!bad.empty()) throw InadmissibleStateError(bad, "manufactured field has det DT <= 0");
  std::vector<Vec2> image;
  for (std::size_t q = 0; q < boundary_samples; ++q) {
    const Vec2 x = dom.map_point(1.0, kTwoPi * static_cast<double>(q) / static_cast<double>(boundary_samples));
    image.push_back(reflection_map(x, u_star.value(x), u_star.gradient(x)));
  }
  ReflectorProblem prob;
  prob.domain = domain;
  prob.target = TargetRegion::closed_curve(std::move(image));
  prob.rho_star = rho_star;
  prob.rho_at = rho_at;
  prob.initial = normalized_initial(dom, rho, u_star.sample(domain).values(), 0.25);
  prob.rho = ScalarField(domain, std::move(rho));
  return prob;
}

ObliqueProblem reflector_oblique_problem(const ReflectorProblem& prob) {
  auto sd = std::make_shared<SliceData>();
  sd->t = 1.0;
  sd->eps = prob.eps;
  sd->rho = prob.incident();
  sd->rho_star = prob.rho_star;
  sd->u0 = prob.initial.field();
  sd->phi1 = std::make_shared<TargetRegion>(prob.target);
  return ObliqueProblem(slice_definition(prob.domain, sd, analytic_probes(*prob.domain, sd->u0)));
}

AnalyticField example_reflector_solution() {
  return {[](const Vec2& x) {
            return 1.0 + 0.25 * x.squaredNorm() + 0.04 * x.x() * x.x() * x.x() + 0.03 * x.x() * x.y();
          },
          [](const Vec2& x) {
            return Vec2(0.5 * x.x() + 0.12 * x.x() * x.x() + 0.03 * x.y(), 0.5 * x.y() + 0.03 * x.x());
          },
          [](const Vec2& x) {
            Mat2 h;
            h << 0.5 + 0.24 * x.x(), 0.03, 0.03, 0.5;
            return h;
          }};
}

Intensity example_target_intensity() { return Intensity::gaussian(1.0, 0.3, Vec2(0.1, 0.0), 0.4); }

std::vector<double> default_eps_schedule() { return {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}; }

ReflectorResult solve_reflector(const ReflectorProblem& prob, const DomainFoliation& foliation,
                                const std::vector<double>& eps_schedule, const ReflectorOptions& opts) {
  prob.validate();
  if (eps_schedule.empty()) throw Error(ErrorKind::configuration, "empty eps schedule");
  for (std::size_t k = 0; k < eps_schedule.size(); ++k)
    if (!(eps_schedule[k] > 0.0) || (k > 0 && !(eps_schedule[k] < eps_schedule[k - 1])))
      throw Error(ErrorKind::configuration, "eps schedule must be positive and decreasing");
  const double in_mass = prob.domain->integrate(prob.rho.values());
  const double imbalance = mass_balance(prob);
  if (std::abs(imbalance) > opts.mass_tolerance * std::abs(in_mass)) {
    std::ostringstream os;
    os << "mass balance violated: int_Omega rho - int_Omega* rho* = " << imbalance << " (int_Omega rho = "
       << in_mass << ")";
    throw Error(ErrorKind::data, os.str());
  }
  const auto& dom = *prob.domain;
  if (!foliation.r0().is_constant())
    throw Error(ErrorKind::configuration, "the first foliation slice must be a disk");
  if (foliation.n_r() != dom.n_r() || foliation.n_theta() != dom.n_theta())
    throw Error(ErrorKind::configuration, "foliation mesh does not match the domain mesh");
  {
    const RadiusFunction& r1 = foliation.r1();
    for (int q = 0; q < 256; ++q) {
      const double th = kTwoPi * q / 256.0;
      if (std::abs(r1(th) - dom.radius()(th)) > 1e-12)
        throw Error(ErrorKind::configuration, "the last foliation slice must be the domain");
    }
  }

  const AnalyticField u0 = prob.initial.field();
  auto phi0 = std::make_shared<const TargetRegion>(image_disk(u0, foliation.r0().a0()));
  auto phi1 = std::make_shared<const TargetRegion>(prob.target);
  const auto rho = prob.incident();

  auto slices = std::make_shared<std::map<double, DomainPtr>>();
  auto slice = [slices, &foliation, &prob](double t) {
    if (t == 1.0) return prob.domain;
    auto it = slices->find(t);
    if (it != slices->end()) return it->second;
    if (slices->size() > 64) slices->clear();
    DomainPtr d = foliation_domain(foliation, t);
    slices->emplace(t, d);
    return d;
  };
  const double eps0 = eps_schedule.front();
  ProblemFamily family = [&, eps0](double t) {
    auto sd = std::make_shared<SliceData>();
    sd->t = t;
    sd->eps = eps0;
    sd->rho = rho;
    sd->rho_star = prob.rho_star;
    sd->u0 = u0;
    sd->phi0 = phi0;
    sd->phi1 = phi1;
    DomainPtr d = slice(t);
    return ObliqueProblem(slice_definition(d, sd, analytic_probes(*d, u0)));
  };

  ReflectorResult out;
  auto& diag = out.diagnostics;
  ContinuationSchedule schedule = opts.schedule;
  schedule.newton.tolerance = std::max(schedule.newton.tolerance, hessian_roundoff(dom));
  diag.newton_tolerance = schedule.newton.tolerance;
  const ScalarField start = u0.sample(slice(0.0));
  diag.homotopy = continue_homotopy(family, start, schedule);
  ScalarField u(prob.domain, diag.homotopy.entries.back().u.values());
  out.eps_solutions.push_back(u);
  diag.eps_used.push_back(eps0);
  diag.eps_iterations.push_back(diag.homotopy.entries.back().iterations);

  NewtonResult last{u, {}};
  last.diagnostics.lambda = diag.homotopy.entries.back().lambda;
  last.diagnostics.chi = diag.homotopy.entries.back().chi;
  for (std::size_t k = 1; k < eps_schedule.size(); ++k) {
    ReflectorProblem pk = prob;
    pk.eps = eps_schedule[k];
    last = newton_solve(reflector_oblique_problem(pk), u, schedule.newton);
    const double diff = (last.u.values() - u.values()).cwiseAbs().maxCoeff();
    u = last.u;
    out.eps_solutions.push_back(u);
    diag.eps_used.push_back(eps_schedule[k]);
    diag.eps_differences.push_back(diff);
    diag.eps_iterations.push_back(last.diagnostics.iterations);
    if (diff < opts.stop_tolerance) {
      diag.stopped_early = k + 1 < eps_schedule.size();
      break;
    }
  }
  diag.lambda = last.diagnostics.lambda;
  diag.chi = last.diagnostics.chi;

  const Eigen::VectorXd du = u.values() - prob.u0().values();
  diag.min_u_minus_u0 = du.minCoeff();
  diag.max_u_minus_u0 = du.maxCoeff();
  diag.u_minus_u0_vanishes = diag.min_u_minus_u0 <= 0.0 && diag.max_u_minus_u0 >= 0.0;
  const FieldJet jet = jet_of(u);
  diag.min_det = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < dom.interior_count(); ++k)
    diag.min_det = std::min(diag.min_det, reflection_jacobian_det(dom.point(k), jet.z[static_cast<Eigen::Index>(k)],
                                                                  jet.p[k], jet.r[k]));
  diag.final_defect = boundary_defect(u, prob).values().cwiseAbs().maxCoeff();
  out.u = u;
  return out;
}

}  // namespace obdeg
