#include "obdeg/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "obdeg/errors.hpp"

namespace obdeg {

namespace {

double min_eigenvalue(const Mat2& a) {
  const double m = 0.5 * (a(0, 0) + a(1, 1));
  const double q = 0.5 * (a(0, 0) - a(1, 1));
  return m - std::sqrt(q * q + a(0, 1) * a(0, 1));
}

double step_for(double v) { return 1e-5 * std::max(1.0, std::abs(v)); }

// Central difference of fr along the symmetric unit direction E_st, converted
// to the coefficient a_st of df = sum_st a_st dr_st (off-diagonal E_st has two
// entries, so the directional derivative is 2 a_st there).
template <class Fr>
double directional_r(Fr&& fr, const Mat2& r, int s, int t, double h) {
  Mat2 e = Mat2::Zero();
  e(s, t) = h;
  e(t, s) = h;
  const double dir = (fr(r + e) - fr(r - e)) / (2.0 * h);
  return s == t ? dir : 0.5 * dir;
}

}  // namespace

ObliqueProblem::ObliqueProblem(ProblemDefinition def, double check_tolerance)
    : def_(std::move(def)) {
  if (!def_.domain) throw Error(ErrorKind::configuration, "problem '" + def_.name + "' has no domain");
  if (!def_.f || !def_.g)
    throw Error(ErrorKind::configuration, "problem '" + def_.name + "' lacks f or g");
  fallback_f_ = !def_.df;
  fallback_g_ = !def_.dg;

  // Compare analytic partials against central differences of f and g.
  auto rel = [](double analytic, double fd) {
    return std::abs(analytic - fd) / std::max(1.0, std::abs(analytic));
  };
  for (const ProbeState& st : def_.probes) {
    if (st.node >= def_.domain->node_count())
      throw Error(ErrorKind::configuration, "probe state references a missing node");
    const NodeInfo n = node_info(st.node);
    double worst = 0.0;
    std::string where;
    auto track = [&](double e, const char* what) {
      if (e > worst) {
        worst = e;
        where = what;
      }
    };
    if (!n.on_boundary && !fallback_f_) {
      const InteriorPartials a = df(n, st.z, st.p, st.r);
      if (std::abs(a.d_r(0, 1) - a.d_r(1, 0)) > 1e-12 * std::max(1.0, a.d_r.cwiseAbs().maxCoeff()))
        throw Error(ErrorKind::configuration,
                    "problem '" + def_.name + "': df/dr is not symmetric at node " +
                        std::to_string(st.node));
      const double hz = step_for(st.z);
      track(rel(a.d_z, (f(n, st.z + hz, st.p, st.r) - f(n, st.z - hz, st.p, st.r)) / (2 * hz)),
            "df/dz");
      for (int i = 0; i < 2; ++i) {
        const double hp = step_for(st.p[i]);
        Vec2 e = Vec2::Zero();
        e[i] = hp;
        track(rel(a.d_p[i], (f(n, st.z, st.p + e, st.r) - f(n, st.z, st.p - e, st.r)) / (2 * hp)),
              "df/dp");
      }
      for (auto [s, t] : {std::pair{0, 0}, std::pair{0, 1}, std::pair{1, 1}}) {
        const double hr = step_for(st.r(s, t));
        const double fd = directional_r(f_at(n, st.z, st.p), st.r, s, t, hr);
        track(rel(a.d_r(s, t), fd), "df/dr");
      }
    }
    if (n.on_boundary && !fallback_g_) {
      const BoundaryPartials b = dg(n, st.z, st.p);
      const double hz = step_for(st.z);
      track(rel(b.d_z, (g(n, st.z + hz, st.p) - g(n, st.z - hz, st.p)) / (2 * hz)), "dg/dz");
      for (int i = 0; i < 2; ++i) {
        const double hp = step_for(st.p[i]);
        Vec2 e = Vec2::Zero();
        e[i] = hp;
        track(rel(b.d_p[i], (g(n, st.z, st.p + e) - g(n, st.z, st.p - e)) / (2 * hp)), "dg/dp");
      }
    }
    check_.states_checked += 1;
    check_.max_relative_error = std::max(check_.max_relative_error, worst);
    if (worst > check_tolerance) {
      std::ostringstream os;
      os << "problem '" << def_.name << "': analytic " << where
         << " disagrees with central differences at node " << st.node << " (relative error "
         << worst << ")";
      throw Error(ErrorKind::configuration, os.str());
    }
  }
}

std::function<double(const Mat2&)> ObliqueProblem::f_at(const NodeInfo& n, double z,
                                                         const Vec2& p) const {
  return [this, &n, z, p](const Mat2& r) { return f(n, z, p, r); };
}

NodeInfo ObliqueProblem::node_info(std::size_t k) const {
  const auto& dom = *def_.domain;
  NodeInfo n{k, dom.point(k), Vec2::Zero(), dom.is_boundary(k)};
  if (n.on_boundary) n.normal = dom.normal(k - dom.interior_count());
  return n;
}

double ObliqueProblem::f(const NodeInfo& n, double z, const Vec2& p, const Mat2& r) const {
  double v;
  try {
    v = def_.f(n, z, p, r);
  } catch (const EvaluatorFailure& e) {
    throw EvaluationError(n.index, n.x, e.what());
  }
  if (!std::isfinite(v)) throw EvaluationError(n.index, n.x, "interior evaluator returned non-finite value");
  return v;
}

double ObliqueProblem::g(const NodeInfo& n, double z, const Vec2& p) const {
  double v;
  try {
    v = def_.g(n, z, p);
  } catch (const EvaluatorFailure& e) {
    throw EvaluationError(n.index, n.x, e.what());
  }
  if (!std::isfinite(v)) throw EvaluationError(n.index, n.x, "boundary evaluator returned non-finite value");
  return v;
}

InteriorPartials ObliqueProblem::df(const NodeInfo& n, double z, const Vec2& p, const Mat2& r) const {
  if (!fallback_f_) {
    InteriorPartials out;
    try {
      out = def_.df(n, z, p, r);
    } catch (const EvaluatorFailure& e) {
      throw EvaluationError(n.index, n.x, e.what());
    }
    if (!out.d_r.allFinite() || !out.d_p.allFinite() || !std::isfinite(out.d_z))
      throw EvaluationError(n.index, n.x, "interior partials are non-finite");
    return out;
  }
  InteriorPartials out;
  const double hz = step_for(z);
  out.d_z = (f(n, z + hz, p, r) - f(n, z - hz, p, r)) / (2 * hz);
  for (int i = 0; i < 2; ++i) {
    const double hp = step_for(p[i]);
    Vec2 e = Vec2::Zero();
    e[i] = hp;
    out.d_p[i] = (f(n, z, p + e, r) - f(n, z, p - e, r)) / (2 * hp);
  }
  for (auto [s, t] : {std::pair{0, 0}, std::pair{0, 1}, std::pair{1, 1}}) {
    const double v = directional_r(f_at(n, z, p), r, s, t, step_for(r(s, t)));
    out.d_r(s, t) = v;
    out.d_r(t, s) = v;
  }
  return out;
}

BoundaryPartials ObliqueProblem::dg(const NodeInfo& n, double z, const Vec2& p) const {
  if (!fallback_g_) {
    BoundaryPartials out;
    try {
      out = def_.dg(n, z, p);
    } catch (const EvaluatorFailure& e) {
      throw EvaluationError(n.index, n.x, e.what());
    }
    if (!out.d_p.allFinite() || !std::isfinite(out.d_z))
      throw EvaluationError(n.index, n.x, "boundary partials are non-finite");
    return out;
  }
  BoundaryPartials out;
  const double hz = step_for(z);
  out.d_z = (g(n, z + hz, p) - g(n, z - hz, p)) / (2 * hz);
  for (int i = 0; i < 2; ++i) {
    const double hp = step_for(p[i]);
    Vec2 e = Vec2::Zero();
    e[i] = hp;
    out.d_p[i] = (g(n, z, p + e) - g(n, z, p - e)) / (2 * hp);
  }
  return out;
}

void LinearPair::validate() const {
  if (!domain) throw Error(ErrorKind::input, "linear pair without domain");
  const std::size_t ni = domain->interior_count(), nb = domain->boundary_count();
  if (a.size() != ni || d.size() != ni || static_cast<std::size_t>(c.size()) != ni ||
      b.size() != nb || static_cast<std::size_t>(l.size()) != nb)
    throw Error(ErrorKind::input, "linear pair fields do not match the domain");
  for (const Mat2& m : a) {
    if (!m.allFinite()) throw Error(ErrorKind::input, "non-finite principal coefficient");
    if (std::abs(m(0, 1) - m(1, 0)) > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
      throw Error(ErrorKind::input, "principal coefficient is not symmetric");
  }
  for (const Vec2& v : d)
    if (!v.allFinite()) throw Error(ErrorKind::input, "non-finite drift coefficient");
  for (const Vec2& v : b)
    if (!v.allFinite()) throw Error(ErrorKind::input, "non-finite boundary coefficient");
  if (!c.allFinite() || !l.allFinite()) throw Error(ErrorKind::input, "non-finite zero-order coefficient");
}

SparseMatrix LinearPair::assemble() const {
  validate();
  const auto& dom = *domain;
  const auto& ops = dom.operators();
  const auto n = static_cast<Eigen::Index>(dom.node_count());
  const auto ni = static_cast<Eigen::Index>(dom.interior_count());
  Eigen::VectorXd a11 = Eigen::VectorXd::Zero(n), a12 = a11, a22 = a11, cx = a11, cy = a11, c0 = a11;
  for (Eigen::Index k = 0; k < ni; ++k) {
    a11[k] = a[k](0, 0);
    a12[k] = 2.0 * a[k](0, 1);
    a22[k] = a[k](1, 1);
    cx[k] = d[k].x();
    cy[k] = d[k].y();
    c0[k] = c[k];
  }
  for (Eigen::Index q = 0; q < n - ni; ++q) {
    cx[ni + q] = b[q].x();
    cy[ni + q] = b[q].y();
    c0[ni + q] = l[q];
  }
  SparseMatrix I(n, n);
  I.setIdentity();
  SparseMatrix J = a11.asDiagonal() * ops.dxx;
  J += a12.asDiagonal() * ops.dxy;
  J += a22.asDiagonal() * ops.dyy;
  J += cx.asDiagonal() * ops.dx;
  J += cy.asDiagonal() * ops.dy;
  J += c0.asDiagonal() * I;
  J.prune(0.0);
  return J;
}

SplitField LinearPair::apply(const ScalarField& v) const {
  if (v.domain().get() != domain.get()) throw Error(ErrorKind::input, "field on a different domain");
  const Eigen::VectorXd out = assemble() * v.values();
  const auto ni = static_cast<Eigen::Index>(domain->interior_count());
  return {out.head(ni), out.tail(out.size() - ni)};
}

LinearPair laplace_robin_pair(DomainPtr domain, double c, double robin) {
  LinearPair p;
  const std::size_t ni = domain->interior_count(), nb = domain->boundary_count();
  p.a.assign(ni, Mat2::Identity());
  p.d.assign(ni, Vec2::Zero());
  p.c = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(ni), c);
  p.b.assign(domain->gamma().begin(), domain->gamma().end());
  p.l = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(nb), robin);
  p.domain = std::move(domain);
  return p;
}

FieldJet jet_of(const ScalarField& u) {
  return {u.values(), gradient(u), hessian(u)};
}

SplitField residual(const ObliqueProblem& prob, const ScalarField& u) {
  if (u.domain().get() != prob.domain().get())
    throw Error(ErrorKind::input, "field and problem live on different domains");
  const auto& dom = *u.domain();
  const FieldJet jet = jet_of(u);
  const std::size_t ni = dom.interior_count(), nb = dom.boundary_count();
  SplitField out{Eigen::VectorXd(static_cast<Eigen::Index>(ni)),
                 Eigen::VectorXd(static_cast<Eigen::Index>(nb))};
  for (std::size_t k = 0; k < ni; ++k)
    out.interior[static_cast<Eigen::Index>(k)] =
        prob.f(prob.node_info(k), jet.z[k], jet.p[k], jet.r[k]);
  for (std::size_t q = 0; q < nb; ++q) {
    const std::size_t k = ni + q;
    out.boundary[static_cast<Eigen::Index>(q)] = prob.g(prob.node_info(k), jet.z[k], jet.p[k]);
  }
  return out;
}

LinearPair linearize(const ObliqueProblem& prob, const ScalarField& u) {
  if (u.domain().get() != prob.domain().get())
    throw Error(ErrorKind::input, "field and problem live on different domains");
  const auto& dom = *u.domain();
  const FieldJet jet = jet_of(u);
  const std::size_t ni = dom.interior_count(), nb = dom.boundary_count();
  LinearPair pair;
  pair.domain = u.domain();
  pair.a.resize(ni);
  pair.d.resize(ni);
  pair.c.resize(static_cast<Eigen::Index>(ni));
  pair.b.resize(nb);
  pair.l.resize(static_cast<Eigen::Index>(nb));
  for (std::size_t k = 0; k < ni; ++k) {
    const InteriorPartials ip = prob.df(prob.node_info(k), jet.z[k], jet.p[k], jet.r[k]);
    pair.a[k] = 0.5 * (ip.d_r + ip.d_r.transpose());
    pair.d[k] = ip.d_p;
    pair.c[static_cast<Eigen::Index>(k)] = ip.d_z;
  }
  for (std::size_t q = 0; q < nb; ++q) {
    const std::size_t k = ni + q;
    const BoundaryPartials bp = prob.dg(prob.node_info(k), jet.z[k], jet.p[k]);
    pair.b[q] = bp.d_p;
    pair.l[static_cast<Eigen::Index>(q)] = bp.d_z;
  }
  return pair;
}

SparseMatrix jacobian(const ObliqueProblem& prob, const ScalarField& u) {
  return linearize(prob, u).assemble();
}

double ellipticity_margin(const LinearPair& pair) {
  double m = std::numeric_limits<double>::infinity();
  for (const Mat2& a : pair.a) m = std::min(m, min_eigenvalue(a));
  return m;
}

double obliqueness_margin(const LinearPair& pair) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < pair.b.size(); ++q) m = std::min(m, pair.b[q].dot(pair.domain->normal(q)));
  return m;
}

double ellipticity_margin(const ObliqueProblem& prob, const ScalarField& u) {
  return ellipticity_margin(linearize(prob, u));
}

double obliqueness_margin(const ObliqueProblem& prob, const ScalarField& u) {
  return obliqueness_margin(linearize(prob, u));
}

}  // namespace obdeg
