#include <cmath>
#include <random>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "obdeg/errors.hpp"
#include "obdeg/problem.hpp"
#include "obdeg/registry.hpp"

using namespace obdeg;

namespace {

ProblemDefinition laplace_def(DomainPtr d, double source = 0.0, double bvalue = 0.0) {
  ProblemDefinition def;
  def.name = "laplace";
  def.domain = d;
  def.f = [=](const NodeInfo&, double, const Vec2&, const Mat2& r) { return r.trace() - source; };
  def.g = [=](const NodeInfo& n, double z, const Vec2& p) { return p.dot(n.normal) + z - bvalue; };
  def.df = [](const NodeInfo&, double, const Vec2&, const Mat2&) {
    return InteriorPartials{Mat2::Identity(), Vec2::Zero(), 0.0};
  };
  def.dg = [](const NodeInfo& n, double, const Vec2&) { return BoundaryPartials{n.normal, 1.0}; };
  def.probes = random_probes(*d, 1, 6);
  return def;
}

ProblemDefinition det_def(DomainPtr d) {
  ProblemDefinition def = laplace_def(d);
  def.name = "det";
  def.f = [](const NodeInfo&, double, const Vec2&, const Mat2& r) { return r.determinant(); };
  def.df = [](const NodeInfo&, double, const Vec2&, const Mat2& r) {
    Mat2 cof;
    cof << r(1, 1), -r(0, 1), -r(1, 0), r(0, 0);
    return InteriorPartials{cof, Vec2::Zero(), 0.0};
  };
  return def;
}

ScalarField quad(const DomainPtr& d) { return ScalarField::sample(d, [](const Vec2& x) { return x.squaredNorm(); }); }

}  // namespace

TEST(Residual, LaplaceRobinExamples) {
  const DomainPtr d = build_disk(10, 20, 1.0);
  const SplitField r = residual(ObliqueProblem(laplace_def(d)), quad(d));
  EXPECT_LT((r.interior.array() - 4.0).abs().maxCoeff(), 1e-8);
  EXPECT_LT((r.boundary.array() - 3.0).abs().maxCoeff(), 1e-8);
  const SplitField z = residual(ObliqueProblem(laplace_def(d, 4.0, 3.0)), quad(d));
  EXPECT_LT(z.sup_norm(), 1e-8);
}

TEST(Residual, DeterminantOfIdentityHessian) {
  const DomainPtr d = build_disk(10, 20, 1.0);
  const ScalarField u = ScalarField::sample(d, [](const Vec2& x) { return x.squaredNorm() / 2; });
  const SplitField r = residual(ObliqueProblem(det_def(d)), u);
  EXPECT_LT((r.interior.array() - 1.0).abs().maxCoeff(), 1e-8);
}

TEST(Linearize, Coefficients) {
  const DomainPtr d = build_disk(8, 16, 1.0);
  const ScalarField u = ScalarField::sample(d, [](const Vec2& x) { return (x.x() * x.x() + 2 * x.y() * x.y()) / 2; });
  const LinearPair lap = linearize(ObliqueProblem(laplace_def(d)), u);
  const LinearPair det = linearize(ObliqueProblem(det_def(d)), u);
  for (std::size_t k = 0; k < d->interior_count(); ++k) {
    EXPECT_LT((lap.a[k] - Mat2::Identity()).norm(), 1e-14);
    EXPECT_LT((det.a[k] - Eigen::Vector2d(2, 1).asDiagonal().toDenseMatrix()).norm(), 1e-8);
  }
  for (std::size_t b = 0; b < d->boundary_count(); ++b) {
    EXPECT_LT((lap.b[b] - d->normal(b)).norm(), 1e-14);
    EXPECT_DOUBLE_EQ(lap.l[b], 1.0);
  }
  EXPECT_NEAR(ellipticity_margin(lap), 1.0, 1e-14);
  EXPECT_NEAR(ellipticity_margin(det), 1.0, 1e-8);
  EXPECT_NEAR(obliqueness_margin(lap), 1.0, 1e-14);
}

TEST(Margins, DegenerateCases) {
  const DomainPtr d = build_disk(8, 16, 1.0);
  ProblemDefinition def = laplace_def(d);
  def.f = [](const NodeInfo&, double, const Vec2&, const Mat2& r) { return r(0, 0); };
  def.df = [](const NodeInfo&, double, const Vec2&, const Mat2&) {
    Mat2 e = Mat2::Zero();
    e(0, 0) = 1.0;
    return InteriorPartials{e, Vec2::Zero(), 0.0};
  };
  def.g = [](const NodeInfo& n, double, const Vec2& p) { return p.dot(Vec2(-n.normal.y(), n.normal.x())); };
  def.dg = [](const NodeInfo& n, double, const Vec2&) {
    return BoundaryPartials{Vec2(-n.normal.y(), n.normal.x()), 0.0};
  };
  const ObliqueProblem prob(def);
  EXPECT_NEAR(ellipticity_margin(prob, quad(d)), 0.0, 1e-14);
  EXPECT_NEAR(obliqueness_margin(prob, quad(d)), 0.0, 1e-14);
}

TEST(Margins, InvariantUnderConstantShift) {
  const DomainPtr d = build_disk(8, 16, 1.0);
  const SemilinearParams p;
  ProblemDefinition a = ObliqueProblem(semilinear_robin_problem(d, p)).definition();
  ProblemDefinition b = a;
  b.f = [f = a.f](const NodeInfo& n, double z, const Vec2& q, const Mat2& r) { return f(n, z, q, r) + 5.0; };
  b.g = [g = a.g](const NodeInfo& n, double z, const Vec2& q) { return g(n, z, q) - 2.0; };
  const ScalarField u = ScalarField::sample(d, [](const Vec2& x) { return 0.2 + 0.3 * x.x(); });
  EXPECT_DOUBLE_EQ(ellipticity_margin(ObliqueProblem(a), u), ellipticity_margin(ObliqueProblem(b), u));
  EXPECT_DOUBLE_EQ(obliqueness_margin(ObliqueProblem(a), u), obliqueness_margin(ObliqueProblem(b), u));
}

TEST(DerivativeCheck, InconsistentPartialsRejected) {
  const DomainPtr d = build_disk(8, 16, 1.0);
  ProblemDefinition def = laplace_def(d);
  def.df = [](const NodeInfo&, double, const Vec2&, const Mat2&) {
    return InteriorPartials{2.0 * Mat2::Identity(), Vec2::Zero(), 0.0};
  };
  try {
    ObliqueProblem p(def);
    FAIL() << "expected a configuration error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::configuration);
  }
}

TEST(DerivativeCheck, FallbackIsFlagged) {
  const DomainPtr d = build_disk(8, 16, 1.0);
  ProblemDefinition def = laplace_def(d);
  def.df = nullptr;
  const ObliqueProblem p(def);
  EXPECT_TRUE(p.uses_fallback_derivatives());
  const InteriorPartials ip = p.df(p.node_info(0), 0.1, Vec2(0.2, 0.3), Mat2::Identity());
  EXPECT_LT((ip.d_r - Mat2::Identity()).norm(), 1e-6);
  EXPECT_FALSE(ObliqueProblem(laplace_def(d)).uses_fallback_derivatives());
  EXPECT_GT(ObliqueProblem(laplace_def(d)).derivative_check().states_checked, 0u);
}

TEST(Linearize, MatchesResidualDirectionalDerivative) {
  const DomainPtr d = build_star(RadiusFunction(1.0, {0.0, 0.1}), 10, 20);
  const ObliqueProblem prob = manufactured_problem(d, "cubic");
  const ScalarField u = ScalarField::sample(d, [](const Vec2& x) { return 0.4 + 0.2 * std::sin(x.x() + x.y()); });
  const ScalarField v = ScalarField::sample(d, [](const Vec2& x) { return std::cos(2 * x.x()) * x.y(); });
  const SplitField r0 = residual(prob, u);
  const SplitField lv = linearize(prob, u).apply(v);
  std::vector<double> err;
  for (double s : {1e-2, 5e-3, 2.5e-3}) {
    const SplitField rs = residual(prob, ScalarField(d, u.values() + s * v.values()));
    const double e = std::max((rs.interior - r0.interior - s * lv.interior).lpNorm<Eigen::Infinity>(),
                              (rs.boundary - r0.boundary - s * lv.boundary).lpNorm<Eigen::Infinity>());
    err.push_back(e);
  }
  EXPECT_NEAR(err[0] / err[1], 4.0, 0.2);
  EXPECT_NEAR(err[1] / err[2], 4.0, 0.2);
}

TEST(Linearize, JacobianMatchesAssembledPair) {
  const DomainPtr d = build_disk(8, 16, 1.0);
  const ObliqueProblem prob = semilinear_robin_problem(d);
  const ScalarField u = ScalarField::sample(d, [](const Vec2& x) { return 0.5 + 0.1 * x.x(); });
  const Eigen::MatrixXd a(jacobian(prob, u)), b(linearize(prob, u).assemble());
  EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Residual, EvaluatorFailureCarriesNode) {
  const DomainPtr d = build_disk(8, 16, 1.0);
  ProblemDefinition def = laplace_def(d);
  def.f = [](const NodeInfo&, double z, const Vec2&, const Mat2& r) {
    if (z > 0.5) throw EvaluatorFailure("z out of range");
    return r.trace();
  };
  def.probes.clear();
  const ObliqueProblem prob(def);
  const ScalarField u = ScalarField::sample(d, [](const Vec2& x) { return x.x() > 0.8 ? 1.0 : 0.0; });
  try {
    residual(prob, u);
    FAIL() << "expected an evaluation error";
  } catch (const EvaluationError& e) {
    EXPECT_GT(d->point(e.node()).x(), 0.8);
    EXPECT_EQ(e.point(), d->point(e.node()));
  }
}

TEST(Manufactured, ExactSolutionsAreDiscreteNearZeros) {
  for (const std::string& id : manufactured_ids()) {
    double prev = 0.0;
    for (int n : {12, 24}) {
      const DomainPtr d = build_disk(n, 2 * n, 1.0);
      const double r = residual(manufactured_problem(d, id), manufactured_solution(d, id)).sup_norm();
      if (id == "quadratic") EXPECT_LT(r, 1e-8);
      if (prev > 0 && id == "cubic") EXPECT_LT(r, prev / 3.0);
      prev = r;
    }
  }
}

TEST(Registry, UnknownParameterIsConfigurationError) {
  const DomainPtr d = build_disk(8, 16, 1.0);
  EXPECT_THROW(make_problem("laplace-robin", d, {{"bogus", 1.0}}), Error);
  EXPECT_THROW(make_problem("nope", d), Error);
  EXPECT_THROW(make_family("nope", d), Error);
  for (const std::string& name : {std::string("laplace-robin"), std::string("semilinear-robin")})
    EXPECT_EQ(make_problem(name, d).domain(), d);
}

TEST(Semilinear, ConstantZerosAreRootsOfH) {
  const SemilinearParams p{1.0, 0.5, 0.1};
  const auto zs = semilinear_constant_zeros(p);
  ASSERT_EQ(zs.size(), 3u);
  const DomainPtr d = build_disk(8, 16, 1.0);
  for (double z : zs) {
    EXPECT_NEAR(z - z * z * z + 0.1, 0.0, 1e-12);
    const ScalarField u = ScalarField::sample(d, [z](const Vec2&) { return z; });
    EXPECT_LT(residual(semilinear_robin_problem(d, p), u).sup_norm(), 1e-12);
  }
}
