#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "obdeg/calculus.hpp"
#include "obdeg/errors.hpp"
#include "obdeg/interpolation.hpp"

using namespace obdeg;

namespace {

double angle_of(const Vec2& x) { return std::atan2(x.y(), x.x()); }

BoundaryField cos_k(const DomainPtr& d, int k) {
  return BoundaryField::sample(d, [k](const Vec2& x) { return std::cos(k * angle_of(x)); });
}

double max_abs(const Eigen::VectorXd& v) { return v.lpNorm<Eigen::Infinity>(); }

}  // namespace

TEST(Gradient, AffineAndConstantAreExact) {
  const DomainPtr d = build_star(RadiusFunction(1.0, {0.0, 0.1}), 10, 20);
  const auto gx = gradient(ScalarField::sample(d, [](const Vec2& x) { return x.x(); }));
  const auto gc = gradient(ScalarField::sample(d, [](const Vec2&) { return 3.0; }));
  for (std::size_t k = 0; k < d->node_count(); ++k) {
    EXPECT_NEAR((gx[k] - Vec2(1, 0)).norm(), 0.0, 1e-10);
    EXPECT_NEAR(gc[k].norm(), 0.0, 1e-12);
  }
}

TEST(Gradient, QuadraticOnDisk) {
  const DomainPtr d = build_disk(16, 32, 1.0);
  const auto g = gradient(ScalarField::sample(d, [](const Vec2& x) { return x.squaredNorm(); }));
  for (std::size_t k = 0; k < d->node_count(); ++k) EXPECT_NEAR((g[k] - 2 * d->point(k)).norm(), 0.0, 1e-9);
}

TEST(Hessian, QuadraticsAreExact) {
  const DomainPtr d = build_disk(10, 20, 1.0);
  const auto hxx = hessian(ScalarField::sample(d, [](const Vec2& x) { return x.x() * x.x(); }));
  const auto hxy = hessian(ScalarField::sample(d, [](const Vec2& x) { return x.x() * x.y(); }));
  Mat2 exx, exy;
  exx << 2, 0, 0, 0;
  exy << 0, 1, 1, 0;
  for (std::size_t k = 0; k < d->node_count(); ++k) {
    EXPECT_NEAR((hxx[k] - exx).norm(), 0.0, 1e-8);
    EXPECT_NEAR((hxy[k] - exy).norm(), 0.0, 1e-8);
    EXPECT_DOUBLE_EQ(hxx[k](0, 1), hxx[k](1, 0));
  }
}

TEST(Hessian, SmoothFieldSecondOrder) {
  double prev = 0.0;
  for (int n : {12, 24, 48}) {
    const DomainPtr d = build_disk(n, 2 * n, 1.0);
    const auto h = hessian(ScalarField::sample(d, [](const Vec2& x) { return std::sin(x.x()) * std::sin(x.y()); }));
    double err = 0.0;
    for (std::size_t k = 0; k < d->node_count(); ++k) {
      const Vec2& x = d->point(k);
      Mat2 e;
      e << -std::sin(x.x()) * std::sin(x.y()), std::cos(x.x()) * std::cos(x.y()), std::cos(x.x()) * std::cos(x.y()),
          -std::sin(x.x()) * std::sin(x.y());
      err = std::max(err, (h[k] - e).cwiseAbs().maxCoeff());
    }
    if (prev > 0) EXPECT_GT(std::log2(prev / err), 1.7) << n;
    prev = err;
  }
}

TEST(TangentialLaplacian, CircleEigenfunctions) {
  const DomainPtr d = build_disk(8, 64, 1.0);
  EXPECT_LT(max_abs(tangential_laplacian(BoundaryField::sample(d, [](const Vec2&) { return 1.0; })).values()), 1e-12);
  for (int k : {1, 2}) {
    const BoundaryField f = cos_k(d, k);
    const Eigen::VectorXd diff = tangential_laplacian(f).values() + k * k * f.values();
    EXPECT_LT(max_abs(diff), 5.0 * k * k * k * k * std::pow(2 * std::numbers::pi / 64, 2)) << k;
  }
}

TEST(ApplyS, Examples) {
  const DomainPtr d = build_disk(12, 24, 1.0);
  const SplitField one = apply_S(ScalarField::sample(d, [](const Vec2&) { return 1.0; }));
  EXPECT_LT(max_abs(one.interior), hessian_roundoff(*d));
  EXPECT_LT(max_abs(one.boundary.array() - 1.0), 1e-12);
  const SplitField q = apply_S(ScalarField::sample(d, [](const Vec2& x) { return x.squaredNorm(); }));
  EXPECT_LT(max_abs(q.interior.array() - 4.0), 1e-8);
  EXPECT_LT(max_abs(q.boundary.array() - 3.0), 1e-8);
  const SplitField lx = apply_S(ScalarField::sample(d, [](const Vec2& x) { return x.x(); }));
  EXPECT_LT(max_abs(lx.interior), 1e-9);
  for (std::size_t b = 0; b < d->boundary_count(); ++b)
    EXPECT_NEAR(lx.boundary[b], 2 * std::cos(d->angle(static_cast<int>(b))), 1e-9);
}

TEST(ApplyT, Examples) {
  const DomainPtr d = build_disk(8, 128, 1.0);
  const BoundaryField one = BoundaryField::sample(d, [](const Vec2&) { return 1.0; });
  EXPECT_LT(max_abs(apply_T(one).values().array() + 1.0), 1e-12);
  EXPECT_LT(max_abs(apply_T(cos_k(d, 1)).values() + 2 * cos_k(d, 1).values()), 1e-3);
  EXPECT_LT(max_abs(apply_T(cos_k(d, 2)).values() + 5 * cos_k(d, 2).values()), 1e-2);
}

TEST(SolveT, InvertsApplyT) {
  const DomainPtr d = build_disk(8, 128, 1.0);
  const BoundaryField rhs(d, -2 * cos_k(d, 1).values());
  EXPECT_LT(max_abs(solve_T(rhs).values() - cos_k(d, 1).values()), 1e-3);
}

TEST(SolveS, ConstantSolution) {
  const DomainPtr d = build_disk(12, 24, 1.0);
  const ScalarField u = solve_S(ScalarField::zeros(d), BoundaryField::sample(d, [](const Vec2&) { return 1.0; }));
  EXPECT_LT(max_abs(u.values().array() - 1.0), 1e-10);
}

TEST(SolveS, RoundTripOnRandomData) {
  const DomainPtr d = build_star(RadiusFunction(1.0, {0.0, 0.1}), 16, 32);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  const double a = U(rng), b = U(rng), c = U(rng);
  const ScalarField f = ScalarField::sample(d, [&](const Vec2& x) { return std::sin(a * x.x() + b * x.y()) + c; });
  const BoundaryField g = BoundaryField::sample(d, [&](const Vec2& x) { return std::cos(2 * angle_of(x)) + a; });
  const ScalarField u = solve_S(f, g);
  const SplitField back = apply_S(u);
  EXPECT_LT(max_abs(back.interior - f.interior_values()) / max_abs(f.values()), 1e-8);
  EXPECT_LT(max_abs(back.boundary - g.values()) / max_abs(g.values()), 1e-8);
  const BoundaryField h = solve_T(g);
  EXPECT_LT(max_abs(apply_T(h).values() - g.values()) / max_abs(g.values()), 1e-8);
}

TEST(Linearity, ApplySAndT) {
  const DomainPtr d = build_disk(10, 20, 1.0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  Eigen::VectorXd u(d->node_count()), v(d->node_count());
  for (auto* w : {&u, &v})
    for (Eigen::Index k = 0; k < w->size(); ++k) (*w)[k] = N(rng);
  const double s = 1.7;
  const SplitField a = apply_S(ScalarField(d, u + s * v));
  const SplitField b = apply_S(ScalarField(d, u));
  const SplitField c = apply_S(ScalarField(d, v));
  const double scale = max_abs(b.interior) + max_abs(c.interior);
  EXPECT_LT(max_abs(a.interior - b.interior - s * c.interior), 1e-12 * scale);
  EXPECT_LT(max_abs(a.boundary - b.boundary - s * c.boundary), 1e-12 * scale);
  const BoundaryField f(d, u.tail(d->boundary_count())), g(d, v.tail(d->boundary_count()));
  const Eigen::VectorXd lhs = apply_T(BoundaryField(d, f.values() + s * g.values())).values();
  EXPECT_LT(max_abs(lhs - apply_T(f).values() - s * apply_T(g).values()), 1e-12 * max_abs(lhs) * 10);
}

TEST(TOperator, SymmetricNegativeDefinite) {
  const DomainPtr d = build_disk(8, 32, 1.0);
  const Eigen::MatrixXd T(assemble_T(*d));
  EXPECT_LT((T - T.transpose()).cwiseAbs().maxCoeff(), 1e-10 * T.cwiseAbs().maxCoeff());
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(T).eigenvalues();
  EXPECT_LE(ev.maxCoeff(), -1.0 + 1e-10);
}

TEST(Interpolation, ReproducesSmoothFields) {
  const DomainPtr d = build_star(RadiusFunction(1.0, {0.0, 0.1}), 16, 32);
  const auto fn = [](const Vec2& x) { return std::exp(0.3 * x.x()) * std::cos(x.y()); };
  const FieldInterpolator I(ScalarField::sample(d, fn));
  for (std::size_t k = 0; k < d->node_count(); k += 7) EXPECT_NEAR(I(d->point(k)), fn(d->point(k)), 1e-12);
  for (const Vec2 x : {Vec2(0.01, 0.02), Vec2(0.3, -0.4), Vec2(-0.7, 0.2)}) EXPECT_NEAR(I(x), fn(x), 1e-4);
}

TEST(HessianRoundoff, ScalesLikeInverseSquareSpacing) {
  const double a = hessian_roundoff(*build_disk(16, 32, 1.0));
  const double b = hessian_roundoff(*build_disk(32, 64, 1.0));
  // innermost chord 2 s0 sin(pi / n_theta) with s0 = ds / 2
  const auto chord = [](int n_r, int n_th) { return 2.0 * (0.5 / (n_r - 0.5)) * std::sin(std::numbers::pi / n_th); };
  EXPECT_NEAR(b / a, std::pow(chord(16, 32) / chord(32, 64), 2), 1e-9);
  EXPECT_DOUBLE_EQ(hessian_roundoff(*build_disk(16, 32, 1.0), 3.0), 3.0 * a);
}
