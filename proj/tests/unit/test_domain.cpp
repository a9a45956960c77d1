#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "obdeg/domain.hpp"
#include "obdeg/errors.hpp"

using namespace obdeg;
constexpr double pi = std::numbers::pi;

TEST(Domain, UnitDiskWeightsMatchAreaAndPerimeter) {
  const DomainPtr d = build_disk(32, 64, 1.0);
  EXPECT_NEAR(d->interior_weights().sum(), pi, 0.01 * pi);
  EXPECT_NEAR(d->boundary_weights().sum(), 2 * pi, 0.01 * 2 * pi);
  EXPECT_NEAR(d->area_weights().sum(), pi, 1e-3);
}

TEST(Domain, DiskNormalIsRadial) {
  const DomainPtr d = build_disk(8, 16, 1.0);
  for (std::size_t b = 0; b < d->boundary_count(); ++b) {
    const double th = d->angle(static_cast<int>(b));
    EXPECT_DOUBLE_EQ(d->normal(b).x(), std::cos(th));
    EXPECT_DOUBLE_EQ(d->normal(b).y(), std::sin(th));
  }
}

TEST(Domain, StarDomainInvariants) {
  const DomainPtr d = build_star(RadiusFunction(1.0, {0.0, 0.15}, {0.05}), 12, 24);
  for (std::size_t b = 0; b < d->boundary_count(); ++b) EXPECT_NEAR(d->normal(b).norm(), 1.0, 1e-12);
  EXPECT_TRUE((d->area_weights().array() > 0).all());
  EXPECT_TRUE((d->interior_weights().array() > 0).all());
  EXPECT_TRUE((d->boundary_weights().array() > 0).all());
  // the boundary chain is a single counterclockwise loop
  double winding = 0.0;
  const auto bn = d->boundary_nodes();
  for (std::size_t b = 0; b < bn.size(); ++b) {
    const Vec2& p = bn[b];
    const Vec2& q = bn[(b + 1) % bn.size()];
    winding += std::atan2(p.x() * q.y() - p.y() * q.x(), p.dot(q));
  }
  EXPECT_NEAR(winding, 2 * pi, 1e-12);
  // the normal points out of the region
  for (std::size_t b = 0; b < bn.size(); ++b) EXPECT_GT(d->normal(b).dot(bn[b]), 0.0);
}

TEST(Domain, BoundaryNodesLieOnRadiusFunction) {
  const RadiusFunction r(0.8, {0.05, 0.1}, {0.0, -0.04});
  const DomainPtr d = build_star(r, 10, 20);
  for (std::size_t b = 0; b < d->boundary_count(); ++b) {
    const Vec2& x = d->point(d->boundary_node(b));
    EXPECT_NEAR(x.norm(), r(std::atan2(x.y(), x.x())), 1e-13);
  }
}

TEST(Domain, QuadratureConvergesSecondOrder) {
  const RadiusFunction r(1.0, {0.0, 0.1});
  // area = pi (a0^2 + a2^2 / 2), perimeter by fine trapezoid
  const double area = pi * (1.0 + 0.005);
  double perim = 0.0;
  const int M = 200000;
  for (int k = 0; k < M; ++k) {
    const double th = 2 * pi * k / M;
    perim += std::hypot(r(th), r.derivative(th)) * 2 * pi / M;
  }
  for (int n : {8, 16, 32}) {
    const DomainPtr d = build_star(r, n, 2 * n);
    EXPECT_NEAR(d->area_weights().sum(), area, 1e-12) << n;
    EXPECT_NEAR(d->boundary_weights().sum(), perim, 1e-9) << n;
  }
  // exp(x) cos(y) against a polar midpoint reference
  const auto f = [](const Vec2& x) { return std::exp(x.x()) * std::cos(x.y()); };
  double ref = 0.0;
  const int K = 1500;
  for (int a = 0; a < K; ++a) {
    const double th = 2 * pi * (a + 0.5) / K, R = r(th);
    for (int b = 0; b < K; ++b) {
      const double s = R * (b + 0.5) / K;
      ref += f(Vec2(s * std::cos(th), s * std::sin(th))) * s * (R / K) * (2 * pi / K);
    }
  }
  double prev = 0;
  for (int n : {8, 16, 32}) {
    const DomainPtr d = build_star(r, n, 2 * n);
    Eigen::VectorXd v(d->node_count());
    for (std::size_t k = 0; k < d->node_count(); ++k) v[k] = f(d->point(k));
    const double e = std::abs(d->integrate(v) - ref);
    if (prev > 0) {
      EXPECT_LT(e, prev / 3.0) << n;
    }
    prev = e;
  }
}

TEST(Domain, IntegrateUsesAreaWeights) {
  const DomainPtr d = build_disk(24, 48, 1.0);
  Eigen::VectorXd v(d->node_count());
  for (std::size_t k = 0; k < d->node_count(); ++k) v[k] = d->point(k).squaredNorm();
  EXPECT_NEAR(d->integrate(v), pi / 2, 2e-3);
}

TEST(Domain, MeshMapRoundTrip) {
  const DomainPtr d = build_star(RadiusFunction(1.0, {0.1}, {0.0, 0.05}), 12, 24);
  for (double s : {0.1, 0.5, 0.9})
    for (double th : {0.0, 1.0, 4.0}) {
      const Vec2 x = d->map_point(s, th);
      const Eigen::Vector2d st = d->mesh_coordinates_of(x);
      EXPECT_NEAR(st[0], s, 1e-10);
      EXPECT_NEAR(std::remainder(st[1] - th, 2 * pi), 0.0, 1e-10);
    }
}

TEST(Domain, RejectsBadMeshes) {
  EXPECT_THROW(build_disk(2, 16, 1.0), Error);
  EXPECT_THROW(build_disk(8, 15, 1.0), Error);
  EXPECT_THROW(build_disk(8, 16, -1.0), Error);
  EXPECT_THROW(build_star(RadiusFunction(0.1, {0.2}), 8, 16), Error);
}

TEST(Foliation, Endpoints) {
  const DomainFoliation fol(RadiusFunction::constant(1.0), RadiusFunction::constant(2.0), 8, 16);
  const DomainPtr d0 = foliation_domain(fol, 0.0);
  const DomainPtr d1 = foliation_domain(fol, 1.0);
  const DomainPtr dh = foliation_domain(fol, 0.5);
  for (std::size_t b = 0; b < d0->boundary_count(); ++b) {
    EXPECT_NEAR(d0->point(d0->boundary_node(b)).norm(), 1.0, 1e-14);
    EXPECT_NEAR(d1->point(d1->boundary_node(b)).norm(), 2.0, 1e-14);
    EXPECT_NEAR(dh->point(dh->boundary_node(b)).norm(), 1.5, 1e-14);
  }
}

TEST(Foliation, MonotoneContainment) {
  const RadiusFunction r0(0.5, {0.0, 0.02});
  const RadiusFunction r1(0.8, {0.05, 0.03}, {0.02});
  const DomainFoliation fol(r0, r1, 8, 16);
  double prev_t = 0.0;
  for (double t : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    for (int k = 0; k < 64; ++k) {
      const double th = 2 * pi * k / 64;
      EXPECT_LE(fol.radius_at(prev_t)(th), fol.radius_at(t)(th));
      EXPECT_GT(fol.radius_at(t)(th), 0.0);
    }
    prev_t = t;
  }
}

TEST(Foliation, RejectsNonMonotoneFamily) {
  EXPECT_THROW(DomainFoliation(RadiusFunction::constant(1.0), RadiusFunction(1.0, {0.1}), 8, 16), Error);
}
