#include "obdeg/domain.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "obdeg/calculus.hpp"
#include "obdeg/errors.hpp"

namespace obdeg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class Fn>
double gauss_integrate(Fn&& fn, double lo, double hi) {
  return boost::math::quadrature::gauss<double, 8>::integrate(fn, lo, hi);
}

}  // namespace

RadiusFunction::RadiusFunction(double a0, std::vector<double> cos_coeffs,
                               std::vector<double> sin_coeffs)
    : a0_(a0), cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
  for (double c : cos_)
    if (!std::isfinite(c)) throw Error(ErrorKind::configuration, "non-finite radius coefficient");
  for (double c : sin_)
    if (!std::isfinite(c)) throw Error(ErrorKind::configuration, "non-finite radius coefficient");
  if (!std::isfinite(a0_)) throw Error(ErrorKind::configuration, "non-finite radius coefficient");
}

double RadiusFunction::operator()(double theta) const {
  double r = a0_;
  for (std::size_t k = 0; k < cos_.size(); ++k) r += cos_[k] * std::cos((k + 1) * theta);
  for (std::size_t k = 0; k < sin_.size(); ++k) r += sin_[k] * std::sin((k + 1) * theta);
  return r;
}

double RadiusFunction::derivative(double theta) const {
  double r = 0.0;
  for (std::size_t k = 0; k < cos_.size(); ++k) r -= (k + 1.0) * cos_[k] * std::sin((k + 1) * theta);
  for (std::size_t k = 0; k < sin_.size(); ++k) r += (k + 1.0) * sin_[k] * std::cos((k + 1) * theta);
  return r;
}

double RadiusFunction::second_derivative(double theta) const {
  double r = 0.0;
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    const double m = k + 1.0;
    r -= m * m * cos_[k] * std::cos(m * theta);
  }
  for (std::size_t k = 0; k < sin_.size(); ++k) {
    const double m = k + 1.0;
    r -= m * m * sin_[k] * std::sin(m * theta);
  }
  return r;
}

bool RadiusFunction::is_constant() const {
  return std::all_of(cos_.begin(), cos_.end(), [](double c) { return c == 0.0; }) &&
         std::all_of(sin_.begin(), sin_.end(), [](double c) { return c == 0.0; });
}

double RadiusFunction::min_value() const {
  if (is_constant()) return a0_;
  double m = a0_ + 1e300;
  for (int q = 0; q < 4096; ++q) m = std::min(m, (*this)(kTwoPi * q / 4096.0));
  return m;
}

double RadiusFunction::max_value() const {
  if (is_constant()) return a0_;
  double m = -1e300;
  for (int q = 0; q < 4096; ++q) m = std::max(m, (*this)(kTwoPi * q / 4096.0));
  return m;
}

RadiusFunction RadiusFunction::blend(const RadiusFunction& other, double t) const {
  const std::size_t nc = std::max(cos_.size(), other.cos_.size());
  const std::size_t ns = std::max(sin_.size(), other.sin_.size());
  std::vector<double> c(nc, 0.0), s(ns, 0.0);
  for (std::size_t k = 0; k < nc; ++k) {
    const double a = k < cos_.size() ? cos_[k] : 0.0;
    const double b = k < other.cos_.size() ? other.cos_[k] : 0.0;
    c[k] = (1.0 - t) * a + t * b;
  }
  for (std::size_t k = 0; k < ns; ++k) {
    const double a = k < sin_.size() ? sin_[k] : 0.0;
    const double b = k < other.sin_.size() ? other.sin_[k] : 0.0;
    s[k] = (1.0 - t) * a + t * b;
  }
  return RadiusFunction((1.0 - t) * a0_ + t * other.a0_, std::move(c), std::move(s));
}

DiscreteDomain::DiscreteDomain(RadiusFunction radius, int n_r, int n_theta)
    : radius_(std::move(radius)), n_r_(n_r), n_theta_(n_theta) {
  if (n_r < 4) throw Error(ErrorKind::configuration, "n_r must be at least 4");
  if (n_theta < 8) throw Error(ErrorKind::configuration, "n_theta must be at least 8");
  if (n_theta % 2 != 0)
    throw Error(ErrorKind::configuration, "n_theta must be even (stencils cross the origin)");
  if (!(radius_.min_value() > 0.0))
    throw Error(ErrorKind::configuration, "boundary radius must be strictly positive");
  // dR/ds = rbar + 3 s^2 (r - rbar) stays positive iff r > 2 rbar / 3.
  if (!(radius_.min_value() > 2.0 * radius_.a0() / 3.0))
    throw Error(ErrorKind::configuration,
                "boundary radius dips below 2/3 of its mean; mesh rings would cross");

  ds_ = 1.0 / (n_r - 0.5);
  interior_count_ = static_cast<std::size_t>(n_r - 1) * n_theta;
  h_ = ds_ * radius_.max_value();
  const double dtheta = angle_step();

  points_.resize(static_cast<std::size_t>(n_r) * n_theta);
  for (int i = 0; i < n_r; ++i) {
    const double s = ring_coordinate(i);
    for (int j = 0; j < n_theta; ++j) {
      const double th = angle(j);
      points_[index(i, j)] = map_point(s, th);
    }
  }

  ghosts_.resize(n_theta);
  gamma_.resize(n_theta);
  for (int j = 0; j < n_theta; ++j) {
    const double th = angle(j);
    const Vec2 e(std::cos(th), std::sin(th));
    const Vec2 e_perp(-e.y(), e.x());
    const double r = radius_(th);
    const double dr = radius_.derivative(th);
    ghosts_[j] = map_point(1.0 + ds_, th);
    gamma_[j] = (r * e - dr * e_perp).normalized();
  }

  // Arclength of each boundary segment [theta_j, theta_{j+1}].
  segments_.resize(n_theta);
  for (int j = 0; j < n_theta; ++j) {
    const double lo = angle(j);
    segments_[j] = gauss_integrate(
        [&](double th) {
          const double r = radius_(th);
          const double dr = radius_.derivative(th);
          return std::sqrt(r * r + dr * dr);
        },
        lo, lo + dtheta);
  }
  boundary_weights_.resize(n_theta);
  for (int j = 0; j < n_theta; ++j)
    boundary_weights_[j] = 0.5 * (segments_[j] + segments_[(j + n_theta - 1) % n_theta]);

  // Interior cells: ring i covers [s_i - ds/2, s_i + ds/2]; the last interior
  // ring absorbs the boundary half-cell so the weights tile the domain.
  interior_weights_.resize(static_cast<Eigen::Index>(interior_count_));
  for (int i = 0; i < n_r - 1; ++i) {
    const double lo = ring_coordinate(i) - 0.5 * ds_;
    const double hi = (i == n_r - 2) ? 1.0 : ring_coordinate(i) + 0.5 * ds_;
    for (int j = 0; j < n_theta; ++j) {
      const double th = angle(j);
      interior_weights_[static_cast<Eigen::Index>(index(i, j))] = gauss_integrate(
          [&](double phi) {
            const double a = mesh_radius(hi, phi);
            const double b = mesh_radius(lo, phi);
            return 0.5 * (a * a - b * b);
          },
          th - 0.5 * dtheta, th + 0.5 * dtheta);
    }
  }

  // Area weights over all nodes: interior cells as above except on the last
  // strip [s_{n_r-2} - ds/2, 1], which is shared between the last interior
  // ring and the boundary by the linear interpolant in s along each ray.
  area_weights_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(node_count()));
  area_weights_.head(static_cast<Eigen::Index>(interior_count_)) = interior_weights_;
  {
    const double sa = ring_coordinate(n_r - 2), sb = 1.0, lo = sa - 0.5 * ds_;
    for (int j = 0; j < n_theta; ++j) {
      const double th = angle(j);
      auto strip = [&](bool at_boundary) {
        return gauss_integrate(
            [&](double phi) {
              const double dr = radius_(phi) - radius_.a0();
              return gauss_integrate(
                  [&](double s) {
                    const double R = mesh_radius(s, phi);
                    const double Rs = radius_.a0() + 3.0 * s * s * dr;
                    const double ell = at_boundary ? (s - sa) / (sb - sa) : (sb - s) / (sb - sa);
                    return ell * R * Rs;
                  },
                  lo, sb);
            },
            th - 0.5 * dtheta, th + 0.5 * dtheta);
      };
      area_weights_[static_cast<Eigen::Index>(index(n_r - 2, j))] = strip(false);
      area_weights_[static_cast<Eigen::Index>(index(n_r - 1, j))] = strip(true);
    }
  }

  for (const Vec2& g : gamma_)
    if (std::abs(g.norm() - 1.0) > 1e-12)
      throw Error(ErrorKind::configuration, "boundary normal failed to normalize");
  if ((interior_weights_.array() <= 0.0).any() || (boundary_weights_.array() <= 0.0).any())
    throw Error(ErrorKind::configuration, "non-positive quadrature weight");

  ops_ = build_derivative_operators(*this);
}

DiscreteDomain::~DiscreteDomain() = default;

std::size_t DiscreteDomain::index(int ring, int j) const {
  const int jj = ((j % n_theta_) + n_theta_) % n_theta_;
  return static_cast<std::size_t>(ring) * n_theta_ + jj;
}

double DiscreteDomain::angle(int j) const { return kTwoPi * j / n_theta_; }
double DiscreteDomain::angle_step() const { return kTwoPi / n_theta_; }

std::span<const Vec2> DiscreteDomain::interior_nodes() const {
  return std::span<const Vec2>(points_).first(interior_count_);
}

std::span<const Vec2> DiscreteDomain::boundary_nodes() const {
  return std::span<const Vec2>(points_).subspan(interior_count_);
}

double DiscreteDomain::integrate(const Eigen::VectorXd& values) const {
  if (values.size() != area_weights_.size())
    throw Error(ErrorKind::input, "integrand does not match the node count");
  return area_weights_.dot(values);
}

double DiscreteDomain::mesh_radius(double s, double theta) const {
  const double rbar = radius_.a0();
  return s * rbar + s * s * s * (radius_(theta) - rbar);
}

Vec2 DiscreteDomain::map_point(double s, double theta) const {
  return mesh_radius(s, theta) * Vec2(std::cos(theta), std::sin(theta));
}

Eigen::Vector2d DiscreteDomain::mesh_coordinates_of(const Vec2& x) const {
  double th = std::atan2(x.y(), x.x());
  if (th < 0.0) th += kTwoPi;
  const double target = x.norm();
  const double rbar = radius_.a0();
  const double dr = radius_(th) - rbar;
  // Newton on the monotone cubic s rbar + s^3 dr = |x|.
  double s = target / radius_(th);
  for (int it = 0; it < 50; ++it) {
    const double f = s * rbar + s * s * s * dr - target;
    const double df = rbar + 3.0 * s * s * dr;
    const double step = f / df;
    s -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return {s, th};
}

DomainPtr build_disk(int n_r, int n_theta, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::configuration, "disk radius must be positive");
  return std::make_shared<const DiscreteDomain>(RadiusFunction::constant(radius), n_r, n_theta);
}

DomainPtr build_star(const RadiusFunction& radius, int n_r, int n_theta) {
  return std::make_shared<const DiscreteDomain>(radius, n_r, n_theta);
}

DomainFoliation::DomainFoliation(RadiusFunction r0, RadiusFunction r1, int n_r, int n_theta)
    : r0_(std::move(r0)), r1_(std::move(r1)), n_r_(n_r), n_theta_(n_theta) {
  if (!(r0_.min_value() > 0.0))
    throw Error(ErrorKind::configuration, "foliation radius r0 must be strictly positive");
  // r_t is affine in t, so positivity at both ends and r0 <= r1 cover [0, 1].
  for (int q = 0; q < 4096; ++q) {
    const double th = kTwoPi * q / 4096.0;
    if (r0_(th) > r1_(th) + 1e-14)
      throw Error(ErrorKind::configuration, "foliation requires r0(theta) <= r1(theta)");
  }
}

RadiusFunction DomainFoliation::radius_at(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::range, "foliation parameter outside [0,1]");
  if (t == 0.0) return r0_;
  if (t == 1.0) return r1_;
  return r0_.blend(r1_, t);
}

DomainPtr foliation_domain(const DomainFoliation& fol, double t) {
  return build_star(fol.radius_at(t), fol.n_r(), fol.n_theta());
}

}  // namespace obdeg
