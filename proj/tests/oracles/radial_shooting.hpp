#pragma once

// Radial oracle for -Delta u = kappa u^q on the unit ball in R^n with
// u^{-m} (u'(1) + (n-2)/2 h u(1)) = c: RK4 on u'' + (n-1)/r u' + kappa u^q = 0
// from a series start, then bisection on u(0).

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

class RadialShooting {
 public:
  RadialShooting(int n, double c, double h = 1.0, int steps = 20000)
      : n_(n), c_(c), h_(h), steps_(steps), kappa_((n - 2.0) / 2.0), q_((n + 2.0) / (n - 2.0)),
        m_(n / (n - 2.0)) {}

  // (u, u') at the given increasing radii in (0, 1].
  std::vector<std::pair<double, double>> profile(double a, const std::vector<double>& radii) const {
    const double r0 = 1e-4;
    double r = r0;
    const double f0 = kappa_ * std::pow(a, q_);
    double u = a - f0 * r0 * r0 / (2.0 * n_), v = -f0 * r0 / n_;
    const double dr = (1.0 - r0) / steps_;
    std::vector<std::pair<double, double>> out;
    std::size_t next = 0;
    auto rhs = [&](double rr, double uu, double vv) {
      return std::pair<double, double>{vv, -(n_ - 1.0) / rr * vv - kappa_ * std::pow(std::max(uu, 0.0), q_)};
    };
    while (next < radii.size() && radii[next] <= r0) out.push_back({a, 0.0}), ++next;
    while (next < radii.size()) {
      const double step = std::min(dr, radii[next] - r);
      const auto k1 = rhs(r, u, v);
      const auto k2 = rhs(r + step / 2, u + step / 2 * k1.first, v + step / 2 * k1.second);
      const auto k3 = rhs(r + step / 2, u + step / 2 * k2.first, v + step / 2 * k2.second);
      const auto k4 = rhs(r + step, u + step * k3.first, v + step * k3.second);
      u += step / 6 * (k1.first + 2 * k2.first + 2 * k3.first + k4.first);
      v += step / 6 * (k1.second + 2 * k2.second + 2 * k3.second + k4.second);
      r += step;
      if (std::abs(r - radii[next]) < 1e-14) {
        out.push_back({u, v});
        ++next;
      }
    }
    return out;
  }

  double boundary_residual(double a) const {
    const auto uv = profile(a, {1.0}).front();
    if (!(uv.first > 0.0)) return NAN;
    return std::pow(uv.first, -m_) * (uv.second + (n_ - 2.0) / 2.0 * h_ * uv.first) - c_;
  }

  // u(0) of the positive radial solution; requires exactly one sign change on the scan.
  double center_value() const {
    std::vector<double> grid;
    for (double a = 0.05; a < 20.0; a *= 1.05) grid.push_back(a);
    int roots = 0;
    double lo = 0, hi = 0;
    double prev = boundary_residual(grid[0]);
    for (std::size_t k = 1; k < grid.size(); ++k) {
      const double cur = boundary_residual(grid[k]);
      if (std::isfinite(prev) && std::isfinite(cur) && prev * cur < 0.0) {
        ++roots;
        lo = grid[k - 1];
        hi = grid[k];
      }
      prev = cur;
    }
    if (roots != 1) throw std::runtime_error("shooting oracle: expected one bracket");
    double flo = boundary_residual(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi), fm = boundary_residual(mid);
      if (flo * fm <= 0.0) {
        hi = mid;
      } else {
        lo = mid;
        flo = fm;
      }
    }
    return 0.5 * (lo + hi);
  }

 private:
  int n_;
  double c_, h_;
  int steps_;
  double kappa_, q_, m_;
};

// Closed-form family for comparison: u = (2n)^{(n-2)/4} (mu / (mu^2 + r^2))^{(n-2)/2}
// with c(mu) = (n-2)(mu^2 - 1) / (2 mu sqrt(2n)) when h = 1.
inline double bubble(int n, double mu, double r) {
  return std::pow(2.0 * n, (n - 2) / 4.0) * std::pow(mu / (mu * mu + r * r), (n - 2) / 2.0);
}
inline double bubble_mu(int n, double c) {
  const double k = 2.0 * std::sqrt(2.0 * n) * c / (n - 2.0);
  return (k + std::sqrt(k * k + 4.0)) / 2.0;
}

}  // namespace oracle
