#include "obdeg/interpolation.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace obdeg {

namespace {

// Lagrange weights on the integer nodes first, first+1, first+2, first+3.
std::array<double, 4> cubic_weights(double x, int first) {
  std::array<double, 4> w{};
  for (int a = 0; a < 4; ++a) {
    double v = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) v *= (x - (first + b)) / static_cast<double>(a - b);
    w[static_cast<std::size_t>(a)] = v;
  }
  return w;
}

}  // namespace

FieldInterpolator::FieldInterpolator(ScalarField field) : field_(std::move(field)) {}

double FieldInterpolator::operator()(const Vec2& x) const {
  const Eigen::Vector2d st = field_.domain()->mesh_coordinates_of(x);
  return at_mesh(st[0], st[1]);
}

double FieldInterpolator::at_mesh(double s, double theta) const {
  const auto& dom = *field_.domain();
  const int n_r = dom.n_r(), n_t = dom.n_theta();
  const double fi = s / dom.ring_spacing() - 0.5;
  const double fj = theta / dom.angle_step();
  int i0 = static_cast<int>(std::floor(fi)) - 1;
  if (i0 + 3 > n_r - 1) i0 = n_r - 4;
  const int j0 = static_cast<int>(std::floor(fj)) - 1;
  const auto wi = cubic_weights(fi, i0);
  const auto wj = cubic_weights(fj, j0);
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    const int ring = i0 + a;
    for (int b = 0; b < 4; ++b) {
      int j = j0 + b;
      int r = ring;
      if (r < 0) {
        r = -1 - r;
        j += n_t / 2;
      }
      acc += wi[static_cast<std::size_t>(a)] * wj[static_cast<std::size_t>(b)] * field_[dom.index(r, j)];
    }
  }
  return acc;
}

}  // namespace obdeg
