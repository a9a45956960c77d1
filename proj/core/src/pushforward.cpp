#include <cmath>
#include <numbers>
#include <random>

#include "obdeg/errors.hpp"
#include "obdeg/interpolation.hpp"
#include "obdeg/reflector.hpp"

namespace obdeg {

PushforwardReport pushforward_check(const ScalarField& u, const ReflectorProblem& prob,
                                    std::size_t samples, std::uint64_t seed, int bins_per_axis) {
  if (u.domain() != prob.domain) throw Error(ErrorKind::input, "field on another domain");
  if (samples == 0 || bins_per_axis < 1) throw Error(ErrorKind::configuration, "empty Monte-Carlo setup");
  const auto& dom = *prob.domain;
  const auto grad = gradient(u);
  Eigen::VectorXd gx(static_cast<Eigen::Index>(u.size())), gy(gx.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    gx[static_cast<Eigen::Index>(k)] = grad[k].x();
    gy[static_cast<Eigen::Index>(k)] = grad[k].y();
  }
  const FieldInterpolator iz(u), ipx(ScalarField(prob.domain, gx)), ipy(ScalarField(prob.domain, gy));
  const auto rho = prob.incident();
  const double rho_max = 1.25 * prob.rho.values().maxCoeff();
  const double r_max = dom.radius().max_value();

  const auto [lo0, hi0] = prob.target.bounding_box();
  const Vec2 pad = 0.02 * (hi0 - lo0);
  const Vec2 lo = lo0 - pad, hi = hi0 + pad;
  const Vec2 cell = (hi - lo) / bins_per_axis;
  const auto nb = static_cast<std::size_t>(bins_per_axis);
  auto bin_of = [&](const Vec2& y) -> long {
    const long i = static_cast<long>(std::floor((y.x() - lo.x()) / cell.x()));
    const long j = static_cast<long>(std::floor((y.y() - lo.y()) / cell.y()));
    if (i < 0 || j < 0 || i >= bins_per_axis || j >= bins_per_axis) return -1;
    return i * bins_per_axis + j;
  };

  // Rejection sampling of rho on Omega.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-r_max, r_max), level(0.0, rho_max);
  std::vector<double> counts(nb * nb, 0.0);
  std::size_t accepted = 0, outside = 0, attempts = 0;
  while (accepted < samples) {
    if (++attempts > 1000 * samples) throw Error(ErrorKind::numerical, "rejection sampling stalled");
    const Vec2 x(box(rng), box(rng));
    const double th = std::atan2(x.y(), x.x());
    if (!(x.norm() < dom.radius()(th < 0.0 ? th + 2.0 * std::numbers::pi : th))) continue;
    const double rx = rho(x);
    if (rx > rho_max) throw Error(ErrorKind::numerical, "incident intensity exceeds its sampling bound");
    if (level(rng) >= rx) continue;
    ++accepted;
    const Vec2 st = dom.mesh_coordinates_of(x);
    const Vec2 p(ipx.at_mesh(st[0], st[1]), ipy.at_mesh(st[0], st[1]));
    const Vec2 T = reflection_map(x, iz.at_mesh(st[0], st[1]), p);
    if (prob.target.signed_distance(T) > 0.0) ++outside;
    const long b = bin_of(T);
    if (b >= 0) counts[static_cast<std::size_t>(b)] += 1.0;
  }

  // Reference masses: midpoint rule on a sub-grid of each bin, restricted to the target.
  const int sub = 24;
  std::vector<double> ref(nb * nb, 0.0);
  double ref_total = 0.0;
  for (std::size_t b = 0; b < nb * nb; ++b) {
    const Vec2 corner = lo + Vec2(cell.x() * static_cast<double>(b / nb), cell.y() * static_cast<double>(b % nb));
    double acc = 0.0;
    for (int i = 0; i < sub; ++i)
      for (int j = 0; j < sub; ++j) {
        const Vec2 y = corner + Vec2(cell.x() * (i + 0.5) / sub, cell.y() * (j + 0.5) / sub);
        if (prob.target.contains(y)) acc += prob.rho_star.value(y);
      }
    ref[b] = acc * cell.x() * cell.y() / (sub * sub);
    ref_total += ref[b];
  }

  const double mass = dom.integrate(prob.rho.values());
  double l1 = 0.0;
  for (std::size_t b = 0; b < nb * nb; ++b) l1 += std::abs(counts[b] / static_cast<double>(samples) * mass - ref[b]);

  PushforwardReport out;
  out.samples = samples;
  out.bins = nb * nb;
  out.l1_discrepancy = l1 / ref_total;
  out.outside_fraction = static_cast<double>(outside) / static_cast<double>(samples);
  return out;
}

}  // namespace obdeg
