#pragma once

// Robin eigenvalues of -Laplace on the unit disk with du/dr + u = 0 at r = 1.
// Eigenfunctions J_k(j r) e^{ik theta}; j solves j J_k'(j) + J_k(j) = 0 and the
// eigenvalue is j^2, with multiplicity 2 for k >= 1.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

struct RobinEigenvalue {
  double value;
  int k;
  int multiplicity;
};

inline double robin_condition(int k, double j) {
  const double dj = k == 0 ? -std::cyl_bessel_j(1.0, j)
                           : 0.5 * (std::cyl_bessel_j(k - 1.0, j) - std::cyl_bessel_j(k + 1.0, j));
  return j * dj + std::cyl_bessel_j(static_cast<double>(k), j);
}

// All eigenvalues below limit, sorted.
inline std::vector<RobinEigenvalue> robin_disk_eigenvalues(double limit) {
  std::vector<RobinEigenvalue> out;
  const double j_max = std::sqrt(limit);
  for (int k = 0; k < 64; ++k) {
    const double dj = 1e-3;
    double a = 1e-6, fa = robin_condition(k, a);
    for (double b = a + dj; b <= j_max + dj; b += dj) {
      const double fb = robin_condition(k, b);
      if (fa * fb < 0.0) {
        double lo = a, hi = b, flo = fa;
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
          const double mid = 0.5 * (lo + hi), fm = robin_condition(k, mid);
          if (flo * fm <= 0.0) {
            hi = mid;
          } else {
            lo = mid;
            flo = fm;
          }
        }
        const double j = 0.5 * (lo + hi);
        if (j * j < limit) out.push_back({j * j, k, k == 0 ? 1 : 2});
      }
      a = b;
      fa = fb;
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.value < y.value; });
  return out;
}

inline int count_below(const std::vector<RobinEigenvalue>& ev, double c) {
  int n = 0;
  for (const auto& e : ev)
    if (e.value < c) n += e.multiplicity;
  return n;
}

}  // namespace oracle
