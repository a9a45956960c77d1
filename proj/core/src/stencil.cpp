#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "obdeg/calculus.hpp"
#include "obdeg/errors.hpp"

namespace obdeg {

namespace {

struct StencilPoint {
  Eigen::Index col;
  Vec2 pos;
};

// Monomial xi^a eta^b.
struct Monomial {
  int a, b;
};

std::vector<Monomial> tensor_basis(int deg_xi, int deg_eta) {
  std::vector<Monomial> basis;
  for (int a = 0; a <= deg_xi; ++a)
    for (int b = 0; b <= deg_eta; ++b) basis.push_back({a, b});
  return basis;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

struct OperatorTriplets {
  Triplets dx, dy, dxx, dxy, dyy;
};

// Interpolates the stencil values with a tensor polynomial in the affine
// frame x = center + A q and differentiates at q = 0. The frame follows the
// mesh lines, so the points sit near a tensor grid in q.
void emit_row(Eigen::Index row, const Vec2& center, const Mat2& A,
              const std::vector<StencilPoint>& pts, const std::vector<Monomial>& basis,
              OperatorTriplets& out) {
  const auto m = static_cast<Eigen::Index>(pts.size());
  if (static_cast<std::size_t>(m) != basis.size())
    throw Error(ErrorKind::configuration, "stencil size does not match its basis");
  const Mat2 A_inv = A.inverse();
  Eigen::MatrixXd V(m, m);
  for (Eigen::Index q = 0; q < m; ++q) {
    const Vec2 loc = A_inv * (pts[q].pos - center);
    for (Eigen::Index c = 0; c < m; ++c)
      V(q, c) = std::pow(loc.x(), basis[c].a) * std::pow(loc.y(), basis[c].b);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(V);
  if (!lu.isInvertible() || lu.rcond() < 1e-12)
    throw Error(ErrorKind::configuration, "degenerate stencil geometry");
  const Eigen::MatrixXd P = lu.inverse();  // coefficients = P * values

  auto coeff_row = [&](int a, int b) -> Eigen::RowVectorXd {
    for (std::size_t c = 0; c < basis.size(); ++c)
      if (basis[c].a == a && basis[c].b == b) return P.row(static_cast<Eigen::Index>(c));
    throw Error(ErrorKind::configuration, "stencil basis lacks a quadratic monomial");
  };
  const Eigen::RowVectorXd g_xi = coeff_row(1, 0), g_eta = coeff_row(0, 1);
  const Eigen::RowVectorXd h_xixi = 2.0 * coeff_row(2, 0), h_xieta = coeff_row(1, 1),
                           h_etaeta = 2.0 * coeff_row(0, 2);

  // Du = A^{-T} g, D2u = A^{-T} H A^{-1}.
  const Mat2 B = A_inv.transpose();
  for (Eigen::Index q = 0; q < m; ++q) {
    const Vec2 g(g_xi[q], g_eta[q]);
    Mat2 H;
    H << h_xixi[q], h_xieta[q], h_xieta[q], h_etaeta[q];
    const Vec2 d = B * g;
    const Mat2 D2 = B * H * B.transpose();
    const Eigen::Index col = pts[q].col;
    out.dx.emplace_back(row, col, d.x());
    out.dy.emplace_back(row, col, d.y());
    out.dxx.emplace_back(row, col, D2(0, 0));
    out.dxy.emplace_back(row, col, 0.5 * (D2(0, 1) + D2(1, 0)));
    out.dyy.emplace_back(row, col, D2(1, 1));
  }
}

SparseMatrix to_sparse(Eigen::Index rows, Eigen::Index cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.prune(0.0);
  return m;
}

}  // namespace

std::unique_ptr<DerivativeOperators> build_derivative_operators(const DiscreteDomain& dom) {
  const int nr = dom.n_r();
  const int nt = dom.n_theta();
  const int nb = nr - 1;
  const auto n = static_cast<Eigen::Index>(dom.node_count());
  const auto n_ghost = static_cast<Eigen::Index>(dom.boundary_count());

  auto node = [&](int i, int j) {
    const auto k = dom.index(i, j);
    return StencilPoint{static_cast<Eigen::Index>(k), dom.point(k)};
  };
  // Rings below 0 continue through the origin onto the opposite ray.
  auto ring = [&](int i, int j) { return i >= 0 ? node(i, j) : node(-1 - i, j + nt / 2); };
  auto ghost = [&](int j) {
    const int jj = ((j % nt) + nt) % nt;
    return StencilPoint{n + jj, dom.ghost_points()[jj]};
  };
  auto frame = [](const Vec2& radial, const Vec2& tangential) {
    Mat2 A;
    A.col(0) = radial;
    A.col(1) = tangential;
    return A;
  };

  const auto central_basis = tensor_basis(2, 2);
  const auto wide_basis = tensor_basis(4, 2);
  const auto one_sided_basis = tensor_basis(3, 2);
  // 3x3 block: rows are (inward, same, outward) rings, columns j-1, j, j+1.
  auto block = [&](const StencilPoint (&in)[3], const StencilPoint (&mid)[3],
                   const StencilPoint (&out)[3]) {
    return std::vector<StencilPoint>{in[0], in[1], in[2], mid[0], mid[1],
                                     mid[2], out[0], out[1], out[2]};
  };

  OperatorTriplets reg, ext;
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < nt; ++j) {
      const auto row = static_cast<Eigen::Index>(dom.index(i, j));
      const Vec2& c = dom.point(static_cast<std::size_t>(row));
      const StencilPoint mid[3] = {node(i, j - 1), node(i, j), node(i, j + 1)};
      const Vec2 tangential = 0.5 * (mid[2].pos - mid[0].pos);
      if (i + 2 <= nb) {
        // Five rings keep u_s / s second order near the origin.
        std::vector<StencilPoint> pts;
        for (int di = -2; di <= 2; ++di)
          for (int dj = -1; dj <= 1; ++dj) pts.push_back(ring(i + di, j + dj));
        const Mat2 A = frame(0.5 * (ring(i + 1, j).pos - ring(i - 1, j).pos), tangential);
        emit_row(row, c, A, pts, wide_basis, reg);
        emit_row(row, c, A, pts, wide_basis, ext);
      } else if (i < nb) {
        const StencilPoint in[3] = {ring(i - 1, j - 1), ring(i - 1, j), ring(i - 1, j + 1)};
        const StencilPoint out[3] = {node(i + 1, j - 1), node(i + 1, j), node(i + 1, j + 1)};
        const Mat2 A = frame(0.5 * (out[1].pos - in[1].pos), tangential);
        const auto pts = block(in, mid, out);
        emit_row(row, c, A, pts, central_basis, reg);
        emit_row(row, c, A, pts, central_basis, ext);
      } else {
        std::vector<StencilPoint> pts;
        for (int back = 3; back >= 0; --back)
          for (int dj = -1; dj <= 1; ++dj) pts.push_back(node(i - back, j + dj));
        const Mat2 A = frame(c - node(i - 1, j).pos, tangential);
        emit_row(row, c, A, pts, one_sided_basis, reg);
        const StencilPoint in[3] = {node(i - 1, j - 1), node(i - 1, j), node(i - 1, j + 1)};
        const StencilPoint out[3] = {ghost(j - 1), ghost(j), ghost(j + 1)};
        const Mat2 Ae = frame(0.5 * (out[1].pos - in[1].pos), tangential);
        emit_row(row, c, Ae, block(in, mid, out), central_basis, ext);
      }
    }
  }

  auto ops = std::make_unique<DerivativeOperators>();
  ops->dx = to_sparse(n, n, reg.dx);
  ops->dy = to_sparse(n, n, reg.dy);
  ops->dxx = to_sparse(n, n, reg.dxx);
  ops->dxy = to_sparse(n, n, reg.dxy);
  ops->dyy = to_sparse(n, n, reg.dyy);
  ops->ext_dx = to_sparse(n, n + n_ghost, ext.dx);
  ops->ext_dy = to_sparse(n, n + n_ghost, ext.dy);
  ops->ext_dxx = to_sparse(n, n + n_ghost, ext.dxx);
  ops->ext_dxy = to_sparse(n, n + n_ghost, ext.dxy);
  ops->ext_dyy = to_sparse(n, n + n_ghost, ext.dyy);

  // Periodic second difference in arclength on the boundary chain.
  const Eigen::VectorXd& seg = dom.segment_lengths();
  Triplets lt;
  for (int j = 0; j < nt; ++j) {
    const double lm = seg[(j + nt - 1) % nt];
    const double lp = seg[j];
    const double w = 2.0 / (lm + lp);
    lt.emplace_back(j, (j + 1) % nt, w / lp);
    lt.emplace_back(j, (j + nt - 1) % nt, w / lm);
    lt.emplace_back(j, j, -w * (1.0 / lp + 1.0 / lm));
  }
  ops->tangential_laplacian = to_sparse(nt, nt, lt);
  return ops;
}

}  // namespace obdeg
