#include "obdeg/linops.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseLU>

#include "obdeg/degree.hpp"
#include "obdeg/dense.hpp"

namespace obdeg {

namespace {

using Eigen::Index;
using Eigen::VectorXd;

SparseMatrix rows_of(const SparseMatrix& m, Index start, Index count) {
  return SparseMatrix(m.middleRows(start, count));
}

SparseMatrix padded(SparseMatrix m, Index cols) {
  m.conservativeResize(m.rows(), cols);
  return m;
}

SparseMatrix stack(const std::vector<SparseMatrix>& blocks) {
  Index rows = 0;
  const Index cols = blocks.front().cols();
  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& b : blocks) {
    for (Index r = 0; r < b.rows(); ++r)
      for (SparseMatrix::InnerIterator it(b, r); it; ++it)
        trips.emplace_back(rows + r, it.col(), it.value());
    rows += b.rows();
  }
  SparseMatrix out(rows, cols);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

VectorXd entry(const std::vector<Mat2>& a, std::size_t from, std::size_t count, int s, int t) {
  VectorXd v(static_cast<Index>(count));
  for (std::size_t k = 0; k < count; ++k) v[static_cast<Index>(k)] = a[from + k](s, t);
  return v;
}

VectorXd component(const std::vector<Vec2>& b, int i) {
  VectorXd v(static_cast<Index>(b.size()));
  for (std::size_t k = 0; k < b.size(); ++k) v[static_cast<Index>(k)] = b[k][i];
  return v;
}

void check_coefficients(const DiscreteDomain& dom, const std::vector<Mat2>& a,
                        const std::vector<Vec2>& b) {
  if (a.size() != dom.node_count())
    throw Error(ErrorKind::assembly, "matrix coefficient field must cover every node");
  if (b.size() != dom.boundary_count())
    throw Error(ErrorKind::assembly, "vector coefficient field must cover every boundary node");
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Mat2& m = a[k];
    if (!m.allFinite() || std::abs(m(0, 1) - m(1, 0)) > 1e-12 * (1.0 + m.norm()))
      throw Error(ErrorKind::assembly, "coefficient a is not symmetric at node " + std::to_string(k));
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (!(m(0, 0) > 0.0 && det > 0.0))
      throw Error(ErrorKind::assembly, "coefficient a is not positive definite at node " + std::to_string(k));
  }
  for (std::size_t j = 0; j < b.size(); ++j)
    if (!b[j].allFinite() || !(b[j].dot(dom.normal(j)) > 0.0))
      throw Error(ErrorKind::assembly, "coefficient b is not oblique at boundary node " + std::to_string(j));
}

std::vector<Mat2> identity_field(const DiscreteDomain& dom) {
  return std::vector<Mat2>(dom.node_count(), Mat2::Identity());
}

std::vector<Vec2> normal_field(const DiscreteDomain& dom) {
  return {dom.gamma().begin(), dom.gamma().end()};
}

// Boundary rows of gamma . D (one-sided), n_B x n.
SparseMatrix normal_derivative_rows(const DiscreteDomain& dom) {
  const auto& ops = dom.operators();
  const auto n_i = static_cast<Index>(dom.interior_count());
  const auto n_b = static_cast<Index>(dom.boundary_count());
  const auto& g = normal_field(dom);
  const VectorXd gx = component(g, 0), gy = component(g, 1);
  SparseMatrix out = gx.asDiagonal() * rows_of(ops.dx, n_i, n_b);
  out += gy.asDiagonal() * rows_of(ops.dy, n_i, n_b);
  return out;
}

SparseMatrix boundary_selection(const DiscreteDomain& dom, Index cols) {
  const auto n_i = static_cast<Index>(dom.interior_count());
  const auto n_b = static_cast<Index>(dom.boundary_count());
  SparseMatrix sel(n_b, cols);
  std::vector<Eigen::Triplet<double>> trips;
  for (Index j = 0; j < n_b; ++j) trips.emplace_back(j, n_i + j, 1.0);
  sel.setFromTriplets(trips.begin(), trips.end());
  return sel;
}

struct Blocks {
  SparseMatrix l1, l2;
};

// a_st Delta(D^ext_st) on interior rows and a_st gamma.D(D^ext_st) on boundary rows.
Blocks fourth_order_blocks(const DiscreteDomain& dom, const std::vector<Mat2>& a) {
  const auto& ops = dom.operators();
  const auto n_i = static_cast<Index>(dom.interior_count());
  const SparseMatrix lap_int = rows_of(laplacian_matrix(dom), 0, n_i);
  const SparseMatrix nd = normal_derivative_rows(dom);
  const SparseMatrix* ext[3] = {&ops.ext_dxx, &ops.ext_dxy, &ops.ext_dyy};
  const int st[3][2] = {{0, 0}, {0, 1}, {1, 1}};
  const double mult[3] = {1.0, 2.0, 1.0};
  Blocks out;
  for (int q = 0; q < 3; ++q) {
    const VectorXd ai = mult[q] * entry(a, 0, dom.interior_count(), st[q][0], st[q][1]);
    const VectorXd ab =
        mult[q] * entry(a, dom.interior_count(), dom.boundary_count(), st[q][0], st[q][1]);
    SparseMatrix t1 = ai.asDiagonal() * SparseMatrix(lap_int * *ext[q]);
    SparseMatrix t2 = ab.asDiagonal() * SparseMatrix(nd * *ext[q]);
    if (q == 0) {
      out.l1 = t1;
      out.l2 = t2;
    } else {
      out.l1 += t1;
      out.l2 += t2;
    }
  }
  return out;
}

// a_st D^ext_st restricted to interior rows.
SparseMatrix second_order_interior(const DiscreteDomain& dom, const std::vector<Mat2>& a) {
  const auto& ops = dom.operators();
  const auto n_i = static_cast<Index>(dom.interior_count());
  const VectorXd a11 = entry(a, 0, dom.interior_count(), 0, 0);
  const VectorXd a12 = 2.0 * entry(a, 0, dom.interior_count(), 0, 1);
  const VectorXd a22 = entry(a, 0, dom.interior_count(), 1, 1);
  SparseMatrix out = a11.asDiagonal() * rows_of(ops.ext_dxx, 0, n_i);
  out += a12.asDiagonal() * rows_of(ops.ext_dxy, 0, n_i);
  out += a22.asDiagonal() * rows_of(ops.ext_dyy, 0, n_i);
  return out;
}

// Boundary rows of c_i D^ext_i (ghost-central), n_B x (n + n_B).
SparseMatrix ext_directional_rows(const DiscreteDomain& dom, const std::vector<Vec2>& c) {
  const auto& ops = dom.operators();
  const auto n_i = static_cast<Index>(dom.interior_count());
  const auto n_b = static_cast<Index>(dom.boundary_count());
  const VectorXd cx = component(c, 0), cy = component(c, 1);
  SparseMatrix out = cx.asDiagonal() * rows_of(ops.ext_dx, n_i, n_b);
  out += cy.asDiagonal() * rows_of(ops.ext_dy, n_i, n_b);
  return out;
}

// c_i Delta_T (D^ext_i w) on the boundary.
SparseMatrix tangential_of_directional(const DiscreteDomain& dom, const std::vector<Vec2>& c) {
  const auto& ops = dom.operators();
  const auto n_i = static_cast<Index>(dom.interior_count());
  const auto n_b = static_cast<Index>(dom.boundary_count());
  const VectorXd cx = component(c, 0), cy = component(c, 1);
  SparseMatrix out = cx.asDiagonal() * SparseMatrix(ops.tangential_laplacian * rows_of(ops.ext_dx, n_i, n_b));
  out += cy.asDiagonal() * SparseMatrix(ops.tangential_laplacian * rows_of(ops.ext_dy, n_i, n_b));
  return out;
}

double l2_boundary(const DiscreteDomain& dom, const VectorXd& v) {
  return std::sqrt(dom.boundary_weights().dot(v.cwiseAbs2()));
}

VectorXd solve_sparse(const SparseMatrix& m, const VectorXd& rhs, const char* what) {
  Eigen::SparseMatrix<double, Eigen::ColMajor> cm(m);
  Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor>> lu;
  lu.compute(cm);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorKind::solver, std::string("singular discrete system in ") + what);
  VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw Error(ErrorKind::solver, std::string("solve failed in ") + what);
  return x;
}

}  // namespace

VectorXd extended_sample(const DiscreteDomain& domain, const std::function<double(const Vec2&)>& fn) {
  const std::size_t n = domain.node_count(), n_b = domain.boundary_count();
  VectorXd v(static_cast<Index>(n + n_b));
  for (std::size_t k = 0; k < n; ++k) v[static_cast<Index>(k)] = fn(domain.point(k));
  const auto ghosts = domain.ghost_points();
  for (std::size_t j = 0; j < n_b; ++j) v[static_cast<Index>(n + j)] = fn(ghosts[j]);
  return v;
}

VectorXd extend_by_extrapolation(const ScalarField& u) {
  const auto& dom = *u.domain();
  const std::size_t n = dom.node_count(), n_b = dom.boundary_count(), last = dom.n_r() - 1;
  VectorXd v(static_cast<Index>(n + n_b));
  v.head(static_cast<Index>(n)) = u.values();
  for (std::size_t j = 0; j < n_b; ++j) {
    const auto at = [&](std::size_t ring) { return u[dom.index(static_cast<int>(ring), static_cast<int>(j))]; };
    v[static_cast<Index>(n + j)] = 4.0 * at(last) - 6.0 * at(last - 1) + 4.0 * at(last - 2) - at(last - 3);
  }
  return v;
}

LNOperator assemble_LN(DomainPtr domain, const std::vector<Mat2>& a, const std::vector<Vec2>& b,
                       double N) {
  if (!domain) throw Error(ErrorKind::assembly, "operator without domain");
  const auto& dom = *domain;
  check_coefficients(dom, a, b);
  if (!std::isfinite(N)) throw Error(ErrorKind::assembly, "N must be finite");
  const auto n = static_cast<Index>(dom.node_count());
  const auto n_b = static_cast<Index>(dom.boundary_count());
  const Index cols = n + n_b;

  Blocks fb = fourth_order_blocks(dom, a);
  SparseMatrix l1 = fb.l1 - N * second_order_interior(dom, a);
  SparseMatrix l3 = tangential_of_directional(dom, b);
  l3 -= N * ext_directional_rows(dom, b);
  l3 -= N * boundary_selection(dom, cols);

  LNOperator op;
  op.domain = std::move(domain);
  op.N = N;
  op.a = a;
  op.b = b;
  op.matrix = stack({l1, fb.l2, l3});
  op.matrix.prune(0.0);
  if (op.matrix.rows() != op.matrix.cols())
    throw Error(ErrorKind::assembly, "assembled operator is not square");
  for (Index k = 0; k < op.matrix.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(op.matrix, k); it; ++it)
      if (!std::isfinite(it.value())) throw Error(ErrorKind::assembly, "non-finite matrix entry");
  return op;
}

LNRows apply_LN(const LNOperator& op, const VectorXd& w_ext) {
  const auto& dom = *op.domain;
  const auto& ops = dom.operators();
  const auto n = static_cast<Index>(dom.node_count());
  const auto n_i = static_cast<Index>(dom.interior_count());
  const auto n_b = static_cast<Index>(dom.boundary_count());
  if (w_ext.size() != n + n_b) throw Error(ErrorKind::input, "extended field has the wrong size");

  // Staged application: difference operators first, then compose. This keeps
  // the roundoff at the level of each factor instead of the product matrix.
  const VectorXd hxx = apply_difference(ops.ext_dxx, w_ext);
  const VectorXd hxy = apply_difference(ops.ext_dxy, w_ext);
  const VectorXd hyy = apply_difference(ops.ext_dyy, w_ext);
  const VectorXd gx = apply_difference(ops.ext_dx, w_ext);
  const VectorXd gy = apply_difference(ops.ext_dy, w_ext);
  const SparseMatrix lap = laplacian_matrix(dom);

  LNRows out;
  out.l1.resize(n_i);
  out.l2.resize(n_b);
  out.l3.resize(n_b);
  const VectorXd lap_xx = apply_difference(lap, hxx), lap_xy = apply_difference(lap, hxy),
                 lap_yy = apply_difference(lap, hyy);
  const VectorXd dx_xx = apply_difference(ops.dx, hxx), dx_xy = apply_difference(ops.dx, hxy),
                 dx_yy = apply_difference(ops.dx, hyy);
  const VectorXd dy_xx = apply_difference(ops.dy, hxx), dy_xy = apply_difference(ops.dy, hxy),
                 dy_yy = apply_difference(ops.dy, hyy);
  for (Index k = 0; k < n_i; ++k) {
    const Mat2& a = op.a[static_cast<std::size_t>(k)];
    out.l1[k] = a(0, 0) * lap_xx[k] + 2.0 * a(0, 1) * lap_xy[k] + a(1, 1) * lap_yy[k] -
                op.N * (a(0, 0) * hxx[k] + 2.0 * a(0, 1) * hxy[k] + a(1, 1) * hyy[k]);
  }
  const VectorXd tgx = apply_difference(ops.tangential_laplacian, gx.tail(n_b));
  const VectorXd tgy = apply_difference(ops.tangential_laplacian, gy.tail(n_b));
  for (Index j = 0; j < n_b; ++j) {
    const Index k = n_i + j;
    const Mat2& a = op.a[static_cast<std::size_t>(k)];
    const Vec2& g = dom.normal(static_cast<std::size_t>(j));
    const Vec2& b = op.b[static_cast<std::size_t>(j)];
    const double d_xx = g.x() * dx_xx[k] + g.y() * dy_xx[k];
    const double d_xy = g.x() * dx_xy[k] + g.y() * dy_xy[k];
    const double d_yy = g.x() * dx_yy[k] + g.y() * dy_yy[k];
    out.l2[j] = a(0, 0) * d_xx + 2.0 * a(0, 1) * d_xy + a(1, 1) * d_yy;
    out.l3[j] = b.x() * tgx[j] + b.y() * tgy[j] - op.N * (b.x() * gx[k] + b.y() * gy[k]) -
                op.N * w_ext[k];
  }
  return out;
}

LNOperator assemble_Mt(DomainPtr domain, double N, double t) {
  if (!domain) throw Error(ErrorKind::assembly, "operator without domain");
  const auto& dom = *domain;
  const auto a = identity_field(dom);
  const auto g = normal_field(dom);
  const auto n = static_cast<Index>(dom.node_count());
  const auto n_b = static_cast<Index>(dom.boundary_count());
  const Index cols = n + n_b;

  Blocks fb = fourth_order_blocks(dom, a);
  SparseMatrix l1 = fb.l1 - N * second_order_interior(dom, a);
  // V = gamma.D^ext w + w on the boundary.
  SparseMatrix v = ext_directional_rows(dom, g);
  v += boundary_selection(dom, cols);
  SparseMatrix l3 = (1.0 - t) * SparseMatrix(dom.operators().tangential_laplacian * v);
  l3 += t * tangential_of_directional(dom, g);
  l3 -= N * v;

  LNOperator op;
  op.domain = std::move(domain);
  op.N = N;
  op.a = a;
  op.b = g;
  op.matrix = stack({l1, fb.l2, l3});
  op.matrix.prune(0.0);
  return op;
}

SingularValueCheck certify_invertible(const SparseMatrix& m, double tol) {
  const VectorXd sv = singular_values(Eigen::MatrixXd(m));
  if (sv.size() == 0) throw Error(ErrorKind::numerical, "empty matrix");
  SingularValueCheck out;
  out.sigma_max = sv[0];
  out.sigma_min = sv[sv.size() - 1];
  out.invertible = out.sigma_min > tol * out.sigma_max;
  return out;
}

ThresholdResult find_N0(DomainPtr domain, const std::vector<Mat2>& a, const std::vector<Vec2>& b,
                        double N_max, double tol) {
  if (!(N_max >= 1.0)) throw Error(ErrorKind::range, "N_max must be at least 1");
  ThresholdResult out;
  std::vector<bool> ok;
  for (double N = 1.0; N <= N_max; N *= 2.0) {
    const LNOperator op = assemble_LN(domain, a, b, N);
    const SingularValueCheck c = certify_invertible(op.matrix, tol);
    out.profile.push_back({N, c.sigma_min, c.sigma_max});
    ok.push_back(c.invertible);
  }
  std::size_t first = ok.size();
  while (first > 0 && ok[first - 1]) --first;
  if (first == ok.size())
    throw ThresholdNotFoundError(out.profile, "no certified invertible N up to " + std::to_string(N_max));
  out.N0 = out.profile[first].N;
  return out;
}

SemifinitenessResult semifiniteness_mu(const LinearPair& pair) {
  pair.validate();
  // Eigenvalues of -A x = lambda M x are mu = -lambda.
  std::vector<std::complex<double>> lam;
  try {
    lam = pair_eigenvalues(pair);
  } catch (const Error& e) {
    throw Error(ErrorKind::numerical, std::string("semi-finiteness eigensolve failed: ") + e.what());
  }
  if (lam.empty()) throw Error(ErrorKind::numerical, "no finite eigenvalues");
  SemifinitenessResult out;
  out.mu_star = -std::numeric_limits<double>::infinity();
  for (const auto& l : lam) out.mu_star = std::max(out.mu_star, -l.real());
  out.finite_eigenvalues = lam.size();
  const SparseMatrix A = pair.assemble();
  double scale = 0.0;
  const auto n_i = static_cast<Index>(pair.domain->interior_count());
  for (Index r = 0; r < n_i; ++r) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(A, r); it; ++it) s += std::abs(it.value());
    scale = std::max(scale, s);
  }
  out.matrix_scale = scale;
  return out;
}

double shifted_rcond(const LinearPair& pair, double mu) {
  pair.validate();
  Eigen::MatrixXd A(pair.assemble());
  const auto n_i = static_cast<Index>(pair.domain->interior_count());
  for (Index k = 0; k < n_i; ++k) A(k, k) -= mu;
  const LuSummary lu = lu_summary(std::move(A));
  return lu.det_sign == 0 ? 0.0 : lu.rcond;
}

double resolvent_symbol_bound(double N, int K_max) {
  if (!(N >= 1.0)) throw Error(ErrorKind::range, "N must be at least 1");
  if (K_max < 0) throw Error(ErrorKind::range, "K_max must be nonnegative");
  double sup = 0.0;
  for (int k = 0; k <= K_max; ++k) {
    const double k2 = static_cast<double>(k) * k;
    sup = std::max(sup, (1.0 + k2) / (k2 + N));
  }
  return sup;
}

double rellich_ratio(DomainPtr domain, const std::vector<Mat2>& a, const std::vector<Vec2>& b,
                     const BoundaryField& g) {
  if (!domain || g.domain() != domain) throw Error(ErrorKind::input, "boundary data on another domain");
  const auto& dom = *domain;
  const double g_norm = l2_boundary(dom, g.values());
  if (!(g_norm > 0.0)) throw Error(ErrorKind::input, "boundary data is identically zero");
  LinearPair pair;
  pair.domain = domain;
  pair.a.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(dom.interior_count()));
  pair.d.assign(dom.interior_count(), Vec2::Zero());
  pair.c = VectorXd::Zero(static_cast<Index>(dom.interior_count()));
  pair.b = b;
  pair.l = VectorXd::Ones(static_cast<Index>(dom.boundary_count()));
  pair.validate();
  VectorXd rhs = VectorXd::Zero(static_cast<Index>(dom.node_count()));
  rhs.tail(static_cast<Index>(dom.boundary_count())) = g.values();
  const ScalarField w(domain, solve_sparse(pair.assemble(), rhs, "Rellich problem"));
  const auto grad = gradient(w);
  const VectorXd wb = w.boundary_values();
  VectorXd dw(wb.size());
  for (Index j = 0; j < wb.size(); ++j) dw[j] = grad[dom.boundary_node(static_cast<std::size_t>(j))].norm();
  return (l2_boundary(dom, wb) + l2_boundary(dom, dw)) / g_norm;
}

double l2_norm(const ScalarField& w) {
  const auto& dom = *w.domain();
  return std::sqrt(dom.interior_weights().dot(w.interior_values().cwiseAbs2()));
}

double h2_norm(const ScalarField& w) {
  const auto& dom = *w.domain();
  const auto grad = gradient(w);
  const auto hess = hessian(w);
  const VectorXd& wt = dom.interior_weights();
  double s = 0.0;
  for (std::size_t k = 0; k < dom.interior_count(); ++k)
    s += wt[static_cast<Index>(k)] * (w[k] * w[k] + grad[k].squaredNorm() + hess[k].squaredNorm());
  return std::sqrt(s);
}

double kernel_estimate_ratio(DomainPtr domain, const std::vector<Mat2>& a,
                             const std::vector<Vec2>& b, double N, const ScalarField& phi) {
  if (!domain || phi.domain() != domain) throw Error(ErrorKind::input, "source on another domain");
  const auto& dom = *domain;
  check_coefficients(dom, a, b);
  const auto& ops = dom.operators();
  const auto n = static_cast<Index>(dom.node_count());
  const auto n_i = static_cast<Index>(dom.interior_count());
  const auto n_b = static_cast<Index>(dom.boundary_count());
  const VectorXd a11 = entry(a, 0, dom.interior_count(), 0, 0);
  const VectorXd a12 = 2.0 * entry(a, 0, dom.interior_count(), 0, 1);
  const VectorXd a22 = entry(a, 0, dom.interior_count(), 1, 1);
  SparseMatrix top = a11.asDiagonal() * rows_of(ops.dxx, 0, n_i);
  top += a12.asDiagonal() * rows_of(ops.dxy, 0, n_i);
  top += a22.asDiagonal() * rows_of(ops.dyy, 0, n_i);
  // Third boundary row with one-sided derivatives so the system stays square.
  const VectorXd bx = component(b, 0), by = component(b, 1);
  const SparseMatrix dxb = rows_of(ops.dx, n_i, n_b), dyb = rows_of(ops.dy, n_i, n_b);
  SparseMatrix bottom = bx.asDiagonal() * SparseMatrix(ops.tangential_laplacian * dxb);
  bottom += by.asDiagonal() * SparseMatrix(ops.tangential_laplacian * dyb);
  bottom -= N * SparseMatrix(bx.asDiagonal() * dxb);
  bottom -= N * SparseMatrix(by.asDiagonal() * dyb);
  bottom -= N * boundary_selection(dom, n);
  VectorXd rhs = VectorXd::Zero(n);
  rhs.head(n_i) = phi.interior_values();
  const ScalarField w(domain, solve_sparse(stack({top, bottom}), rhs, "kernel problem"));
  const double p = l2_norm(phi);
  if (!(p > 0.0)) throw Error(ErrorKind::input, "source is identically zero");
  return h2_norm(w) / p;
}

FrozenSplit frozen_split(const ObliqueProblem& prob, const ScalarField& u, double N) {
  const auto& dom = *prob.domain();
  if (u.domain() != prob.domain()) throw Error(ErrorKind::input, "field on another domain");
  const FieldJet jet = jet_of(u);
  const std::size_t n = dom.node_count(), n_b = dom.boundary_count();

  std::vector<Mat2> a(n);
  VectorXd f_all(static_cast<Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const NodeInfo info = prob.node_info(k);
    const InteriorPartials d = prob.df(info, jet.z[static_cast<Index>(k)], jet.p[k], jet.r[k]);
    a[k] = 0.5 * (d.d_r + d.d_r.transpose());
    f_all[static_cast<Index>(k)] = prob.f(info, jet.z[static_cast<Index>(k)], jet.p[k], jet.r[k]);
  }
  std::vector<Vec2> b(n_b);
  VectorXd g_vals(static_cast<Index>(n_b));
  for (std::size_t j = 0; j < n_b; ++j) {
    const std::size_t k = dom.boundary_node(j);
    const NodeInfo info = prob.node_info(k);
    b[j] = prob.dg(info, jet.z[static_cast<Index>(k)], jet.p[k]).d_p;
    g_vals[static_cast<Index>(j)] = prob.g(info, jet.z[static_cast<Index>(k)], jet.p[k]);
  }

  FrozenSplit out;
  out.L = assemble_LN(prob.domain(), a, b, N);
  const VectorXd u_ext = extend_by_extrapolation(u);
  out.l_part = apply_LN(out.L, u_ext);

  const SplitField sf = apply_S(ScalarField(prob.domain(), f_all));
  const BoundaryField tg = apply_T(BoundaryField(prob.domain(), g_vals));
  out.composed = {sf.interior, sf.boundary, tg.values()};
  out.r_part = {out.composed.l1 - out.l_part.l1, out.composed.l2 - out.l_part.l2,
                out.composed.l3 - out.l_part.l3};

  // Strip the N-weighted terms to expose C_*, E_*, H_*.
  const LNOperator l0 = assemble_LN(prob.domain(), a, b, 0.0);
  const LNRows base = apply_LN(l0, u_ext);
  out.c_star = out.composed.l1 - base.l1;
  out.e_star = out.composed.l2 - base.l2;
  out.h_star = out.composed.l3 - base.l3;
  return out;
}

}  // namespace obdeg
