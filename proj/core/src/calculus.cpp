#include "obdeg/calculus.hpp"

#include <limits>

#include <Eigen/SparseLU>

#include "obdeg/errors.hpp"

namespace obdeg {

namespace {

void require_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) throw Error(ErrorKind::input, std::string(what) + " contains non-finite values");
}

void require_same_domain(const DomainPtr& a, const DomainPtr& b) {
  if (a.get() != b.get()) throw Error(ErrorKind::input, "fields live on different domains");
}

Eigen::VectorXd solve_sparse(const SparseMatrix& A, const Eigen::VectorXd& rhs, const char* what) {
  Eigen::SparseMatrix<double> Ac(A);
  Ac.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(Ac);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorKind::solver, std::string("singular discrete ") + what + " (mesh defect?)");
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw Error(ErrorKind::solver, std::string("failed to solve discrete ") + what);
  return x;
}

}  // namespace

Eigen::VectorXd apply_difference(const SparseMatrix& op, const Eigen::VectorXd& v) {
  Eigen::VectorXd out(op.rows());
  for (Eigen::Index r = 0; r < op.rows(); ++r) {
    const double center = v[r];
    double acc = 0.0;
    for (SparseMatrix::InnerIterator it(op, r); it; ++it) acc += it.value() * (v[it.col()] - center);
    out[r] = acc;
  }
  return out;
}

ScalarField::ScalarField(DomainPtr domain, Eigen::VectorXd values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (!domain_) throw Error(ErrorKind::input, "field without domain");
  if (static_cast<std::size_t>(values_.size()) != domain_->node_count())
    throw Error(ErrorKind::input, "field size does not match node count");
  require_finite(values_, "scalar field");
}

ScalarField ScalarField::zeros(DomainPtr domain) {
  const auto n = static_cast<Eigen::Index>(domain->node_count());
  return ScalarField(std::move(domain), Eigen::VectorXd::Zero(n));
}

Eigen::VectorXd ScalarField::interior_values() const {
  return values_.head(static_cast<Eigen::Index>(domain_->interior_count()));
}

Eigen::VectorXd ScalarField::boundary_values() const {
  return values_.tail(static_cast<Eigen::Index>(domain_->boundary_count()));
}

BoundaryField::BoundaryField(DomainPtr domain, Eigen::VectorXd values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (!domain_) throw Error(ErrorKind::input, "field without domain");
  if (static_cast<std::size_t>(values_.size()) != domain_->boundary_count())
    throw Error(ErrorKind::input, "boundary field size does not match boundary node count");
  require_finite(values_, "boundary field");
}

Eigen::VectorXd SplitField::stacked() const {
  Eigen::VectorXd v(interior.size() + boundary.size());
  v << interior, boundary;
  return v;
}

double SplitField::sup_norm() const {
  double m = 0.0;
  if (interior.size() > 0) m = interior.lpNorm<Eigen::Infinity>();
  if (boundary.size() > 0) m = std::max(m, boundary.lpNorm<Eigen::Infinity>());
  return m;
}

VectorFieldValues gradient(const ScalarField& u) {
  const auto& ops = u.domain()->operators();
  const Eigen::VectorXd gx = apply_difference(ops.dx, u.values());
  const Eigen::VectorXd gy = apply_difference(ops.dy, u.values());
  VectorFieldValues out(u.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = Vec2(gx[k], gy[k]);
  return out;
}

MatrixFieldValues hessian(const ScalarField& u) {
  const auto& ops = u.domain()->operators();
  const Eigen::VectorXd hxx = apply_difference(ops.dxx, u.values());
  const Eigen::VectorXd hxy = apply_difference(ops.dxy, u.values());
  const Eigen::VectorXd hyy = apply_difference(ops.dyy, u.values());
  MatrixFieldValues out(u.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] << hxx[k], hxy[k], hxy[k], hyy[k];
  return out;
}

BoundaryField tangential_laplacian(const BoundaryField& f) {
  return BoundaryField(f.domain(), f.domain()->operators().tangential_laplacian * f.values());
}

SparseMatrix laplacian_matrix(const DiscreteDomain& domain) {
  const auto& ops = domain.operators();
  return ops.dxx + ops.dyy;
}

SparseMatrix assemble_S(const DiscreteDomain& dom) {
  const auto& ops = dom.operators();
  const auto n = static_cast<Eigen::Index>(dom.node_count());
  const auto n_i = static_cast<Eigen::Index>(dom.interior_count());
  Eigen::VectorXd lap_w = Eigen::VectorXd::Zero(n), gx = lap_w, gy = lap_w, id = lap_w;
  lap_w.head(n_i).setOnes();
  for (std::size_t b = 0; b < dom.boundary_count(); ++b) {
    const auto k = static_cast<Eigen::Index>(dom.boundary_node(b));
    gx[k] = dom.normal(b).x();
    gy[k] = dom.normal(b).y();
    id[k] = 1.0;
  }
  SparseMatrix I(n, n);
  I.setIdentity();
  SparseMatrix S = lap_w.asDiagonal() * SparseMatrix(ops.dxx + ops.dyy);
  S += gx.asDiagonal() * ops.dx;
  S += gy.asDiagonal() * ops.dy;
  S += id.asDiagonal() * I;
  return S;
}

SparseMatrix assemble_T(const DiscreteDomain& dom) {
  const auto nb = static_cast<Eigen::Index>(dom.boundary_count());
  SparseMatrix I(nb, nb);
  I.setIdentity();
  return dom.operators().tangential_laplacian - I;
}

SplitField apply_S(const ScalarField& u) {
  const auto& dom = *u.domain();
  const Eigen::VectorXd s = assemble_S(dom) * u.values();
  const auto n_i = static_cast<Eigen::Index>(dom.interior_count());
  return {s.head(n_i), s.tail(static_cast<Eigen::Index>(dom.boundary_count()))};
}

BoundaryField apply_T(const BoundaryField& f) {
  return BoundaryField(f.domain(), assemble_T(*f.domain()) * f.values());
}

ScalarField solve_S(DomainPtr domain, const SplitField& rhs) {
  const auto& dom = *domain;
  if (static_cast<std::size_t>(rhs.interior.size()) != dom.interior_count() ||
      static_cast<std::size_t>(rhs.boundary.size()) != dom.boundary_count())
    throw Error(ErrorKind::input, "right-hand side does not match the domain");
  Eigen::VectorXd x = solve_sparse(assemble_S(dom), rhs.stacked(), "S");
  return ScalarField(std::move(domain), std::move(x));
}

ScalarField solve_S(const ScalarField& rhs_interior, const BoundaryField& rhs_boundary) {
  require_same_domain(rhs_interior.domain(), rhs_boundary.domain());
  return solve_S(rhs_interior.domain(),
                 SplitField{rhs_interior.interior_values(), rhs_boundary.values()});
}

BoundaryField solve_T(const BoundaryField& rhs) {
  return BoundaryField(rhs.domain(), solve_sparse(assemble_T(*rhs.domain()), rhs.values(), "T"));
}

double hessian_roundoff(const DiscreteDomain& domain, double scale) {
  const double h = (domain.point(1) - domain.point(0)).norm();
  return 64.0 * std::numeric_limits<double>::epsilon() * scale / (h * h);
}

}  // namespace obdeg
