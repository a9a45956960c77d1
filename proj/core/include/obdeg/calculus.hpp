#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "obdeg/domain.hpp"

namespace obdeg {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Sparse difference operators of a DiscreteDomain. Rows interpolate a tensor
// polynomial in the local (radial, tangential) frame: 3x3 blocks in the
// interior, 4 rings x 3 rays one-sided at the boundary. All are exact for
// quadratics.
struct DerivativeOperators {
  SparseMatrix dx, dy, dxx, dxy, dyy;  // node_count x node_count
  // Same operators with boundary rows replaced by central stencils that
  // reach into the ghost ring; columns are [nodes..., ghosts...].
  SparseMatrix ext_dx, ext_dy, ext_dxx, ext_dxy, ext_dyy;
  SparseMatrix tangential_laplacian;  // boundary_count x boundary_count
};

std::unique_ptr<DerivativeOperators> build_derivative_operators(const DiscreteDomain& domain);

// op * v evaluated row-wise as sum_c w_c (v_c - v_row). Difference operators
// annihilate constants, so this equals op * v while avoiding cancellation
// between large stencil weights on fine meshes.
Eigen::VectorXd apply_difference(const SparseMatrix& op, const Eigen::VectorXd& v);

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(DomainPtr domain, Eigen::VectorXd values);
  static ScalarField zeros(DomainPtr domain);
  template <class Fn>
  static ScalarField sample(DomainPtr domain, Fn&& fn) {
    Eigen::VectorXd v(domain->node_count());
    for (std::size_t k = 0; k < domain->node_count(); ++k) v[k] = fn(domain->point(k));
    return ScalarField(std::move(domain), std::move(v));
  }

  const DomainPtr& domain() const { return domain_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  Eigen::VectorXd interior_values() const;
  Eigen::VectorXd boundary_values() const;

 private:
  DomainPtr domain_;
  Eigen::VectorXd values_;
};

class BoundaryField {
 public:
  BoundaryField() = default;
  BoundaryField(DomainPtr domain, Eigen::VectorXd values);
  template <class Fn>
  static BoundaryField sample(DomainPtr domain, Fn&& fn) {
    Eigen::VectorXd v(domain->boundary_count());
    for (std::size_t b = 0; b < domain->boundary_count(); ++b)
      v[b] = fn(domain->point(domain->boundary_node(b)));
    return BoundaryField(std::move(domain), std::move(v));
  }

  const DomainPtr& domain() const { return domain_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  double operator[](std::size_t b) const { return values_[b]; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

 private:
  DomainPtr domain_;
  Eigen::VectorXd values_;
};

// Interior values (one per interior node) paired with a boundary field.
struct SplitField {
  Eigen::VectorXd interior;
  Eigen::VectorXd boundary;

  Eigen::VectorXd stacked() const;
  double sup_norm() const;
};

using VectorFieldValues = std::vector<Vec2>;
using MatrixFieldValues = std::vector<Mat2>;

VectorFieldValues gradient(const ScalarField& u);
MatrixFieldValues hessian(const ScalarField& u);
BoundaryField tangential_laplacian(const BoundaryField& f);

// S u = (Laplacian on interior, gamma . Du + u on boundary)
SplitField apply_S(const ScalarField& u);
// T f = tangential Laplacian f - f
BoundaryField apply_T(const BoundaryField& f);
ScalarField solve_S(const ScalarField& rhs_interior, const BoundaryField& rhs_boundary);
ScalarField solve_S(DomainPtr domain, const SplitField& rhs);
BoundaryField solve_T(const BoundaryField& rhs);

SparseMatrix assemble_S(const DiscreteDomain& domain);
SparseMatrix assemble_T(const DiscreteDomain& domain);
SparseMatrix laplacian_matrix(const DiscreteDomain& domain);

// Roundoff level of discrete second derivatives of a field of size scale:
// 64 * machine epsilon * scale / h^2 with h the spacing of the innermost ring.
double hessian_roundoff(const DiscreteDomain& domain, double scale = 1.0);

}  // namespace obdeg
