#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace obdeg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

struct DerivativeOperators;

// r(theta) = a0 + sum_k (a_k cos k theta + b_k sin k theta), k = 1, 2, ...
class RadiusFunction {
 public:
  explicit RadiusFunction(double a0 = 1.0, std::vector<double> cos_coeffs = {},
                          std::vector<double> sin_coeffs = {});

  static RadiusFunction constant(double r) { return RadiusFunction(r); }

  double operator()(double theta) const;
  double derivative(double theta) const;
  double second_derivative(double theta) const;

  // Sampled extrema on a fine uniform grid (exact for constants).
  double min_value() const;
  double max_value() const;
  bool is_constant() const;

  // Coefficient-wise (1-t) * this + t * other.
  RadiusFunction blend(const RadiusFunction& other, double t) const;

  double a0() const { return a0_; }
  const std::vector<double>& cos_coeffs() const { return cos_; }
  const std::vector<double>& sin_coeffs() const { return sin_; }

 private:
  double a0_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

// Polar-structured mesh of a star-shaped domain. A node with mesh coordinates
// (s, theta) sits at x = R(s, theta) (cos theta, sin theta), where
// R(s, theta) = s rbar + s^3 (r(theta) - rbar) and rbar is the mean radius, so
// the mesh is a disk mesh near the origin and fits r(theta) at s = 1.
// Rings i = 0..n_r-1 sit at s_i = (i + 1/2) ds with ds = 1/(n_r - 1/2), so ring n_r-1
// is the boundary. Node index = i * n_theta + j; interior nodes come first and the
// boundary chain occupies the last n_theta indices in counterclockwise order.
class DiscreteDomain {
 public:
  DiscreteDomain(RadiusFunction radius, int n_r, int n_theta);
  ~DiscreteDomain();
  DiscreteDomain(const DiscreteDomain&) = delete;
  DiscreteDomain& operator=(const DiscreteDomain&) = delete;

  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  std::size_t node_count() const { return points_.size(); }
  std::size_t interior_count() const { return interior_count_; }
  std::size_t boundary_count() const { return static_cast<std::size_t>(n_theta_); }
  bool is_boundary(std::size_t node) const { return node >= interior_count_; }

  std::size_t index(int ring, int j) const;
  int ring_of(std::size_t node) const { return static_cast<int>(node / n_theta_); }
  int angle_index_of(std::size_t node) const { return static_cast<int>(node % n_theta_); }
  std::size_t boundary_node(std::size_t b) const { return interior_count_ + b; }

  double ring_spacing() const { return ds_; }
  double ring_coordinate(int ring) const { return (ring + 0.5) * ds_; }
  double angle(int j) const;
  double angle_step() const;

  const Vec2& point(std::size_t node) const { return points_[node]; }
  std::span<const Vec2> points() const { return points_; }
  std::span<const Vec2> interior_nodes() const;
  std::span<const Vec2> boundary_nodes() const;
  // Ghost ring at s = 1 + ds, one point per boundary node.
  std::span<const Vec2> ghost_points() const { return ghosts_; }

  std::span<const Vec2> gamma() const { return gamma_; }
  const Vec2& normal(std::size_t b) const { return gamma_[b]; }
  // Cells of the interior nodes; the last interior ring absorbs the boundary
  // half-cell so these tile the domain on their own.
  const Eigen::VectorXd& interior_weights() const { return interior_weights_; }
  // Weights over all nodes, second order for smooth integrands.
  const Eigen::VectorXd& area_weights() const { return area_weights_; }
  const Eigen::VectorXd& boundary_weights() const { return boundary_weights_; }
  // Arclength of the boundary segment from node b to node b+1.
  const Eigen::VectorXd& segment_lengths() const { return segments_; }
  double h() const { return h_; }

  const RadiusFunction& radius() const { return radius_; }
  const DerivativeOperators& operators() const { return *ops_; }

  // Quadrature-weighted integral of a nodal field (area weights).
  double integrate(const Eigen::VectorXd& values) const;

  // Mesh map (s, theta) -> x and its inverse for points inside the domain.
  Vec2 map_point(double s, double theta) const;
  double mesh_radius(double s, double theta) const;
  Eigen::Vector2d mesh_coordinates_of(const Vec2& x) const;

 private:
  RadiusFunction radius_;
  int n_r_;
  int n_theta_;
  std::size_t interior_count_;
  double ds_;
  double h_;
  std::vector<Vec2> points_;
  std::vector<Vec2> ghosts_;
  std::vector<Vec2> gamma_;
  Eigen::VectorXd interior_weights_;
  Eigen::VectorXd area_weights_;
  Eigen::VectorXd boundary_weights_;
  Eigen::VectorXd segments_;
  std::unique_ptr<DerivativeOperators> ops_;
};

using DomainPtr = std::shared_ptr<const DiscreteDomain>;

DomainPtr build_disk(int n_r, int n_theta, double radius);
DomainPtr build_star(const RadiusFunction& radius, int n_r, int n_theta);

class DomainFoliation {
 public:
  DomainFoliation(RadiusFunction r0, RadiusFunction r1, int n_r, int n_theta);

  const RadiusFunction& r0() const { return r0_; }
  const RadiusFunction& r1() const { return r1_; }
  RadiusFunction radius_at(double t) const;
  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }

 private:
  RadiusFunction r0_;
  RadiusFunction r1_;
  int n_r_;
  int n_theta_;
};

DomainPtr foliation_domain(const DomainFoliation& fol, double t);

}  // namespace obdeg
