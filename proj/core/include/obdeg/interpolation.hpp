#pragma once

#include "obdeg/calculus.hpp"

namespace obdeg {

// Bicubic Lagrange interpolation of a nodal field in mesh coordinates
// (s, theta). Stencils that reach below the first ring continue through the
// origin onto the opposite ray; near the boundary they shift inward.
class FieldInterpolator {
 public:
  explicit FieldInterpolator(ScalarField field);

  double operator()(const Vec2& x) const;
  double at_mesh(double s, double theta) const;
  const ScalarField& field() const { return field_; }

 private:
  ScalarField field_;
};

}  // namespace obdeg
