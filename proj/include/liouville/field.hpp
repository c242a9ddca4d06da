#pragma once

#include "liouville/types.hpp"

namespace liouville {

// A scalar field on a planar region with a gradient (d/dx + i d/dy).
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual double value(cplx p) const = 0;
  virtual cplx gradient(cplx p) const = 0;
  // Largest radius r such that the disk |p| < r is inside the field's domain.
  virtual double domain_radius() const { return INFINITY; }
};

}  // namespace liouville
