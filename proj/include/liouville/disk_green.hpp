#pragma once

#include <functional>
#include <vector>

#include "liouville/field.hpp"
#include "liouville/types.hpp"

namespace liouville {

// Dirichlet Green's function of -Delta on the centered disk |y| < radius:
// G(y, eta) = -(1/2pi) log|y - eta| + H(y, eta).
struct DiskGreen {
  double radius = 1.0;
  explicit DiskGreen(double R) : radius(R) {
    if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "disk radius must be positive");
  }
};

double green(const DiskGreen& g, cplx y, cplx eta);
// H(y, eta) = (1/2pi) log( |eta|/R * |R^2 eta/|eta|^2 - y| ), the image-point form.
double green_regular(const DiskGreen& g, cplx y, cplx eta);
// Gradient of H in its first argument: (1/2pi)(y - eta*)/|y - eta*|^2 with eta* = R^2 eta/|eta|^2.
cplx grad1_regular(const DiskGreen& g, cplx y, cplx eta);

// Harmonic extension of equispaced samples on the circle |x - center| = radius.
// The samples are expanded in their trigonometric interpolant, whose Poisson
// integral is the Fourier series sum_m c_m (r/R)^{|m|} e^{i m theta}.
class HarmonicLift : public ScalarField {
 public:
  HarmonicLift() = default;
  HarmonicLift(const std::vector<double>& samples, double radius, cplx center = 0.0,
               double theta0 = 0.0);

  double value(cplx p) const override;
  cplx gradient(cplx p) const override;
  double domain_radius() const override { return radius_; }

  double center_value() const { return coeff_.empty() ? 0.0 : coeff_[0].real(); }
  double radius() const { return radius_; }
  cplx center() const { return center_; }
  std::size_t sample_count() const { return samples_; }
  // Subtract a constant from the lift.
  void shift(double c) {
    if (!coeff_.empty()) coeff_[0] -= c;
  }

 private:
  // F(zeta) = sum_m w_m c_m zeta^m, u = Re F.
  std::vector<cplx> coeff_;
  double radius_ = 1.0;
  cplx center_ = 0.0;
  std::size_t samples_ = 0;
};

HarmonicLift harmonic_lift(const std::vector<double>& samples, double radius, cplx center = 0.0,
                           double theta0 = 0.0);

struct RepresentationSpec {
  int n_r = 256;   // radial Gauss-Legendre nodes (8-point panels)
  int n_theta = 256;
  std::vector<cplx> probes;          // empty: default lattice
  std::vector<cplx> avoid_centers;   // bubble centers to keep away from
  double avoid_radius = 0.0;
};

// max over probes of |u(y) - int G(y, eta) f(eta) d eta - u_boundary|.
double representation_check(const DiskGreen& g, const std::function<double(cplx)>& u,
                            const std::function<double(cplx)>& f, double u_boundary,
                            const RepresentationSpec& spec = {});

}  // namespace liouville
