#include "liouville/disk_green.hpp"

#include <algorithm>

#include <unsupported/Eigen/FFT>

#include "liouville/quadrature.hpp"

namespace liouville {

double green(const DiskGreen& g, cplx y, cplx eta) {
  const double r = std::abs(y - eta);
  if (r == 0.0) throw Error(ErrorCode::CoincidentPoints, "green(y, y) is singular");
  return -std::log(r) / two_pi + green_regular(g, y, eta);
}

double green_regular(const DiskGreen& g, cplx y, cplx eta) {
  const double R = g.radius;
  const double e2 = std::norm(eta);
  if (e2 == 0.0) return std::log(R) / two_pi;
  // |eta|/R * |R^2 eta/|eta|^2 - y| = |R eta/|eta| - |eta| y / R|
  const double ea = std::sqrt(e2);
  return std::log(std::abs(R * eta / ea - ea * y / R)) / two_pi;
}

cplx grad1_regular(const DiskGreen& g, cplx y, cplx eta) {
  const double e2 = std::norm(eta);
  if (e2 == 0.0) return 0.0;
  const cplx star = g.radius * g.radius * eta / e2;
  const cplx diff = y - star;
  return diff / (two_pi * std::norm(diff));
}

HarmonicLift::HarmonicLift(const std::vector<double>& samples, double radius, cplx center,
                           double theta0)
    : radius_(radius), center_(center), samples_(samples.size()) {
  if (samples.size() < 16) throw Error(ErrorCode::TooFewSamples, "harmonic lift needs >= 16 samples");
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "harmonic lift radius");
  const std::size_t M = samples.size();
  Eigen::FFT<double> fft;
  std::vector<cplx> spec;
  fft.fwd(spec, samples);
  // Sample k sits at angle theta0 + 2 pi k/M; rotate so coefficients refer to angle 0.
  const std::size_t K = M / 2;
  coeff_.assign(K + 1, 0.0);
  for (std::size_t m = 0; m <= K; ++m) {
    double w = (m == 0 || (M % 2 == 0 && m == K)) ? 1.0 : 2.0;
    coeff_[m] = w * spec[m] / static_cast<double>(M) * std::polar(1.0, -static_cast<double>(m) * theta0);
  }
}

double HarmonicLift::value(cplx p) const {
  const cplx z = (p - center_) / radius_;
  cplx F = 0.0;
  for (std::size_t m = coeff_.size(); m-- > 0;) F = F * z + coeff_[m];
  return F.real();
}

cplx HarmonicLift::gradient(cplx p) const {
  const cplx z = (p - center_) / radius_;
  cplx Fp = 0.0;
  for (std::size_t m = coeff_.size(); m-- > 1;) Fp = Fp * z + static_cast<double>(m) * coeff_[m];
  return std::conj(Fp / radius_);
}

HarmonicLift harmonic_lift(const std::vector<double>& samples, double radius, cplx center,
                           double theta0) {
  return HarmonicLift(samples, radius, center, theta0);
}

double representation_check(const DiskGreen& g, const std::function<double(cplx)>& u,
                            const std::function<double(cplx)>& f, double u_boundary,
                            const RepresentationSpec& spec) {
  const double R = g.radius;
  std::vector<cplx> probes = spec.probes;
  if (probes.empty()) {
    probes.push_back(0.0);
    for (double fr : {0.2, 0.4, 0.6, 0.8})
      for (int k = 0; k < 8; ++k) probes.push_back(std::polar(fr * R, two_pi * (k + 0.5) / 8));
  }
  std::vector<cplx> kept;
  for (cplx y : probes) {
    bool ok = true;
    for (cplx c : spec.avoid_centers)
      if (std::abs(y - c) < spec.avoid_radius) ok = false;
    if (ok) kept.push_back(y);
  }

  const int panels = std::max(1, spec.n_r / 8);
  std::vector<double> breaks;
  for (int k = 0; k <= panels; ++k) breaks.push_back(R * k / panels);
  const QuadRule radial = composite_rule(breaks, 8);
  std::vector<cplx> pts;
  std::vector<double> wts, fv;
  for (std::size_t i = 0; i < radial.nodes.size(); ++i)
    for (int j = 0; j < spec.n_theta; ++j) {
      const cplx eta = std::polar(radial.nodes[i], two_pi * (j + 0.5) / spec.n_theta);
      pts.push_back(eta);
      wts.push_back(radial.nodes[i] * radial.weights[i] * two_pi / spec.n_theta);
      fv.push_back(f(eta));
    }

  double worst = 0.0;
  for (cplx y : kept) {
    // Subtract f(y) so the log singularity multiplies a vanishing factor;
    // the disk integral of G(y, .) is (R^2 - |y|^2)/4.
    const double fy = f(y);
    long double acc = 0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const double dist = std::abs(y - pts[k]);
      if (dist == 0.0) continue;
      acc += wts[k] * green(g, y, pts[k]) * (fv[k] - fy);
    }
    const double integral = static_cast<double>(acc) + fy * (R * R - std::norm(y)) / 4.0;
    worst = std::max(worst, std::abs(u(y) - integral - u_boundary));
  }
  return worst;
}

}  // namespace liouville
