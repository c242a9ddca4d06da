#include "liouville/global_family.hpp"

#include <algorithm>

#include <Eigen/LU>

#include "liouville/quadrature.hpp"

namespace liouville {

namespace {

double c0(int N) { return 8.0 * (N + 1) * (N + 1); }

cplx cpow_int(cplx z, int n) {
  cplx r = 1.0;
  for (int k = 0; k < n; ++k) r *= z;
  return r;
}

}  // namespace

void GlobalSolutionParams::validate() const {
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "N must be non-negative");
  if (!(h0 > 0.0) || !std::isfinite(h0)) throw Error(ErrorCode::InvalidArgument, "h0 must be positive");
  if (!std::isfinite(lambda)) throw Error(ErrorCode::InvalidArgument, "lambda must be finite");
  if (!std::isfinite(xi.real()) || !std::isfinite(xi.imag()))
    throw Error(ErrorCode::InvalidArgument, "xi must be finite");
}

double GlobalSolutionParams::log_a() const { return lambda + std::log(h0) - std::log(c0(N)); }

double eval_global(const GlobalSolutionParams& p, cplx y) {
  const double w2 = std::norm(cpow_int(y, p.N + 1) - p.xi);
  if (w2 == 0.0) return p.lambda;
  return p.lambda - 2.0 * softplus(p.log_a() + std::log(w2));
}

cplx grad_global(const GlobalSolutionParams& p, cplx y) {
  const cplx yN = cpow_int(y, p.N);
  const cplx w = yN * y - p.xi;
  const double denom = std::exp(-p.log_a()) + std::norm(w);
  return -4.0 * (p.N + 1) * w * std::conj(yN) / denom;
}

double residual_global(const GlobalSolutionParams& p, cplx y, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "fd_step must be positive");
  const double u0 = eval_global(p, y);
  const double lap = (eval_global(p, y + h) + eval_global(p, y - h) +
                      eval_global(p, y + cplx(0, h)) + eval_global(p, y - cplx(0, h)) - 4.0 * u0) /
                     (h * h);
  return lap + std::pow(std::norm(y), p.N) * p.h0 * std::exp(u0);
}

MassResult total_mass(const GlobalSolutionParams& p, const MassSpec& spec) {
  p.validate();
  const int n1 = p.N + 1;
  const double a = std::exp(p.log_a());
  const double exact = 8.0 * pi * n1;
  const double xi_abs = std::abs(p.xi);
  auto tail = [&](double R) {
    // Outside |y| = R we have |y^{N+1} - xi| >= rho; in z = y^{N+1} the mass
    // outside |z - xi| = rho is exactly 8 pi (N+1) / (1 + a rho^2).
    const double rho = std::pow(R, n1) - xi_abs;
    if (rho <= 0.0) return exact;
    return exact / (1.0 + a * rho * rho);
  };

  MassResult out;
  out.exact = exact;
  double R = spec.radius;
  if (R <= 0.0) {
    const double target = 1e-3 * spec.rel_tol;
    const double rho = std::sqrt((1.0 / target) / a);
    R = std::pow(rho + xi_abs, 1.0 / n1) * 1.01;
  }
  out.radius = R;
  out.tail_bound = tail(R);
  if (out.tail_bound > spec.rel_tol * exact)
    throw Error(ErrorCode::TailTooLarge, "tail bound " + std::to_string(out.tail_bound) +
                                             " exceeds requested tolerance at radius " +
                                             std::to_string(R));

  // Bumps sit on |y| = |xi|^{1/(N+1)} with width ~ 1/(sqrt(a) (N+1) |y|^N).
  PolarRuleSpec qs;
  qs.order = spec.order;
  qs.inner_fraction = 1e-9;
  const double peak_r = std::pow(xi_abs, 1.0 / n1);
  const double width = 1.0 / std::sqrt(a);
  if (peak_r > 0.0) {
    const double w = width / (n1 * std::pow(peak_r, p.N));
    qs.radial_foci.push_back(peak_r);
    qs.focus_width = std::min(0.25 * peak_r, 0.1 * w);
    const double arg0 = std::arg(p.xi) / n1;
    for (int l = 0; l < n1; ++l) qs.angular_foci.push_back(arg0 + two_pi * l / n1);
    qs.focus_width = std::min(qs.focus_width, 0.1 * w / peak_r);
  } else {
    qs.uniform_angular = std::max(8 * n1, 64);
  }
  const PolarRule rule = polar_rule(0.0, R, qs);
  out.value = integrate(rule, [&](cplx y) {
    return std::pow(std::norm(y), p.N) * p.h0 * std::exp(eval_global(p, y));
  });

  // Crude quadrature error estimate from a coarser rule.
  PolarRuleSpec coarse = qs;
  coarse.order = 16;
  const double v2 = integrate(polar_rule(0.0, R, coarse), [&](cplx y) {
    return std::pow(std::norm(y), p.N) * p.h0 * std::exp(eval_global(p, y));
  });
  out.error_estimate = std::abs(out.value - v2) + out.tail_bound;
  return out;
}

std::vector<cplx> local_maxima(const GlobalSolutionParams& p) {
  p.validate();
  const int n1 = p.N + 1;
  if (p.N == 0) {
    // Single radial bubble centered at xi.
    return {p.xi};
  }
  if (std::exp(0.5 * p.lambda) < 10.0 * n1)
    throw Error(ErrorCode::MaximaNotSeparated, "e^{lambda/2} < 10 (N+1)");
  if (std::abs(p.xi) == 0.0)
    throw Error(ErrorCode::MaximaNotSeparated, "xi = 0 merges all bumps at the origin");

  const double r0 = std::pow(std::abs(p.xi), 1.0 / n1);
  const double arg0 = std::arg(p.xi) / n1;
  std::vector<cplx> out;
  for (int l = 0; l < n1; ++l) {
    cplx y = std::polar(r0, arg0 + two_pi * l / n1);
    double gnorm = std::abs(grad_global(p, y));
    for (int it = 0; it < 50 && gnorm > 1e-13; ++it) {
      // Jacobian of the gradient map by central differences.
      const double h = 1e-6 * r0;
      const cplx gx = (grad_global(p, y + h) - grad_global(p, y - h)) / (2 * h);
      const cplx gy = (grad_global(p, y + cplx(0, h)) - grad_global(p, y - cplx(0, h))) / (2 * h);
      Eigen::Matrix2d J;
      J << gx.real(), gy.real(), gx.imag(), gy.imag();
      const cplx g = grad_global(p, y);
      const Eigen::Vector2d step = J.partialPivLu().solve(Eigen::Vector2d(g.real(), g.imag()));
      cplx d(-step[0], -step[1]);
      double t = 1.0;
      cplx trial = y + d;
      while (std::abs(grad_global(p, trial)) > gnorm && t > 1e-6) {
        t *= 0.5;
        trial = y + t * d;
      }
      y = trial;
      gnorm = std::abs(grad_global(p, y));
    }
    out.push_back(y);
  }
  // Separation and strict-maximum checks.
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (std::abs(out[i] - out[j]) < 1e-8 * r0)
        throw Error(ErrorCode::MaximaNotSeparated, "Newton seeds converged to the same point");
    const double h = 1e-3 * r0 * std::exp(-0.5 * p.lambda);
    const cplx y = out[i];
    const double u = eval_global(p, y);
    const double uxx = (eval_global(p, y + h) - 2 * u + eval_global(p, y - h)) / (h * h);
    const double uyy =
        (eval_global(p, y + cplx(0, h)) - 2 * u + eval_global(p, y - cplx(0, h))) / (h * h);
    const double uxy = (eval_global(p, y + cplx(h, h)) - eval_global(p, y + cplx(h, -h)) -
                        eval_global(p, y + cplx(-h, h)) + eval_global(p, y + cplx(-h, -h))) /
                       (4 * h * h);
    if (!(uxx < 0 && uxx * uyy - uxy * uxy > 0))
      throw Error(ErrorCode::MaximaNotSeparated, "critical point is not a strict maximum");
  }
  return out;
}

KernelDerivatives kernel_derivatives(const GlobalSolutionParams& p, cplx z) {
  const double Lam = std::exp(p.lambda);
  const double c = c0(p.N);
  const cplx w = cpow_int(z, p.N + 1) - p.xi;
  const double t = Lam * p.h0 * std::norm(w) / c;
  KernelDerivatives k;
  k.d_Lambda = -1.0 / Lam + 2.0 / (Lam * (1.0 + t));
  k.d_xi = 2.0 * Lam * p.h0 * std::conj(w) / (c * (1.0 + t));
  k.d_xibar = std::conj(k.d_xi);
  k.d_xi1 = 2.0 * k.d_xi.real();
  k.d_xi2 = -2.0 * k.d_xi.imag();
  return k;
}

std::array<double, 3> default_probe_angles(int N) {
  const double n1 = N + 1;
  return {0.0, pi / (4.0 * n1), pi / (2.0 * n1)};
}

KernelMatrix build_kernel_matrix(const GlobalSolutionParams& p, double s, double eps,
                                 const std::array<double, 3>& thetas) {
  p.validate();
  if (!(s > 1.0) || !(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "need s > 1, eps > 0");
  const int n1 = p.N + 1;
  const double sine = std::sin(n1 * (thetas[1] - thetas[0]));
  if (std::abs(sine) < 1e-12)
    throw Error(ErrorCode::DegenerateProbes, "sin((N+1)(theta2-theta1)) vanishes");
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (thetas[i] == thetas[j]) throw Error(ErrorCode::DegenerateProbes, "repeated probe angle");

  KernelMatrix K;
  K.thetas = thetas;
  K.scale_s = s;
  K.eps = eps;
  const double Lam = std::exp(p.lambda);
  Eigen::Matrix3cd M1, M2;
  for (int l = 0; l < 3; ++l) K.probes[l] = std::polar(std::pow(s, 1.0 + eps * (l + 1)), thetas[l]);
  const double p3n = std::pow(std::abs(K.probes[2]), n1);
  for (int l = 0; l < 3; ++l) {
    const KernelDerivatives kd = kernel_derivatives(p, K.probes[l]);
    K.entries(l, 0) = kd.d_Lambda;
    K.entries(l, 1) = kd.d_xi1;
    K.entries(l, 2) = kd.d_xi2;
    M1(0, l) = kd.d_Lambda;
    M1(1, l) = kd.d_xi;
    M1(2, l) = kd.d_xibar;
    M2(0, l) = -Lam * kd.d_Lambda;
    M2(1, l) = 0.5 * p3n * kd.d_xi;
    M2(2, l) = 0.5 * p3n * kd.d_xibar;
  }
  K.det = K.entries.determinant();
  K.det_m1 = M1.determinant();
  K.det_m2 = M2.determinant();
  K.det_m2_leading = cplx(0.0, 2.0 * sine) * std::pow(s, 3.0 * n1 * eps);
  K.det_m2_ratio = K.det_m2 / K.det_m2_leading;
  const double ph1 = n1 * thetas[0], ph2 = n1 * thetas[1], ph3 = n1 * thetas[2];
  const double a1 = std::pow(s, 2.0 * n1 * eps), a2 = std::pow(s, n1 * eps);
  K.det_m2_ratio_analytic = 1.0 - std::sin(ph3 - ph1) / (a2 * std::sin(ph2 - ph1)) +
                            std::sin(ph3 - ph2) / (a1 * std::sin(ph2 - ph1));
  return K;
}

}  // namespace liouville
