#include "liouville/pohozaev_quadrature.hpp"

#include "liouville/circulant_algebra.hpp"

namespace liouville {

namespace {

void check_ball(const ScalarField& u, cplx center, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "ball radius must be positive");
  if (std::abs(center) + r > u.domain_radius())
    throw Error(ErrorCode::BallOutsideDomain, "ball leaves the field's domain");
}

// Trapezoid sum over the circle; f receives the point and the outward normal.
double circle_integral(cplx center, double r, int n, const std::function<double(cplx, cplx)>& f) {
  long double acc = 0;
  for (int k = 0; k < n; ++k) {
    const cplx nu = std::polar(1.0, two_pi * k / n);
    acc += f(center + r * nu, nu);
  }
  return static_cast<double>(acc) * two_pi * r / n;
}

}  // namespace

PolarRule ball_rule(cplx center, double r, const PohozaevQuadSpec& spec) {
  PolarRuleSpec qs;
  qs.order = spec.order;
  qs.inner_fraction = spec.inner_fraction;
  qs.focus_width = spec.bubble_width;
  for (cplx b : spec.bubble_centers) {
    const cplx rel = b - center;
    const double rho = std::abs(rel);
    if (rho < 1e-14 || rho >= r) continue;
    qs.radial_foci.push_back(rho);
    qs.angular_foci.push_back(std::arg(rel));
    qs.focus_width = std::min(qs.focus_width, spec.bubble_width / rho);
  }
  if (qs.angular_foci.empty()) qs.uniform_angular = 128;
  return polar_rule(center, r, qs);
}

PohozaevReport pohozaev(const ScalarField& u, const Weight& K, cplx center, double r, cplx xi_dir,
                        const PohozaevQuadSpec& spec) {
  check_ball(u, center, r);
  PohozaevReport rep;
  rep.center = center;
  rep.r = r;
  rep.xi_dir = xi_dir;
  const PolarRule rule = ball_rule(center, r, spec);
  rep.lhs_volume = integrate(rule, [&](cplx y) { return dot(K.gradient(y), xi_dir) * std::exp(u.value(y)); });
  rep.lhs_flux = circle_integral(center, r, spec.boundary_nodes, [&](cplx y, cplx nu) {
    return K.value(y) * std::exp(u.value(y)) * dot(xi_dir, nu);
  });
  rep.rhs_boundary = circle_integral(center, r, spec.boundary_nodes, [&](cplx y, cplx nu) {
    const cplx g = u.gradient(y);
    return dot(g, nu) * dot(g, xi_dir) - 0.5 * std::norm(g) * dot(xi_dir, nu);
  });
  rep.residual = std::abs(rep.lhs_volume - rep.lhs_flux - rep.rhs_boundary);
  return rep;
}

PairDifference mixed_boundary_integral(const ScalarField& V, const ScalarField& w, cplx center,
                                       double r, cplx xi_dir, int n) {
  PairDifference out;
  out.t_nu_v_xi_w = circle_integral(center, r, n, [&](cplx y, cplx nu) {
    return dot(V.gradient(y), nu) * dot(w.gradient(y), xi_dir);
  });
  out.t_nu_w_xi_v = circle_integral(center, r, n, [&](cplx y, cplx nu) {
    return dot(w.gradient(y), nu) * dot(V.gradient(y), xi_dir);
  });
  out.t_cross = circle_integral(center, r, n, [&](cplx y, cplx nu) {
    return -dot(V.gradient(y), w.gradient(y)) * dot(xi_dir, nu);
  });
  out.total = out.t_nu_v_xi_w + out.t_nu_w_xi_v + out.t_cross;
  return out;
}

PairDifference pair_difference(const ScalarField& uA, const ScalarField& uB, cplx center, double r,
                               cplx xi_dir, int n) {
  check_ball(uA, center, r);
  check_ball(uB, center, r);
  struct Diff : ScalarField {
    const ScalarField& a;
    const ScalarField& b;
    Diff(const ScalarField& a_, const ScalarField& b_) : a(a_), b(b_) {}
    double value(cplx p) const override { return a.value(p) - b.value(p); }
    cplx gradient(cplx p) const override { return a.gradient(p) - b.gradient(p); }
  } w(uA, uB);
  return mixed_boundary_integral(uB, w, center, r, xi_dir, n);
}

double pair_closed_form_stated(int N, int s, const std::vector<cplx>& m, cplx xi_dir) {
  const CirculantSystem sys = build(N, false);
  cplx acc = 0.0;
  for (int l = 0; l <= N; ++l) {
    if (l == s) continue;
    acc += sys.dk(std::abs(l - s)) *
           (std::conj(m[static_cast<std::size_t>(s)]) * sys.e(l) -
            std::conj(m[static_cast<std::size_t>(l)]) * sys.e(2L * l + s));
  }
  return 8.0 * pi * dot(acc, xi_dir);
}

double pair_closed_form_corrected(int N, int s, const std::vector<cplx>& m, cplx xi_dir) {
  const CirculantSystem sys = build(N, false);
  cplx acc = 0.0;
  for (int l = 0; l <= N; ++l) {
    if (l == s) continue;
    acc += sys.dk(std::abs(l - s)) *
           (std::conj(m[static_cast<std::size_t>(s)]) * sys.e(l) -
            std::conj(m[static_cast<std::size_t>(l)]) * sys.e(s));
  }
  return 8.0 * pi * dot(acc, xi_dir);
}

double local_mass(const ScalarField& u, const Weight& K, cplx center, double r,
                  const std::function<double(cplx)>& f, const PohozaevQuadSpec& spec) {
  check_ball(u, center, r);
  const PolarRule rule = ball_rule(center, r, spec);
  return integrate(rule, [&](cplx y) { return f(y) * K.value(y) * std::exp(u.value(y)); });
}

}  // namespace liouville
