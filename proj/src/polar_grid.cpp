#include "liouville/polar_grid.hpp"

#include <algorithm>
#include <functional>

#include "liouville/quadrature.hpp"

namespace liouville {

namespace {

// Monotone map x(t) on [a, b] equidistributing a positive density.
class DensityMap {
 public:
  DensityMap(double a, double b, std::function<double(double)> rho, std::vector<double> breaks)
      : a_(a), rho_(std::move(rho)), breaks_(std::move(breaks)) {
    (void)b;
    const QuadRule& g = gauss_legendre(16);
    cum_.push_back(0.0);
    for (std::size_t k = 0; k + 1 < breaks_.size(); ++k)
      cum_.push_back(cum_.back() + partial(breaks_[k], breaks_[k + 1], g));
  }

  double total() const { return cum_.back(); }

  // x with integral_a^x rho = T.
  double inverse(double T) const {
    if (T <= 0.0) return a_;
    if (T >= total()) return breaks_.back();
    const std::size_t k =
        static_cast<std::size_t>(std::upper_bound(cum_.begin(), cum_.end(), T) - cum_.begin()) - 1;
    const double lo = breaks_[k], hi = breaks_[k + 1];
    const double target = T - cum_[k];
    const QuadRule& g = gauss_legendre(16);
    double x = lo + (hi - lo) * target / (cum_[k + 1] - cum_[k]);
    double xl = lo, xh = hi;
    for (int it = 0; it < 100; ++it) {
      const double f = partial(lo, x, g) - target;
      if (f > 0) xh = x;
      else xl = x;
      double nx = x - f / rho_(x);
      if (!(nx > xl && nx < xh)) nx = 0.5 * (xl + xh);
      if (std::abs(nx - x) <= 1e-15 * (std::abs(x) + (hi - lo))) {
        x = nx;
        break;
      }
      x = nx;
    }
    return x;
  }

 private:
  double partial(double lo, double hi, const QuadRule& g) const {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0.0;
    for (std::size_t q = 0; q < g.nodes.size(); ++q) s += g.weights[q] * rho_(mid + half * g.nodes[q]);
    return s * half;
  }

  double a_;
  std::function<double(double)> rho_;
  std::vector<double> breaks_;
  std::vector<double> cum_;
};

void lagrange4(const double* x, double t, double* w, double* dw) {
  for (int a = 0; a < 4; ++a) {
    double num = 1.0, den = 1.0, dsum = 0.0;
    for (int b = 0; b < 4; ++b) {
      if (b == a) continue;
      num *= t - x[b];
      den *= x[a] - x[b];
    }
    // derivative of prod_{b != a}(t - x_b)
    for (int c = 0; c < 4; ++c) {
      if (c == a) continue;
      double p = 1.0;
      for (int b = 0; b < 4; ++b)
        if (b != a && b != c) p *= t - x[b];
      dsum += p;
    }
    w[a] = num / den;
    dw[a] = dsum / den;
  }
}

}  // namespace

PolarGrid::PolarGrid(const GridSpec& spec)
    : spec_(spec), n_r_(spec.n_r), n_theta_(spec.n_theta), tau_(spec.tau) {
  if (n_r_ < 4 || n_theta_ < 8) throw Error(ErrorCode::InvalidArgument, "grid too small");
  if (!(tau_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");

  // Radial map.
  std::vector<double> rfoci;
  double rmin = tau_;
  for (const Clustering& c : spec.radial) {
    rfoci.push_back(std::clamp(c.center, 0.0, tau_));
    rmin = std::min(rmin, c.width);
  }
  auto rho_r = [&spec](double r) {
    double s = 1.0;
    for (const Clustering& c : spec.radial) s += c.alpha / std::sqrt(c.width * c.width + (r - c.center) * (r - c.center));
    return s;
  };
  const DensityMap rmap(0.0, tau_, rho_r, graded_breaks(0.0, tau_, rfoci, 0.25 * rmin));
  const double nr = n_r_ + 0.5;
  r_.resize(static_cast<std::size_t>(n_r_ + 1));
  rf_.resize(static_cast<std::size_t>(n_r_ + 1));
  for (int i = 0; i <= n_r_; ++i) {
    r_[static_cast<std::size_t>(i)] = i == n_r_ ? tau_ : rmap.inverse(rmap.total() * (i + 0.5) / nr);
    rf_[static_cast<std::size_t>(i)] = i == 0 ? 0.0 : rmap.inverse(rmap.total() * i / nr);
  }

  // Angular map on [0, 2 pi).
  std::vector<double> tfoci;
  double tmin = 1.0;
  for (const Clustering& c : spec.angular) {
    tfoci.push_back(c.center);
    tmin = std::min(tmin, c.width);
  }
  auto rho_t = [&spec](double t) {
    double s = 1.0;
    for (const Clustering& c : spec.angular) {
      const double chord = 2.0 * std::sin(0.5 * (t - c.center));
      s += c.alpha / std::sqrt(c.width * c.width + chord * chord);
    }
    return s;
  };
  const DensityMap tmap(0.0, two_pi, rho_t, graded_periodic_breaks(0.0, tfoci, 0.25 * tmin));
  th_.resize(static_cast<std::size_t>(n_theta_));
  thf_.resize(static_cast<std::size_t>(n_theta_));
  for (int j = 0; j < n_theta_; ++j) {
    th_[static_cast<std::size_t>(j)] = tmap.inverse(tmap.total() * j / n_theta_);
    thf_[static_cast<std::size_t>(j)] = tmap.inverse(tmap.total() * (j + 0.5) / n_theta_);
  }
}

double PolarGrid::dtheta_cell(int j) const {
  const double hi = thf_[static_cast<std::size_t>(j)];
  const double lo = j == 0 ? thf_.back() - two_pi : thf_[static_cast<std::size_t>(j - 1)];
  return hi - lo;
}

double PolarGrid::dtheta_gap(int j) const {
  const double a = th_[static_cast<std::size_t>(j)];
  const double b = j + 1 == n_theta_ ? th_[0] + two_pi : th_[static_cast<std::size_t>(j + 1)];
  return b - a;
}

double PolarGrid::area(int i, int j) const {
  const double ro = rf_[static_cast<std::size_t>(i + 1)], ri = rf_[static_cast<std::size_t>(i)];
  return 0.5 * (ro * ro - ri * ri) * dtheta_cell(j);
}

int PolarGrid::radial_cell(double r) const {
  // Largest i with r_[i] <= r, clamped to [0, n_r - 1].
  const auto it = std::upper_bound(r_.begin(), r_.end(), r);
  int i = static_cast<int>(it - r_.begin()) - 1;
  return std::clamp(i, 0, n_r_ - 1);
}

int PolarGrid::angular_cell(double t) const {
  t = std::fmod(t, two_pi);
  if (t < 0) t += two_pi;
  const auto it = std::upper_bound(th_.begin(), th_.end(), t);
  int j = static_cast<int>(it - th_.begin()) - 1;
  return j < 0 ? n_theta_ - 1 : j;
}

double PolarGrid::spacing(int i, int j) const {
  const double dr = rf_[static_cast<std::size_t>(std::min(i + 1, n_r_))] - rf_[static_cast<std::size_t>(i)];
  return std::max(dr, r_[static_cast<std::size_t>(i)] * dtheta_cell(j));
}

GridField::GridField(const PolarGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>((grid_.n_r() + 1) * grid_.n_theta()))
    throw Error(ErrorCode::InvalidArgument, "grid field size mismatch");
}

void GridField::eval(cplx p, double* v, cplx* g) const {
  double r = std::abs(p);
  double t = std::arg(p);
  if (r > grid_.tau() * (1.0 + 1e-12)) throw Error(ErrorCode::BallOutsideDomain, "point outside the grid");
  if (r < 1e-300) {
    r = 1e-300;
    t = 0.0;
  }
  if (t < 0) t += two_pi;
  const int nt = grid_.n_theta();
  const auto& R = grid_.r();
  const auto& T = grid_.th();

  int i0 = grid_.radial_cell(r) - 1;
  i0 = std::clamp(i0, 0, grid_.n_r() - 3);
  double xr[4], wr[4], dwr[4];
  for (int a = 0; a < 4; ++a) xr[a] = R[static_cast<std::size_t>(i0 + a)];
  lagrange4(xr, r, wr, dwr);

  const int jc = grid_.angular_cell(t);
  double xt[4], wt[4], dwt[4];
  int js[4];
  for (int b = 0; b < 4; ++b) {
    const int jj = jc - 1 + b;
    js[b] = grid_.wrap(jj);
    double ang = T[static_cast<std::size_t>(js[b])];
    if (jj < 0) ang -= two_pi;
    if (jj >= nt) ang += two_pi;
    xt[b] = ang;
  }
  // t lies in [T[jc], T[jc+1]) modulo 2 pi; shift t into the stencil's window.
  if (t < xt[1]) t += two_pi;
  if (t > xt[2] + 1e-12 && t - two_pi >= xt[0]) t -= two_pi;
  lagrange4(xt, t, wt, dwt);

  double val = 0.0, dr = 0.0, dt = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const double u = at(i0 + a, js[b]);
      val += wr[a] * wt[b] * u;
      dr += dwr[a] * wt[b] * u;
      dt += wr[a] * dwt[b] * u;
    }
  if (v) *v = val;
  if (g) {
    const cplx er = std::polar(1.0, t);
    *g = er * cplx(dr, dt / r);
  }
}

double GridField::value(cplx p) const {
  double v;
  eval(p, &v, nullptr);
  return v;
}

cplx GridField::gradient(cplx p) const {
  // Inside the innermost ring the polar form dt/r is ill-conditioned;
  // difference the interpolant across the origin instead.
  const double h = 0.5 * grid_.r().front();
  if (std::abs(p) < h) {
    return {(value(p + h) - value(p - h)) / (2 * h), (value(p + cplx(0, h)) - value(p - cplx(0, h))) / (2 * h)};
  }
  cplx g;
  eval(p, nullptr, &g);
  return g;
}

}  // namespace liouville
