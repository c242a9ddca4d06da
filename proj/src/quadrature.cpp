#include "liouville/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>

namespace liouville {

namespace {

template <unsigned Order>
QuadRule make_rule() {
  using G = boost::math::quadrature::gauss<double, Order>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  QuadRule rule;
  // Boost stores the non-negative half; mirror it.
  for (std::size_t k = x.size(); k-- > 0;) {
    if (x[k] == 0.0) continue;
    rule.nodes.push_back(-x[k]);
    rule.weights.push_back(w[k]);
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    rule.nodes.push_back(x[k]);
    rule.weights.push_back(w[k]);
  }
  return rule;
}

void add_focus_breaks(std::vector<double>& out, double a, double b, double f, double w,
                      double ratio) {
  if (f < a || f > b) return;
  out.push_back(f);
  for (double h = w; f - h > a; h *= ratio) out.push_back(f - h);
  for (double h = w; f + h < b; h *= ratio) out.push_back(f + h);
}

std::vector<double> tidy(std::vector<double> v, double a, double b, double min_gap) {
  v.push_back(a);
  v.push_back(b);
  const int uniform = 8;
  for (int k = 1; k < uniform; ++k) v.push_back(a + (b - a) * k / uniform);
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (x < a || x > b) continue;
    if (!out.empty() && x - out.back() < min_gap) continue;
    out.push_back(x);
  }
  if (out.back() != b) {
    if (b - out.back() < min_gap && out.size() > 1) out.back() = b;
    else out.push_back(b);
  }
  return out;
}

}  // namespace

const QuadRule& gauss_legendre(int order) {
  static const QuadRule r8 = make_rule<8>();
  static const QuadRule r16 = make_rule<16>();
  static const QuadRule r20 = make_rule<20>();
  static const QuadRule r30 = make_rule<30>();
  switch (order) {
    case 8: return r8;
    case 16: return r16;
    case 20: return r20;
    case 30: return r30;
    default: throw Error(ErrorCode::InvalidArgument, "unsupported Gauss-Legendre order");
  }
}

QuadRule composite_rule(const std::vector<double>& breaks, int order) {
  const QuadRule& base = gauss_legendre(order);
  QuadRule out;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double mid = 0.5 * (breaks[k] + breaks[k + 1]);
    const double half = 0.5 * (breaks[k + 1] - breaks[k]);
    for (std::size_t q = 0; q < base.nodes.size(); ++q) {
      out.nodes.push_back(mid + half * base.nodes[q]);
      out.weights.push_back(half * base.weights[q]);
    }
  }
  return out;
}

std::vector<double> graded_breaks(double a, double b, const std::vector<double>& foci,
                                  double min_width, double ratio) {
  std::vector<double> v;
  for (double f : foci) add_focus_breaks(v, a, b, f, min_width, ratio);
  return tidy(std::move(v), a, b, 0.25 * min_width);
}

std::vector<double> graded_periodic_breaks(double start, const std::vector<double>& foci,
                                           double min_width, double ratio) {
  const double end = start + two_pi;
  auto wrap = [&](double x) {
    double g = std::fmod(x - start, two_pi);
    if (g < 0) g += two_pi;
    return start + g;
  };
  std::vector<double> v;
  for (double f : foci) {
    const double g = wrap(f);
    v.push_back(g);
    for (double h = min_width; h < pi; h *= ratio) {
      v.push_back(wrap(g - h));
      v.push_back(wrap(g + h));
    }
  }
  return tidy(std::move(v), start, end, 0.25 * min_width);
}

PolarRule polar_rule(cplx center, double radius, const PolarRuleSpec& spec) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "polar_rule radius must be positive");
  std::vector<double> rb;
  add_focus_breaks(rb, 0.0, radius, 0.0, radius * spec.inner_fraction, spec.radial_ratio);
  for (double f : spec.radial_foci)
    add_focus_breaks(rb, 0.0, radius, f, spec.focus_width, spec.radial_ratio);
  rb = tidy(std::move(rb), 0.0, radius, 0.25 * radius * spec.inner_fraction);
  const QuadRule radial = composite_rule(rb, spec.order);

  QuadRule angular;
  if (spec.uniform_angular > 0) {
    const int m = spec.uniform_angular;
    for (int k = 0; k < m; ++k) {
      angular.nodes.push_back(two_pi * k / m);
      angular.weights.push_back(two_pi / m);
    }
  } else {
    angular = composite_rule(
        graded_periodic_breaks(0.0, spec.angular_foci, spec.focus_width, spec.radial_ratio),
        spec.order);
  }

  PolarRule rule;
  rule.points.reserve(radial.nodes.size() * angular.nodes.size());
  rule.weights.reserve(radial.nodes.size() * angular.nodes.size());
  for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
    const double rho = radial.nodes[i];
    for (std::size_t j = 0; j < angular.nodes.size(); ++j) {
      rule.points.push_back(center + std::polar(rho, angular.nodes[j]));
      rule.weights.push_back(rho * radial.weights[i] * angular.weights[j]);
    }
  }
  return rule;
}

double integrate(const PolarRule& rule, const std::function<double(cplx)>& f) {
  // Pairwise summation keeps the reduction order fixed and the error small.
  std::vector<double> terms(rule.points.size());
  for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = rule.weights[k] * f(rule.points[k]);
  std::size_t n = terms.size();
  while (n > 1) {
    const std::size_t half = (n + 1) / 2;
    for (std::size_t k = 0; k < n / 2; ++k) terms[k] = terms[2 * k] + terms[2 * k + 1];
    if (n % 2) terms[n / 2] = terms[n - 1];
    n = half;
  }
  return terms.empty() ? 0.0 : terms[0];
}

}  // namespace liouville
