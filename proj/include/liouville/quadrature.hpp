#pragma once

#include <functional>
#include <vector>

#include "liouville/types.hpp"

namespace liouville {

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1]; supported orders 8, 16, 20, 30.
const QuadRule& gauss_legendre(int order);

// Composite Gauss-Legendre rule on the panels [b_k, b_{k+1}].
QuadRule composite_rule(const std::vector<double>& breaks, int order);

// Panel breaks on [a, b] refined geometrically toward each focus point until
// the panel touching the focus is narrower than min_width.
std::vector<double> graded_breaks(double a, double b, const std::vector<double>& foci,
                                  double min_width, double ratio = 2.0);

// Graded breaks on the periodic interval [start, start + 2 pi).
std::vector<double> graded_periodic_breaks(double start, const std::vector<double>& foci,
                                           double min_width, double ratio = 2.0);

// Polar tensor rule on the disk of radius r around center: radial panels graded
// toward the center (down to r * inner_fraction) and toward each radial focus,
// angular panels graded toward each angular focus.
struct PolarRuleSpec {
  int order = 20;
  double inner_fraction = 1e-9;
  double radial_ratio = 2.0;
  std::vector<double> radial_foci;
  std::vector<double> angular_foci;
  double focus_width = 1e-6;
  int uniform_angular = 0;  // > 0: trapezoid with this many nodes instead of panels
};

struct PolarRule {
  std::vector<cplx> points;
  std::vector<double> weights;
};

PolarRule polar_rule(cplx center, double radius, const PolarRuleSpec& spec);

double integrate(const PolarRule& rule, const std::function<double(cplx)>& f);

}  // namespace liouville
