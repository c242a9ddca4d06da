#pragma once

#include <vector>

#include "liouville/field.hpp"
#include "liouville/types.hpp"

namespace liouville {

// Node density  1 + sum_k alpha_k / sqrt(w_k^2 + dist^2)  toward a set of foci;
// nodes are equidistributed in the cumulative density.
struct Clustering {
  double center = 0.0;
  double width = 1.0;
  double alpha = 0.0;
};

struct GridSpec {
  int n_r = 64;
  int n_theta = 64;
  double tau = 1.0;
  std::vector<Clustering> radial;   // centers are radii in [0, tau]
  std::vector<Clustering> angular;  // centers are angles; distance is the chord 2 sin(dtheta/2)
};

// Cell-centred polar grid. Radial nodes r[0..n_r-1] lie inside the disk,
// r[n_r] = tau is the boundary ring; faces rf[0] = 0 < rf[1] < ... < rf[n_r].
// Angular nodes th[j], faces thf[j] between th[j] and th[j+1] (periodic).
class PolarGrid {
 public:
  PolarGrid() = default;
  explicit PolarGrid(const GridSpec& spec);

  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  double tau() const { return tau_; }
  const GridSpec& spec() const { return spec_; }

  const std::vector<double>& r() const { return r_; }
  const std::vector<double>& rf() const { return rf_; }
  const std::vector<double>& th() const { return th_; }
  const std::vector<double>& thf() const { return thf_; }

  // Angular width of cell j and gap between node j and j+1.
  double dtheta_cell(int j) const;
  double dtheta_gap(int j) const;
  double area(int i, int j) const;
  cplx point(int i, int j) const { return std::polar(r_[i], th_[j]); }

  // Flat index of interior node (i, j), i < n_r.
  int index(int i, int j) const { return i * n_theta_ + j; }
  int interior_size() const { return n_r_ * n_theta_; }
  int wrap(int j) const { return ((j % n_theta_) + n_theta_) % n_theta_; }

  // Index of the cell containing radius r / angle t.
  int radial_cell(double r) const;
  int angular_cell(double t) const;

  // Local spacing at node (i, j): max of radial and arc-length spacing.
  double spacing(int i, int j) const;

 private:
  GridSpec spec_;
  int n_r_ = 0, n_theta_ = 0;
  double tau_ = 1.0;
  std::vector<double> r_, rf_, th_, thf_;
};

// Grid function including the boundary ring: values[(i) * n_theta + j], i = 0..n_r.
class GridField : public ScalarField {
 public:
  GridField() = default;
  GridField(const PolarGrid& grid, std::vector<double> values);

  double value(cplx p) const override;
  cplx gradient(cplx p) const override;
  double domain_radius() const override { return grid_.tau(); }

  const PolarGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(i * grid_.n_theta() + j)]; }

 private:
  void eval(cplx p, double* v, cplx* g) const;
  PolarGrid grid_;
  std::vector<double> values_;
};

}  // namespace liouville
