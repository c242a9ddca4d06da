#include "liouville/liouville_solver.hpp"

#include <algorithm>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "liouville/global_family.hpp"

namespace liouville {

void DiskProblem::validate() const {
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "N must be non-negative");
  if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
  if (std::abs(grid.tau - tau) > 1e-14 * tau)
    throw Error(ErrorCode::InvalidArgument, "grid radius differs from tau");
  if (grid.n_theta % (4 * (N + 1)) != 0)
    throw Error(ErrorCode::InvalidArgument, "n_theta must be a multiple of 4(N+1)");
  if (std::abs(h.value(0.0) - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "h must be normalized to h(0) = 1");
  for (int i = 0; i <= 32; ++i)
    for (int j = 0; j < 64; ++j) {
      const double v = h.value(std::polar(tau * i / 32.0, two_pi * j / 64.0));
      if (!(v > 0.0) || !std::isfinite(v))
        throw Error(ErrorCode::InvalidArgument, "h must be positive on the closed disk");
    }
}

std::vector<double> sample_on_grid(const PolarGrid& grid, const std::function<double(cplx)>& f) {
  std::vector<double> v(static_cast<std::size_t>((grid.n_r() + 1) * grid.n_theta()));
  for (int i = 0; i <= grid.n_r(); ++i)
    for (int j = 0; j < grid.n_theta(); ++j)
      v[static_cast<std::size_t>(i * grid.n_theta() + j)] = f(grid.point(i, j));
  return v;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Finite-volume operator: F = div-flux + w e^u, w = cell area * K at the node.
struct Discretization {
  const PolarGrid& g;
  int nr, nt;
  std::vector<double> cr;  // coupling between (i, j) and (i+1, j)
  std::vector<double> ct;  // coupling between (i, j) and (i, j+1)
  std::vector<double> w;

  Discretization(const PolarGrid& grid, const Weight& K) : g(grid), nr(grid.n_r()), nt(grid.n_theta()) {
    const auto& r = g.r();
    const auto& rf = g.rf();
    const std::size_t n = static_cast<std::size_t>(nr * nt);
    cr.resize(n);
    ct.resize(n);
    w.resize(n);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nt; ++j) {
        const std::size_t k = static_cast<std::size_t>(g.index(i, j));
        const std::size_t iu = static_cast<std::size_t>(i);
        cr[k] = rf[iu + 1] * g.dtheta_cell(j) / (r[iu + 1] - r[iu]);
        ct[k] = (rf[iu + 1] - rf[iu]) / (r[iu] * g.dtheta_gap(j));
        w[k] = g.area(i, j) * K.value(g.point(i, j));
      }
  }

  double at(const std::vector<double>& u, int i, int j) const {
    return u[static_cast<std::size_t>(i * nt + j)];
  }

  void residual(const std::vector<double>& u, Eigen::VectorXd& F) const {
    F.resize(nr * nt);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nt; ++j) {
        const int k = g.index(i, j);
        const double c = at(u, i, j);
        double f = cr[static_cast<std::size_t>(k)] * (at(u, i + 1, j) - c);
        if (i > 0) f -= cr[static_cast<std::size_t>(k - nt)] * (c - at(u, i - 1, j));
        const int jp = g.wrap(j + 1), jm = g.wrap(j - 1);
        f += ct[static_cast<std::size_t>(k)] * (at(u, i, jp) - c);
        f -= ct[static_cast<std::size_t>(g.index(i, jm))] * (c - at(u, i, jm));
        f += w[static_cast<std::size_t>(k)] * std::exp(c);
        F[k] = f;
      }
  }

  SpMat jacobian(const std::vector<double>& u) const {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(5 * nr * nt));
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nt; ++j) {
        const int k = g.index(i, j);
        const std::size_t ku = static_cast<std::size_t>(k);
        double diag = w[ku] * std::exp(at(u, i, j)) - cr[ku] - ct[ku];
        if (i + 1 < nr) t.emplace_back(k, k + nt, cr[ku]);
        if (i > 0) {
          diag -= cr[ku - static_cast<std::size_t>(nt)];
          t.emplace_back(k, k - nt, cr[ku - static_cast<std::size_t>(nt)]);
        }
        const int jp = g.wrap(j + 1), jm = g.wrap(j - 1);
        const double cm = ct[static_cast<std::size_t>(g.index(i, jm))];
        diag -= cm;
        t.emplace_back(k, g.index(i, jp), ct[ku]);
        t.emplace_back(k, g.index(i, jm), cm);
        t.emplace_back(k, k, diag);
      }
    SpMat J(nr * nt, nr * nt);
    J.setFromTriplets(t.begin(), t.end());
    return J;
  }
};

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Symmetric indefinite factorization first, LU when the pivots break down.
class LinearSolver {
 public:
  Eigen::VectorXd solve(const SpMat& J, const Eigen::VectorXd& rhs) {
    if (!ldlt_failed_) {
      if (!analyzed_) {
        ldlt_.analyzePattern(J);
        analyzed_ = true;
      }
      ldlt_.factorize(J);
      if (ldlt_.info() == Eigen::Success) {
        Eigen::VectorXd x = ldlt_.solve(rhs);
        if (x.allFinite() && (J * x - rhs).norm() <= 1e-6 * (rhs.norm() + 1e-300)) return x;
      }
      ldlt_failed_ = true;
    }
    lu_.analyzePattern(J);
    lu_.factorize(J);
    if (lu_.info() != Eigen::Success)
      throw Error(ErrorCode::NewtonStalled, "singular Jacobian");
    return lu_.solve(rhs);
  }

 private:
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
  bool analyzed_ = false;
  bool ldlt_failed_ = false;
};

double normalized_angle(cplx p, int N) {
  const double lo = -pi / (N + 1);
  double a = std::arg(p);
  while (a < lo) a += two_pi;
  while (a >= lo + two_pi) a -= two_pi;
  return a;
}

}  // namespace

QuadraticPeakFit fit_peak_quadratic(const GridField& u, int i0, int j0, double radius,
                                    const std::function<double(cplx)>& subtract) {
  const PolarGrid& g = u.grid();
  const cplx p0 = g.point(i0, j0);
  const int nt = g.n_theta();
  std::vector<std::pair<cplx, double>> pts;
  auto consider = [&](int i, int j) {
    const cplx p = g.point(i, j);
    if (std::abs(p - p0) <= radius) {
      double v = u.at(i, j);
      if (subtract) v -= subtract(p);
      pts.emplace_back(p - p0, v);
    }
  };
  const int span = 4;
  if (i0 <= span + 2) {
    for (int i = 0; i <= std::min(g.n_r(), i0 + span); ++i)
      for (int j = 0; j < nt; ++j) consider(i, j);
  } else {
    // Nearby rings, all angles: the arc spacing varies strongly on graded grids.
    for (int i = std::max(0, i0 - span); i <= std::min(g.n_r(), i0 + span); ++i)
      for (int dj = -nt / 2; dj < nt / 2; ++dj) {
        const int j = g.wrap(j0 + dj);
        consider(i, j);
      }
  }
  QuadraticPeakFit out;
  if (pts.size() < 8) return out;
  const double s = radius;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(pts.size()), 6);
  Eigen::VectorXd b(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double x = pts[k].first.real() / s, y = pts[k].first.imag() / s;
    const Eigen::Index r = static_cast<Eigen::Index>(k);
    A(r, 0) = 1.0;
    A(r, 1) = x;
    A(r, 2) = y;
    A(r, 3) = 0.5 * x * x;
    A(r, 4) = x * y;
    A(r, 5) = 0.5 * y * y;
    b[r] = pts[k].second;
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  Eigen::Matrix2d H;
  H << c[3], c[4], c[4], c[5];
  const Eigen::Vector2d grad(c[1], c[2]);
  if (!(H.determinant() > 0.0 && H.trace() < 0.0)) return out;
  const Eigen::Vector2d d = -H.inverse() * grad;
  if (d.norm() > 1.5) return out;
  out.ok = true;
  out.argmax = p0 + s * cplx(d[0], d[1]);
  out.max = c[0] + 0.5 * grad.dot(d);
  return out;
}

double discrete_mass(const GridField& u, const DiskProblem& problem) {
  const PolarGrid& g = u.grid();
  const Weight K(problem.N, problem.h);
  long double m = 0.0;
  for (int i = 0; i < g.n_r(); ++i)
    for (int j = 0; j < g.n_theta(); ++j) m += g.area(i, j) * K.value(g.point(i, j)) * std::exp(u.at(i, j));
  // Half cell of the boundary ring.
  const double ro = g.tau(), ri = g.rf().back();
  for (int j = 0; j < g.n_theta(); ++j)
    m += 0.5 * (ro * ro - ri * ri) * g.dtheta_cell(j) * K.value(g.point(g.n_r(), j)) *
         std::exp(u.at(g.n_r(), j));
  return static_cast<double>(m);
}

std::vector<Peak> detect_peaks(const GridField& u, const DiskProblem& problem) {
  const PolarGrid& g = u.grid();
  const int nr = g.n_r(), nt = g.n_theta();
  double ub = 0.0;
  for (int j = 0; j < nt; ++j) ub += u.at(nr, j);
  ub /= nt;
  double umax = -INFINITY;
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nt; ++j) umax = std::max(umax, u.at(i, j));
  const double floor = ub + 0.5 * (umax - ub);

  std::vector<std::pair<int, int>> cand;
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nt; ++j) {
      const double c = u.at(i, j);
      if (c < floor) continue;
      bool is_max = true;
      auto beats = [&](int a, int b) {
        const double o = u.at(a, b);
        if (o > c || (o == c && a * nt + b < i * nt + j)) is_max = false;
      };
      for (int di = -1; di <= 1 && is_max; ++di)
        for (int dj = -1; dj <= 1 && is_max; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int a = i + di;
          if (a < 0) {
            // across the center
            beats(0, g.wrap(j + nt / 2 + dj));
          } else {
            beats(a, g.wrap(j + dj));
          }
        }
      if (is_max) cand.emplace_back(i, j);
    }

  const Weight K(problem.N, problem.h);
  std::vector<Peak> peaks;
  for (auto [i, j] : cand) {
    Peak pk;
    pk.i = i;
    pk.j = j;
    pk.location = g.point(i, j);
    pk.height = u.at(i, j);
    const double sp = g.spacing(i, j);
    const QuadraticPeakFit f = fit_peak_quadratic(u, i, j, 2.5 * sp);
    if (f.ok) {
      pk.location = f.argmax;
      pk.height = f.max;
    }
    if (std::abs(pk.location) > g.r()[2] && std::abs(pk.location) < g.r()[static_cast<std::size_t>(nr - 2)]) {
      try {
        const cplx pol = refine_maximum(u, pk.location, sp);
        if (std::abs(pol - pk.location) < sp) {
          pk.location = pol;
          pk.height = u.value(pol);
        }
      } catch (const Error&) {
      }
    }
    pk.resolution = sp * std::sqrt(K.value(pk.location) * std::exp(pk.height));
    peaks.push_back(pk);
  }
  // Merge maxima closer than two local spacings (plateaus split by rounding).
  std::vector<Peak> merged;
  for (const Peak& p : peaks) {
    bool dup = false;
    for (Peak& q : merged)
      if (std::abs(p.location - q.location) < 2.0 * std::max(g.spacing(p.i, p.j), g.spacing(q.i, q.j))) {
        dup = true;
        if (p.height > q.height) q = p;
      }
    if (!dup) merged.push_back(p);
  }
  std::sort(merged.begin(), merged.end(), [&](const Peak& a, const Peak& b) {
    return normalized_angle(a.location, problem.N) < normalized_angle(b.location, problem.N);
  });
  return merged;
}

SolutionField solve(const DiskProblem& problem, const std::vector<double>& initial,
                    const SolveOptions& opt) {
  problem.validate();
  SolutionField out;
  out.grid = PolarGrid(problem.grid);
  const PolarGrid& g = out.grid;
  const int nr = g.n_r(), nt = g.n_theta();
  if (initial.size() != static_cast<std::size_t>((nr + 1) * nt))
    throw Error(ErrorCode::InvalidArgument, "initial guess has the wrong size");
  for (double v : initial)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "initial guess is not finite");

  std::vector<double> u = initial;
  for (int j = 0; j < nt; ++j) u[static_cast<std::size_t>(nr * nt + j)] = problem.boundary_at(g.th()[static_cast<std::size_t>(j)]);

  const Discretization D(g, Weight(problem.N, problem.h));
  LinearSolver lin;
  Eigen::VectorXd F;
  D.residual(u, F);
  double fnorm = F.norm();
  out.residual_history.push_back(fnorm);
  const std::size_t n = static_cast<std::size_t>(nr * nt);
  std::vector<double> trial(u.size());
  Eigen::VectorXd Ft;
  int it = 0;
  while (max_abs(F) >= opt.tol) {
    if (it >= opt.max_iterations) {
      out.stalled = true;
      break;
    }
    const Eigen::VectorXd du = lin.solve(D.jacobian(u), -F);
    double t = 1.0;
    bool accepted = false;
    while (t >= opt.min_step) {
      trial = u;
      for (std::size_t k = 0; k < n; ++k) trial[k] += t * du[static_cast<Eigen::Index>(k)];
      D.residual(trial, Ft);
      const double tn = Ft.norm();
      if (std::isfinite(tn) && tn < fnorm) {
        u.swap(trial);
        F = Ft;
        fnorm = tn;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      out.stalled = true;
      break;
    }
    ++it;
    out.residual_history.push_back(fnorm);
  }
  out.iterations = it;
  out.residual_norm = max_abs(F);
  out.converged = out.residual_norm < opt.tol;
  for (std::size_t k = 1; k < out.residual_history.size(); ++k)
    if (!(out.residual_history[k] < out.residual_history[k - 1])) out.monotone = false;

  out.u = GridField(g, std::move(u));
  out.mass = discrete_mass(out.u, problem);
  out.peaks = detect_peaks(out.u, problem);
  if (!out.peaks.empty()) {
    const Peak& p0 = out.peaks.front();
    out.delta = std::abs(p0.location);
    out.theta = std::arg(p0.location);
    const bool scaled = problem.N >= 1 && out.peaks.size() == static_cast<std::size_t>(problem.N + 1) &&
                        out.delta > 0.0;
    out.mu = scaled ? p0.height + 2.0 * (problem.N + 1) * std::log(out.delta) : p0.height;
    for (const Peak& p : out.peaks) out.resolution = std::max(out.resolution, p.resolution);
  }
  if (!out.peaks.empty() && problem.N >= 1 && out.peaks.size() != static_cast<std::size_t>(problem.N + 1)) {
    double umax = -INFINITY;
    for (const Peak& p : out.peaks) umax = std::max(umax, p.height);
    out.mu = umax;
  }
  return out;
}

GridSpec branch_grid(int N, double tau, double delta, double mu_max, int n_r, int n_theta) {
  GridSpec s;
  s.n_r = n_r;
  s.n_theta = n_theta;
  s.tau = tau;
  const double w = 0.7 * delta * std::exp(-0.5 * mu_max);
  s.radial.push_back({delta, w, 1.0});
  for (int l = 0; l <= N; ++l) s.angular.push_back({two_pi * l / (N + 1), w / delta, 1.0});
  return s;
}

GridSpec recenter_grid(const GridSpec& grid, const std::vector<Peak>& peaks) {
  if (peaks.empty()) return grid;
  GridSpec s = grid;
  double rad = 0.0;
  for (const Peak& p : peaks) rad += std::abs(p.location);
  rad /= static_cast<double>(peaks.size());
  for (Clustering& c : s.radial) c.center = rad;
  if (!grid.angular.empty() && rad > 0.0) {
    const Clustering proto = grid.angular.front();
    s.angular.clear();
    for (const Peak& p : peaks) {
      double t = std::arg(p.location);
      if (t < 0) t += two_pi;
      s.angular.push_back({t, proto.width, proto.alpha});
    }
  }
  return s;
}

BranchResult continue_branch(const DiskProblem& problem, const BranchSpec& spec) {
  problem.validate();
  if (spec.mu.empty()) throw Error(ErrorCode::InvalidArgument, "empty schedule");
  for (std::size_t k = 1; k < spec.mu.size(); ++k)
    if (!(spec.mu[k] > spec.mu[k - 1])) throw Error(ErrorCode::InvalidArgument, "schedule must increase");
  if (!(spec.seed_delta > 0.0 && spec.seed_delta < problem.tau))
    throw Error(ErrorCode::InvalidArgument, "seed_delta must lie in (0, tau)");

  const int N = problem.N;
  GridSpec grid = problem.grid;
  const double ld = std::log(spec.seed_delta);
  auto seed_params = [&](double mu) {
    return GlobalSolutionParams{N, mu - 2.0 * (N + 1) * ld, std::pow(spec.seed_delta, N + 1), 1.0};
  };
  auto seed = [&](const PolarGrid& g, double mu) {
    const GlobalSolutionParams p = seed_params(mu);
    return sample_on_grid(g, [&](cplx x) { return eval_global(p, x) - std::log(problem.h.value(x)); });
  };
  auto boundary_mean = [&](double mu) {
    const GlobalSolutionParams p = seed_params(mu);
    const int M = 512;
    long double s = 0.0;
    for (int k = 0; k < M; ++k) {
      const cplx x = std::polar(problem.tau, two_pi * k / M);
      s += eval_global(p, x) - std::log(problem.h.value(x));
    }
    return static_cast<double>(s / M);
  };

  BranchResult out;
  double prev_mu = 0.0;
  for (double mu : spec.mu) {
    DiskProblem step = problem;
    step.boundary = nullptr;
    step.boundary_value = boundary_mean(mu);
    std::optional<SolutionField> sol;
    std::optional<SolutionField> previous_try;
    std::string drift;
    for (int attempt = 0; attempt <= spec.max_regrids; ++attempt) {
      step.grid = grid;
      const PolarGrid g(grid);
      std::vector<double> init = seed(g, mu);
      if (previous_try) {
        // Same mu on a moved grid: restart from the family member through the
        // measured first peak, which is smooth on any grid.
        const Peak& pk = previous_try->peaks.front();
        const GlobalSolutionParams p{N, pk.height + std::log(problem.h.value(pk.location)),
                                     std::pow(pk.location, N + 1), 1.0};
        init = sample_on_grid(g, [&](cplx x) { return eval_global(p, x) - std::log(problem.h.value(x)); });
      } else if (!out.steps.empty()) {
        const GridField& last = out.steps.back().u;
        const std::vector<double> before = seed(g, prev_mu);
        const std::vector<double> prev = sample_on_grid(g, [&](cplx x) { return last.value(x); });
        for (std::size_t k = 0; k < init.size(); ++k) init[k] = prev[k] + (init[k] - before[k]);
      }
      sol = solve(step, init, spec.solve);
      if (!sol->converged || sol->resolution <= spec.resolution_limit || attempt == spec.max_regrids ||
          sol->peaks.empty())
        break;
      GridSpec moved = recenter_grid(grid, sol->peaks);
      if (moved.radial.empty() && moved.angular.empty()) break;
      if (drift.empty()) drift = "; first peak radius " + std::to_string(sol->delta);
      else drift += " -> " + std::to_string(sol->delta);
      grid = std::move(moved);
      ++out.regrids;
      previous_try = std::move(sol);
    }
    if (!sol->converged) {
      out.terminated = true;
      out.reason = "Newton stalled at seed mu " + std::to_string(mu) + " with residual " +
                   std::to_string(sol->residual_norm) + (drift.empty() ? "" : drift + " across regrids");
      out.rejected = std::move(sol);
      break;
    }
    if (sol->resolution > spec.resolution_limit) {
      out.terminated = true;
      out.reason = "grid resolution limit reached at seed mu " + std::to_string(mu) +
                   " (spacing * sqrt(K e^u) = " + std::to_string(sol->resolution) + ")" +
                   (drift.empty() ? "" : drift + " across regrids");
      out.rejected = std::move(sol);
      break;
    }
    out.steps.push_back(std::move(*sol));
    out.boundary_values.push_back(step.boundary_value);
    out.seed_mu.push_back(mu);
    prev_mu = mu;
  }
  return out;
}

ScaledField::ScaledField(const ScalarField& u, int N, double delta, double theta, double tau)
    : u_(u), rot_(std::polar(delta, theta)), offset_(2.0 * (N + 1) * std::log(delta)), radius_(tau / delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
}

double ScaledField::value(cplx y) const { return u_.value(rot_ * y) + offset_; }

cplx ScaledField::gradient(cplx y) const { return std::conj(rot_) * u_.gradient(rot_ * y); }

ScaledField scale_to_v(const ScalarField& u, int N, double delta, double theta, double tau) {
  return ScaledField(u, N, delta, theta, tau);
}

Deoscillation deoscillate(const ScalarField& u, const std::function<double(double)>& trace,
                          double tau, int samples) {
  std::vector<double> s(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) s[static_cast<std::size_t>(k)] = trace(two_pi * k / samples);
  HarmonicLift phi(s, tau);
  phi.shift(phi.value(0.0));
  return Deoscillation{phi, ShiftedField(u, phi)};
}

Deoscillation deoscillate(const ScalarField& u, double tau, int samples) {
  return deoscillate(u, [&](double t) { return u.value(std::polar(tau, t)); }, tau, samples);
}

BlowupData measure_blowup(const ScalarField& v, int N, const std::vector<cplx>& peaks_y,
                          double delta, double theta, cplx L) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "measure_blowup needs N >= 1");
  if (peaks_y.size() != static_cast<std::size_t>(N + 1))
    throw Error(ErrorCode::PeakCountMismatch,
                "expected " + std::to_string(N + 1) + " peaks, got " + std::to_string(peaks_y.size()));
  std::vector<cplx> Q;
  for (cplx y0 : peaks_y) {
    cplx y = y0;
    try {
      const double scale = std::clamp(std::exp(-0.5 * v.value(y0)), 1e-12, 1.0);
      y = refine_maximum(v, y0, scale);
    } catch (const Error&) {
    }
    Q.push_back(y);
  }
  std::sort(Q.begin(), Q.end(), [&](cplx a, cplx b) { return normalized_angle(a, N) < normalized_angle(b, N); });
  // Re-pin the first peak to e_1.
  const cplx q0 = Q.front();
  const double lift = 2.0 * (N + 1) * std::log(std::abs(q0));
  BlowupData b;
  b.N = N;
  b.delta = delta * std::abs(q0);
  b.theta = theta + std::arg(q0);
  b.L = L * std::polar(1.0, -std::arg(q0));
  for (cplx q : Q) {
    b.peak_heights.push_back(v.value(q) + lift);
    b.Q.push_back(q / q0);
  }
  b.mu = b.peak_heights.front();
  for (int l = 0; l <= N; ++l) {
    const cplx e = root_of_unity(l, N + 1);
    b.m.push_back(b.Q[static_cast<std::size_t>(l)] / e - 1.0);
    b.sigma = std::max(b.sigma, std::abs(b.Q[static_cast<std::size_t>(l)] - e));
  }
  b.m[0] = 0.0;
  return b;
}

BlowupData measure_blowup(const SolutionField& sol, const DiskProblem& problem) {
  if (sol.peaks.size() != static_cast<std::size_t>(problem.N + 1))
    throw Error(ErrorCode::PeakCountMismatch, "expected " + std::to_string(problem.N + 1) +
                                                  " peaks, got " + std::to_string(sol.peaks.size()));
  const ScaledField v(sol.u, problem.N, sol.delta, sol.theta, problem.tau);
  const cplx rot = std::polar(sol.delta, sol.theta);
  std::vector<cplx> ys;
  for (const Peak& p : sol.peaks) ys.push_back(p.location / rot);
  const cplx L = std::polar(1.0, -sol.theta) * problem.h.log_gradient(0.0);
  return measure_blowup(v, problem.N, ys, sol.delta, sol.theta, L);
}

double spherical_average(const ScalarField& v, double rho, int samples) {
  long double s = 0.0;
  for (int k = 0; k < samples; ++k) s += v.value(std::polar(rho, two_pi * (k + 0.5) / samples));
  return static_cast<double>(s / samples);
}

}  // namespace liouville
