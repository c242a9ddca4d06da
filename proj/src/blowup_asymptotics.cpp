#include "liouville/blowup_asymptotics.hpp"

#include <algorithm>

#include <Eigen/Dense>

namespace liouville {

DisplacementPrediction predict_displacements(const CirculantSystem& sys, double delta, cplx L) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  if (!sys.dense) throw Error(ErrorCode::InvalidArgument, "predict_displacements needs the dense system");
  const int N = sys.N;
  const cplx Lb = std::conj(L);
  DisplacementPrediction out;
  out.closed_form.assign(static_cast<std::size_t>(N + 1), 0.0);
  out.linear_solve.assign(static_cast<std::size_t>(N + 1), 0.0);
  out.opposite.assign(static_cast<std::size_t>(N + 1), 0.0);
  Eigen::VectorXcd rhs(N);
  for (int l = 1; l <= N; ++l) {
    out.closed_form[static_cast<std::size_t>(l)] = delta * Lb * (sys.e(l) - 1.0) / (2.0 * N);
    rhs[l - 1] = Lb * delta * sys.e(l);
  }
  const Eigen::MatrixXcd A = sys.A.cast<cplx>();
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  const Eigen::VectorXcd m = lu.solve(rhs);
  const Eigen::VectorXcd mo = lu.solve(-rhs);
  for (int l = 1; l <= N; ++l) {
    out.linear_solve[static_cast<std::size_t>(l)] = m[l - 1];
    out.opposite[static_cast<std::size_t>(l)] = mo[l - 1];
    out.max_diff = std::max(out.max_diff, std::abs(m[l - 1] - out.closed_form[static_cast<std::size_t>(l)]));
  }
  cplx s = -Lb * delta;
  for (int j = 1; j <= N; ++j) s -= sys.dk(j) * out.closed_form[static_cast<std::size_t>(j)];
  out.summed_residual = std::abs(s);
  return out;
}

cplx n1_system_displacement(double delta, cplx L) { return delta * std::conj(L); }

double LogField::value(cplx p) const {
  double s = 0.0;
  for (const Term& t : terms_) s += t.c * std::log(std::abs(p - t.at));
  return s;
}

cplx LogField::gradient(cplx p) const {
  cplx g = 0.0;
  for (const Term& t : terms_) {
    const cplx d = p - t.at;
    g += t.c * d / std::norm(d);
  }
  return g;
}

SignAdjudication adjudicate_sign(int N, double delta, cplx L, double lambda, double ball_radius,
                                 int boundary_nodes) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "adjudicate_sign needs N >= 1");
  const CirculantSystem sys = build(N);
  const DisplacementPrediction pred = predict_displacements(sys, delta, L);
  const GlobalFamilyField V(GlobalSolutionParams{N, lambda, 1.0, 1.0});

  auto residual = [&](const std::vector<cplx>& m, double& scale) {
    LogField w;
    std::vector<cplx> Q(static_cast<std::size_t>(N + 1));
    for (int l = 0; l <= N; ++l) {
      Q[static_cast<std::size_t>(l)] = sys.e(l) * (1.0 + m[static_cast<std::size_t>(l)]);
      w.add(Q[static_cast<std::size_t>(l)], -4.0);
      w.add(sys.e(l), 4.0);
    }
    double worst = 0.0;
    for (int s = 0; s <= N; ++s) {
      const cplx Qs = Q[static_cast<std::size_t>(s)];
      const cplx change = 2.0 * N / std::conj(Qs) + delta * L - 2.0 * N * sys.e(s);
      for (cplx xi : {cplx(1, 0), cplx(0, 1)}) {
        const PairDifference pd =
            mixed_boundary_integral(V, w, sys.e(s), ball_radius, xi, boundary_nodes);
        const double predicted = 8.0 * pi * dot(change, xi);
        worst = std::max(worst, std::abs(pd.total - predicted));
        scale = std::max(scale, std::abs(predicted));
      }
    }
    return worst;
  };

  SignAdjudication out;
  out.N = N;
  out.delta = delta;
  out.L = L;
  out.residual_closed = residual(pred.closed_form, out.scale);
  out.residual_opposite = residual(pred.opposite, out.scale);
  out.adjudicated = out.residual_closed <= out.residual_opposite ? "closed_form" : "opposite";
  return out;
}

double boundary_value_law(int N, double mu, double delta, double tau) {
  return -mu + std::log(8.0) + 4.0 * std::log(1.0 + N) - 4.0 * (1.0 + N) * std::log(tau / delta);
}

double boundary_value_law_exact(int N, double mu, double delta, double tau) {
  return -mu + 2.0 * std::log(8.0) + 4.0 * std::log(1.0 + N) -
         4.0 * (1.0 + N) * std::log(tau / delta);
}

VanishingBounds vanishing_rates(double delta, double mu) {
  if (!(delta > 0.0) || !(mu > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta, mu must be positive");
  const double t = mu * std::exp(-mu);
  return {delta + t / delta, delta + t / (delta * delta)};
}

cplx refine_maximum(const ScalarField& v, cplx y0, double scale, int* iterations) {
  cplx y = y0;
  double gn = std::abs(v.gradient(y));
  int iters = 0;
  for (; iters < 60 && gn > 1e-12; ++iters) {
    const double h = 1e-6 * scale;
    const cplx gx = (v.gradient(y + h) - v.gradient(y - h)) / (2 * h);
    const cplx gy = (v.gradient(y + cplx(0, h)) - v.gradient(y - cplx(0, h))) / (2 * h);
    Eigen::Matrix2d J;
    J << gx.real(), gy.real(), gx.imag(), gy.imag();
    const cplx g = v.gradient(y);
    const Eigen::Vector2d st = J.fullPivLu().solve(Eigen::Vector2d(g.real(), g.imag()));
    if (!st.allFinite()) throw Error(ErrorCode::FitDiverged, "singular Hessian at peak");
    const cplx d(-st[0], -st[1]);
    double t = 1.0;
    cplx trial = y + d;
    while (std::abs(v.gradient(trial)) > gn && t > 1e-8) {
      t *= 0.5;
      trial = y + t * d;
    }
    if (std::abs(v.gradient(trial)) > gn) break;
    y = trial;
    gn = std::abs(v.gradient(y));
  }
  if (!std::isfinite(y.real()) || !std::isfinite(y.imag()))
    throw Error(ErrorCode::FitDiverged, "peak refinement diverged");
  if (iterations) *iterations = iters;
  return y;
}

GlobalFit compare_to_global(const ScalarField& v, const std::vector<cplx>& samples,
                            const GlobalSolutionParams& guess, const GlobalFitOptions& opt) {
  guess.validate();
  const int n1 = guess.N + 1;
  GlobalFit fit;
  fit.params = guess;
  if (opt.refine_peak) {
    const cplx y0 = std::polar(std::pow(std::abs(guess.xi), 1.0 / n1), std::arg(guess.xi) / n1);
    const double width = std::exp(-0.5 * guess.lambda) + 1e-300;
    fit.peak = refine_maximum(v, y0, std::min(1.0, width), &fit.newton_iterations);
    fit.params.lambda = v.value(fit.peak);
  } else {
    fit.peak = opt.known_peak;
    fit.params.lambda = opt.known_height;
  }
  cplx xi = 1.0;
  for (int k = 0; k < n1; ++k) xi *= fit.peak;
  fit.params.xi = xi;
  if (!std::isfinite(fit.params.lambda) || !std::isfinite(std::abs(xi)))
    throw Error(ErrorCode::FitDiverged, "non-finite fitted parameters");

  std::vector<cplx> maxima;
  const double r0 = std::abs(fit.peak);
  for (int l = 0; l < n1; ++l) maxima.push_back(fit.peak * root_of_unity(l, n1) * (r0 > 0 ? 1.0 : 0.0));
  for (cplx y : samples) {
    const double d = std::abs(v.value(y) - eval_global(fit.params, y));
    fit.sup_difference = std::max(fit.sup_difference, d);
    bool inside = false;
    for (cplx q : maxima)
      if (std::abs(y - q) < opt.bubble_exclusion) inside = true;
    if (!inside) fit.sup_difference_outside = std::max(fit.sup_difference_outside, d);
  }
  return fit;
}

std::array<cplx, 3> three_point_probes(double s, double eps, const std::array<double, 3>& thetas) {
  std::array<cplx, 3> p{};
  for (int l = 0; l < 3; ++l) p[l] = std::polar(std::pow(s, 1.0 + eps * (l + 1)), thetas[l]);
  return p;
}

ThreePointMatch three_point_match(const ScalarField& v, const std::array<cplx, 3>& probes,
                               const GlobalSolutionParams& guess, const std::vector<cplx>& samples,
                               double eps_scale, int max_iterations) {
  guess.validate();
  ThreePointMatch out;
  out.probes = probes;
  GlobalSolutionParams p = guess;
  std::array<double, 3> target{};
  for (int l = 0; l < 3; ++l) target[l] = v.value(probes[l]);

  auto residual = [&](const GlobalSolutionParams& q) {
    Eigen::Vector3d r;
    for (int l = 0; l < 3; ++l) r[l] = eval_global(q, probes[l]) - target[l];
    return r;
  };
  Eigen::Vector3d r = residual(p);
  double tscale = 1.0;
  for (double t : target) tscale = std::max(tscale, std::abs(t));
  const double tol = 1e-13 * tscale;
  // Once the residual meets tol, up to two polishing steps are taken: with far
  // probes xi is weakly observable, so parameters lag the residual.
  int it = 0, polish = 0;
  for (; it < max_iterations; ++it) {
    const bool small = r.cwiseAbs().maxCoeff() <= tol;
    if (small && polish == 2) break;
    Eigen::Matrix3d J;
    const double Lam = std::exp(p.lambda);
    for (int l = 0; l < 3; ++l) {
      const KernelDerivatives k = kernel_derivatives(p, probes[l]);
      // h0 enters v only through Lambda h0, so the Lambda-derivative carries h0 implicitly.
      J(l, 0) = Lam * k.d_Lambda;
      J(l, 1) = k.d_xi1;
      J(l, 2) = k.d_xi2;
    }
    out.det = J.determinant();
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(J);
    if (!lu.isInvertible() || std::abs(out.det) < 1e-300)
      throw Error(ErrorCode::SingularKernelMatrix, "kernel matrix is singular at the probes");
    const Eigen::Vector3d step = lu.solve(r);
    if (small) {
      GlobalSolutionParams trial = p;
      trial.lambda -= step[0];
      trial.xi -= cplx(step[1], step[2]);
      const Eigen::Vector3d rt = residual(trial);
      ++polish;
      if (!(rt.norm() <= r.norm())) break;
      p = trial;
      r = rt;
      continue;
    }
    double t = 1.0;
    GlobalSolutionParams trial = p;
    for (;;) {
      trial = p;
      trial.lambda -= t * step[0];
      trial.xi -= t * cplx(step[1], step[2]);
      if (residual(trial).norm() < r.norm() || t < 1e-6) break;
      t *= 0.5;
    }
    p = trial;
    r = residual(p);
    if (!r.allFinite()) throw Error(ErrorCode::NewtonDiverged, "three-point matching diverged");
  }
  if (r.cwiseAbs().maxCoeff() > 1e-9)
    throw Error(ErrorCode::NewtonDiverged, "three-point matching did not converge");
  out.params = p;
  out.iterations = it;
  out.eps = eps_scale > 0.0 ? eps_scale : std::exp(-p.lambda / (2.0 * (p.N + 1)));
  for (cplx y : samples) {
    const double d = std::abs(v.value(y) - eval_global(p, y));
    out.max_scaled_residual = std::max(out.max_scaled_residual, d / (out.eps * std::log(2.0 + std::abs(y))));
  }
  return out;
}

}  // namespace liouville
