#include "liouville/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <functional>
#include <iomanip>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "liouville/blowup_asymptotics.hpp"
#include "liouville/circulant_algebra.hpp"
#include "liouville/global_family.hpp"
#include "liouville/refined_expansion.hpp"
#include "liouville/liouville_solver.hpp"
#include "liouville/pohozaev_quadrature.hpp"

namespace liouville {

namespace fs = std::filesystem;

Check make_check(std::string name, double value, std::string relation, double bound, double bound_hi,
                 std::string detail) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.relation = std::move(relation);
  c.bound = bound;
  c.bound_hi = bound_hi;
  c.detail = std::move(detail);
  if (std::isnan(value)) c.pass = false;
  else if (c.relation == "<=") c.pass = value <= bound;
  else if (c.relation == ">=") c.pass = value >= bound;
  else if (c.relation == "in") c.pass = value >= bound && value <= bound_hi;
  else throw Error(ErrorCode::InvalidArgument, "unknown relation " + c.relation);
  return c;
}

Json check_json(const Check& c) {
  Json j = {{"name", c.name}, {"value", c.value}, {"relation", c.relation},
            {"bound", c.bound}, {"pass", c.pass}};
  if (c.relation == "in") j["bound_hi"] = c.bound_hi;
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

const Check* RunOutcome::find(const std::string& name) const {
  for (const Check& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool is_data_artifact(const std::string& file) { return file != "manifest.json"; }

namespace {

// Runs f(0..n-1) on a pool; results must be written to per-index slots so
// the output does not depend on scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& f) {
  int t = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  t = std::min(t, n);
  if (t <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int k = 0; k < t; ++k)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next++;
        if (i >= n) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> g(m);
          if (!first) first = std::current_exception();
          next = n;
          return;
        }
      }
    });
  for (std::thread& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
double uniform(std::mt19937_64& rng, double a, double b) { return a + (b - a) * uniform01(rng); }

class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}
  void csv(const std::string& name, const CsvWriter& w) {
    w.write(dir_ / name);
    add(name);
  }
  void json(const std::string& name, const Json& j) {
    write_json(dir_ / name, j);
    add(name);
  }
  void grid(const std::string& name, const GridField& u, int N) {
    write_grid_binary(dir_ / name, u, N);
    add(name);
  }
  const std::vector<std::string>& files() const { return files_; }

 private:
  void add(const std::string& name) {
    if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
  }
  fs::path dir_;
  std::vector<std::string> files_;
};

struct Context {
  const ExperimentConfig& cfg;
  std::ostream& log;
  Artifacts& out;
  std::vector<Check>& checks;
  Json& results;

  void check(std::string name, double value, std::string relation, double bound, double bound_hi = 0.0,
             std::string detail = {}) {
    checks.push_back(make_check(std::move(name), value, std::move(relation), bound, bound_hi, std::move(detail)));
    const Check& c = checks.back();
    log << (c.pass ? "  PASS " : "  FAIL ") << c.name << " = " << format_double(c.value) << ' ' << c.relation
        << ' ' << format_double(c.bound);
    if (c.relation == "in") log << ".." << format_double(c.bound_hi);
    if (!c.detail.empty()) log << " (" << c.detail << ')';
    log << '\n';
  }
};

[[noreturn]] void config_fail(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

Coefficient parse_coefficient(const std::string& text, const std::string& key) {
  Coefficient h;
  try {
    h = Coefficient::parse(text);
  } catch (const Error& e) {
    config_fail("parameter '" + key + "': " + e.what());
  }
  if (std::abs(h.value(0.0) - 1.0) > 1e-14) config_fail("parameter '" + key + "' must equal 1 at the origin");
  return h;
}

void require(bool ok, const std::string& what) {
  if (!ok) config_fail(what);
}

std::string n_detail(int N) { return "worst at N = " + std::to_string(N); }

Json cplx_list(const std::vector<cplx>& v) {
  Json j = Json::array();
  for (cplx z : v) j.push_back(complex_json(z));
  return j;
}

// Bubble width of the family in y, near its maxima.
double bubble_width(const GlobalSolutionParams& p) {
  const double a = std::exp(p.log_a());
  const int n1 = p.N + 1;
  const double r = std::abs(p.xi);
  if (r == 0.0) return std::pow(a, -0.5 / n1);
  return 1.0 / (n1 * std::pow(r, static_cast<double>(p.N) / n1) * std::sqrt(a));
}

// The points where y^{N+1} = xi.
std::vector<cplx> roots_of(cplx xi, int N) {
  const int n1 = N + 1;
  if (xi == 0.0) return {cplx(0.0)};
  const cplx base = std::polar(std::pow(std::abs(xi), 1.0 / n1), std::arg(xi) / n1);
  std::vector<cplx> out;
  for (int l = 0; l < n1; ++l) out.push_back(base * root_of_unity(l, n1));
  return out;
}

// ---------------------------------------------------------------------------

void run_identities(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const int nmax = param_int(c, "nmax"), nlight = param_int(c, "nmax_light"),
            stride = param_int(c, "light_stride");
  const double tol = param_real(c, "tol"), light_tol = param_real(c, "light_tol"),
               nd_tol = param_real(c, "nd_tol");
  require(nmax >= 1 && nmax <= kDenseCap, "nmax must be in 1.." + std::to_string(kDenseCap));
  require(nlight >= 0 && nlight <= kLightCap, "nmax_light must be in 0.." + std::to_string(kLightCap));
  require(stride >= 1, "light_stride must be positive");

  std::vector<std::vector<IdentityReport>> dense(static_cast<std::size_t>(nmax));
  std::vector<NondegeneracyReport> nd(static_cast<std::size_t>(nmax));
  parallel_for(nmax, c.threads, [&](int k) {
    const CirculantSystem sys = build(k + 1, true);
    auto r = verify_identities(sys, tol);
    auto chain = verify_sum_chain(sys, tol, false, false);
    r.insert(r.end(), chain.begin(), chain.end());
    dense[static_cast<std::size_t>(k)] = std::move(r);
    nd[static_cast<std::size_t>(k)] = nondegeneracy_constant(sys);
  });

  std::vector<int> light_N;
  if (nlight > 0) {
    for (int N = 1; N <= std::min(nlight, 10); ++N) light_N.push_back(N);
    for (int N = stride; N <= nlight; N += stride)
      if (N > 10) light_N.push_back(N);
    if (light_N.back() != nlight) light_N.push_back(nlight);
  }
  std::vector<std::vector<IdentityReport>> light(light_N.size());
  parallel_for(static_cast<int>(light_N.size()), c.threads, [&](int k) {
    const CirculantSystem sys = build(light_N[static_cast<std::size_t>(k)], false);
    auto r = verify_light_identities(sys, light_tol, true);
    auto chain = verify_sum_chain(sys, light_tol, true, true);
    r.insert(r.end(), chain.begin(), chain.end());
    light[static_cast<std::size_t>(k)] = std::move(r);
  });

  CsvWriter csv({"sweep", "N", "identity", "index", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_error",
                 "rel_error", "scale", "tolerance", "error_kind", "pass"});
  auto emit = [&](const std::string& sweep, const std::vector<std::vector<IdentityReport>>& all) {
    std::vector<std::string> order;
    std::map<std::string, std::pair<double, int>> worst;
    std::map<std::string, double> tols;
    for (const auto& reps : all)
      for (const IdentityReport& r : reps) {
        csv.row({sweep, static_cast<long long>(r.N), r.name, static_cast<long long>(r.index), r.lhs.real(),
                 r.lhs.imag(), r.rhs.real(), r.rhs.imag(), r.abs_error, r.rel_error, r.scale, r.tol,
                 std::string(r.relative ? "relative" : "absolute"), std::string(r.pass ? "true" : "false")});
        const double err = r.relative ? r.rel_error : r.abs_error;
        if (!worst.count(r.name)) {
          order.push_back(r.name);
          worst[r.name] = {err, r.N};
        } else if (err > worst[r.name].first || std::isnan(err)) {
          worst[r.name] = {err, r.N};
        }
        tols[r.name] = r.tol;
      }
    for (const std::string& name : order)
      ctx.check(sweep + "." + name, worst[name].first, "<=", tols[name], 0.0, n_detail(worst[name].second));
  };
  emit("dense", dense);
  if (!light.empty()) emit("light", light);
  ctx.out.csv("identities.csv", csv);

  CsvWriter ndcsv({"N", "Lambda", "D", "g", "closed_form", "abs_error", "tolerance", "lower_bound", "pass"});
  double nd_err = 0.0, g_min = INFINITY;
  int nd_worst = 0, g_worst = 0;
  for (const NondegeneracyReport& r : nd) {
    const bool checked = r.N >= 2;
    const bool pass = !checked || (r.abs_error <= nd_tol && r.g >= 1.0);
    ndcsv.row({static_cast<long long>(r.N), r.Lambda_const, r.D, r.g, r.closed_form, r.abs_error, nd_tol, 1.0,
               std::string(checked ? (pass ? "true" : "false") : "n/a")});
    if (!checked) continue;
    if (r.abs_error > nd_err) nd_err = r.abs_error, nd_worst = r.N;
    if (r.g < g_min) g_min = r.g, g_worst = r.N;
  }
  ctx.out.csv("nondegeneracy.csv", ndcsv);
  if (nmax >= 2) {
    ctx.check("nondegeneracy.closed_form", nd_err, "<=", nd_tol, 0.0, n_detail(nd_worst));
    ctx.check("nondegeneracy.min_g", g_min, ">=", 1.0, 0.0, n_detail(g_worst));
  }
  ctx.results["dense_N"] = {1, nmax};
  ctx.results["light_N_count"] = light_N.size();
  if (nmax >= 1) {
    const NondegeneracyReport& r1 = nd.front();
    ctx.results["N1_coefficients"] = {{"left", r1.left_coefficient}, {"right", r1.right_coefficient}};
  }
}

// ---------------------------------------------------------------------------

void run_family(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  GlobalSolutionParams p{param_int(c, "N"), param_real(c, "lambda"), param_complex(c, "xi"), param_real(c, "h0")};
  try {
    p.validate();
  } catch (const Error& e) {
    config_fail(e.what());
  }
  const double mass_tol = param_real(c, "mass_tol"), fd_step = param_real(c, "fd_step");
  require(fd_step > 0.0, "fd_step must be positive");

  MassSpec ms;
  ms.rel_tol = param_real(c, "rel_tol");
  const MassResult mass = total_mass(p, ms);
  const double mass_err = std::abs(mass.value - mass.exact) / mass.exact;
  ctx.check("mass.relative_error", mass_err, "<=", mass_tol);

  const std::vector<cplx> maxima = local_maxima(p);
  const std::vector<cplx> expected = roots_of(p.xi, p.N);
  double max_dist = maxima.size() == expected.size() ? 0.0 : INFINITY;
  for (cplx e : expected) {
    double d = INFINITY;
    for (cplx m : maxima) d = std::min(d, std::abs(m - e));
    max_dist = std::max(max_dist, d);
  }
  ctx.check("maxima.distance", max_dist, "<=", param_real(c, "maxima_tol"));

  // Residual under step halving at points near and away from the bubble.
  const double w = bubble_width(p);
  const cplx m0 = expected.front();
  std::vector<cplx> probes = {m0 + w * cplx(0.5, 0.0), m0 + w * cplx(0.0, 1.3), m0 + w * cplx(-2.0, 1.0)};
  probes.push_back(expected.size() > 1 ? 0.5 * (expected[0] + expected[1]) * 0.8 : m0 + cplx(0.3, 0.2));
  CsvWriter rcsv({"probe", "x", "y", "step", "residual", "order"});
  double order_min = INFINITY;
  Json rjson = Json::array();
  for (std::size_t k = 0; k < probes.size(); ++k) {
    double dist = INFINITY;
    for (cplx e : expected) dist = std::min(dist, std::abs(probes[k] - e));
    const double scale = std::max(w, dist);
    double prev = NAN;
    for (int lev = 0; lev < 3; ++lev) {
      const double h = fd_step * scale * std::ldexp(1.0, -lev);
      const double r = std::abs(residual_global(p, probes[k], h));
      const double order = lev ? std::log2(prev / r) : NAN;
      if (lev) order_min = std::min(order_min, std::isnan(order) ? -INFINITY : order);
      rcsv.row({static_cast<long long>(k), probes[k].real(), probes[k].imag(), h, r, order});
      rjson.push_back({{"probe", k}, {"step", h}, {"residual", r}});
      prev = r;
    }
  }
  ctx.out.csv("family_residual.csv", rcsv);
  ctx.check("residual.order", order_min, ">=", param_real(c, "order_min"));

  ctx.results["mass"] = {{"value", mass.value},         {"exact", mass.exact},
                         {"radius", mass.radius},       {"tail_bound", mass.tail_bound},
                         {"error_estimate", mass.error_estimate}, {"relative_error", mass_err},
                         {"tolerance", mass_tol}};
  ctx.results["maxima"] = cplx_list(maxima);
  ctx.results["expected_maxima"] = cplx_list(expected);
  ctx.results["bubble_width"] = w;
  ctx.out.json("family.json", ctx.results);
}

// ---------------------------------------------------------------------------

Json displacement_json(const DisplacementPrediction& d, double tol) {
  return {{"closed_form", cplx_list(d.closed_form)}, {"linear_solve", cplx_list(d.linear_solve)},
          {"opposite", cplx_list(d.opposite)},        {"max_diff", d.max_diff},
          {"summed_residual", d.summed_residual},       {"tolerance", tol},
          {"match", d.max_diff <= tol}};
}

void run_locate(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const int N = param_int(c, "N");
  const double delta = param_real(c, "delta"), tol = param_real(c, "tol"), summed_tol = param_real(c, "summed_tol");
  const cplx L = param_complex(c, "L");
  const int trials = param_int(c, "random_trials"), maxN = param_int(c, "max_N_random");
  require(N >= 1 && N <= kDenseCap, "N must be in 1.." + std::to_string(kDenseCap));
  require(delta > 0.0, "delta must be positive");
  require(trials >= 0, "random_trials must be non-negative");
  require(maxN >= 1 && maxN <= kDenseCap, "max_N_random must be in 1.." + std::to_string(kDenseCap));

  const DisplacementPrediction d = predict_displacements(build(N), delta, L);
  ctx.check("locate.max_diff", d.max_diff, "<=", tol);
  ctx.check("locate.summed_residual", d.summed_residual, "<=", summed_tol);
  Json j = displacement_json(d, tol);
  j["N"] = N;
  j["delta"] = delta;
  j["L"] = complex_json(L);
  j["summed_tolerance"] = summed_tol;
  if (N == 1) j["n1_system_m1"] = complex_json(n1_system_displacement(delta, L));

  if (param_bool(c, "adjudicate")) {
    const SignAdjudication a = adjudicate_sign(N, delta, L);
    j["adjudication"] = {{"residual_closed", a.residual_closed},
                         {"residual_opposite", a.residual_opposite},
                         {"scale", a.scale},
                         {"adjudicated", a.adjudicated}};
    ctx.log << "  sign adjudication: " << a.adjudicated << '\n';
  }
  ctx.results = j;
  ctx.out.json("locate.json", j);

  if (trials > 0) {
    struct Trial {
      int N;
      double delta;
      cplx L;
      double diff = 0.0, summed = 0.0;
    };
    std::mt19937_64 rng(c.seed);
    std::vector<Trial> t(static_cast<std::size_t>(trials));
    for (Trial& x : t) {
      x.N = 1 + static_cast<int>(uniform01(rng) * maxN);
      x.delta = uniform(rng, 1e-3, 0.2);
      x.L = {uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)};
    }
    parallel_for(trials, c.threads, [&](int k) {
      Trial& x = t[static_cast<std::size_t>(k)];
      const DisplacementPrediction r = predict_displacements(build(x.N), x.delta, x.L);
      x.diff = r.max_diff;
      x.summed = r.summed_residual;
    });
    CsvWriter csv({"trial", "N", "delta", "L_re", "L_im", "max_diff", "tolerance", "summed_residual",
                   "summed_tolerance", "pass"});
    double worst_diff = 0.0, worst_summed = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const Trial& x = t[k];
      const bool pass = x.diff <= tol && x.summed <= summed_tol;
      csv.row({static_cast<long long>(k), static_cast<long long>(x.N), x.delta, x.L.real(), x.L.imag(), x.diff, tol,
               x.summed, summed_tol, std::string(pass ? "true" : "false")});
      worst_diff = std::max(worst_diff, x.diff);
      worst_summed = std::max(worst_summed, x.summed);
    }
    ctx.out.csv("locate_random.csv", csv);
    ctx.check("random.max_diff", worst_diff, "<=", tol, 0.0, std::to_string(trials) + " trials");
    ctx.check("random.summed_residual", worst_summed, "<=", summed_tol, 0.0, std::to_string(trials) + " trials");
  }
}

// ---------------------------------------------------------------------------

Json peaks_json(const std::vector<Peak>& peaks) {
  Json j = Json::array();
  for (const Peak& p : peaks)
    j.push_back({{"location", complex_json(p.location)}, {"height", p.height}, {"resolution", p.resolution}});
  return j;
}

Json solution_json(const SolutionField& s) {
  return {{"iterations", s.iterations},      {"residual_max", s.residual_norm},
          {"converged", s.converged},        {"stalled", s.stalled},
          {"monotone", s.monotone},          {"residual_history", s.residual_history},
          {"mass", s.mass},                  {"mu", s.mu},
          {"delta", s.delta},                {"theta", s.theta},
          {"resolution", s.resolution},      {"peaks", peaks_json(s.peaks)},
          {"n_r", s.grid.n_r()},             {"n_theta", s.grid.n_theta()}};
}

Json blowup_json(const BlowupData& b) {
  return {{"N", b.N},         {"delta", b.delta}, {"mu", b.mu},         {"L", complex_json(b.L)},
          {"sigma", b.sigma}, {"m", cplx_list(b.m)}, {"Q", cplx_list(b.Q)}, {"theta", b.theta},
          {"peak_heights", b.peak_heights}};
}

void run_solve(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const int N = param_int(c, "N");
  const double tau = param_real(c, "tau");
  const Coefficient h = parse_coefficient(param_string(c, "h"), "h");
  GlobalSolutionParams gp{N, param_real(c, "lambda"), param_complex(c, "xi"), 1.0};
  try {
    gp.validate();
  } catch (const Error& e) {
    config_fail(e.what());
  }
  const bool manufactured = param_bool(c, "manufactured");
  require(!manufactured || (h.prefactor().is_constant() && h.exponent().is_zero()),
          "manufactured data needs h = 1");
  const int levels = param_int(c, "refinements");
  require(levels >= 1 && levels <= 6, "refinements must be in 1..6");
  require(tau > 0.0, "tau must be positive");

  double width = param_real(c, "cluster_width");
  if (width == 0.0) width = 0.5 * bubble_width(gp);
  const double alpha = param_real(c, "cluster_alpha");
  GridSpec base;
  base.n_r = param_int(c, "n_r");
  base.n_theta = param_int(c, "n_theta");
  base.tau = tau;
  if (alpha > 0.0) {
    const std::vector<cplx> foci = roots_of(gp.xi, N);
    base.radial.push_back({std::abs(foci.front()), width, alpha});
    if (gp.xi != 0.0)
      for (cplx f : foci) base.angular.push_back({std::arg(f), width / std::abs(f), alpha});
  }

  auto trace = [gp, tau](double t) { return eval_global(gp, std::polar(tau, t)); };
  double bv = param_real(c, "boundary_value");
  if (std::isnan(bv)) {
    double s = 0.0;
    for (int k = 0; k < 512; ++k) s += trace(two_pi * k / 512);
    bv = s / 512;
  }
  SolveOptions opt;
  opt.tol = param_real(c, "tol");
  opt.max_iterations = param_int(c, "max_iterations");
  const double offset = param_real(c, "initial_offset");

  Json levels_json = Json::array();
  std::vector<double> errors;
  CsvWriter csv({"level", "n_r", "n_theta", "iterations", "residual_max", "tolerance", "sup_error", "order",
                 "order_min", "peaks", "mu", "mass"});
  for (int lev = 0; lev < levels; ++lev) {
    DiskProblem P;
    P.N = N;
    P.tau = tau;
    P.h = h;
    P.grid = base;
    P.grid.n_r = base.n_r << lev;
    P.grid.n_theta = base.n_theta << lev;
    if (manufactured) P.boundary = trace;
    else P.boundary_value = bv;
    try {
      P.validate();
    } catch (const Error& e) {
      config_fail(e.what());
    }
    const PolarGrid grid(P.grid);
    const std::vector<double> fam = sample_on_grid(grid, [&](cplx x) { return eval_global(gp, x); });
    std::vector<double> init = sample_on_grid(grid, [&](cplx x) { return eval_global(gp, x) - std::log(h.value(x)) + offset; });
    ctx.log << "  level " << lev << ": " << P.grid.n_r << " x " << P.grid.n_theta << '\n';
    const SolutionField sol = solve(P, init, opt);
    double err = NAN;
    if (manufactured) {
      err = 0.0;
      for (std::size_t k = 0; k < fam.size(); ++k) err = std::max(err, std::abs(sol.u.values()[k] - fam[k]));
      errors.push_back(err);
    }
    const double order = manufactured && lev ? std::log2(errors[errors.size() - 2] / err) : NAN;
    const std::string tag = "level" + std::to_string(lev);
    ctx.check(tag + ".residual_max", sol.residual_norm, "<=", opt.tol, 0.0,
              std::to_string(sol.iterations) + " iterations");
    if (manufactured && lev) ctx.check(tag + ".order", order, ">=", param_real(c, "order_min"));
    Json lj = solution_json(sol);
    lj["sup_error"] = err;
    lj["boundary_value"] = manufactured ? NAN : bv;
    levels_json.push_back(lj);
    csv.row({static_cast<long long>(lev), static_cast<long long>(P.grid.n_r), static_cast<long long>(P.grid.n_theta),
             static_cast<long long>(sol.iterations), sol.residual_norm, opt.tol, err, order,
             param_real(c, "order_min"), static_cast<long long>(sol.peaks.size()), sol.mu, sol.mass});
    if (param_bool(c, "write_grid")) {
      ctx.out.grid("solution_" + tag + ".bin", sol.u, N);
      ctx.out.json("solution_" + tag + ".json", lj);
    }
  }
  ctx.out.csv("solve.csv", csv);
  ctx.results["levels"] = levels_json;
  ctx.results["h"] = h.to_string();
}

// ---------------------------------------------------------------------------

void run_branch(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const int N = param_int(c, "N");
  require(N >= 0, "N must be non-negative");
  const double tau = param_real(c, "tau"), sd = param_real(c, "seed_delta");
  require(tau > 0.0 && sd > 0.0 && sd < tau, "need 0 < seed_delta < tau");
  Coefficient h = parse_coefficient(param_string(c, "h"), "h");
  const bool compensate = param_bool(c, "compensate");
  if (compensate)
    h = h * family_compensation(N, cplx(std::pow(sd, N + 1), 0.0), tau, param_int(c, "compensation_terms"));

  BranchSpec bs;
  const double m0 = param_real(c, "mu_start"), m1 = param_real(c, "mu_end"), dm = param_real(c, "mu_step");
  require(dm > 0.0 && m1 >= m0, "need mu_step > 0 and mu_end >= mu_start");
  for (int k = 0; m0 + k * dm <= m1 + 1e-9 * dm; ++k) bs.mu.push_back(m0 + k * dm);
  bs.seed_delta = sd;
  bs.resolution_limit = param_real(c, "resolution_limit");

  DiskProblem P;
  P.N = N;
  P.tau = tau;
  P.h = h;
  P.grid = branch_grid(N, tau, sd, bs.mu.back(), param_int(c, "n_r"), param_int(c, "n_theta"));
  try {
    P.validate();
  } catch (const Error& e) {
    config_fail(e.what());
  }
  const BranchResult br = continue_branch(P, bs);
  const int n1 = N + 1;
  const double exact_mass = 8.0 * pi * n1;
  double band = param_real(c, "far_field_band");
  if (band == 0.0) band = 2.0 * std::log(8.0 * n1 * n1) + 1.0;
  const double growth = param_real(c, "growth_factor");

  CsvWriter csv({"N", "delta", "mu", "quantity", "value", "bound", "ratio"});
  auto row = [&](const SolutionField& s, const std::string& q, double v, double b) {
    csv.row({static_cast<long long>(N), s.delta, s.mu, q, v, b, std::isnan(b) ? NAN : v / b});
  };
  std::vector<double> far_dev, fit_sup;
  int peak_mismatch = 0;
  Json steps = Json::array();
  for (std::size_t k = 0; k < br.steps.size(); ++k) {
    const SolutionField& s = br.steps[k];
    Json sj = solution_json(s);
    sj["seed_mu"] = br.seed_mu[k];
    sj["boundary_value"] = br.boundary_values[k];
    row(s, "seed_mu", br.seed_mu[k], NAN);
    row(s, "boundary_value", br.boundary_values[k], NAN);
    row(s, "peak_count", static_cast<double>(s.peaks.size()), n1);
    row(s, "residual_max", s.residual_norm, bs.solve.tol);
    row(s, "resolution", s.resolution, bs.resolution_limit);
    row(s, "mass", s.mass, exact_mass);
    if (static_cast<int>(s.peaks.size()) != n1) {
      ++peak_mismatch;
      far_dev.push_back(NAN);
      fit_sup.push_back(NAN);
      steps.push_back(sj);
      ctx.out.json("step_" + std::to_string(k) + ".json", sj);
      continue;
    }
    const BlowupData b = measure_blowup(s, P);
    sj["blowup"] = blowup_json(b);
    row(s, "sigma", b.sigma, param_real(c, "peak_tol"));

    // Far field of the scaled profile against -mu - 4(N+1) log|y|.
    const ScaledField v(s.u, N, s.delta, s.theta, tau);
    const double rho_max = 0.9 * tau / s.delta;
    double dev = 0.0;
    Json far = Json::array();
    if (rho_max > 2.0) {
      for (int q = 0; q < 8; ++q) {
        const double rho = 2.0 * std::pow(rho_max / 2.0, q / 7.0);
        const double dq = spherical_average(v, rho) - (-b.mu - 4.0 * n1 * std::log(rho));
        far.push_back({{"rho", rho}, {"deviation", dq}});
        dev = std::max(dev, std::abs(dq));
      }
    } else {
      dev = NAN;
    }
    sj["far_field"] = far;
    far_dev.push_back(dev);
    row(s, "far_field_deviation", dev, band);

    std::vector<cplx> samples;
    const double rs = 0.98 * tau / s.delta;
    for (int i = 1; i <= 40; ++i)
      for (int j = 0; j < 64; ++j) samples.push_back(std::polar(rs * i / 40.0, two_pi * j / 64));
    const GlobalFit fit = compare_to_global(v, samples, GlobalSolutionParams{N, b.mu, 1.0, 1.0});
    sj["global_fit"] = {{"lambda", fit.params.lambda},
                        {"xi", complex_json(fit.params.xi)},
                        {"sup_difference", fit.sup_difference},
                        {"sup_difference_outside", fit.sup_difference_outside}};
    fit_sup.push_back(fit.sup_difference);
    row(s, "fit_sup_difference", fit.sup_difference, NAN);
    steps.push_back(sj);
    ctx.out.json("step_" + std::to_string(k) + ".json", sj);
    if (param_bool(c, "write_grids")) ctx.out.grid("step_" + std::to_string(k) + ".bin", s.u, N);
  }
  ctx.out.csv("branch.csv", csv);

  const std::size_t planned = bs.mu.size(), done = br.steps.size();
  ctx.check("branch.steps_completed", static_cast<double>(done), ">=", static_cast<double>(planned), 0.0,
            br.terminated ? br.reason : std::string());
  ctx.check("branch.peak_count_mismatches", peak_mismatch, "<=", 0.0, 0.0,
            "N + 1 = " + std::to_string(n1) + " peaks expected at every step");
  if (done == 0) return;
  const SolutionField& last = br.steps.back();
  double sigma = NAN;
  if (static_cast<int>(last.peaks.size()) == n1) sigma = measure_blowup(last, P).sigma;
  ctx.check("branch.end_peak_distance", sigma, "<=", param_real(c, "peak_tol"));
  ctx.check("branch.end_mass_relative_error", std::abs(last.mass - exact_mass) / exact_mass, "<=",
            param_real(c, "mass_tol"));
  double dev_max = 0.0;
  for (double d : far_dev) dev_max = std::isnan(d) || std::isnan(dev_max) ? NAN : std::max(dev_max, d);
  ctx.check("branch.far_field_deviation", dev_max, "<=", band);
  ctx.check("branch.far_field_growth", far_dev.back() / far_dev.front(), "<=", growth);

  // Last third against first third of the fit difference.
  const std::size_t third = std::max<std::size_t>(1, fit_sup.size() / 3);
  double first = 0.0, lastm = 0.0;
  for (std::size_t k = 0; k < third; ++k) first = std::isnan(fit_sup[k]) ? NAN : std::max(first, fit_sup[k]);
  for (std::size_t k = fit_sup.size() - third; k < fit_sup.size(); ++k)
    lastm = std::isnan(fit_sup[k]) ? NAN : std::max(lastm, fit_sup[k]);
  ctx.check("branch.fit_growth", lastm / first, "<=", growth, 0.0,
            "first third " + format_double(first) + ", last third " + format_double(lastm));

  ctx.results["steps"] = steps;
  ctx.results["terminated"] = br.terminated;
  ctx.results["reason"] = br.reason;
  ctx.results["h"] = h.to_string();
  ctx.results["far_field_band"] = band;
  if (br.rejected) ctx.results["rejected"] = solution_json(*br.rejected);
}

// ---------------------------------------------------------------------------

void run_pohozaev_identity(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  GlobalSolutionParams p{param_int(c, "N"), param_real(c, "lambda"), param_complex(c, "xi"), param_real(c, "h0")};
  try {
    p.validate();
  } catch (const Error& e) {
    config_fail(e.what());
  }
  const GlobalFamilyField U(p);
  const Weight K(p.N, Coefficient(Polynomial2::constant(p.h0), Polynomial2()));
  const cplx center = param_complex(c, "center");
  const double radius = param_real(c, "radius"), tol = param_real(c, "tol");
  const int nodes = param_int(c, "nodes"), n0 = param_int(c, "min_nodes");
  require(radius > 0.0, "radius must be positive");
  require(n0 >= 4 && nodes >= n0, "need 4 <= min_nodes <= nodes");

  PohozaevQuadSpec spec;
  spec.bubble_width = std::min(1e-3, 0.1 * bubble_width(p));
  for (cplx m : local_maxima(p))
    if (std::abs(m - center) < radius) spec.bubble_centers.push_back(m);

  std::vector<int> ladder;
  for (int n = nodes; n >= n0; n /= 2) ladder.insert(ladder.begin(), n);

  CsvWriter csv({"direction", "nodes", "lhs_volume", "lhs_flux", "rhs_boundary", "residual", "tolerance",
                 "roundoff_floor"});
  Json dirs = Json::array();
  for (cplx dir : {cplx(1.0, 0.0), cplx(0.0, 1.0)}) {
    const std::string name = dir.real() == 1.0 ? "x1" : "x2";
    std::vector<double> res;
    double floor = 0.0;
    for (int n : ladder) {
      spec.boundary_nodes = n;
      const PohozaevReport r = pohozaev(U, K, center, radius, dir, spec);
      floor = 1e-12 * std::max({1.0, std::abs(r.lhs_volume), std::abs(r.lhs_flux), std::abs(r.rhs_boundary)});
      res.push_back(r.residual);
      csv.row({name, static_cast<long long>(n), r.lhs_volume, r.lhs_flux, r.rhs_boundary, r.residual, tol, floor});
    }
    ctx.check("pohozaev." + name + ".residual", res.back(), "<=", tol, 0.0,
              std::to_string(ladder.back()) + " nodes");
    // A doubling must not increase the residual unless both are at the roundoff floor.
    double worst = 0.0;
    for (std::size_t k = 1; k < res.size(); ++k) worst = std::max(worst, res[k] / std::max(res[k - 1], floor));
    if (res.size() > 1)
      ctx.check("pohozaev." + name + ".doubling_ratio", worst, "<=", 1.0, 0.0,
                "ladder " + std::to_string(ladder.front()) + ".." + std::to_string(ladder.back()));
    dirs.push_back({{"direction", name}, {"residuals", res}, {"nodes", ladder}});
  }
  ctx.out.csv("pohozaev.csv", csv);
  ctx.results["directions"] = dirs;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = std::log(x[k]), b = std::log(y[k]);
    sx += a, sy += b, sxx += a * a, sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void run_pohozaev_pair(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const int N = param_int(c, "N"), s = param_int(c, "s"), nodes = param_int(c, "nodes");
  const double lambda = param_real(c, "lambda"), radius = param_real(c, "radius");
  require(N >= 1, "pair mode needs N >= 1");
  require(s >= 0 && s <= N, "s must be in 0..N");
  require(param_complex(c, "xi") == cplx(1.0), "pair mode perturbs the family with xi = 1");
  const std::string form = param_string(c, "form");
  require(form == "stated" || form == "corrected", "form must be stated or corrected");
  cplx dir = param_complex(c, "m_direction");
  require(std::abs(dir) > 0.0, "m_direction must be nonzero");
  dir /= std::abs(dir);
  const std::vector<double> scales = param_list(c, "m_scales");
  require(scales.size() >= 2, "m_scales needs at least two values");
  for (double m : scales) require(m > 0.0, "m_scales must be positive");

  const cplx center = root_of_unity(s, N + 1);
  CsvWriter csv({"direction", "m_scale", "numeric", "closed_stated", "closed_corrected", "error_stated",
                 "error_corrected"});
  Json dirs = Json::array();
  for (cplx xi_dir : {cplx(1.0, 0.0), cplx(0.0, 1.0)}) {
    const std::string name = xi_dir.real() == 1.0 ? "x1" : "x2";
    std::vector<double> errs, errs_other;
    for (double mm : scales) {
      const cplx factor = 1.0 + mm * dir;
      const GlobalFamilyField A(GlobalSolutionParams{N, lambda, factor, 1.0});
      const GlobalFamilyField B(GlobalSolutionParams{N, lambda, 1.0, 1.0});
      const std::vector<cplx> m(static_cast<std::size_t>(N + 1), std::pow(factor, 1.0 / (N + 1)) - 1.0);
      const PairDifference pd = pair_difference(A, B, center, radius, xi_dir, nodes);
      const double cp = pair_closed_form_stated(N, s, m, xi_dir), cc = pair_closed_form_corrected(N, s, m, xi_dir);
      const double ep = std::abs(pd.total - cp) / std::abs(cp), ec = std::abs(pd.total - cc) / std::abs(cc);
      csv.row({name, mm, pd.total, cp, cc, ep, ec});
      errs.push_back(form == "stated" ? ep : ec);
      errs_other.push_back(form == "stated" ? ec : ep);
    }
    const double slope = loglog_slope(scales, errs), other = loglog_slope(scales, errs_other);
    ctx.check("pair." + name + ".slope_" + form, slope, "in", param_real(c, "slope_min"),
              param_real(c, "slope_max"), "other form slope " + format_double(other));
    dirs.push_back({{"direction", name}, {"errors", errs}, {"slope", slope}, {"other_form_slope", other}});
  }
  ctx.out.csv("pair.csv", csv);
  ctx.results["directions"] = dirs;
  ctx.results["form"] = form;
}

void run_pohozaev(Context& ctx) {
  const std::string mode = param_string(ctx.cfg, "mode");
  if (mode == "identity") run_pohozaev_identity(ctx);
  else if (mode == "pair") run_pohozaev_pair(ctx);
  else config_fail("mode must be identity or pair");
}

// ---------------------------------------------------------------------------

void run_approx(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  GlobalSolutionParams p{param_int(c, "N"), param_real(c, "lambda"), param_complex(c, "xi"), param_real(c, "h0")};
  try {
    p.validate();
  } catch (const Error& e) {
    config_fail(e.what());
  }
  const int samples = param_int(c, "samples");
  require(samples >= 1, "samples must be positive");
  std::vector<int> Ns;
  for (double v : param_list(c, "det_N")) {
    require(v >= 0 && v == std::floor(v), "det_N holds non-negative integers");
    Ns.push_back(static_cast<int>(v));
  }

  // Kernel derivatives against central differences.
  std::mt19937_64 rng(c.seed);
  const double hstep = 1e-5;
  const double Lam = std::exp(p.lambda);
  CsvWriter kcsv({"sample", "x", "y", "d_lambda", "fd_lambda", "d_xi1", "fd_xi1", "d_xi2", "fd_xi2", "rel_error",
                  "tolerance"});
  double worst = 0.0;
  const double reach = 2.0 * std::max(1.0, std::pow(std::abs(p.xi), 1.0 / (p.N + 1)));
  for (int k = 0; k < samples; ++k) {
    const cplx z = std::polar(uniform(rng, 0.05, 1.0) * reach, uniform(rng, 0.0, two_pi));
    const KernelDerivatives kd = kernel_derivatives(p, z);
    auto shifted = [&](double dl, cplx dx) {
      GlobalSolutionParams q = p;
      q.lambda += dl;
      q.xi += dx;
      return eval_global(q, z);
    };
    const double fl = (shifted(hstep, 0.0) - shifted(-hstep, 0.0)) / (2 * hstep);
    const double f1 = (shifted(0.0, hstep) - shifted(0.0, -hstep)) / (2 * hstep);
    const double f2 = (shifted(0.0, cplx(0, hstep)) - shifted(0.0, cplx(0, -hstep))) / (2 * hstep);
    const double al = Lam * kd.d_Lambda;  // derivative in lambda
    const double scale = std::max({std::abs(al), std::abs(kd.d_xi1), std::abs(kd.d_xi2)});
    const double err = std::max({std::abs(fl - al), std::abs(f1 - kd.d_xi1), std::abs(f2 - kd.d_xi2)}) / scale;
    worst = std::max(worst, err);
    kcsv.row({static_cast<long long>(k), z.real(), z.imag(), al, fl, kd.d_xi1, f1, kd.d_xi2, f2, err,
              param_real(c, "fd_tol")});
  }
  ctx.out.csv("kernel_fd.csv", kcsv);
  ctx.check("kernel.fd_rel_error", worst, "<=", param_real(c, "fd_tol"), 0.0, std::to_string(samples) + " samples");

  const double s = param_real(c, "det_s"), eps = param_real(c, "det_eps"), rtol = param_real(c, "ratio_tol");
  const double ms = param_real(c, "match_s"), mtol = param_real(c, "match_tol");
  CsvWriter dcsv({"N", "s", "eps", "det", "ratio_re", "ratio_im", "ratio_analytic", "distance", "tolerance"});
  CsvWriter mcsv({"N", "s", "eps", "iterations", "lambda_error", "xi_error", "tolerance", "max_scaled_residual"});
  for (int N : Ns) {
    GlobalSolutionParams q{N, p.lambda, p.xi, p.h0};
    const KernelMatrix km = build_kernel_matrix(q, s, eps, default_probe_angles(N));
    const double dist = std::abs(km.det_m2_ratio - 1.0);
    dcsv.row({static_cast<long long>(N), s, eps, km.det, km.det_m2_ratio.real(), km.det_m2_ratio.imag(),
              km.det_m2_ratio_analytic, dist, rtol});
    ctx.check("det_ratio.N" + std::to_string(N), dist, "<=", rtol, 0.0,
              "analytic ratio " + format_double(km.det_m2_ratio_analytic));

    const GlobalFamilyField v(q);
    GlobalSolutionParams guess = q;
    guess.lambda += 0.05;
    guess.xi += 0.01 * cplx(1.0, 1.0);
    const auto probes = three_point_probes(ms, eps, default_probe_angles(N));
    std::vector<cplx> ring;
    for (int j = 0; j < 32; ++j) ring.push_back(std::polar(ms, two_pi * j / 32));
    const ThreePointMatch am = three_point_match(v, probes, guess, ring);
    const double el = std::abs(am.params.lambda - q.lambda), ex = std::abs(am.params.xi - q.xi);
    mcsv.row({static_cast<long long>(N), ms, eps, static_cast<long long>(am.iterations), el, ex, mtol,
              am.max_scaled_residual});
    ctx.check("match.N" + std::to_string(N), std::max(el, ex), "<=", mtol, 0.0,
              std::to_string(am.iterations) + " iterations");
  }
  ctx.out.csv("det_ratio.csv", dcsv);
  ctx.out.csv("match.csv", mcsv);
}

// ---------------------------------------------------------------------------

void run_expansion(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  ExpansionSweepSpec spec;
  spec.V = parse_coefficient(param_string(c, "V"), "V");
  spec.tau = param_real(c, "tau");
  require(spec.tau > 0.0, "tau must be positive");
  spec.eps = param_list(c, "eps");
  for (double e : spec.eps) require(e > 0.0 && e < 0.1 * spec.tau, "eps must be in (0, tau/10)");
  spec.n_r = param_int(c, "n_r");
  spec.n_theta = param_int(c, "n_theta");
  const cplx g = spec.V.log_gradient(0.0);
  double oc = param_real(c, "osc_cos"), os = param_real(c, "osc_sin");
  if (std::isnan(oc)) oc = -spec.tau * g.real();
  if (std::isnan(os)) os = -spec.tau * g.imag();
  if (oc != 0.0 || os != 0.0) spec.oscillation = [oc, os](double t) { return oc * std::cos(t) + os * std::sin(t); };

  const ExpansionSweepResult r = expansion_sweep(spec);
  const double atol = param_real(c, "angle_tol_deg"), mf = param_real(c, "magnitude_factor");
  CsvWriter csv({"eps", "quantity", "value", "bound", "ratio"});
  CsvWriter pcsv({"eps", "ring_radius", "remainder"});
  Json pts = Json::array();
  double worst_angle = 0.0, worst_factor = 1.0;
  for (const RefinedExpansion& p : r.points) {
    const double e2 = p.eps * p.eps;
    const double angle = std::abs(std::arg(p.q / p.grad_V0)) * 180.0 / pi;
    const double pred = 2.0 * std::abs(p.grad_V0) / (p.V0 * p.V0);
    const double ratio = std::abs(p.q) / e2 / pred;
    const double factor = std::max(ratio, 1.0 / ratio);
    worst_angle = std::max(worst_angle, angle);
    worst_factor = std::max(worst_factor, factor);
    csv.row({p.eps, std::string("shift_angle_deg"), angle, atol, angle / atol});
    csv.row({p.eps, std::string("shift_over_eps2"), std::abs(p.q) / e2, pred, ratio});
    csv.row({p.eps, std::string("vanishing"), p.vanishing, NAN, NAN});
    csv.row({p.eps, std::string("remainder"), p.remainder, p.remainder_scale, p.remainder_ratio});
    for (const auto& [rad, rem] : p.profile) pcsv.row({p.eps, rad, rem});
    pts.push_back({{"eps", p.eps},
                   {"u0", p.u0},
                   {"x0", complex_json(p.x0)},
                   {"q", complex_json(p.q)},
                   {"q_predicted", complex_json(p.q_predicted)},
                   {"V0", p.V0},
                   {"grad_V0", complex_json(p.grad_V0)},
                   {"log_coefficient", p.log_coefficient},
                   {"vanishing", p.vanishing},
                   {"remainder", p.remainder},
                   {"remainder_scale", p.remainder_scale},
                   {"shift_angle_deg", angle},
                   {"shift_ratio", ratio}});
  }
  ctx.out.csv("expansion.csv", csv);
  ctx.out.csv("expansion_profile.csv", pcsv);
  ctx.check("expansion.points_completed", static_cast<double>(r.points.size()), ">=",
            static_cast<double>(spec.eps.size()), 0.0, r.reason);
  if (!r.points.empty()) {
    ctx.check("expansion.shift_angle_deg", worst_angle, "<=", atol);
    ctx.check("expansion.shift_magnitude_factor", worst_factor, "<=", mf);
  }
  ctx.results["points"] = pts;
  ctx.results["oscillation"] = {{"cos", oc}, {"sin", os}};
  ctx.results["terminated"] = r.terminated;
}

using Command = void (*)(Context&);

Command command_fn(const std::string& name) {
  static const std::map<std::string, Command> fns = {
      {"identities", run_identities}, {"family", run_family}, {"locate", run_locate},
      {"solve", run_solve},           {"branch", run_branch}, {"pohozaev", run_pohozaev},
      {"approx", run_approx},         {"expansion", run_expansion}};
  const auto it = fns.find(name);
  if (it == fns.end()) config_fail("unknown command '" + name + "'");
  return it->second;
}

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

RunOutcome run(const ExperimentConfig& config, std::ostream& log) {
  RunOutcome outcome;
  const fs::path dir(config.output_dir);
  try {
    fs::create_directories(dir);
  } catch (const fs::filesystem_error& e) {
    outcome.exit_code = 2;
    outcome.error_code = error_name(ErrorCode::ConfigError);
    outcome.error = std::string("output_dir not writable: ") + e.what();
    log << outcome.error << '\n';
    return outcome;
  }
  Artifacts out(dir);
  Json results = Json::object();
  Context ctx{config, log, out, outcome.checks, results};
  log << config.command << ": output in " << dir.string() << '\n';
  const auto t0 = std::chrono::steady_clock::now();
  try {
    command_fn(config.command)(ctx);
  } catch (const Error& e) {
    outcome.error = e.what();
    outcome.error_code = error_name(e.code());
    outcome.exit_code = e.code() == ErrorCode::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    outcome.error = e.what();
    outcome.error_code = "Internal";
    outcome.exit_code = 1;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::size_t failed = 0;
  Json checks = Json::array();
  for (const Check& c : outcome.checks) {
    checks.push_back(check_json(c));
    failed += c.pass ? 0 : 1;
  }
  if (outcome.exit_code == 0 && failed) outcome.exit_code = 1;

  try {
    if (outcome.exit_code != 2) {
      const Json summary = {{"command", config.command}, {"params", config.params}, {"seed", config.seed},
                            {"checks", checks},          {"results", results},      {"failed_checks", failed}};
      out.json("summary.json", summary);
      outcome.summary = summary;
    }
    if (outcome.exit_code != 0) {
      Json report = {{"command", config.command}, {"exit_code", outcome.exit_code}};
      Json bad = Json::array();
      for (const Check& c : outcome.checks)
        if (!c.pass) bad.push_back(check_json(c));
      report["failed_checks"] = bad;
      if (!outcome.error.empty()) report["error"] = {{"code", outcome.error_code}, {"message", outcome.error}};
      out.json("failure_report.json", report);
    }
    Json files = Json::array();
    std::vector<std::string> names = out.files();
    std::sort(names.begin(), names.end());
    for (const std::string& f : names)
      files.push_back({{"path", f}, {"sha256", sha256_file(dir / f)}, {"bytes", fs::file_size(dir / f)}});
    write_json(dir / "manifest.json", {{"command", config.command},
                                       {"files", files},
                                       {"generated_at", utc_timestamp()},
                                       {"runtime_seconds", seconds},
                                       {"output_dir", dir.string()}});
    outcome.files = names;
  } catch (const std::exception& e) {
    outcome.exit_code = outcome.exit_code ? outcome.exit_code : 1;
    outcome.error = std::string("writing artifacts failed: ") + e.what();
  }
  log << config.command << ": " << outcome.checks.size() - failed << '/' << outcome.checks.size()
      << " checks passed";
  if (!outcome.error.empty()) log << "; " << outcome.error_code << ": " << outcome.error;
  log << '\n';
  return outcome;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Experiments for Liouville equations with a singular source on the disk"};
  app.require_subcommand(1);
  std::string config_file, output_dir;
  long long seed = -1;
  int threads = -1;
  std::map<std::string, std::string> overrides;
  for (const std::string& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, command_summary(name));
    sub->set_help_flag("--help", "print this help");  // -h would clash with the coefficient option --h
    sub->add_option("--config", config_file, "key = value or JSON file");
    sub->add_option("--output-dir", output_dir, "artifact directory (default: out)");
    sub->add_option("--seed", seed, "seed of the randomized sweeps");
    sub->add_option("--threads", threads, "worker threads (0: hardware concurrency)");
    for (const ParamSpec& p : command_params(name)) {
      const std::string key = p.key;
      sub->add_option_function<std::string>("--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; },
                                            p.help + " [" + p.default_value + "]");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return e.get_exit_code() == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  ExperimentConfig cfg;
  try {
    Json file = Json::object();
    if (!config_file.empty()) file = load_config_file(config_file);
    std::map<std::string, std::string> all = overrides;
    if (!output_dir.empty()) all["output_dir"] = output_dir;
    if (seed >= 0) all["seed"] = std::to_string(seed);
    if (threads >= 0) all["threads"] = std::to_string(threads);
    // CLI strings for output_dir must stay strings; make_config reads it as such.
    cfg = make_config(command, file, all);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return 2;
  }
  const RunOutcome r = run(cfg, out);
  if (!r.error.empty()) err << r.error_code << ": " << r.error << '\n';
  return r.exit_code;
}

}  // namespace liouville
