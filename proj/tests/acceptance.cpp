// Acceptance runner: `acceptance 01 05 12` runs the listed criteria (all when
// none are given) through the experiment runner and prints one PASS/FAIL line
// per criterion. Exit status is 0 only if every requested criterion passes.
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <unistd.h>

#include "liouville/config.hpp"
#include "liouville/runner.hpp"

using namespace liouville;
namespace fs = std::filesystem;

namespace {

using Overrides = std::map<std::string, std::string>;

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

fs::path work_root() {
  const fs::path p = fs::temp_directory_path() / ("liouville_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

struct Timed {
  RunOutcome outcome;
  double seconds = 0.0;
  fs::path dir;
};

Timed run_command(const std::string& tag, const std::string& command, Overrides o) {
  static int counter = 0;
  o["output_dir"] = (work_root() / (tag + "_" + std::to_string(counter++))).string();
  const ExperimentConfig cfg = make_config(command, Json::object(), o);
  std::ostringstream log;
  const auto t0 = std::chrono::steady_clock::now();
  Timed t;
  t.dir = cfg.output_dir;
  t.outcome = run(cfg, log);
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

std::string describe(const Check& c) {
  std::ostringstream s;
  s << c.name << " = " << c.value << ' ' << c.relation << ' ' << c.bound;
  if (c.relation == "in") s << ".." << c.bound_hi;
  if (!c.detail.empty()) s << " (" << c.detail << ')';
  return s.str();
}

void require_checks(Verdict& v, const RunOutcome& r, const std::vector<std::string>& names,
                    const std::string& context = {}) {
  if (!r.error.empty()) v.require(false, context + "run error: " + r.error_code + ": " + r.error);
  for (const std::string& n : names) {
    const Check* c = r.find(n);
    if (!c) {
      v.require(false, context + "missing check " + n);
      continue;
    }
    v.require(c->pass, context + describe(*c));
  }
}

void require_all(Verdict& v, const RunOutcome& r, const std::string& context = {}) {
  if (!r.error.empty()) v.require(false, context + "run error: " + r.error_code + ": " + r.error);
  if (r.checks.empty()) v.require(false, context + "no checks were produced");
  for (const Check& c : r.checks) v.require(c.pass, context + describe(c));
}

std::string fmt(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

// 1. Circulant identities to N = 100 (dense) and N = 1e5 (matrix free).
Verdict criterion_01() {
  Verdict v;
  const Timed dense = run_command("c01_dense", "identities", {{"nmax", "100"}, {"nmax_light", "0"}});
  require_checks(v, dense.outcome,
                 {"dense.root_sum", "dense.inverse_row", "dense.quadratic_form", "dense.bilinear_form",
                  "dense.inverse_on_roots", "dense.D_closed_form"});
  v.require(dense.seconds < 30.0, "dense sweep runtime " + fmt(dense.seconds) + " s < 30 s");
  const Timed light = run_command("c01_light", "identities",
                                  {{"nmax", "1"}, {"nmax_light", "100000"}, {"light_stride", "1"}});
  require_checks(v, light.outcome,
                 {"light.root_sum", "light.chain_phase_difference", "light.chain_single_phase",
                  "light.chain_double_phase", "light.chain_triple_phase", "light.double_root_sum"});
  return v;
}

// 2. Non-degeneracy constant for N = 2..100.
Verdict criterion_02() {
  Verdict v;
  const Timed t = run_command("c02", "identities", {{"nmax", "100"}, {"nmax_light", "0"}});
  require_checks(v, t.outcome, {"nondegeneracy.closed_form", "nondegeneracy.min_g"});
  return v;
}

// 3. Displacement closed form against the linear solve on 1000 random triples.
Verdict criterion_03() {
  Verdict v;
  const Timed t = run_command("c03", "locate", {{"random_trials", "1000"}, {"max_N_random", "50"}, {"seed", "2024"}});
  require_checks(v, t.outcome, {"locate.max_diff", "locate.summed_residual", "random.max_diff", "random.summed_residual"});
  return v;
}

// 4. Global family: mass, residual order, maxima.
Verdict criterion_04() {
  Verdict v;
  for (int N = 0; N <= 3; ++N) {
    const Timed t = run_command("c04_N" + std::to_string(N), "family",
                                {{"N", std::to_string(N)}, {"lambda", "20"}, {"mass_tol", "1e-5"}});
    require_checks(v, t.outcome, {"mass.relative_error", "residual.order", "maxima.distance"},
                   "N = " + std::to_string(N) + ": ");
  }
  return v;
}

// 5. Pohozaev identity on exact solutions.
Verdict criterion_05() {
  Verdict v;
  for (int N : {0, 2}) {
    const Timed t = run_command("c05_N" + std::to_string(N), "pohozaev",
                                {{"mode", "identity"}, {"N", std::to_string(N)}, {"nodes", "2048"}, {"tol", "1e-6"}});
    require_checks(v, t.outcome,
                   {"pohozaev.x1.residual", "pohozaev.x2.residual", "pohozaev.x1.doubling_ratio",
                    "pohozaev.x2.doubling_ratio"},
                   "N = " + std::to_string(N) + ": ");
  }
  return v;
}

// 6. Pair difference against the stated closed form, first-order slope.
Verdict criterion_06() {
  Verdict v;
  for (int N : {1, 2}) {
    const Timed t = run_command("c06_N" + std::to_string(N), "pohozaev",
                                {{"mode", "pair"}, {"N", std::to_string(N)}, {"form", "stated"}});
    require_checks(v, t.outcome, {"pair.x1.slope_stated", "pair.x2.slope_stated"}, "N = " + std::to_string(N) + ": ");
  }
  return v;
}

// 7. Manufactured-solution convergence, N = 0 and N = 2.
Verdict criterion_07() {
  Verdict v;
  const Timed a = run_command("c07_N0", "solve",
                              {{"N", "0"}, {"n_r", "64"}, {"n_theta", "64"}, {"cluster_width", "0.05"},
                               {"cluster_alpha", "1"}, {"initial_offset", "-0.3"}, {"refinements", "2"}});
  require_checks(v, a.outcome, {"level0.residual_max", "level1.residual_max", "level1.order"}, "N = 0: ");
  const Timed b = run_command("c07_N2", "solve",
                              {{"N", "2"}, {"lambda", "10"}, {"xi", "1"}, {"tau", "1.25"}, {"n_r", "128"},
                               {"n_theta", "192"}, {"cluster_width", "0.01"}, {"cluster_alpha", "3"},
                               {"initial_offset", "-0.3"}, {"refinements", "2"}, {"write_grid", "false"}});
  require_checks(v, b.outcome, {"level0.residual_max", "level1.residual_max", "level1.order"}, "N = 2: ");
  return v;
}

// 8 and 9 share one branch run: N = 1, h = 1, mu from 8 to 14.
Timed branch_run() {
  static std::optional<Timed> cached;
  if (!cached)
    cached = run_command("c08", "branch",
                         {{"N", "1"}, {"h", "1"}, {"compensate", "false"}, {"mu_start", "8"}, {"mu_end", "14"}});
  return *cached;
}

Verdict criterion_08() {
  Verdict v;
  const Timed t = branch_run();
  require_checks(v, t.outcome,
                 {"branch.steps_completed", "branch.peak_count_mismatches", "branch.end_peak_distance",
                  "branch.far_field_deviation", "branch.far_field_growth", "branch.end_mass_relative_error"});
  v.require(t.seconds < 600.0, "branch runtime " + fmt(t.seconds) + " s < 600 s");
  return v;
}

Verdict criterion_09() {
  Verdict v;
  require_checks(v, branch_run().outcome, {"branch.steps_completed", "branch.fit_growth"});
  return v;
}

// 10. Kernel derivatives, determinant leading term, three-point self-fit.
Verdict criterion_10() {
  Verdict v;
  const Timed t = run_command("c10", "approx", {{"samples", "100"}, {"det_s", "1000"}, {"det_N", "1,2,3"}});
  require_all(v, t.outcome);
  return v;
}

// 11. Peak shift of a regular bubble with V = 1 + 0.1 x.
Verdict criterion_11() {
  Verdict v;
  const Timed t = run_command("c11", "expansion", {{"V", "1 + 0.1*x"}, {"eps", "1e-2,5e-3,2e-3,1e-3"}});
  require_checks(v, t.outcome, {"expansion.points_completed", "expansion.shift_angle_deg", "expansion.shift_magnitude_factor"});
  return v;
}

std::map<std::string, std::string> data_files(const fs::path& dir) {
  std::map<std::string, std::string> m;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (!is_data_artifact(name)) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    m[name] = s.str();
  }
  return m;
}

// 12. Identical config and seed give byte-identical data artifacts.
Verdict criterion_12() {
  Verdict v;
  const std::vector<std::pair<std::string, Overrides>> runs = {
      {"locate", {{"random_trials", "200"}, {"seed", "7"}, {"threads", "4"}}},
      {"identities", {{"nmax", "20"}, {"nmax_light", "2000"}, {"light_stride", "37"}, {"threads", "3"}}},
      {"family", {{"N", "2"}}},
      {"pohozaev", {{"mode", "pair"}, {"N", "1"}}},
      {"solve", {{"n_r", "32"}, {"n_theta", "32"}}},
      {"approx", {{"samples", "20"}, {"seed", "3"}}},
  };
  for (const auto& [command, o] : runs) {
    const Timed a = run_command("c12_" + command + "_a", command, o);
    const Timed b = run_command("c12_" + command + "_b", command, o);
    const auto fa = data_files(a.dir), fb = data_files(b.dir);
    const bool same = !fa.empty() && fa == fb;
    v.require(same, command + ": " + std::to_string(fa.size()) + " data artifacts byte-identical across reruns");
  }
  return v;
}

const std::map<std::string, std::pair<std::string, std::function<Verdict()>>>& criteria() {
  static const std::map<std::string, std::pair<std::string, std::function<Verdict()>>> m = {
      {"01", {"circulant identity suite", criterion_01}},
      {"02", {"non-degeneracy constant", criterion_02}},
      {"03", {"displacement oracle equivalence", criterion_03}},
      {"04", {"global family checks", criterion_04}},
      {"05", {"Pohozaev residual on exact solutions", criterion_05}},
      {"06", {"pair difference first-order slope", criterion_06}},
      {"07", {"manufactured-solution convergence", criterion_07}},
      {"08", {"non-simple branch phenomenology", criterion_08}},
      {"09", {"bounded distance to the global family along the branch", criterion_09}},
      {"10", {"kernel derivatives, determinant and three-point fit", criterion_10}},
      {"11", {"regular bubble peak shift", criterion_11}},
      {"12", {"determinism", criterion_12}},
  };
  return m;
}
}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> ids;
  for (int k = 1; k < argc; ++k) ids.push_back(argv[k]);
  if (ids.empty())
    for (const auto& [id, _] : criteria()) ids.push_back(id);
  bool all = true;
  for (const std::string& id : ids) {
    const auto it = criteria().find(id);
    if (it == criteria().end()) {
      std::cerr << "unknown criterion " << id << '\n';
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const Verdict v = it->second.second();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << id << ' ' << (v.pass ? "PASS" : "FAIL") << ": " << it->second.first << " ["
              << fmt(secs) << " s]\n";
    for (const std::string& n : v.notes) std::cout << "    " << n << '\n';
    all = all && v.pass;
  }
  std::error_code ec;
  fs::remove_all(work_root(), ec);
  return all ? 0 : 1;
}
