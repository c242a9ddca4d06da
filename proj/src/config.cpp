#include "liouville/config.hpp"

#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>

namespace liouville {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

using K = ParamKind;

const std::map<std::string, std::vector<ParamSpec>>& tables() {
  static const std::map<std::string, std::vector<ParamSpec>> t = {
      {"identities",
       {{"nmax", K::Int, "100", "largest N of the dense identity sweep"},
        {"nmax_light", K::Int, "0", "largest N of the matrix-free sweep (0 skips it)"},
        {"light_stride", K::Int, "1", "stride of the matrix-free sweep"},
        {"tol", K::Real, "1e-8", "absolute tolerance of the dense sweep"},
        {"light_tol", K::Real, "1e-6", "relative tolerance of the matrix-free sweep"},
        {"nd_tol", K::Real, "1e-10", "tolerance of the non-degeneracy closed form"}}},
      {"family",
       {{"N", K::Int, "0", "order of the singular source"},
        {"lambda", K::Real, "20", "height parameter"},
        {"xi", K::Complex, "1", "center parameter"},
        {"h0", K::Real, "1", "coefficient value at the origin"},
        {"rel_tol", K::Real, "1e-6", "requested accuracy of the mass quadrature"},
        {"mass_tol", K::Real, "1e-5", "relative tolerance on the total mass"},
        {"fd_step", K::Real, "1e-2", "coarsest step of the PDE residual check, in bubble widths"},
        {"order_min", K::Real, "1.9", "least observed order of the residual under step halving"},
        {"maxima_tol", K::Real, "1e-3", "distance of the maxima from the scaled roots of unity"}}},
      {"locate",
       {{"N", K::Int, "3", "order of the singular source"},
        {"delta", K::Real, "0.05", "radius of the first blowup point"},
        {"L", K::Complex, "0.2+0.1i", "gradient of log h at the origin"},
        {"tol", K::Real, "1e-10", "closed form against linear solve"},
        {"summed_tol", K::Real, "1e-12", "consistency residual of the summed equation"},
        {"random_trials", K::Int, "0", "additional random (N, delta, L) triples"},
        {"max_N_random", K::Int, "50", "largest N of the random triples"},
        {"adjudicate", K::Bool, "false", "run the Pohozaev sign adjudication"}}},
      {"solve",
       {{"N", K::Int, "0", "order of the singular source"},
        {"tau", K::Real, "1", "disk radius"},
        {"h", K::String, "1", "coefficient expression"},
        {"lambda", K::Real, "8", "height of the family used for data and initial guess"},
        {"xi", K::Complex, "0", "center of that family"},
        {"manufactured", K::Bool, "true", "boundary data from the family trace; report the error"},
        {"boundary_value", K::Real, "nan", "constant boundary value (nan: mean of the family trace)"},
        {"n_r", K::Int, "64", "radial nodes"},
        {"n_theta", K::Int, "64", "angular nodes"},
        {"cluster_width", K::Real, "0", "clustering width (0: half the bubble width)"},
        {"cluster_alpha", K::Real, "1", "clustering strength"},
        {"tol", K::Real, "1e-10", "Newton tolerance on the residual"},
        {"max_iterations", K::Int, "60", "Newton iteration cap"},
        {"initial_offset", K::Real, "0", "constant added to the family initial guess"},
        {"refinements", K::Int, "1", "grid levels, each doubling n_r and n_theta"},
        {"order_min", K::Real, "1.9", "least sup-error order between levels (manufactured)"},
        {"write_grid", K::Bool, "true", "write the binary grid snapshot"}}},
      {"branch",
       {{"N", K::Int, "1", "order of the singular source"},
        {"tau", K::Real, "1", "disk radius"},
        {"h", K::String, "1", "coefficient expression"},
        {"compensate", K::Bool, "false", "multiply h by the harmonic factor that makes the seed family constant on the boundary"},
        {"compensation_terms", K::Int, "16", "terms of the compensating series"},
        {"seed_delta", K::Real, "0.1", "radius of the seed peaks"},
        {"mu_start", K::Real, "8", "first scaled height"},
        {"mu_end", K::Real, "14", "last scaled height"},
        {"mu_step", K::Real, "1", "height increment"},
        {"n_r", K::Int, "160", "radial nodes"},
        {"n_theta", K::Int, "320", "angular nodes"},
        {"resolution_limit", K::Real, "0.1", "stop when spacing * sqrt(K e^u) exceeds this"},
        {"mass_tol", K::Real, "0.05", "relative mass tolerance at the branch end"},
        {"peak_tol", K::Real, "0.05", "distance of the scaled peaks from the roots of unity at the branch end"},
        {"far_field_band", K::Real, "0", "band around -mu - 4(N+1) log|y| (0: 2 log(8(N+1)^2) + 1)"},
        {"growth_factor", K::Real, "1.5", "allowed growth of the fit difference along the branch"},
        {"write_grids", K::Bool, "false", "write a binary grid per step"}}},
      {"pohozaev",
       {{"mode", K::String, "identity", "identity: exact-solution residual; pair: mixed boundary integral"},
        {"N", K::Int, "0", "order of the singular source"},
        {"lambda", K::Real, "20", "height parameter"},
        {"xi", K::Complex, "1", "center parameter"},
        {"h0", K::Real, "1", "coefficient value at the origin"},
        {"center", K::Complex, "1", "ball center (identity mode)"},
        {"radius", K::Real, "0.5", "ball radius"},
        {"nodes", K::Int, "2048", "boundary nodes"},
        {"tol", K::Real, "1e-6", "residual tolerance (identity mode)"},
        {"min_nodes", K::Int, "16", "first node count of the doubling ladder (identity mode)"},
        {"s", K::Int, "1", "index of the ball's blowup point (pair mode)"},
        {"m_scales", K::RealList, "1e-2,5e-3,2.5e-3", "perturbation sizes (pair mode)"},
        {"m_direction", K::Complex, "0.6+0.8i", "unit direction of the xi perturbation (pair mode)"},
        {"form", K::String, "stated", "closed form checked in pair mode: stated or corrected"},
        {"slope_min", K::Real, "0.9", "lower slope bound (pair mode)"},
        {"slope_max", K::Real, "1.1", "upper slope bound (pair mode)"}}},
      {"approx",
       {{"N", K::Int, "1", "order of the singular source"},
        {"lambda", K::Real, "20", "height parameter"},
        {"xi", K::Complex, "1", "center parameter"},
        {"h0", K::Real, "1", "coefficient value at the origin"},
        {"samples", K::Int, "100", "random points of the derivative check"},
        {"fd_tol", K::Real, "1e-6", "relative tolerance of the derivative check"},
        {"det_s", K::Real, "1000", "probe scale of the determinant check"},
        {"det_eps", K::Real, "0.1", "probe exponent step"},
        {"det_N", K::RealList, "1,2,3", "orders of the determinant check"},
        {"ratio_tol", K::Real, "0.2", "allowed distance of the determinant ratio from 1"},
        {"match_s", K::Real, "10", "probe scale of the three-point matching"},
        {"match_tol", K::Real, "1e-9", "parameter recovery tolerance"}}},
      {"expansion",
       {{"V", K::String, "1 + 0.1*x", "coefficient expression, V(0) = 1"},
        {"tau", K::Real, "1", "disk radius"},
        {"eps", K::RealList, "1e-2,5e-3,2e-3,1e-3", "bubble scales"},
        {"osc_cos", K::Real, "nan", "cos coefficient of the boundary oscillation (nan: -tau d1 log V(0))"},
        {"osc_sin", K::Real, "nan", "sin coefficient of the boundary oscillation (nan: -tau d2 log V(0))"},
        {"n_r", K::Int, "320", "radial nodes"},
        {"n_theta", K::Int, "128", "angular nodes"},
        {"angle_tol_deg", K::Real, "15", "direction tolerance of the peak shift"},
        {"magnitude_factor", K::Real, "2", "magnitude tolerance factor of the peak shift"}}},
  };
  return t;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == s.size();
}

// One scalar token of the key/value format.
Json parse_scalar(const std::string& tok, int line) {
  const std::string loc = " (line " + std::to_string(line) + ")";
  if (tok.empty()) fail("empty value" + loc);
  if (tok.front() == '"') {
    if (tok.size() < 2 || tok.back() != '"') fail("unterminated string" + loc);
    std::string out;
    for (std::size_t k = 1; k + 1 < tok.size(); ++k) {
      char c = tok[k];
      if (c == '\\') {
        if (k + 2 >= tok.size()) fail("bad escape" + loc);
        const char e = tok[++k];
        if (e == 'n') c = '\n';
        else if (e == 't') c = '\t';
        else if (e == '"' || e == '\\') c = e;
        else fail("bad escape" + loc);
      } else if (c == '"') {
        fail("stray quote" + loc);
      }
      out += c;
    }
    return out;
  }
  if (tok == "true") return true;
  if (tok == "false") return false;
  double v;
  if (!parse_number(tok, v)) fail("cannot parse value '" + tok + "'" + loc);
  const bool integral = tok.find_first_of(".eEnN") == std::string::npos;
  if (integral) return static_cast<long long>(std::stoll(tok));
  return v;
}

// Splits an array body on commas outside strings.
std::vector<std::string> split_items(const std::string& body) {
  std::vector<std::string> items;
  std::string cur;
  bool in_str = false;
  for (std::size_t k = 0; k < body.size(); ++k) {
    const char c = body[k];
    if (c == '"' && (k == 0 || body[k - 1] != '\\')) in_str = !in_str;
    if (c == ',' && !in_str) {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !items.empty()) items.push_back(trim(cur));
  return items;
}

std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    if (line[k] == '"' && (k == 0 || line[k - 1] != '\\')) in_str = !in_str;
    if (line[k] == '#' && !in_str) return line.substr(0, k);
  }
  return line;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"identities", "family", "locate",  "solve",
                                                 "branch",     "pohozaev", "approx", "expansion"};
  return names;
}

std::string command_summary(const std::string& command) {
  static const std::map<std::string, std::string> text = {
      {"identities", "circulant matrix identities, sum chain and non-degeneracy"},
      {"family", "mass, maxima and PDE residual of the global family"},
      {"locate", "predicted blowup displacements against a linear solve"},
      {"solve", "Newton solve of the Dirichlet problem on a polar grid"},
      {"branch", "continuation of a non-simple blowup branch in the height"},
      {"pohozaev", "Pohozaev identity residuals and the mixed boundary integral"},
      {"approx", "kernel derivatives, probe determinants and three-point matching"},
      {"expansion", "peak shift of regular bubbles under a variable coefficient"}};
  const auto it = text.find(command);
  if (it == text.end()) fail("unknown command '" + command + "'");
  return it->second;
}

const std::vector<ParamSpec>& command_params(const std::string& command) {
  const auto& t = tables();
  const auto it = t.find(command);
  if (it == t.end()) fail("unknown command '" + command + "'");
  return it->second;
}

Json parse_config_text(const std::string& text) {
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    Json j;
    try {
      j = Json::parse(body);
    } catch (const Json::exception& e) {
      fail(std::string("invalid JSON: ") + e.what());
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!valid_key(it.key())) fail("invalid key '" + it.key() + "'");
      if (it->is_object()) fail("nested objects are not supported ('" + it.key() + "')");
      if (it->is_array())
        for (const Json& e : *it)
          if (!e.is_number() && !e.is_string()) fail("arrays hold numbers or strings ('" + it.key() + "')");
      if (it->is_null()) fail("null value for '" + it.key() + "'");
    }
    return j;
  }
  Json out = Json::object();
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    const std::string loc = " (line " + std::to_string(line) + ")";
    if (s.front() == '[') fail("sections are not supported" + loc);
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail("expected key = value" + loc);
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (!valid_key(key)) fail("invalid key '" + key + "'" + loc);
    if (out.contains(key)) fail("duplicate key '" + key + "'" + loc);
    if (!val.empty() && val.front() == '[') {
      if (val.back() != ']') fail("arrays must close on the same line" + loc);
      Json arr = Json::array();
      for (const std::string& item : split_items(val.substr(1, val.size() - 2))) {
        const Json v = parse_scalar(item, line);
        if (v.is_boolean()) fail("arrays hold numbers or strings" + loc);
        arr.push_back(v);
      }
      out[key] = arr;
    } else {
      out[key] = parse_scalar(val, line);
    }
  }
  return out;
}

Json load_config_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

cplx parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) fail("empty complex value");
  double v;
  if (s.back() != 'i') {
    if (!parse_number(s, v)) fail("cannot parse complex '" + text + "'");
    return {v, 0.0};
  }
  const std::string body = s.substr(0, s.size() - 1);
  // Split at the last sign that does not follow an exponent marker.
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_of = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    double x;
    if (!parse_number(t, x)) fail("cannot parse complex '" + text + "'");
    return x;
  };
  if (split == std::string::npos) return {0.0, imag_of(body)};
  double re;
  if (!parse_number(body.substr(0, split), re)) fail("cannot parse complex '" + text + "'");
  return {re, imag_of(body.substr(split))};
}

Json complex_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json convert_param(const ParamSpec& spec, const Json& raw) {
  const std::string where = "parameter '" + spec.key + "'";
  auto text_number = [&](const Json& j) -> double {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
      double v;
      if (parse_number(trim(j.get<std::string>()), v)) return v;
    }
    fail(where + ": expected a number");
  };
  switch (spec.kind) {
    case K::Int: {
      const double v = text_number(raw);
      if (!(std::abs(v) < 9e15) || v != std::floor(v)) fail(where + ": expected an integer");
      return static_cast<long long>(v);
    }
    case K::Real:
      return text_number(raw);
    case K::Complex: {
      if (raw.is_number()) return complex_json({raw.get<double>(), 0.0});
      if (raw.is_string()) return complex_json(parse_complex(raw.get<std::string>()));
      if (raw.is_array() && raw.size() == 2 && raw[0].is_number() && raw[1].is_number())
        return complex_json({raw[0].get<double>(), raw[1].get<double>()});
      fail(where + ": expected a complex number");
    }
    case K::String:
      if (!raw.is_string()) fail(where + ": expected a string");
      return raw;
    case K::Bool: {
      if (raw.is_boolean()) return raw;
      if (raw.is_string()) {
        const std::string s = trim(raw.get<std::string>());
        if (s == "true" || s == "1") return true;
        if (s == "false" || s == "0") return false;
      }
      fail(where + ": expected true or false");
    }
    case K::RealList: {
      Json out = Json::array();
      if (raw.is_array()) {
        for (const Json& e : raw) out.push_back(text_number(e));
      } else if (raw.is_string()) {
        for (const std::string& item : split_items(raw.get<std::string>())) out.push_back(text_number(Json(item)));
      } else if (raw.is_number()) {
        out.push_back(raw.get<double>());
      } else {
        fail(where + ": expected a list of numbers");
      }
      if (out.empty()) fail(where + ": empty list");
      return out;
    }
  }
  fail(where + ": unsupported kind");
}

ExperimentConfig make_config(const std::string& command, const Json& file_values,
                             const std::map<std::string, std::string>& overrides) {
  ExperimentConfig c;
  c.command = command;
  if (file_values.contains("command")) {
    const Json& fc = file_values["command"];
    if (!fc.is_string()) fail("'command' must be a string");
    if (command.empty()) c.command = fc.get<std::string>();
    else if (fc.get<std::string>() != command)
      fail("config file is for '" + fc.get<std::string>() + "', not '" + command + "'");
  }
  if (c.command.empty()) fail("no command given");
  const std::vector<ParamSpec>& specs = command_params(c.command);

  Json raw = Json::object();
  for (auto it = file_values.begin(); it != file_values.end(); ++it) {
    if (it.key() == "command") continue;
    raw[it.key()] = *it;
  }
  for (const auto& [k, v] : overrides) raw[k] = v;

  if (raw.contains("output_dir")) {
    if (!raw["output_dir"].is_string()) fail("'output_dir' must be a string");
    c.output_dir = raw["output_dir"].get<std::string>();
    raw.erase("output_dir");
  }
  if (raw.contains("seed")) {
    const ParamSpec seed_spec{"seed", K::Int, "0", ""};
    const long long s = convert_param(seed_spec, raw["seed"]).get<long long>();
    if (s < 0) fail("'seed' must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
    raw.erase("seed");
  }
  if (raw.contains("threads")) {
    const ParamSpec threads_spec{"threads", K::Int, "0", ""};
    const long long t = convert_param(threads_spec, raw["threads"]).get<long long>();
    if (t < 0 || t > 1024) fail("'threads' must be in 0..1024");
    c.threads = static_cast<int>(t);
    raw.erase("threads");
  }
  for (auto it = raw.begin(); it != raw.end(); ++it) {
    bool known = false;
    for (const ParamSpec& p : specs) known = known || p.key == it.key();
    if (!known) fail("unknown key '" + it.key() + "' for command '" + c.command + "'");
  }
  for (const ParamSpec& p : specs)
    c.params[p.key] = convert_param(p, raw.contains(p.key) ? raw[p.key] : Json(p.default_value));
  return c;
}

namespace {
const Json& need(const ExperimentConfig& c, const std::string& key) {
  if (!c.params.contains(key)) fail("missing parameter '" + key + "'");
  return c.params[key];
}
}  // namespace

int param_int(const ExperimentConfig& c, const std::string& key) {
  const long long v = need(c, key).get<long long>();
  if (v > std::numeric_limits<int>::max() || v < std::numeric_limits<int>::min())
    fail("parameter '" + key + "' out of range");
  return static_cast<int>(v);
}
double param_real(const ExperimentConfig& c, const std::string& key) { return need(c, key).get<double>(); }
cplx param_complex(const ExperimentConfig& c, const std::string& key) {
  const Json& j = need(c, key);
  return {j[0].get<double>(), j[1].get<double>()};
}
std::string param_string(const ExperimentConfig& c, const std::string& key) {
  return need(c, key).get<std::string>();
}
bool param_bool(const ExperimentConfig& c, const std::string& key) { return need(c, key).get<bool>(); }
std::vector<double> param_list(const ExperimentConfig& c, const std::string& key) {
  return need(c, key).get<std::vector<double>>();
}

}  // namespace liouville
