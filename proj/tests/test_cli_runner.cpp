#include <cstdio>
#include <unistd.h>
#include <sys/wait.h>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "liouville/config.hpp"
#include "liouville/io.hpp"
#include "liouville/runner.hpp"

using namespace liouville;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("liouville_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "liouville_lab");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;  // unreachable in passing tests
}

}  // namespace

TEST_CASE("config text parsing") {
  const Json j = parse_config_text(
      "# comment\ncommand = \"locate\"\nN = 4\ndelta = 0.05 # trailing\nL = \"0.2+0.1i\"\n"
      "adjudicate = true\nname = \"a\\\"b\"\nlist = [1, 2.5, -3e-2]\n");
  CHECK(j["command"] == "locate");
  CHECK(j["N"] == 4);
  CHECK(j["delta"].get<double>() == 0.05);
  CHECK(j["adjudicate"] == true);
  CHECK(j["name"] == "a\"b");
  CHECK(j["list"].size() == 3);
  CHECK(parse_config_text("{\"N\": 3, \"delta\": 0.1}")["N"] == 3);
  for (const char* bad : {"[section]\n", "N = 1\nN = 2\n", "N 1\n", "N = \"open\n", "bad key = 1\n",
                          "{\"nested\": {\"a\": 1}}"}) {
    CAPTURE(bad);
    CHECK(code_of([&] { parse_config_text(bad); }) == ErrorCode::ConfigError);
  }
}

TEST_CASE("complex literals") {
  CHECK(parse_complex("0.2+0.1i") == cplx(0.2, 0.1));
  CHECK(parse_complex("-3") == cplx(-3.0, 0.0));
  CHECK(parse_complex("2i") == cplx(0.0, 2.0));
  CHECK(parse_complex("-i") == cplx(0.0, -1.0));
  CHECK(parse_complex("1e-3-4.5e-2i") == cplx(1e-3, -4.5e-2));
  for (const char* bad : {"", "i2", "1+2", "1+2j", "abc"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_complex(bad), Error);
  }
}

TEST_CASE("config merging") {
  const ExperimentConfig c = make_config("locate", parse_config_text("N = 5\nseed = 7\n"), {{"delta", "0.02"}});
  CHECK(param_int(c, "N") == 5);
  CHECK(param_real(c, "delta") == 0.02);
  CHECK(param_complex(c, "L") == cplx(0.2, 0.1));
  CHECK(c.seed == 7u);
  CHECK(c.output_dir == "out");
  // Command-line values win over the file.
  CHECK(param_int(make_config("locate", parse_config_text("N = 5\n"), {{"N", "6"}}), "N") == 6);
  CHECK(code_of([] { make_config("locate", Json::object(), {{"bogus", "1"}}); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { make_config("locate", parse_config_text("command = \"solve\"\n"), {}); }) ==
        ErrorCode::ConfigError);
  CHECK(code_of([] { make_config("locate", Json::object(), {{"N", "2.5"}}); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { make_config("nope", Json::object(), {}); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { make_config("locate", Json::object(), {{"seed", "-1"}}); }) == ErrorCode::ConfigError);
  for (const std::string& name : command_names()) CHECK_NOTHROW(make_config(name, Json::object(), {}));
}

TEST_CASE("csv and json formatting") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CsvWriter w({"name", "x", "k"});
  w.row({std::string("a"), 0.1, 3LL});
  CHECK(w.str() == "name,x,k\r\na,0.10000000000000001,3\r\n");
  CHECK(w.rows() == 1);
  CHECK_THROWS_AS(w.row({1.0}), Error);
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);

  const fs::path p = scratch("json") / "x.json";
  fs::create_directories(p.parent_path());
  write_json(p, Json{{"b", 1}, {"a", 2}});
  const std::string t = slurp(p);
  CHECK(t.find("\"a\"") < t.find("\"b\""));
  CHECK(t.back() == '\n');
}

TEST_CASE("binary grid round trip") {
  const PolarGrid g(GridSpec{8, 16, 1.25, {}, {}});
  std::vector<double> v(9 * 16);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = 0.5 * static_cast<double>(k) - 3.0;
  const fs::path p = scratch("grid") / "u.bin";
  fs::create_directories(p.parent_path());
  write_grid_binary(p, GridField(g, v), 2);
  CHECK(fs::file_size(p) == 64 + 8 * (9 + 16 + v.size()));
  CHECK(slurp(p).compare(0, 8, std::string(kGridMagic, 8)) == 0);
  const GridFile f = read_grid_binary(p);
  CHECK(f.version == kGridVersion);
  CHECK(f.n_r == 8);
  CHECK(f.n_theta == 16);
  CHECK(f.N == 2);
  CHECK(f.tau == 1.25);
  CHECK(f.values == v);
  CHECK(f.r == g.r());
  CHECK(f.theta == g.th());
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("exit codes and artifacts") {
  const fs::path ok = scratch("ok");
  CHECK(cli({"locate", "--output-dir", ok.string(), "--N", "3"}) == 0);
  for (const char* f : {"locate.json", "summary.json", "manifest.json"}) CHECK(fs::exists(ok / f));
  CHECK_FALSE(fs::exists(ok / "failure_report.json"));

  const Json manifest = Json::parse(slurp(ok / "manifest.json"));
  REQUIRE(manifest.contains("files"));
  for (const auto& f : manifest["files"]) {
    const fs::path p = ok / f["path"].get<std::string>();
    CHECK(f["sha256"] == sha256_file(p));
    CHECK(f["bytes"].get<std::uintmax_t>() == fs::file_size(p));
  }
  const Json summary = Json::parse(slurp(ok / "summary.json"));
  CHECK(summary["command"] == "locate");
  CHECK(summary["failed_checks"] == 0);

  // A failing check: a tolerance nothing can meet.
  const fs::path bad = scratch("fail");
  CHECK(cli({"family", "--output-dir", bad.string(), "--mass_tol", "1e-30"}) == 1);
  REQUIRE(fs::exists(bad / "failure_report.json"));
  const Json report = Json::parse(slurp(bad / "failure_report.json"));
  CHECK(report.dump().find("mass.relative_error") != std::string::npos);

  // Config errors.
  std::string err;
  CHECK(cli({"locate", "--output-dir", scratch("c1").string(), "--N", "abc"}, nullptr, &err) == 2);
  CHECK_FALSE(err.empty());
  CHECK(cli({"locate", "--nope", "1"}) == 2);
  CHECK(cli({"locate", "--config", (scratch("c2") / "missing.toml").string()}) == 2);
  CHECK(cli({}) == 2);
  std::string help;
  CHECK(cli({"solve", "--help"}, &help) == 0);
  CHECK(help.find("--n_r") != std::string::npos);
}

TEST_CASE("config file drives a run") {
  const fs::path dir = scratch("file");
  fs::create_directories(dir);
  std::ofstream(dir / "run.toml") << "command = \"identities\"\nnmax = 12\nnmax_light = 0\n";
  const int code = cli({"identities", "--config", (dir / "run.toml").string(), "--output-dir", (dir / "out").string()});
  // The small-N exceptions of the stated closed forms make this command fail its checks.
  CHECK(code == 1);
  const Json s = Json::parse(slurp(dir / "out" / "summary.json"));
  CHECK(s["params"]["nmax"] == 12);
}

TEST_CASE("reruns are byte-identical") {
  auto files = [](const fs::path& d) {
    std::map<std::string, std::string> m;
    for (const auto& e : fs::directory_iterator(d))
      if (is_data_artifact(e.path().filename().string())) m[e.path().filename().string()] = slurp(e.path());
    return m;
  };
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  for (const fs::path& d : {a, b})
    cli({"locate", "--output-dir", d.string(), "--random_trials", "50", "--seed", "11", "--threads", "3"});
  const auto fa = files(a), fb = files(b);
  CHECK(fa.size() >= 3);
  CHECK(fa == fb);
  const fs::path c = scratch("rerun_c");
  cli({"locate", "--output-dir", c.string(), "--random_trials", "50", "--seed", "12"});
  CHECK(files(c).at("locate_random.csv") != fa.at("locate_random.csv"));
}

TEST_CASE("the installed binary") {
  const fs::path dir = scratch("binary");
  const std::string cmd = std::string(LIOUVILLE_LAB_PATH) + " locate --output-dir " + dir.string() + " > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir / "manifest.json"));
  const std::string bad = std::string(LIOUVILLE_LAB_PATH) + " locate --N x > /dev/null 2>&1";
  const int status = std::system(bad.c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
