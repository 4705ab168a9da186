#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "qlse/commands.hpp"
#include "qlse/config.hpp"
#include "qlse/error.hpp"

using namespace qlse;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return static_cast<ErrorKind>(0);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qlse-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> read_summary(const fs::path& p) {
  std::map<std::string, std::string> out;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

std::string first_line(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);
  return line;
}

const char* coarse_radial =
    "[problem]\nN = 3\np = 3\nm = 1\n[grid]\nR_max = 15\ndelta = 0.05\n";

}  // namespace

TEST_CASE("defaults and parsed values") {
  const RunConfig d = parse_config("");
  CHECK(d.problem.N == 3);
  CHECK(d.problem.sector == Sector::Radial);
  CHECK(d.effective_delta() == 0.05);
  const RunConfig c = parse_config(
      "[problem]\nN = 4\nM = 2\nsector = BiaxialTau\np = 2.5\n[grid]\nR_max = 15\n"
      "[paths]\nk = 2\ns = 0.5, -1\n[sweep]\np = 2.5, 3, 3.5\n[random]\nseed = 99\n");
  CHECK(c.sector_spec().sector == Sector::BiaxialTau);
  CHECK(c.effective_delta() == 0.1);
  CHECK(c.paths.s == std::vector<double>{0.5, -1.0});
  CHECK(c.sweep.p == std::vector<double>{2.5, 3.0, 3.5});
  CHECK(c.random_seed == 99);
}

TEST_CASE("configuration errors") {
  CHECK(kind_of("[problem]\nexponent = 3\n") == ErrorKind::Config);
  CHECK(kind_of("[plot]\nx = 1\n") == ErrorKind::Config);
  CHECK(kind_of("[problem]\nN = three\n") == ErrorKind::Config);
  CHECK(kind_of("[problem]\nN = 3\np = 12\n") == ErrorKind::Config);
  CHECK(kind_of("[problem]\nN = 4\nM = 1\nsector = BiaxialTau\n") == ErrorKind::Config);
  CHECK(kind_of("[problem]\nkappa = -1\n") == ErrorKind::Config);
  CHECK(kind_of("[problem]\nsemilinear = true\np = 5\n") == ErrorKind::Config);
  CHECK(kind_of("[grid]\nR_max = 10\ndelta = 0.3\n") == ErrorKind::Config);
  CHECK(kind_of("[paths]\nk = 2\ns = 1\n") == ErrorKind::Config);
  CHECK(kind_of("[oracle]\na_lo = 3\n") == ErrorKind::Config);
  CHECK(kind_of("[problem]\nnonlinearity = saturable\n") == ErrorKind::Config);
  CHECK(exit_code(ErrorKind::Config) == 2);
  CHECK(exit_code(ErrorKind::Stagnation) == 4);
  CHECK(exit_code(ErrorKind::Usage) == 5);
}

TEST_CASE("solve writes profile, summary and history") {
  const auto cfg = parse_config(coarse_radial);
  const fs::path dir = scratch("solve");
  CommandOptions opt;
  opt.out_dir = dir.string();
  std::ostringstream log;
  CHECK(cmd_solve(cfg, opt, log) == 0);
  CHECK(first_line(dir / "profile.csv") == "r,v,u");
  CHECK(first_line(dir / "history.csv") == "iteration,round,energy,grad_norm,step");
  const auto s = read_summary(dir / "summary.txt");
  CHECK(s.at("status") == "ok");
  CHECK(std::stod(s.at("beta")) > 0.0);
  CHECK(std::abs(std::stod(s.at("theta")) - 1.0) <= 1e-3);
  CHECK(std::abs(std::stod(s.at("deficit"))) <= 1e-10);
  CHECK(s.count("wall_time_s") == 0);

  // Same config, same outputs.
  const fs::path again = scratch("solve-again");
  opt.out_dir = again.string();
  CHECK(cmd_solve(cfg, opt, log) == 0);
  for (const char* f : {"profile.csv", "summary.txt", "history.csv"}) {
    CHECK(slurp(dir / f) == slurp(again / f));
  }
}

TEST_CASE("biaxial profiles have two coordinate columns") {
  const auto cfg = parse_config(
      "[problem]\nN = 4\nM = 2\nsector = BiaxialTau\n[grid]\nR_max = 15\ndelta = 0.15\n");
  const fs::path dir = scratch("biaxial");
  CommandOptions opt;
  opt.out_dir = dir.string();
  std::ostringstream log;
  CHECK(cmd_solve(cfg, opt, log) == 0);
  CHECK(first_line(dir / "profile.csv") == "r1,r2,v,u");
  CHECK(read_summary(dir / "summary.txt").at("antisymmetry_defect") == "0");
}

TEST_CASE("oracle is radial only") {
  const auto cfg = parse_config("[problem]\nN = 4\nM = 2\nsector = BiaxialTau\n[grid]\nR_max = 10\n");
  CommandOptions opt;
  opt.out_dir = scratch("oracle-biaxial").string();
  std::ostringstream log;
  try {
    cmd_oracle(cfg, opt, log);
    FAIL("expected a usage error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Usage);
  }
}

TEST_CASE("paths command reports a tuned R with min integral at least 1") {
  const auto cfg = parse_config("[paths]\nk = 3\n");
  const fs::path dir = scratch("paths");
  CommandOptions opt;
  opt.out_dir = dir.string();
  std::ostringstream log;
  CHECK(cmd_paths(cfg, opt, log) == 0);
  const auto s = read_summary(dir / "paths.txt");
  CHECK(std::stod(s.at("R")) >= 30.0);
  CHECK(std::stod(s.at("min_h_integral")) >= 1.0);
  CHECK(s.at("supports_disjoint") == "true");
  CHECK(fs::exists(dir / "path_profiles.csv"));
}

TEST_CASE("sweep over p gives one positive row per value") {
  const auto cfg = parse_config(std::string(coarse_radial) + "[sweep]\np = 2.5, 3, 3.5\n");
  const fs::path dir = scratch("sweep");
  CommandOptions opt;
  opt.out_dir = dir.string();
  std::ostringstream log;
  CHECK(cmd_sweep(cfg, opt, log) == 0);
  std::istringstream in(slurp(dir / "sweep.csv"));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<std::string> cols;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cols.push_back(c);
    CHECK(cols.at(5) == "ok");
    CHECK(std::stod(cols.at(6)) > 0.0);
  }
  CHECK(rows == 3);
}

TEST_CASE("sweep marks failing rows and continues") {
  const auto cfg = parse_config(std::string(coarse_radial) + "[sweep]\np = 3, 11.5\n");
  const fs::path dir = scratch("sweep-fail");
  CommandOptions opt;
  opt.out_dir = dir.string();
  std::ostringstream log;
  CHECK(cmd_sweep(cfg, opt, log) == 1);
  const std::string table = slurp(dir / "sweep.csv");
  CHECK(table.find(",ok,") != std::string::npos);
  CHECK(table.find(",failed,") != std::string::npos);
}

TEST_CASE("verify commands") {
  std::ostringstream log;
  CHECK(cmd_verify_g(CommandOptions{}, log) == 0);
  CommandOptions broken;
  broken.inject_fault = true;
  CHECK(cmd_verify_g(broken, log) == 1);
  CHECK(cmd_verify_h(parse_config(""), CommandOptions{}, log) == 0);
}
