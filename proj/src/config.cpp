#include "qlse/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qlse/error.hpp"

namespace qlse {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"problem", {"N", "M", "sector", "kappa", "nonlinearity", "p", "m", "semilinear"}},
      {"grid", {"R_max", "delta"}},
      {"solver", {"max_iter", "grad_tol", "max_rounds", "precondition_shift"}},
      {"seed", {"amplitude", "width"}},
      {"paths", {"k", "R", "samples", "s", "fill", "multistart"}},
      {"oracle", {"a_lo", "a_hi"}},
      {"sweep", {"p", "m", "N"}},
      {"output", {"directory"}},
      {"random", {"seed"}},
  };
  return keys;
}

template <class T>
T convert(const std::string& section, const std::string& key, const std::string& raw) {
  const std::string text = boost::trim_copy(raw);
  try {
    if constexpr (std::is_same_v<T, bool>) {
      const std::string low = boost::to_lower_copy(text);
      if (low == "true" || low == "yes" || low == "1" || low == "on") return true;
      if (low == "false" || low == "no" || low == "0" || low == "off") return false;
      throw boost::bad_lexical_cast();
    } else {
      return boost::lexical_cast<T>(text);
    }
  } catch (const boost::bad_lexical_cast&) {
    fail(ErrorKind::Config, "[" + section + "] " + key + ": cannot parse '" + text + "'");
  }
}

template <class T>
std::vector<T> convert_list(const std::string& section, const std::string& key,
                            const std::string& raw) {
  std::vector<std::string> parts;
  boost::split(parts, raw, boost::is_any_of(", \t"), boost::token_compress_on);
  std::vector<T> out;
  for (const auto& p : parts) {
    if (!boost::trim_copy(p).empty()) out.push_back(convert<T>(section, key, p));
  }
  return out;
}

template <class T>
void read(const pt::ptree& tree, const std::string& section, const std::string& key, T& target) {
  const auto sec = tree.get_child_optional(section);
  if (!sec) return;
  const auto val = sec->get_optional<std::string>(key);
  if (val) target = convert<T>(section, key, *val);
}

template <class T>
void read_list(const pt::ptree& tree, const std::string& section, const std::string& key,
               std::vector<T>& target) {
  const auto sec = tree.get_child_optional(section);
  if (!sec) return;
  const auto val = sec->get_optional<std::string>(key);
  if (val) target = convert_list<T>(section, key, *val);
}

bool is_integer_ratio(double a, double b) {
  const double q = a / b;
  return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, q);
}

}  // namespace

SectorSpec RunConfig::sector_spec() const {
  try {
    return SectorSpec::make(problem.N, problem.M, problem.sector);
  } catch (const Error& e) {
    fail(ErrorKind::Config, std::string("[problem] ") + e.what());
  }
}

double RunConfig::effective_delta() const {
  if (grid.delta > 0.0) return grid.delta;
  return problem.sector == Sector::Radial ? 0.05 : 0.1;
}

DualTransform RunConfig::transform() const {
  return problem.semilinear ? DualTransform::identity() : DualTransform();
}

BLNonlinearity RunConfig::nonlinearity() const {
  if (problem.nonlinearity != "power") {
    fail(ErrorKind::Config, "[problem] nonlinearity: unknown family '" + problem.nonlinearity +
                                "' (available: power)");
  }
  BLNonlinearity f;
  try {
    f = model_power(problem.p, problem.m, problem.N);
  } catch (const Error& e) {
    fail(ErrorKind::Config, std::string("[problem] ") + e.what());
  }
  return problem.kappa == 1.0 ? f : kappa_reduced(f, problem.kappa);
}

Grid RunConfig::make_grid(bool refine) const {
  const double d = refine ? 0.5 * effective_delta() : effective_delta();
  return Grid(sector_spec(), grid.R_max, d);
}

void RunConfig::validate() const {
  sector_spec();
  if (!(problem.kappa > 0.0)) fail(ErrorKind::Config, "[problem] kappa must be positive");
  nonlinearity();
  if (problem.semilinear) {
    const double bound = (problem.N + 2.0) / (problem.N - 2.0);
    if (!(problem.p < bound)) {
      std::ostringstream os;
      os << "[problem] semilinear runs need p < (N+2)/(N-2) = " << bound;
      fail(ErrorKind::Config, os.str());
    }
    if (problem.kappa != 1.0) fail(ErrorKind::Config, "[problem] semilinear runs ignore kappa; leave it at 1");
  }
  if (!(grid.R_max > 0.0)) fail(ErrorKind::Config, "[grid] R_max must be positive");
  if (!(effective_delta() > 0.0) || effective_delta() >= grid.R_max) {
    fail(ErrorKind::Config, "[grid] delta must lie in (0, R_max)");
  }
  if (!is_integer_ratio(grid.R_max, effective_delta())) {
    fail(ErrorKind::Config, "[grid] R_max must be an integer multiple of delta");
  }
  try {
    solver.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, std::string("[solver] ") + e.what());
  }
  if (!(seed.amplitude > 0.0) || !(seed.width > 0.0)) {
    fail(ErrorKind::Config, "[seed] amplitude and width must be positive");
  }
  if (paths.k < 0 || paths.k > 12) fail(ErrorKind::Config, "[paths] k must be in [0, 12]");
  if (paths.R != 0.0 && paths.k > 0 && paths.R < 10.0 * paths.k) {
    fail(ErrorKind::Config, "[paths] R must be at least 10k");
  }
  if (paths.samples < 100 && paths.k > 0) {
    fail(ErrorKind::Config, "[paths] samples must be at least 100");
  }
  if (!paths.s.empty() && static_cast<int>(paths.s.size()) != paths.k) {
    fail(ErrorKind::Config, "[paths] s must have k components");
  }
  if (!(paths.fill > 0.0 && paths.fill <= 1.0)) fail(ErrorKind::Config, "[paths] fill must be in (0, 1]");
  if (oracle.a_lo.has_value() != oracle.a_hi.has_value()) {
    fail(ErrorKind::Config, "[oracle] give both a_lo and a_hi or neither");
  }
  if (oracle.a_lo && !(*oracle.a_lo > 0.0 && *oracle.a_lo < *oracle.a_hi)) {
    fail(ErrorKind::Config, "[oracle] need 0 < a_lo < a_hi");
  }
  if (output_dir.empty()) fail(ErrorKind::Config, "[output] directory is empty");
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::Config, std::string("config: ") + e.message() + " (line " +
                                std::to_string(e.line()) + ")");
  }

  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) fail(ErrorKind::Config, "config: unknown section [" + section + "]");
    if (!body.data().empty()) fail(ErrorKind::Config, "config: key '" + section + "' outside a section");
    for (const auto& [key, _] : body) {
      if (!it->second.count(key)) fail(ErrorKind::Config, "config: unknown key [" + section + "] " + key);
    }
  }

  RunConfig c;
  read(tree, "problem", "N", c.problem.N);
  read(tree, "problem", "M", c.problem.M);
  std::string sector = to_string(c.problem.sector);
  read(tree, "problem", "sector", sector);
  try {
    c.problem.sector = parse_sector(boost::trim_copy(sector));
  } catch (const Error& e) {
    fail(ErrorKind::Config, std::string("[problem] sector: ") + e.what());
  }
  read(tree, "problem", "kappa", c.problem.kappa);
  read(tree, "problem", "nonlinearity", c.problem.nonlinearity);
  boost::trim(c.problem.nonlinearity);
  read(tree, "problem", "p", c.problem.p);
  read(tree, "problem", "m", c.problem.m);
  read(tree, "problem", "semilinear", c.problem.semilinear);

  read(tree, "grid", "R_max", c.grid.R_max);
  read(tree, "grid", "delta", c.grid.delta);

  read(tree, "solver", "max_iter", c.solver.max_iter);
  read(tree, "solver", "grad_tol", c.solver.grad_tol);
  read(tree, "solver", "max_rounds", c.solver.max_rounds);
  read(tree, "solver", "precondition_shift", c.solver.precondition_shift);

  read(tree, "seed", "amplitude", c.seed.amplitude);
  read(tree, "seed", "width", c.seed.width);

  read(tree, "paths", "k", c.paths.k);
  read(tree, "paths", "R", c.paths.R);
  read(tree, "paths", "samples", c.paths.samples);
  read_list(tree, "paths", "s", c.paths.s);
  read(tree, "paths", "fill", c.paths.fill);
  read(tree, "paths", "multistart", c.paths.multistart);

  double a = 0.0;
  if (tree.get_optional<std::string>("oracle.a_lo")) {
    read(tree, "oracle", "a_lo", a);
    c.oracle.a_lo = a;
  }
  if (tree.get_optional<std::string>("oracle.a_hi")) {
    read(tree, "oracle", "a_hi", a);
    c.oracle.a_hi = a;
  }

  read_list(tree, "sweep", "p", c.sweep.p);
  read_list(tree, "sweep", "m", c.sweep.m);
  read_list(tree, "sweep", "N", c.sweep.N);

  read(tree, "output", "directory", c.output_dir);
  boost::trim(c.output_dir);
  read(tree, "random", "seed", c.random_seed);

  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace qlse
