#include "qlse/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "qlse/error.hpp"
#include "qlse/nonlinearity.hpp"
#include "qlse/shooting.hpp"

namespace qlse {

namespace fs = std::filesystem;

std::string format_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Validation: return 2;
    case ErrorKind::Admissibility:
    case ErrorKind::Degenerate: return 3;
    case ErrorKind::Stagnation: return 4;
    case ErrorKind::Usage: return 5;
    case ErrorKind::Domain:
    case ErrorKind::Numeric: return 6;
    case ErrorKind::Bracket: return 7;
    case ErrorKind::Tuning: return 8;
    case ErrorKind::Io: return 9;
  }
  return 6;
}

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

fs::path output_dir(const RunConfig& cfg, const CommandOptions& opt) {
  fs::path dir = opt.out_dir ? *opt.out_dir : cfg.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

// Key = value document; insertion order is kept.
class Summary {
 public:
  void add(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, format_number(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

  void write(const fs::path& path) const {
    auto out = open_out(path);
    for (const auto& [k, v] : rows_) out << k << " = " << v << '\n';
    finish(out, path);
  }
  void print(std::ostream& log) const {
    for (const auto& [k, v] : rows_) log << k << " = " << v << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

std::vector<std::string> axis_names(const Grid& grid) {
  if (grid.dims() == 1) return {"r"};
  std::vector<std::string> names;
  for (int a = 0; a < grid.dims(); ++a) {
    names.push_back(grid.axis(a).kind == Axis::Kind::Line ? "x" + std::to_string(a + 1)
                                                          : "r" + std::to_string(a + 1));
  }
  return names;
}

void write_profile(const fs::path& path, const FunctionalContext& ctx, const Field& v) {
  const Grid& grid = ctx.grid();
  auto out = open_out(path);
  for (const auto& n : axis_names(grid)) out << n << ',';
  out << "v,u\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.coordinates(i);
    for (int a = 0; a < grid.dims(); ++a) out << format_number(x[a]) << ',';
    out << format_number(v[i]) << ',' << format_number(ctx.transform()(v[i])) << '\n';
  }
  finish(out, path);
}

void write_history(const fs::path& path, const std::vector<HistoryRow>& history) {
  auto out = open_out(path);
  out << "iteration,round,energy,grad_norm,step\n";
  for (const auto& h : history) {
    out << h.iteration << ',' << h.round << ',' << format_number(h.energy) << ','
        << format_number(h.grad_norm) << ',' << format_number(h.step) << '\n';
  }
  finish(out, path);
}

void describe_problem(Summary& s, const RunConfig& cfg, const Grid& grid) {
  s.add("sector", std::string(to_string(cfg.problem.sector)));
  s.add("N", cfg.problem.N);
  s.add("M", cfg.problem.M);
  s.add("nonlinearity", cfg.problem.nonlinearity);
  s.add("p", cfg.problem.p);
  s.add("m", cfg.problem.m);
  s.add("kappa", cfg.problem.kappa);
  s.add("semilinear", cfg.problem.semilinear);
  s.add("R_max", grid.R_max());
  s.add("delta", grid.delta());
}

void describe_solution(Summary& s, const FunctionalContext& ctx, const SolveReport& r,
                       const SolutionChecks& c) {
  s.add("status", std::string(c.ok ? "ok" : "failed"));
  s.add("beta", r.beta);
  s.add("psi", r.psi);
  s.add("theta", r.theta);
  s.add("deficit", r.deficit);
  s.add("pohozaev_residual", c.pohozaev);
  s.add("energy_identity_residual", c.energy_identity);
  s.add("duality_residual", c.duality);
  s.add("el_residual", r.el_residual);
  s.add("quasilinear_residual", r.quasilinear_residual);
  s.add("grad_norm", r.grad_norm);
  s.add("iterations", r.iterations);
  s.add("rounds", r.rounds);
  s.add("converged", r.converged);
  if (ctx.grid().sector().tau()) s.add("antisymmetry_defect", c.antisymmetry);
  s.add("max_abs_u", ctx.g_of(r.field).cwiseAbs().maxCoeff());
}

std::uint64_t effective_seed(const RunConfig& cfg, const CommandOptions& opt) {
  return opt.seed ? *opt.seed : cfg.random_seed;
}

}  // namespace

FunctionalContext make_context(const RunConfig& cfg, bool refine) {
  cfg.validate();
  return FunctionalContext(cfg.transform(), cfg.nonlinearity(), cfg.make_grid(refine));
}

Field default_seed(const FunctionalContext& ctx, double amplitude, double width) {
  const Grid& grid = ctx.grid();
  const bool tau = grid.sector().tau();
  const int d = grid.dims();
  const double w2 = width * width;
  const Field shape = grid.sample([&](const std::array<double, 3>& x) {
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) r2 += x[a] * x[a];
    const double e = std::exp(-r2 / w2);
    return tau ? (x[0] * x[0] - x[1] * x[1]) / w2 * e : e;
  });
  if (!(shape.cwiseAbs().maxCoeff() > 0.0)) {
    fail(ErrorKind::Degenerate, "default seed vanishes on the grid; increase the width");
  }
  double a = amplitude;
  for (int k = 0; k < 40; ++k, a *= 2.0) {
    Field v = a * shape;
    if (ctx.Phi(v) > 0.0) return v;
  }
  fail(ErrorKind::Admissibility, "no admissible amplitude for the default seed");
}

PathSetup make_paths(const RunConfig& cfg, std::uint64_t seed) {
  if (cfg.paths.k < 1) fail(ErrorKind::Config, "[paths] k must be set (>= 1)");
  const BLNonlinearity f = cfg.nonlinearity();
  const SectorSpec sec = cfg.sector_spec();
  PathSetup out;
  out.samples = sigma_samples(cfg.paths.k, cfg.paths.samples, seed);
  if (cfg.paths.R > 0.0) {
    out.family = PathFamily::make(cfg.paths.k, f.xi0, cfg.paths.R, sec);
  } else {
    out.tuning = tune_R(cfg.paths.k, f.xi0, sec, f, out.samples);
    out.family = PathFamily::make(cfg.paths.k, f.xi0, out.tuning->R, sec);
  }
  return out;
}

std::vector<Field> vertex_seeds(const FunctionalContext& ctx, const PathFamily& fam, double fill) {
  const double scale = fit_scale(fam, ctx.grid().R_max(), fill);
  std::vector<Field> seeds;
  for (const auto& s : sigma_samples(fam.k, 0, 0)) {
    seeds.push_back(seed_field(s, fam, ctx.grid(), ctx.transform(), scale));
  }
  return seeds;
}

SolutionChecks check_solution(const FunctionalContext& ctx, const SolveReport& r) {
  SolutionChecks c;
  const double psi = ctx.psi(r.field);
  const double Phi = ctx.Phi(r.field);
  const double J = 0.5 * psi - Phi;
  c.pohozaev = std::abs(psi - ctx.two_star() * Phi) / psi;
  c.energy_identity = std::abs(J - psi / ctx.N()) / psi;
  c.duality = std::abs(ctx.I_original(ctx.g_of(r.field)) - J) / (1.0 + std::abs(J));
  if (ctx.grid().sector().tau()) c.antisymmetry = ctx.grid().antisymmetry_defect(r.field);
  c.ok = r.converged && r.beta > 0.0 && c.pohozaev <= 1e-10 && c.energy_identity <= 1e-10 &&
         std::abs(r.theta - 1.0) <= 1e-3 && c.duality <= 1e-8 && c.antisymmetry == 0.0;
  return c;
}

int cmd_verify_g(const CommandOptions& opt, std::ostream& log) {
  const DualTransform g = opt.inject_fault ? DualTransform::faulty(1.5) : DualTransform();
  const auto sample = default_property_sample();
  const PropertyReport report = property_suite(g, sample);
  log << report.format();
  const bool ok = report.all_pass();
  log << (ok ? "verify-g: all items pass\n" : "verify-g: FAILED\n");
  return ok ? 0 : 1;
}

int cmd_verify_h(const RunConfig& cfg, const CommandOptions&, std::ostream& log) {
  const BLNonlinearity f = cfg.nonlinearity();
  const auto sample = default_condition_sample();
  const ConditionReport report = check_conditions(f, sample);
  log << "nonlinearity: " << f.name << '\n' << report.format();
  const bool ok = report.all_pass();
  log << (ok ? "verify-h: all conditions pass\n" : "verify-h: FAILED\n");
  return ok ? 0 : 1;
}

int cmd_solve(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  Stopwatch clock;
  const FunctionalContext ctx = make_context(cfg, opt.refine);
  const fs::path dir = output_dir(cfg, opt);

  SolveReport report;
  Summary summary;
  describe_problem(summary, cfg, ctx.grid());

  if (cfg.paths.k > 0 && (cfg.paths.multistart || !cfg.paths.s.empty())) {
    const PathSetup paths = make_paths(cfg, effective_seed(cfg, opt));
    summary.add("paths_k", paths.family.k);
    summary.add("paths_R", paths.family.R);
    if (!cfg.paths.s.empty()) {
      const double scale = fit_scale(paths.family, ctx.grid().R_max(), cfg.paths.fill);
      const Field v0 = seed_field(cfg.paths.s, paths.family, ctx.grid(), ctx.transform(), scale);
      report = minimize(ctx, v0, cfg.solver);
    } else {
      const auto seeds = vertex_seeds(ctx, paths.family, cfg.paths.fill);
      const MultistartResult ms = multistart(ctx, seeds, cfg.solver);
      if (ms.solutions.empty()) {
        std::ostringstream os;
        os << "multistart: every seed failed";
        for (const auto& f : ms.failures) os << "\n  " << f;
        fail(ErrorKind::Stagnation, os.str());
      }
      const fs::path table = dir / "multistart.csv";
      auto out = open_out(table);
      out << "solution,seed,status,beta,theta,deficit,el_residual,quasilinear_residual\n";
      for (std::size_t i = 0; i < ms.solutions.size(); ++i) {
        const SolveReport& r = ms.solutions[i];
        out << i << ',' << ms.seed_of_solution[i] << ','
            << (check_solution(ctx, r).ok ? "ok" : "failed") << ',' << format_number(r.beta)
            << ',' << format_number(r.theta) << ',' << format_number(r.deficit) << ','
            << format_number(r.el_residual) << ',' << format_number(r.quasilinear_residual) << '\n';
      }
      finish(out, table);
      summary.add("multistart_runs", ms.runs);
      summary.add("multistart_solutions", static_cast<int>(ms.solutions.size()));
      summary.add("multistart_failures", static_cast<int>(ms.failures.size()));
      for (const auto& f : ms.failures) log << "seed failed: " << f << '\n';
      report = ms.solutions.front();
    }
  } else {
    report = minimize(ctx, default_seed(ctx, cfg.seed.amplitude, cfg.seed.width), cfg.solver);
  }

  const SolutionChecks checks = check_solution(ctx, report);
  describe_solution(summary, ctx, report, checks);
  if (opt.timing) summary.add("wall_time_s", clock.seconds());

  write_profile(dir / "profile.csv", ctx, report.field);
  write_history(dir / "history.csv", report.history);
  summary.write(dir / "summary.txt");
  summary.print(log);
  return checks.ok ? 0 : 1;
}

int cmd_oracle(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  Stopwatch clock;
  const FunctionalContext ctx = make_context(cfg, opt.refine);
  std::optional<std::pair<double, double>> bracket;
  if (cfg.oracle.a_lo) bracket = std::make_pair(*cfg.oracle.a_lo, *cfg.oracle.a_hi);
  ShootingOptions so;
  so.sample_step = ctx.grid().delta();
  const OracleResult res = shooting_oracle(ctx, bracket, so);
  const fs::path dir = output_dir(cfg, opt);

  Summary s;
  describe_problem(s, cfg, ctx.grid());
  s.add("a_star", res.a_star);
  s.add("u0", res.u0);
  s.add("energy", res.energy);
  s.add("psi", res.psi);
  s.add("bracket_width", res.bracket_width);
  s.add("bisections", res.bisections);
  if (opt.timing) s.add("wall_time_s", clock.seconds());
  s.write(dir / "oracle.txt");

  const fs::path path = dir / "oracle_profile.csv";
  auto out = open_out(path);
  out << "r,v,u\n";
  for (std::size_t i = 0; i < res.profile.r.size(); ++i) {
    out << format_number(res.profile.r[i]) << ',' << format_number(res.profile.v[i]) << ','
        << format_number(ctx.transform()(res.profile.v[i])) << '\n';
  }
  finish(out, path);
  s.print(log);
  return 0;
}

int cmd_paths(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  cfg.validate();
  const PathSetup paths = make_paths(cfg, effective_seed(cfg, opt));
  const BLNonlinearity f = cfg.nonlinearity();
  const PathFamily& fam = paths.family;
  const double mn = min_h_integral(fam, f, paths.samples);
  const PathFamily doubled = PathFamily::make(fam.k, fam.xi0, 2.0 * fam.R, fam.sector);
  const double mn2 = min_h_integral(doubled, f, paths.samples);

  bool disjoint = true;
  for (const auto& s : paths.samples) disjoint = disjoint && supports_disjoint(s, fam);

  const fs::path dir = output_dir(cfg, opt);
  Summary s;
  s.add("sector", std::string(to_string(cfg.problem.sector)));
  s.add("N", cfg.problem.N);
  s.add("M", cfg.problem.M);
  s.add("k", fam.k);
  s.add("xi0", fam.xi0);
  s.add("R", fam.R);
  s.add("R_source", std::string(paths.tuning ? "tuned" : "override"));
  s.add("samples", static_cast<int>(paths.samples.size()));
  s.add("min_h_integral", mn);
  s.add("min_h_integral_2R", mn2);
  s.add("supports_disjoint", disjoint);
  s.write(dir / "paths.txt");

  if (paths.tuning) {
    const fs::path hist = dir / "paths_history.csv";
    auto out = open_out(hist);
    out << "R,min_h_integral\n";
    for (std::size_t i = 0; i < paths.tuning->R_history.size(); ++i) {
      out << format_number(paths.tuning->R_history[i]) << ','
          << format_number(paths.tuning->min_history[i]) << '\n';
    }
    finish(out, hist);
  }

  // Radial profiles of the vertex parameters, plot-ready.
  const auto vertices = sigma_samples(fam.k, 0, 0);
  const fs::path prof = dir / "path_profiles.csv";
  auto out = open_out(prof);
  out << "radius";
  for (std::size_t j = 0; j < vertices.size(); ++j) out << ",vertex" << j;
  out << '\n';
  const int n = 2000;
  for (int i = 0; i <= n; ++i) {
    const double radius = fam.support_radius() * i / n;
    out << format_number(radius);
    for (const auto& v : vertices) out << ',' << format_number(profile(v, radius, fam));
    out << '\n';
  }
  finish(out, prof);
  s.print(log);
  return mn >= 1.0 && disjoint ? 0 : 1;
}

int cmd_sweep(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  const std::vector<double> ps = cfg.sweep.p.empty() ? std::vector<double>{cfg.problem.p} : cfg.sweep.p;
  const std::vector<double> ms = cfg.sweep.m.empty() ? std::vector<double>{cfg.problem.m} : cfg.sweep.m;
  const std::vector<int> Ns = cfg.sweep.N.empty() ? std::vector<int>{cfg.problem.N} : cfg.sweep.N;
  const fs::path dir = output_dir(cfg, opt);

  std::ostringstream table;
  table << "N,M,sector,p,m,status,beta,theta,deficit,el_residual,quasilinear_residual,iterations,"
           "message\n";
  int failed = 0;
  for (int N : Ns) {
    for (double p : ps) {
      for (double m : ms) {
        RunConfig run = cfg;
        run.problem.N = N;
        run.problem.p = p;
        run.problem.m = m;
        table << N << ',' << run.problem.M << ',' << to_string(run.problem.sector) << ','
              << format_number(p) << ',' << format_number(m) << ',';
        try {
          const FunctionalContext ctx = make_context(run, opt.refine);
          const SolveReport r =
              minimize(ctx, default_seed(ctx, run.seed.amplitude, run.seed.width), run.solver);
          const SolutionChecks c = check_solution(ctx, r);
          if (!c.ok) ++failed;
          table << (c.ok ? "ok" : "failed") << ',' << format_number(r.beta) << ','
                << format_number(r.theta) << ',' << format_number(r.deficit) << ','
                << format_number(r.el_residual) << ',' << format_number(r.quasilinear_residual)
                << ',' << r.iterations << ",\n";
          log << "N=" << N << " p=" << p << " m=" << m << ": beta = " << format_number(r.beta)
              << (c.ok ? "" : " (failed invariants)") << '\n';
        } catch (const Error& e) {
          ++failed;
          std::string msg = e.what();
          for (char& ch : msg) {
            if (ch == ',' || ch == '\n') ch = ';';
          }
          table << "failed,,,,,,," << to_string(e.kind()) << ": " << msg << '\n';
          log << "N=" << N << " p=" << p << " m=" << m << ": " << to_string(e.kind()) << ": "
              << e.what() << '\n';
        }
      }
    }
  }
  const fs::path path = dir / "sweep.csv";
  auto out = open_out(path);
  out << table.str();
  finish(out, path);
  return failed == 0 ? 0 : 1;
}

}  // namespace qlse
