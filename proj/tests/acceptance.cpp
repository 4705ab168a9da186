// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qlse/commands.hpp"
#include "qlse/config.hpp"
#include "qlse/error.hpp"
#include "qlse/paths.hpp"
#include "qlse/shooting.hpp"
#include "qlse/solver.hpp"

using namespace qlse;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(double x, int prec = 3) {
  std::ostringstream os;
  os.precision(prec);
  os << x;
  return os.str();
}

// Every converged solution computed along the way, for criterion 3.
struct Solved {
  std::string label;
  const FunctionalContext* ctx;
  SolveReport report;
};
std::vector<Solved> all_solutions;

FunctionalContext context(int N, int M, Sector sector, double R, double delta,
                          DualTransform g = DualTransform()) {
  return FunctionalContext(g, model_power(3, 1, N), Grid(SectorSpec::make(N, M, sector), R, delta));
}

SolveReport solve_default(const FunctionalContext& ctx) {
  return minimize(ctx, default_seed(ctx, 2.0, 2.0), SolveConfig{});
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Clock clock;
  const auto sample = default_property_sample();
  const PropertyReport r = property_suite(DualTransform(), sample);
  double worst = 0.0;
  bool items_ok = r.items.size() == 13;
  for (const auto& it : r.items) {
    items_ok = items_ok && it.pass && it.worst_margin >= -1e-12;
    worst = std::min(worst, it.worst_margin);
  }
  const double t = clock.seconds();
  Outcome o;
  o.pass = items_ok && r.round_trip_worst <= 1e-10 && r.closed_form_worst <= 1e-12 && t < 5.0;
  o.detail = std::to_string(r.items.size()) + " items, worst margin " + fmt(worst) +
             ", round trip " + fmt(r.round_trip_worst) + ", closed form vs quadrature " +
             fmt(r.closed_form_worst) + ", " + fmt(t) + " s";
  return o;
}

Outcome criterion2() {
  Clock clock;
  Outcome o;
  bool pass = true;
  std::ostringstream os;
  for (bool semilinear : {false, true}) {
    static std::vector<std::unique_ptr<FunctionalContext>> keep;
    keep.push_back(std::make_unique<FunctionalContext>(
        context(3, 0, Sector::Radial, 20.0, 0.01,
                semilinear ? DualTransform::identity() : DualTransform())));
    const FunctionalContext& ctx = *keep.back();
    const SolveReport r = solve_default(ctx);
    const OracleResult ref = shooting_oracle(ctx);
    const double u0 = std::abs(ctx.transform()(r.field[0]));
    const double du = std::abs(u0 - ref.u0) / ref.u0;
    const double db = std::abs(r.beta - ref.energy) / ref.energy;
    pass = pass && r.converged && du <= 1e-2 && db <= 1e-3;
    all_solutions.push_back({semilinear ? "radial N=3 semilinear" : "radial N=3", &ctx, r});
    os << (semilinear ? "semilinear" : "quasilinear") << ": u(0) rel " << fmt(du) << ", beta rel "
       << fmt(db) << " (oracle u(0) = " << fmt(ref.u0, 10) << ", beta = " << fmt(ref.energy, 10)
       << "); ";
  }
  const double t = clock.seconds();
  o.pass = pass && t < 60.0;
  os << fmt(t) << " s";
  o.detail = os.str();
  return o;
}

Outcome criterion4() {
  Outcome o;
  bool pass = true;
  double worst = 0.0;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n(0.0, 1.0);
  for (Sector sector : {Sector::Radial, Sector::BiaxialTau}) {
    const FunctionalContext ctx = sector == Sector::Radial
                                      ? context(3, 0, sector, 12.0, 0.05)
                                      : context(4, 2, sector, 6.0, 0.2);
    const Grid& grid = ctx.grid();
    // Smooth random field: a few Gaussians with random centres and weights.
    auto smooth = [&]() {
      double c[4][3];
      for (auto& row : c) {
        row[0] = n(rng);
        row[1] = 2.0 * std::abs(n(rng));
        row[2] = 2.0 * std::abs(n(rng));
      }
      Field f = grid.sample([&](const auto& x) {
        double s = 0.0;
        for (auto& row : c) {
          const double d0 = x[0] - row[1], d1 = grid.dims() > 1 ? x[1] - row[2] : 0.0;
          s += row[0] * std::exp(-(d0 * d0 + d1 * d1) / 2.0);
        }
        return s;
      });
      if (sector != Sector::Radial) f = grid.antisymmetrize(f);
      return f;
    };
    for (int k = 0; k < 3; ++k) {
      Field v = smooth();
      double amp = 1.0;
      while (!(ctx.Phi(Field(amp * v)) > 0.0)) amp *= 2.0;
      v *= 2.0 * amp;
      const Field G = ctx.reduced_gradient(v);
      for (int j = 0; j < 5; ++j) {
        const Field d = smooth();
        const double h = 1e-4 * std::sqrt(grid.inner(v, v) / grid.inner(d, d));
        const double fd = (ctx.reduced_energy(Field(v + h * d)) - ctx.reduced_energy(Field(v - h * d))) / (2 * h);
        const double an = grid.inner(G, d);
        const double rel = std::abs(fd - an) / std::max(std::abs(an), 1e-300);
        worst = std::max(worst, rel);
        pass = pass && rel <= 1e-5;
      }
    }
  }
  o.pass = pass;
  o.detail = "30 directional derivatives, worst relative gap " + fmt(worst);
  return o;
}

Outcome criterion5() {
  Outcome o;
  std::vector<double> res;
  std::ostringstream os;
  static std::vector<std::unique_ptr<FunctionalContext>> keep;
  for (double delta : {0.04, 0.02, 0.01}) {
    keep.push_back(std::make_unique<FunctionalContext>(context(3, 0, Sector::Radial, 20.0, delta)));
    const SolveReport r = solve_default(*keep.back());
    all_solutions.push_back({"radial N=3 delta=" + fmt(delta), keep.back().get(), r});
    res.push_back(r.el_residual);
    os << "delta " << delta << ": " << fmt(r.el_residual) << "; ";
  }
  const double q1 = res[0] / res[1], q2 = res[1] / res[2];
  o.pass = q1 >= 3.0 && q1 <= 5.0 && q2 >= 3.0 && q2 <= 5.0;
  os << "ratios " << fmt(q1, 4) << ", " << fmt(q2, 4);
  o.detail = os.str();
  return o;
}

Outcome criterion6() {
  Clock clock;
  Outcome o;
  static auto radial = std::make_unique<FunctionalContext>(context(4, 2, Sector::Radial, 15.0, 0.1));
  static auto biax = std::make_unique<FunctionalContext>(context(4, 2, Sector::BiaxialTau, 15.0, 0.1));
  const SolveReport rr = solve_default(*radial);
  const SolveReport rb = solve_default(*biax);
  all_solutions.push_back({"radial N=4", radial.get(), rr});
  all_solutions.push_back({"biaxial-tau N=4", biax.get(), rb});
  const double defect = biax->grid().antisymmetry_defect(rb.field);
  const double norm = rb.field.cwiseAbs().maxCoeff();
  const double t = clock.seconds();
  o.pass = rr.converged && rb.converged && rb.beta > rr.beta && rr.beta > 0.0 && rr.beta >= 1e-3 &&
           defect == 0.0 && norm > 0.0 && t < 600.0;
  o.detail = "beta(biaxial-tau) = " + fmt(rb.beta, 8) + " > beta(radial) = " + fmt(rr.beta, 8) +
             ", antisymmetry defect " + fmt(defect) + ", max|v| " + fmt(norm) + ", " + fmt(t) + " s";
  return o;
}

Outcome criterion7() {
  Outcome o;
  bool pass = true;
  std::ostringstream os;
  const DualTransform g;
  struct Case {
    int N, M;
    Sector sector;
  };
  for (const Case c : {Case{3, 0, Sector::Radial}, Case{4, 2, Sector::BiaxialTau}}) {
    const auto f = model_power(3, 1, c.N);
    const auto sec = SectorSpec::make(c.N, c.M, c.sector);
    const Grid grid(sec, 10.0, 0.1);
    os << to_string(c.sector) << " N=" << c.N << ":";
    for (int k = 1; k <= 3; ++k) {
      const auto samples = sigma_samples(k, 100, 1234 + k);
      const TuneResult tuned = tune_R(k, f.xi0, sec, f, samples);
      const auto fam = PathFamily::make(k, f.xi0, tuned.R, sec);
      const auto fam2 = PathFamily::make(k, f.xi0, 2 * tuned.R, sec);
      const double next = min_h_integral(fam2, f, samples);
      bool odd = true, disjoint = true;
      const double scale = fit_scale(fam, grid.R_max());
      for (const auto& s : samples) {
        disjoint = disjoint && supports_disjoint(s, fam);
        std::vector<double> neg(s);
        for (double& x : neg) x = -x;
        odd = odd && seed_field(s, fam, grid, g, scale) == -seed_field(neg, fam, grid, g, scale);
      }
      const bool ok = odd && disjoint && tuned.min_integral >= 1.0 && next > tuned.min_integral;
      pass = pass && ok;
      os << " k=" << k << " R=" << tuned.R << " min " << fmt(tuned.min_integral) << " -> "
         << fmt(next) << " at 2R" << (ok ? "" : " (FAILED)") << ";";
    }
    os << ' ';
  }
  os << "oddness exact, supports disjoint";
  o.pass = pass;
  o.detail = os.str();
  return o;
}

Outcome criterion8() {
  Clock clock;
  Outcome o;
  RunConfig cfg = parse_config(
      "[problem]\nN = 4\nM = 2\nsector = BiaxialTau\np = 3\nm = 1\n[grid]\nR_max = 15\ndelta = 0.1\n"
      "[paths]\nk = 3\n");
  static auto ctx = std::make_unique<FunctionalContext>(make_context(cfg));
  const PathSetup paths = make_paths(cfg, cfg.random_seed);
  const auto seeds = vertex_seeds(*ctx, paths.family, cfg.paths.fill);
  const MultistartResult ms = multistart(*ctx, seeds, cfg.solver);
  std::ostringstream os;
  os << "R = " << paths.family.R << ", " << ms.runs << " path seeds, " << ms.solutions.size()
     << " distinct critical point(s)";
  int good = 0;
  for (const auto& r : ms.solutions) {
    all_solutions.push_back({"multistart beta=" + fmt(r.beta, 8), ctx.get(), r});
    const SolutionChecks c = check_solution(*ctx, r);
    if (c.ok) ++good;
    os << "; beta " << fmt(r.beta, 8) << (c.ok ? "" : " (fails identities)");
  }
  if (!ms.failures.empty()) os << "; " << ms.failures.size() << " seed failure(s): " << ms.failures.front();
  bool gaps = true;
  for (std::size_t i = 1; i < ms.solutions.size(); ++i) {
    gaps = gaps && (ms.solutions[i].beta - ms.solutions[i - 1].beta) / ms.solutions[i - 1].beta > 1e-3;
  }
  o.pass = ms.solutions.size() >= 2 && gaps && good == static_cast<int>(ms.solutions.size());
  os << "; " << fmt(clock.seconds()) << " s";
  o.detail = os.str();
  return o;
}

Outcome criterion3() {
  Outcome o;
  bool pass = !all_solutions.empty();
  double wM = 0.0, wJ = 0.0, wT = 0.0, wD = 0.0;
  std::string worst_label;
  for (const auto& s : all_solutions) {
    if (!s.report.converged) continue;
    const FunctionalContext& ctx = *s.ctx;
    const Field& v = s.report.field;
    const double psi = ctx.psi(v), Phi = ctx.Phi(v), J = ctx.J(v);
    const double M = std::abs(psi - ctx.two_star() * Phi) / psi;
    const double dJ = std::abs(J - psi / ctx.N()) / psi;
    const double dT = std::abs(ctx.theta(v) - 1.0);
    const double dD = std::abs(ctx.I_original(ctx.g_of(v)) - J) / (1.0 + std::abs(J));
    const bool ok = M <= 1e-10 && dJ <= 1e-10 && dT <= 1e-3 && dD <= 1e-8;
    if (!ok && worst_label.empty()) worst_label = s.label;
    pass = pass && ok;
    wM = std::max(wM, M);
    wJ = std::max(wJ, dJ);
    wT = std::max(wT, dT);
    wD = std::max(wD, dD);
  }
  o.pass = pass;
  o.detail = std::to_string(all_solutions.size()) + " solutions; worst |M|/psi " + fmt(wM) +
             ", |J - psi/N|/psi " + fmt(wJ) + ", |theta - 1| " + fmt(wT) + ", duality " + fmt(wD) +
             (worst_label.empty() ? "" : "; first failure: " + worst_label);
  return o;
}

Outcome criterion9() {
  Outcome o;
  const RunConfig cfg = parse_config(
      "[problem]\nN = 3\np = 3\nm = 1\n[grid]\nR_max = 20\ndelta = 0.05\n[random]\nseed = 7\n");
  const fs::path base = fs::temp_directory_path() / "qlse-acceptance-determinism";
  fs::remove_all(base);
  std::ostringstream log;
  for (const char* run : {"a", "b"}) {
    CommandOptions opt;
    opt.out_dir = (base / run).string();
    opt.seed = 7;
    cmd_solve(cfg, opt, log);
  }
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool same = true;
  std::size_t bytes = 0;
  for (const char* f : {"profile.csv", "summary.txt", "history.csv"}) {
    const std::string a = slurp(base / "a" / f), b = slurp(base / "b" / f);
    same = same && !a.empty() && a == b;
    bytes += a.size();
  }
  o.pass = same;
  o.detail = same ? "profile, summary and history byte-identical (" + std::to_string(bytes) + " bytes)"
                  : "outputs differ";
  return o;
}

Outcome run(const std::function<Outcome()>& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return {false, std::string(to_string(e.kind())) + " error: " + e.what()};
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  const char* names[] = {
      "",
      "dual transform property suite",
      "oracle equivalence (radial N=3, quasilinear and semilinear)",
      "manifold identities at converged solutions",
      "gradient consistency",
      "convergence order of the Euler-Lagrange residual",
      "symmetry-sector ordering (N=4, M=2)",
      "path suite",
      "multiplicity from k=3 path seeds",
      "determinism of solve",
  };
  Outcome out[10];
  // Criterion 3 audits the solutions produced by 2, 5, 6 and 8, so it runs last.
  const std::pair<int, std::function<Outcome()>> order[] = {
      {1, criterion1}, {2, criterion2}, {4, criterion4}, {5, criterion5}, {6, criterion6},
      {7, criterion7}, {8, criterion8}, {9, criterion9}, {3, criterion3},
  };
  for (const auto& [id, fn] : order) {
    Clock clock;
    out[id] = run(fn);
    std::fprintf(stderr, "[criterion %d done in %.1f s]\n", id, clock.seconds());
  }
  int failed = 0;
  for (int id = 1; id <= 9; ++id) {
    std::printf("%s criterion %d: %s -- %s\n", out[id].pass ? "PASS" : "FAIL", id, names[id],
                out[id].detail.c_str());
    if (!out[id].pass) ++failed;
  }
  std::printf("%d/9 criteria pass\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
