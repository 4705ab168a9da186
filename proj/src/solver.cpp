#include "qlse/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

namespace qlse {

void SolveConfig::validate() const {
  if (max_iter < 1) fail(ErrorKind::Validation, "solver: max_iter must be >= 1");
  if (!(grad_tol > 0.0)) fail(ErrorKind::Validation, "solver: grad_tol must be positive");
  if (!(initial_step > 0.0)) fail(ErrorKind::Validation, "solver: initial_step must be positive");
  if (!(backtrack > 0.0 && backtrack < 1.0)) {
    fail(ErrorKind::Validation, "solver: backtrack factor must lie in (0, 1)");
  }
  if (!(precondition_shift > 0.0)) {
    fail(ErrorKind::Validation, "solver: precondition_shift must be positive");
  }
  if (max_rounds < 1) fail(ErrorKind::Validation, "solver: max_rounds must be >= 1");
  if (!(manifold_tol > 0.0)) fail(ErrorKind::Validation, "solver: manifold_tol must be positive");
}

namespace {

// Descent state on a sphere {psi = rho}.
struct Point {
  Evaluation e;
  double energy = 0.0;
  Field grad;      // W-gradient of the reduced energy
  Field dir;       // preconditioned tangential gradient p
  Field tangent;   // B p, the tangential part of grad
  double gn2 = 0.0;  // <grad, p>
};

Point make_point(const FunctionalContext& ctx, const Smoother& B, const Field& v) {
  Point pt;
  pt.e = ctx.evaluate(v, true);
  pt.energy = ctx.reduced_energy(pt.e.psi, pt.e.Phi);
  pt.grad = ctx.reduced_gradient(pt.e);
  const Grid& grid = ctx.grid();
  const Field gh = B.apply(pt.grad);
  const Field nrm = B.apply(pt.e.lap);
  const double num = grid.inner(pt.e.lap, gh);
  const double den = grid.inner(pt.e.lap, nrm);
  const double coef = den > 0.0 ? num / den : 0.0;
  pt.dir = gh - coef * nrm;
  pt.tangent = pt.grad - coef * pt.e.lap;
  pt.gn2 = std::max(grid.inner(pt.grad, pt.dir), 0.0);
  return pt;
}

double normalized_gradient(const Point& pt) { return std::sqrt(pt.gn2 / pt.e.psi); }

Field retract(const FunctionalContext& ctx, Field v, double rho) {
  const double p = ctx.psi(v);
  if (!(p > 0.0)) return v;
  v *= std::sqrt(rho / p);
  return v;
}

struct RoundResult {
  Point point;
  bool converged = false;
};

RoundResult sphere_descent(const FunctionalContext& ctx, const Smoother& B, const Field& start,
                           double rho, const SolveConfig& cfg, int round, int& iterations,
                           std::vector<HistoryRow>& history) {
  const Grid& grid = ctx.grid();
  const double noise = 1e3 * std::numeric_limits<double>::epsilon();
  Point cur = make_point(ctx, B, retract(ctx, start, rho));
  double alpha = cfg.initial_step;
  history.push_back({iterations, round, cur.energy, normalized_gradient(cur), 0.0});

  while (true) {
    if (normalized_gradient(cur) <= cfg.grad_tol) return {std::move(cur), true};
    if (iterations >= cfg.max_iter) return {std::move(cur), false};

    double a = alpha;
    Point next;
    while (true) {
      if (a < cfg.min_step) {
        std::ostringstream os;
        os << "no admissible decreasing step above " << cfg.min_step << " (round " << round
           << ", iteration " << iterations << ", gradient " << normalized_gradient(cur) << ")";
        throw StagnationError(os.str(), cur.e.v);
      }
      Field trial = retract(ctx, cur.e.v - a * cur.dir, rho);
      if (grid.sector().tau()) trial = grid.antisymmetrize(trial);
      const double trial_psi = ctx.psi(trial);
      const double trial_Phi = ctx.Phi(trial);
      if (trial_psi > 0.0 && trial_Phi > 0.0) {
        const double trial_energy = ctx.reduced_energy(trial_psi, trial_Phi);
        if (trial_energy <= cur.energy - cfg.armijo * a * cur.gn2) {
          next = make_point(ctx, B, trial);
          break;
        }
        // Once energy differences are at the rounding level the sufficient
        // decrease test is meaningless; fall back to the approximate Wolfe
        // conditions on the directional derivative (Hager and Zhang).
        if (std::abs(trial_energy - cur.energy) <= noise * std::abs(cur.energy)) {
          Point cand = make_point(ctx, B, trial);
          const double slope = grid.inner(cand.grad, cur.dir);
          if (slope >= -0.8 * cur.gn2 && slope <= 0.9 * cur.gn2) {
            next = std::move(cand);
            break;
          }
        }
      }
      a *= cfg.backtrack;
    }

    ++iterations;
    const Field s = next.e.v - cur.e.v;
    const Field y = next.tangent - cur.tangent;
    const double sBs = grid.dirichlet_energy(s) + B.shift() * grid.inner(s, s);
    const double sy = grid.inner(s, y);
    if (sy > 0.0 && std::isfinite(sBs / sy)) {
      alpha = std::clamp(sBs / sy, 1e-10, 1e10);
    } else {
      alpha = std::min(2.0 * a, 1e10);
    }
    cur = std::move(next);
    history.push_back({iterations, round, cur.energy, normalized_gradient(cur), a});
  }
}

}  // namespace

Field amplitude_correct(const FunctionalContext& ctx, const Field& v) {
  const double p = ctx.psi(v);
  if (!(p > 0.0)) fail(ErrorKind::Degenerate, "amplitude_correct: field is identically zero");
  const double ts = ctx.two_star();
  auto f = [&](double t) { return 1.0 - ts * ctx.Phi(t * v) / (t * t * p); };
  const double f1 = f(1.0);
  if (std::abs(f1) <= 1e-13) return v;
  double lo = 1.0, hi = 1.0, flo = f1, fhi = f1;
  double step = std::max(std::abs(f1), 1e-12);
  // For superquadratic H o g the ratio Phi(tv)/t^2 increases with t, so f decreases.
  for (int k = 0; k < 200 && !(flo > 0.0 && fhi < 0.0); ++k) {
    if (flo <= 0.0) {
      lo = std::max(1.0 - step, 1e-6);
      flo = f(lo);
    }
    if (fhi >= 0.0) {
      hi = 1.0 + step;
      fhi = f(hi);
    }
    step *= 2.0;
  }
  if (!(flo > 0.0 && fhi < 0.0)) {
    fail(ErrorKind::Numeric, "amplitude_correct: could not bracket the manifold along the ray");
  }
  double best_t = 1.0, best_f = std::abs(f1);
  auto tracked = [&](double t) {
    const double val = f(t);
    if (std::abs(val) < best_f) {
      best_f = std::abs(val);
      best_t = t;
    }
    return val;
  };
  std::uintmax_t max_iter = 200;
  auto tol = [](double a, double b) { return std::abs(a - b) <= 2e-16 * std::abs(a); };
  boost::math::tools::toms748_solve(tracked, lo, hi, flo, fhi, tol, max_iter);
  return best_t * v;
}

SolveReport minimize(const FunctionalContext& ctx, const Field& v0, const SolveConfig& cfg) {
  cfg.validate();
  const Grid& grid = ctx.grid();
  if (v0.size() != static_cast<Eigen::Index>(grid.size())) {
    fail(ErrorKind::Validation, "minimize: initial field does not match the grid");
  }
  Field v = v0;
  grid.apply_boundary(v);
  if (grid.sector().tau()) v = grid.antisymmetrize(v);
  {
    const double p = ctx.psi(v), F = ctx.Phi(v);
    if (!(p > 0.0)) fail(ErrorKind::Degenerate, "minimize: initial field is identically zero");
    if (!(F > 0.0)) {
      std::ostringstream os;
      os << "minimize: initial field is not admissible (int H(g(v0)) = " << F << ")";
      fail(ErrorKind::Admissibility, os.str());
    }
  }
  const Smoother B(grid, cfg.precondition_shift);
  // Thin seeds can need a dilation that pushes their support off the grid.
  // The reduced energy is defined off the manifold, so such seeds start on
  // their own sphere and the outer rounds find the manifold later.
  try {
    v = ctx.project_to_manifold(v);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Degenerate && e.kind() != ErrorKind::Numeric) throw;
  }

  SolveReport report;
  const int N = ctx.N();
  const double expo = 2.0 / (N - 2.0);
  double rho = ctx.psi(v);
  double x_prev = 0.0, m_prev = 0.0;
  bool have_prev = false;
  int iterations = 0;
  RoundResult rr;
  for (int round = 0; round < cfg.max_rounds; ++round) {
    rr = sphere_descent(ctx, B, v, rho, cfg, round, iterations, report.history);
    report.rounds = round + 1;
    v = rr.point.e.v;
    const double m = 1.0 - ctx.two_star() * rr.point.e.Phi / rr.point.e.psi;
    if (std::abs(m) <= cfg.manifold_tol || !rr.converged) break;
    const double x = std::pow(rho, expo);
    double x_new = x / (1.0 - m);
    if (have_prev && m != m_prev) {
      const double secant = x - m * (x - x_prev) / (m - m_prev);
      if (secant > 0.0 && std::isfinite(secant)) x_new = secant;
    }
    x_prev = x;
    m_prev = m;
    have_prev = true;
    const double rho_new = std::pow(x_new, 1.0 / expo);
    const double lambda = std::pow(rho_new / rho, 1.0 / (2.0 - N));
    if (std::abs(lambda - 1.0) > 1e-3) v = grid.dilate(v, lambda);
    rho = rho_new;
  }

  v = amplitude_correct(ctx, v);
  const Evaluation e = ctx.evaluate(v, true);
  report.field = v;
  report.psi = e.psi;
  report.beta = ctx.reduced_energy(e.psi, e.Phi);
  report.deficit = (e.psi - ctx.two_star() * e.Phi) / e.psi;
  report.theta = grid.inner(e.source, v) / e.psi;
  report.el_residual = euler_lagrange_residual(ctx, v, cfg.precondition_shift);
  report.quasilinear_residual = quasilinear_residual(ctx, e.gv, cfg.precondition_shift);
  report.grad_norm = normalized_gradient(rr.point);
  report.iterations = iterations;
  report.converged = rr.converged;
  return report;
}

double euler_lagrange_residual(const FunctionalContext& ctx, const Field& v, double shift) {
  const Evaluation e = ctx.evaluate(v, true);
  if (!(e.psi > 0.0)) fail(ErrorKind::Degenerate, "euler_lagrange_residual: zero field");
  const Field G = e.lap - e.source;
  const Smoother B(ctx.grid(), shift);
  const double dual = ctx.grid().inner(G, B.apply(G));
  return std::sqrt(std::max(dual, 0.0) / e.psi);
}

double quasilinear_residual(const FunctionalContext& ctx, const Field& u, double shift) {
  const Grid& grid = ctx.grid();
  const bool identity = ctx.transform().is_identity();
  Field r = Field::Zero(u.size());
  double energy = 0.0;
  grid.for_each_face([&](std::size_t i, std::size_t j, double c) {
    const double du = u[j] - u[i];
    const double mid = 0.5 * (u[i] + u[j]);
    const double a = identity ? 1.0 : 1.0 + 2.0 * mid * mid;
    const double b = identity ? 0.0 : mid * du * du;
    r[i] += c * (b - a * du);
    r[j] += c * (b + a * du);
    energy += c * a * du * du;
  });
  if (!(energy > 0.0)) return 0.0;
  const auto& f = ctx.nonlinearity();
  const Field& w = grid.weights();
  Field G(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    G[i] = grid.on_boundary(static_cast<std::size_t>(i)) ? 0.0 : r[i] / w[i] - f.h(u[i]);
  }
  if (grid.sector().tau()) G = grid.antisymmetrize(G);
  const Smoother B(grid, shift);
  const double dual = grid.inner(G, B.apply(G));
  return std::sqrt(std::max(dual, 0.0) / energy);
}

double field_distance(const Grid& grid, const Field& a, const Field& b) {
  const double na = std::sqrt(grid.inner(a, a));
  if (!(na > 0.0)) return std::numeric_limits<double>::infinity();
  const Field d1 = a - b, d2 = a + b;
  return std::min(std::sqrt(grid.inner(d1, d1)), std::sqrt(grid.inner(d2, d2))) / na;
}

MultistartResult multistart(const FunctionalContext& ctx, const std::vector<Field>& seeds,
                            const SolveConfig& cfg, const MultistartOptions& opt) {
  if (seeds.empty()) fail(ErrorKind::Usage, "multistart: empty seed list");
  MultistartResult out;
  std::vector<std::pair<SolveReport, int>> all;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    ++out.runs;
    try {
      all.emplace_back(minimize(ctx, seeds[k], cfg), static_cast<int>(k));
    } catch (const Error& err) {
      out.failures.push_back("seed " + std::to_string(k) + ": " + to_string(err.kind()) + ": " +
                             err.what());
    }
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.first.beta < b.first.beta; });
  for (auto& [rep, seed] : all) {
    bool duplicate = false;
    for (const auto& kept : out.solutions) {
      const double gap = std::abs(rep.beta - kept.beta) / std::max(kept.beta, 1e-300);
      if (gap <= opt.energy_gap ||
          field_distance(ctx.grid(), kept.field, rep.field) <= opt.field_distance) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      out.solutions.push_back(std::move(rep));
      out.seed_of_solution.push_back(seed);
    }
  }
  return out;
}

}  // namespace qlse
