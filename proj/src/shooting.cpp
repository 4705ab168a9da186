#include "qlse/shooting.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

#include "qlse/error.hpp"

namespace qlse {

const char* to_string(ShotOutcome o) {
  switch (o) {
    case ShotOutcome::Undershoot: return "undershoot";
    case ShotOutcome::Overshoot: return "overshoot";
    case ShotOutcome::Undecided: return "undecided";
  }
  return "unknown";
}

namespace {

using State = std::array<double, 4>;  // v, v', int |v'|^2, int H(g(v))

}  // namespace

Shot shoot(const DualTransform& g, const BLNonlinearity& f, int N, double a,
           const ShootingOptions& opt) {
  namespace odeint = boost::numeric::odeint;
  const double omega = sphere_measure(N);
  auto source = [&](double v) {
    const double gv = g(v);
    return f.h(gv) * g.derivative_from_value(gv);
  };
  auto rhs = [&](const State& y, State& dy, double r) {
    const double w = omega * std::pow(r, N - 1);
    dy[0] = y[1];
    dy[1] = -source(y[0]) - (N - 1) / r * y[1];
    dy[2] = w * y[1] * y[1];
    dy[3] = w * f.H(g(y[0]));
  };

  Shot shot;
  shot.a = a;
  const double r0 = opt.r_start;
  const double fa = source(a);
  State y{a - fa * r0 * r0 / (2.0 * N), -fa * r0 / N,
          omega * fa * fa * std::pow(r0, N + 2) / (N * N * (N + 2.0)),
          omega * f.H(g(a)) * std::pow(r0, N) / N};

  auto stepper = odeint::make_dense_output(opt.ode_tol, opt.ode_tol,
                                           odeint::runge_kutta_dopri5<State>());
  stepper.initialize(y, r0, 1e-3);
  double next_sample = 0.0;
  shot.r.push_back(0.0);
  shot.v.push_back(a);
  next_sample = opt.sample_step;
  State prev = y;
  double r_prev = r0;
  while (true) {
    const auto span = stepper.do_step(rhs);
    const double r = span.second;
    State cur = stepper.current_state();
    while (next_sample <= std::min(r, opt.r_max)) {
      State s;
      stepper.calc_state(next_sample, s);
      shot.r.push_back(next_sample);
      shot.v.push_back(s[0]);
      next_sample += opt.sample_step;
    }
    if (!std::isfinite(cur[0]) || !std::isfinite(cur[1])) {
      fail(ErrorKind::Numeric, "shoot: trajectory became non-finite");
    }
    if (cur[0] < 0.0) {
      shot.outcome = ShotOutcome::Overshoot;
      shot.r_stop = r_prev;
      shot.psi = prev[2];
      shot.Phi = prev[3];
      return shot;
    }
    if (cur[1] > 0.0) {
      shot.outcome = ShotOutcome::Undershoot;
      shot.r_stop = r;
      shot.psi = cur[2];
      shot.Phi = cur[3];
      return shot;
    }
    if (r >= opt.r_max) {
      State s;
      stepper.calc_state(opt.r_max, s);
      shot.outcome = ShotOutcome::Undecided;
      shot.r_stop = opt.r_max;
      shot.psi = s[2];
      shot.Phi = s[3];
      return shot;
    }
    prev = cur;
    r_prev = r;
  }
}

namespace {

bool undershoots(const Shot& s) { return s.outcome != ShotOutcome::Overshoot; }

// First positive zero of s -> H(g(s)), the threshold below which every shot
// undershoots.
double first_zero_of_H(const DualTransform& g, const BLNonlinearity& f) {
  auto F = [&](double s) { return f.H(g(s)); };
  double hi = 1e-3;
  while (F(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e12) fail(ErrorKind::Bracket, "shooting: H(g(s)) never becomes positive");
  }
  double lo = hi / 2.0;
  while (lo > 1e-12 && F(lo) > 0.0) lo /= 2.0;
  std::uintmax_t it = 200;
  auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-15 * std::abs(a); };
  const auto root = boost::math::tools::toms748_solve(F, lo, hi, tol, it);
  return root.second;
}

}  // namespace

OracleResult shooting_oracle(const DualTransform& g, const BLNonlinearity& f, int N,
                             std::optional<std::pair<double, double>> bracket,
                             const ShootingOptions& opt) {
  double lo, hi;
  Shot s_lo, s_hi;
  if (bracket) {
    lo = bracket->first;
    hi = bracket->second;
    if (!(lo > 0.0 && hi > lo)) fail(ErrorKind::Bracket, "shooting: bracket must satisfy 0 < a_lo < a_hi");
    s_lo = shoot(g, f, N, lo, opt);
    s_hi = shoot(g, f, N, hi, opt);
    if (undershoots(s_lo) == undershoots(s_hi)) {
      std::ostringstream os;
      os << "shooting: bracket [" << lo << ", " << hi << "] is invalid, both ends "
         << to_string(s_lo.outcome) << " / " << to_string(s_hi.outcome);
      fail(ErrorKind::Bracket, os.str());
    }
    if (!undershoots(s_lo)) {
      std::swap(lo, hi);
      std::swap(s_lo, s_hi);
    }
  } else {
    const double zeta = first_zero_of_H(g, f);
    lo = zeta * (1.0 + 1e-6);
    s_lo = shoot(g, f, N, lo, opt);
    if (!undershoots(s_lo)) fail(ErrorKind::Bracket, "shooting: no undershoot above the zero of H");
    hi = 2.0 * zeta;
    s_hi = shoot(g, f, N, hi, opt);
    for (int k = 0; k < 60 && undershoots(s_hi); ++k) {
      lo = hi;
      s_lo = s_hi;
      hi *= 2.0;
      s_hi = shoot(g, f, N, hi, opt);
    }
    if (undershoots(s_hi)) fail(ErrorKind::Bracket, "shooting: could not find an overshoot");
  }

  OracleResult out;
  int it = 0;
  const double eps = std::numeric_limits<double>::epsilon();
  while (std::abs(hi - lo) > 2.0 * eps * std::max(std::abs(lo), std::abs(hi)) &&
         it < opt.max_bisections) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    Shot s = shoot(g, f, N, mid, opt);
    if (undershoots(s)) {
      lo = mid;
      s_lo = std::move(s);
    } else {
      hi = mid;
      s_hi = std::move(s);
    }
    ++it;
  }
  out.bisections = it;
  out.bracket_width = std::abs(hi - lo);
  if (out.bracket_width > 1e-10 * std::abs(lo)) {
    fail(ErrorKind::Numeric, "shooting: bisection did not reach 1e-10");
  }
  out.a_star = 0.5 * (lo + hi);
  out.u0 = g(out.a_star);
  out.energy = s_lo.energy();
  out.psi = s_lo.psi;
  out.profile = std::move(s_lo);
  return out;
}

OracleResult shooting_oracle(const FunctionalContext& ctx,
                             std::optional<std::pair<double, double>> bracket,
                             ShootingOptions opt) {
  if (ctx.grid().sector().sector != Sector::Radial) {
    fail(ErrorKind::Usage, "shooting oracle is only defined for the radial sector");
  }
  opt.r_max = ctx.grid().R_max();
  return shooting_oracle(ctx.transform(), ctx.nonlinearity(), ctx.N(), bracket, opt);
}

}  // namespace qlse
