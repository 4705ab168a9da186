#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qlse/functionals.hpp"

namespace qlse {

// Radial initial value problem v'' + (N-1)/r v' + h(g(v)) g'(v) = 0, v(0) = a,
// v'(0) = 0, integrated with an adaptive Dormand-Prince 5(4) scheme.
//
// A shot overshoots when v crosses zero and undershoots when v turns back up
// while still positive. The ground state sits at the boundary between the two.
enum class ShotOutcome { Undershoot, Overshoot, Undecided };

const char* to_string(ShotOutcome o);

struct Shot {
  double a = 0.0;
  ShotOutcome outcome = ShotOutcome::Undecided;
  double r_stop = 0.0;   // where the classifying event happened (or r_max)
  double psi = 0.0;      // int |v'|^2 over the ball of radius r_stop
  double Phi = 0.0;      // int H(g(v)) over the same ball
  double energy() const { return 0.5 * psi - Phi; }
  std::vector<double> r, v;  // trajectory samples (uniform spacing)
};

struct ShootingOptions {
  double r_start = 1e-4;
  double r_max = 20.0;
  double ode_tol = 1e-12;
  double sample_step = 0.01;
  int max_bisections = 200;
};

Shot shoot(const DualTransform& g, const BLNonlinearity& f, int N, double a,
           const ShootingOptions& opt);

struct OracleResult {
  double a_star = 0.0;       // v(0) of the ground state
  double u0 = 0.0;           // g(a_star)
  double energy = 0.0;       // J of the profile
  double psi = 0.0;
  double bracket_width = 0.0;
  int bisections = 0;
  Shot profile;              // the last undershooting shot
};

// Bisection between an undershooting and an overshooting value of a. Without
// an explicit bracket one is built from the first positive zero of H o g.
// Radial sectors only.
OracleResult shooting_oracle(const FunctionalContext& ctx,
                             std::optional<std::pair<double, double>> bracket = std::nullopt,
                             ShootingOptions opt = {});

// Same, without a grid: used by tests that only need the ODE.
OracleResult shooting_oracle(const DualTransform& g, const BLNonlinearity& f, int N,
                             std::optional<std::pair<double, double>> bracket,
                             const ShootingOptions& opt);

}  // namespace qlse
