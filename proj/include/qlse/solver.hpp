#pragma once

#include <string>
#include <vector>

#include "qlse/error.hpp"
#include "qlse/functionals.hpp"

namespace qlse {

struct SolveConfig {
  int max_iter = 20000;            // accepted descent steps, summed over rounds
  double grad_tol = 1e-8;          // on the preconditioned tangential gradient / psi^{1/2}
  double initial_step = 1.0;
  double backtrack = 0.5;
  double armijo = 1e-4;
  double min_step = 1e-14;
  double precondition_shift = 1.0;
  int max_rounds = 12;             // sphere radii tried while locating the manifold
  double manifold_tol = 1e-8;      // |M| / psi accepted before the final amplitude fix

  void validate() const;
};

struct HistoryRow {
  int iteration = 0;
  int round = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct SolveReport {
  Field field;
  double beta = 0.0;
  double psi = 0.0;
  double deficit = 0.0;  // M(field) / psi(field)
  double theta = 0.0;
  double el_residual = 0.0;
  double quasilinear_residual = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  int rounds = 0;
  bool converged = false;
  std::vector<HistoryRow> history;
};

class StagnationError : public Error {
 public:
  StagnationError(const std::string& what, Field last)
      : Error(ErrorKind::Stagnation, what), last_(std::move(last)) {}
  const Field& last_iterate() const { return last_; }

 private:
  Field last_;
};

// Minimises the reduced energy over the sector of ctx.grid().
//
// The discrete reduced energy is not exactly invariant under dilation, so the
// descent runs on spheres {psi = rho}, where the problem is well posed, and
// rho is adjusted (secant in rho^{2/(N-2)}) until the constrained minimiser lies
// on the Pohozaev manifold. A final amplitude correction enforces
// |M| <= 1e-12 psi without interpolating the field.
SolveReport minimize(const FunctionalContext& ctx, const Field& v0, const SolveConfig& cfg);

// Dual norm of -Delta v - h(g(v)) g'(v) in the (-Delta + cI) metric, over psi^{1/2}.
double euler_lagrange_residual(const FunctionalContext& ctx, const Field& v, double shift = 1.0);

// Dual norm of the discrete weak-form defect of the original quasilinear
// equation, int (1+2u^2) grad u grad phi + 2 int u |grad u|^2 phi - int h(u) phi,
// with midpoint coefficients; normalised by (int (1+2u^2)|grad u|^2)^{1/2}.
double quasilinear_residual(const FunctionalContext& ctx, const Field& u, double shift = 1.0);

// Scales v by t so that M(t v) = 0 to 1e-12 psi (t near 1).
Field amplitude_correct(const FunctionalContext& ctx, const Field& v);

struct MultistartOptions {
  double energy_gap = 1e-3;
  double field_distance = 1e-2;
};

struct MultistartResult {
  std::vector<SolveReport> solutions;       // distinct, ascending beta
  std::vector<int> seed_of_solution;        // index of the first seed reaching each
  std::vector<std::string> failures;        // one line per failed seed
  int runs = 0;
};

MultistartResult multistart(const FunctionalContext& ctx, const std::vector<Field>& seeds,
                            const SolveConfig& cfg, const MultistartOptions& opt = {});

// min(|a - b|, |a + b|) / |a| in the weighted L2 norm.
double field_distance(const Grid& grid, const Field& a, const Field& b);

}  // namespace qlse
