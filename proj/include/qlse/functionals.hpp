#pragma once

#include "qlse/dual_transform.hpp"
#include "qlse/grid.hpp"
#include "qlse/nonlinearity.hpp"

namespace qlse {

// Node-wise quantities of a field that every functional needs. `lap` and
// `source` are only filled by FunctionalContext::evaluate(v, true).
struct Evaluation {
  Field v;
  Field gv;      // g(v)
  Field lap;     // -Delta_h v
  Field source;  // h(g(v)) g'(v), zero on Dirichlet nodes
  double psi = 0.0;  // int |grad v|^2
  double Phi = 0.0;  // int H(g(v))
};

// Transform, nonlinearity and grid of one problem. All members are immutable
// and every method is a pure function of its arguments.
class FunctionalContext {
 public:
  FunctionalContext(DualTransform g, BLNonlinearity f, Grid grid);

  const DualTransform& transform() const { return g_; }
  const BLNonlinearity& nonlinearity() const { return f_; }
  const Grid& grid() const { return grid_; }
  int N() const { return grid_.sector().N; }
  double two_star() const { return grid_.sector().two_star(); }

  Evaluation evaluate(const Field& v, bool with_gradient = false) const;

  Field g_of(const Field& v) const;
  Field g_inverse_of(const Field& u) const;
  double psi(const Field& v) const { return grid_.dirichlet_energy(v); }
  double Phi(const Field& v) const;  // int H(g(v))

  double J(const Field& v) const;
  // 1/2 int (1 + 2u^2)|grad u|^2 - int H(u). On each face the coefficient is
  // the squared mean of sqrt(1 + 2s^2) between the two nodal values, which is
  // the consistent discretisation that keeps I(g(v)) = J(v) on the grid.
  double I_original(const Field& u) const;
  double deficit(const Field& v) const;  // M(v) = psi - 2* Phi
  double r_of(const Field& v) const;
  double reduced_energy(const Field& v) const;
  double reduced_energy(double psi, double Phi) const;
  Field reduced_gradient(const Field& v) const;
  Field reduced_gradient(const Evaluation& e) const;
  double theta(const Field& v) const;

  // v(r(v) x) on the same grid, followed by a scalar correction of the
  // dilation factor so that |M| <= 1e-12 psi. Fields already on the manifold
  // to that accuracy are returned unchanged.
  Field project_to_manifold(const Field& v) const;
  // v(psi(v)^{1/(N-2)} x): the representative with psi = 1 (reporting only).
  Field sphere_normalize(const Field& v) const;

 private:
  void check_admissible(double psi, double Phi) const;

  DualTransform g_;
  BLNonlinearity f_;
  Grid grid_;
};

}  // namespace qlse
