#include "qlse/functionals.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "qlse/error.hpp"

namespace qlse {

FunctionalContext::FunctionalContext(DualTransform g, BLNonlinearity f, Grid grid)
    : g_(std::move(g)), f_(std::move(f)), grid_(std::move(grid)) {
  if (f_.N != grid_.sector().N) {
    fail(ErrorKind::Validation, "nonlinearity and grid disagree on N");
  }
}

Field FunctionalContext::g_of(const Field& v) const {
  Field u(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) u[i] = g_(v[i]);
  return u;
}

Field FunctionalContext::g_inverse_of(const Field& u) const {
  Field v(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) v[i] = g_.inverse(u[i]);
  return v;
}

Evaluation FunctionalContext::evaluate(const Field& v, bool with_gradient) const {
  Evaluation e;
  e.v = v;
  e.gv = g_of(v);
  e.psi = psi(v);
  const Field& w = grid_.weights();
  long double Phi = 0.0L;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (e.gv[i] != 0.0) Phi += static_cast<long double>(w[i]) * f_.H(e.gv[i]);
  }
  e.Phi = static_cast<double>(Phi);
  if (with_gradient) {
    e.lap = grid_.neg_laplacian(v);
    e.source.resize(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      e.source[i] = grid_.on_boundary(static_cast<std::size_t>(i))
                        ? 0.0
                        : f_.h(e.gv[i]) * g_.derivative_from_value(e.gv[i]);
    }
    if (grid_.sector().tau()) e.source = grid_.antisymmetrize(e.source);
  }
  return e;
}

double FunctionalContext::Phi(const Field& v) const {
  const Field& w = grid_.weights();
  long double sum = 0.0L;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) sum += static_cast<long double>(w[i]) * f_.H(g_(v[i]));
  }
  return static_cast<double>(sum);
}

double FunctionalContext::J(const Field& v) const { return 0.5 * psi(v) - Phi(v); }

namespace {

double root_one_plus_two_sq(double s) { return std::sqrt(1.0 + 2.0 * s * s); }

}  // namespace

double FunctionalContext::I_original(const Field& u) const {
  const bool identity = g_.is_identity();
  const double kinetic = grid_.weighted_dirichlet_energy(u, [&](double a, double b) {
    if (identity) return 1.0;
    const double du = b - a;
    double mean;
    if (std::abs(du) > 1e-6 * (1.0 + std::abs(a) + std::abs(b))) {
      mean = (g_.inverse(b) - g_.inverse(a)) / du;
    } else {
      mean = (root_one_plus_two_sq(a) + 4.0 * root_one_plus_two_sq(0.5 * (a + b)) +
              root_one_plus_two_sq(b)) / 6.0;
    }
    return mean * mean;
  });
  const Field& w = grid_.weights();
  long double potential = 0.0L;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u[i] != 0.0) potential += static_cast<long double>(w[i]) * f_.H(u[i]);
  }
  return 0.5 * kinetic - static_cast<double>(potential);
}

double FunctionalContext::deficit(const Field& v) const { return psi(v) - two_star() * Phi(v); }

void FunctionalContext::check_admissible(double psi, double Phi) const {
  if (!(psi > 0.0)) fail(ErrorKind::Degenerate, "field is identically zero (psi = 0)");
  if (!(Phi > 0.0)) {
    std::ostringstream os;
    os << "field is not admissible: int H(g(v)) = " << Phi << " <= 0";
    fail(ErrorKind::Admissibility, os.str());
  }
}

double FunctionalContext::r_of(const Field& v) const {
  const double p = psi(v);
  const double F = Phi(v);
  check_admissible(p, F);
  return std::sqrt(two_star() * F / p);
}

double FunctionalContext::reduced_energy(double psi, double Phi) const {
  check_admissible(psi, Phi);
  const double n = N();
  return std::pow(psi, 0.5 * n) * std::pow(two_star() * Phi, 0.5 * (2.0 - n)) / n;
}

double FunctionalContext::reduced_energy(const Field& v) const {
  return reduced_energy(psi(v), Phi(v));
}

Field FunctionalContext::reduced_gradient(const Evaluation& e) const {
  check_admissible(e.psi, e.Phi);
  const double r = std::sqrt(two_star() * e.Phi / e.psi);
  const double n = N();
  return std::pow(r, 2.0 - n) * e.lap - std::pow(r, -n) * e.source;
}

Field FunctionalContext::reduced_gradient(const Field& v) const {
  return reduced_gradient(evaluate(v, true));
}

double FunctionalContext::theta(const Field& v) const {
  const Evaluation e = evaluate(v, true);
  if (!(e.psi > 0.0)) fail(ErrorKind::Degenerate, "theta: field is identically zero");
  return grid_.inner(e.source, v) / e.psi;
}

Field FunctionalContext::project_to_manifold(const Field& v) const {
  const double p0 = psi(v);
  const double F0 = Phi(v);
  check_admissible(p0, F0);
  if (std::abs(p0 - two_star() * F0) <= 1e-12 * p0) return v;

  const double r = std::sqrt(two_star() * F0 / p0);
  auto rel_deficit = [&](double s) {
    const Field w = grid_.dilate(v, s);
    const double p = psi(w);
    if (!(p > 0.0)) fail(ErrorKind::Degenerate, "projection collapsed the field");
    return (p - two_star() * Phi(w)) / p;
  };

  double f0 = rel_deficit(r);
  if (std::abs(f0) <= 1e-12) return grid_.dilate(v, r);

  // The relative deficit 1 - (r(v)/s)^2 increases with s; bracket the root
  // around the continuum value and polish it.
  double lo = r, hi = r, flo = f0, fhi = f0;
  double step = 1e-3;
  for (int k = 0; k < 60 && !(flo < 0.0 && fhi > 0.0); ++k) {
    if (flo >= 0.0) {
      lo = r * (1.0 - step);
      flo = rel_deficit(lo);
    }
    if (fhi <= 0.0) {
      hi = r * (1.0 + step);
      fhi = rel_deficit(hi);
    }
    step = std::min(2.0 * step, 0.9);
  }
  if (!(flo < 0.0 && fhi > 0.0)) {
    fail(ErrorKind::Numeric, "project_to_manifold: could not bracket the corrective dilation");
  }
  std::uintmax_t max_iter = 200;
  double best_s = r, best_f = std::abs(f0);
  auto tracked = [&](double s) {
    const double f = rel_deficit(s);
    if (std::abs(f) < best_f) {
      best_f = std::abs(f);
      best_s = s;
    }
    return f;
  };
  auto tol = [](double a, double b) { return std::abs(a - b) <= 4e-16 * std::abs(a); };
  boost::math::tools::toms748_solve(tracked, lo, hi, flo, fhi, tol, max_iter);
  return grid_.dilate(v, best_s);
}

Field FunctionalContext::sphere_normalize(const Field& v) const {
  const double p = psi(v);
  if (!(p > 0.0)) fail(ErrorKind::Degenerate, "sphere_normalize: field is identically zero");
  return grid_.dilate(v, std::pow(p, 1.0 / (N() - 2.0)));
}

}  // namespace qlse
