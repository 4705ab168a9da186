#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qlse/dual_transform.hpp"

namespace qlse {

// A Berestycki-Lions nonlinearity h with primitive H(t) = int_0^t h.
//
// `m` is the (user supplied) value of -lim_{t->0} h(t)/t and `xi0` a witness
// with H(xi0) > 0. When no closed-form primitive is available H is computed by
// adaptive quadrature with absolute tolerance 1e-12.
struct BLNonlinearity {
  std::string name;
  std::function<double(double)> h;
  std::function<double(double)> H;
  double m = 0.0;
  double xi0 = 0.0;
  int N = 3;
  bool closed_form_primitive = false;

  // (3N + 2) / (N - 2): the largest admissible power for the quasilinear problem.
  double growth_exponent_bound() const { return (3.0 * N + 2.0) / (N - 2.0); }
};

// h(t) = |t|^{p-1} t - m t with H(t) = |t|^{p+1}/(p+1) - m t^2/2.
// Requires 1 < p < (3N+2)/(N-2), m > 0, N >= 3.
BLNonlinearity model_power(double p, double m, int N);

// Builds a nonlinearity from h alone; H is obtained by quadrature.
BLNonlinearity from_h(std::string name, std::function<double(double)> h, double m, double xi0,
                      int N);

// Rescales a problem with quasilinear coefficient kappa to the kappa = 1 form:
// h_k(w) = sqrt(k) h(w / sqrt(k)), H_k(w) = k H(w / sqrt(k)), xi0_k = sqrt(k) xi0.
BLNonlinearity kappa_reduced(const BLNonlinearity& f, double kappa);

struct ConditionCheck {
  std::string condition;  // "h1", "h2", "h3''", "h4", "H'=h"
  bool pass = false;
  std::string detail;
};

struct ConditionReport {
  std::vector<ConditionCheck> checks;
  std::vector<std::string> warnings;
  bool all_pass() const;
  bool flags(const std::string& condition) const;  // true if that condition failed
  std::string format() const;
};

// Sample covering (0, 1e-6] and [1e3, 1e8], log spaced.
std::vector<double> default_condition_sample();

ConditionReport check_conditions(const BLNonlinearity& f, std::span<const double> sample);

// The split h(g(s)) = h1(g(s)) - h2(g(s)) with h1(g(s)) = max{h(g(s)) + m g(s), 0}
// for s >= 0, both extended oddly.
double h1_of(const BLNonlinearity& f, const DualTransform& g, double s);
double h2_of(const BLNonlinearity& f, const DualTransform& g, double s);

// H_i(g(s)) = int_0^{g(s)} h_i = int_0^s h_i(g(t)) g'(t) dt, so that H1 - H2 = H o g.
double H1_of(const BLNonlinearity& f, const DualTransform& g, double s);
double H2_of(const BLNonlinearity& f, const DualTransform& g, double s);

// Adaptive quadrature of `fn` on [a, b]; throws a numeric error when the
// estimated error exceeds max(abs_tol, 1e-10 |value|).
double integrate_adaptive(const std::function<double(double)>& fn, double a, double b,
                          double abs_tol = 1e-12);

}  // namespace qlse
