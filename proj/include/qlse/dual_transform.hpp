#pragma once

#include <span>
#include <string>
#include <vector>

namespace qlse {

// The odd, increasing change of variables u = g(v) with g'(t) = 1/sqrt(1 + 2 g(t)^2).
//
// g is evaluated by inverting the closed-form antiderivative
//   g^{-1}(u) = u sqrt(1 + 2u^2) / 2 + asinh(sqrt(2) u) / (2 sqrt(2))
// with a bracketed Newton iteration. The Identity mode replaces g by the
// identity map and is only used to calibrate against the semilinear equation.
class DualTransform {
 public:
  enum class Mode { Quasilinear, Identity };

  explicit DualTransform(double newton_tol = 1e-15, int newton_max_iter = 100,
                         Mode mode = Mode::Quasilinear);

  static DualTransform identity() { return DualTransform(1e-15, 100, Mode::Identity); }

  // Test hook: multiplies g (and g') by `scale`. Used to exercise the failure
  // path of the property suite; never used by the solver.
  static DualTransform faulty(double scale);

  double inverse(double u) const;
  double operator()(double t) const { return value(t); }
  double value(double t) const;
  double derivative(double t) const;
  // g'(t) given an already computed g(t).
  double derivative_from_value(double g) const;

  Mode mode() const noexcept { return mode_; }
  bool is_identity() const noexcept { return mode_ == Mode::Identity; }
  double newton_tol() const noexcept { return newton_tol_; }
  int newton_max_iter() const noexcept { return newton_max_iter_; }

 private:
  double newton_tol_;
  int newton_max_iter_;
  Mode mode_;
  double fault_scale_ = 1.0;
};

// Closed-form g^{-1} for u >= 0 (no oddness handling, no validation).
double g_inverse_positive(double u);

struct PropertyItem {
  int item = 0;            // 1..13, matching the classical numbering of the g properties
  std::string statement;
  bool pass = false;
  double worst_margin = 0.0;  // min over the sample of (rhs - lhs); >= -1e-12 passes
  std::string detail;
};

struct PropertyReport {
  std::vector<PropertyItem> items;
  double round_trip_worst = 0.0;        // max |g(g^{-1}(u)) - u| / (1 + |u|)
  double closed_form_worst = 0.0;       // max relative gap closed form vs quadrature
  bool all_pass() const;
  std::string format() const;
};

// Log-spaced positive sample covering [1e-8, 1e8] with `per_decade` points per
// decade, mirrored to negatives.
std::vector<double> default_property_sample(int per_decade = 16);

PropertyReport property_suite(const DualTransform& g, std::span<const double> sample);

}  // namespace qlse
