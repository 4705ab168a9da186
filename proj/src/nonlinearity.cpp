#include "qlse/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qlse/error.hpp"

namespace qlse {

double integrate_adaptive(const std::function<double(double)>& fn, double a, double b,
                          double abs_tol) {
  if (a == b) return 0.0;
  double err = 0.0;
  double l1 = 0.0;
  // Depth is bounded: a relative tolerance at the rounding floor can never be met,
  // and unbounded bisection then costs 2^depth evaluations.
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      fn, a, b, 15, 1e-13, &err, &l1);
  if (!std::isfinite(value) || err > std::max(abs_tol, 1e-10 * std::abs(value))) {
    std::ostringstream os;
    os << "quadrature did not converge on [" << a << ", " << b << "]: achieved error " << err;
    fail(ErrorKind::Numeric, os.str());
  }
  return value;
}

BLNonlinearity model_power(double p, double m, int N) {
  if (N < 3) fail(ErrorKind::Validation, "model_power: N must be >= 3");
  if (!(m > 0.0)) fail(ErrorKind::Validation, "model_power: m must be positive (h2)");
  const double bound = (3.0 * N + 2.0) / (N - 2.0);
  if (!(p > 1.0 && p < bound)) {
    std::ostringstream os;
    os << "model_power: p = " << p << " violates (h3''): need 1 < p < (3N+2)/(N-2) = " << bound;
    fail(ErrorKind::Validation, os.str());
  }
  BLNonlinearity f;
  std::ostringstream name;
  name << "power(p=" << p << ",m=" << m << ")";
  f.name = name.str();
  f.h = [p, m](double t) { return std::copysign(std::pow(std::abs(t), p), t) - m * t; };
  f.H = [p, m](double t) { return std::pow(std::abs(t), p + 1.0) / (p + 1.0) - 0.5 * m * t * t; };
  f.m = m;
  f.xi0 = 1.1 * std::pow((p + 1.0) * m / 2.0, 1.0 / (p - 1.0));
  f.N = N;
  f.closed_form_primitive = true;
  return f;
}

BLNonlinearity from_h(std::string name, std::function<double(double)> h, double m, double xi0,
                      int N) {
  BLNonlinearity f;
  f.name = std::move(name);
  f.h = h;
  f.H = [h](double t) {
    const double a = std::abs(t);
    return integrate_adaptive(h, 0.0, a, 1e-12);  // H is even because h is odd
  };
  f.m = m;
  f.xi0 = xi0;
  f.N = N;
  f.closed_form_primitive = false;
  return f;
}

BLNonlinearity kappa_reduced(const BLNonlinearity& f, double kappa) {
  if (!(kappa > 0.0)) fail(ErrorKind::Validation, "kappa must be positive");
  if (kappa == 1.0) return f;
  BLNonlinearity out = f;
  const double sk = std::sqrt(kappa);
  auto h = f.h;
  auto H = f.H;
  out.h = [h, sk](double w) { return sk * h(w / sk); };
  out.H = [H, sk, kappa](double w) { return kappa * H(w / sk); };
  out.xi0 = sk * f.xi0;
  out.name = f.name + "[kappa=" + std::to_string(kappa) + "]";
  return out;
}

// ---------------------------------------------------------------------------

bool ConditionReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

bool ConditionReport::flags(const std::string& condition) const {
  return std::any_of(checks.begin(), checks.end(),
                     [&](const auto& c) { return c.condition == condition && !c.pass; });
}

std::string ConditionReport::format() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << "(" << c.condition << ") " << (c.pass ? "PASS" : "FAIL") << "  " << c.detail << "\n";
  }
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  return os.str();
}

std::vector<double> default_condition_sample() {
  std::vector<double> s;
  for (int i = 0; i <= 40; ++i) s.push_back(std::pow(10.0, -10.0 + 4.0 * i / 40.0));
  for (int i = 0; i <= 50; ++i) s.push_back(std::pow(10.0, 3.0 + 5.0 * i / 50.0));
  return s;
}

ConditionReport check_conditions(const BLNonlinearity& f, std::span<const double> sample) {
  ConditionReport report;
  std::vector<double> small, large;
  for (double t : sample) {
    if (t > 0.0 && t <= 1e-6) small.push_back(t);
    if (t >= 1e3) large.push_back(t);
  }
  std::sort(small.begin(), small.end());
  std::sort(large.begin(), large.end());

  {
    ConditionCheck c{"h1", true, ""};
    int bad = 0;
    for (double t : sample) {
      const double a = f.h(t), b = f.h(-t);
      if (!(std::isfinite(a) && b == -a)) ++bad;
    }
    c.pass = bad == 0;
    c.detail = "odd on " + std::to_string(sample.size()) + " +/- pairs, violations: " +
               std::to_string(bad);
    report.checks.push_back(c);
  }
  {
    ConditionCheck c{"h2", false, ""};
    if (small.size() >= 2 && f.m > 0.0) {
      const double r0 = f.h(small[0]) / small[0];
      const double r1 = f.h(small[1]) / small[1];
      const double gap = std::abs(r0 + f.m) / f.m;
      c.pass = gap <= 0.1;
      std::ostringstream os;
      os << "h(t)/t at t = " << small[0] << " is " << r0 << " vs -m = " << -f.m;
      c.detail = os.str();
      if (std::abs(r0 - r1) > 1e-3 * f.m) {
        report.warnings.push_back("h(t)/t does not settle near 0; only the exact-limit case of (h2) "
                                  "is certified");
      }
    } else {
      c.detail = f.m > 0.0 ? "sample has no points in (0, 1e-6]" : "m must be positive";
    }
    report.checks.push_back(c);
  }
  {
    ConditionCheck c{"h3''", false, ""};
    const double q = 2.0 * (2.0 * f.N / (f.N - 2.0)) - 1.0;
    if (large.size() >= 2) {
      bool decreasing = true;
      double prev = std::abs(f.h(large[0])) / std::pow(large[0], q);
      const double first = prev;
      for (std::size_t i = 1; i < large.size(); ++i) {
        const double cur = std::abs(f.h(large[i])) / std::pow(large[i], q);
        if (cur > prev) decreasing = false;
        prev = cur;
      }
      c.pass = decreasing && prev < first && std::isfinite(prev);
      std::ostringstream os;
      os << "|h(t)|/t^" << q << ": " << first << " at t=" << large.front() << " -> " << prev
         << " at t=" << large.back();
      c.detail = os.str();
    } else {
      c.detail = "sample has no points in [1e3, inf)";
    }
    report.checks.push_back(c);
  }
  {
    ConditionCheck c{"h4", false, ""};
    const double value = f.H(f.xi0);
    c.pass = value > 0.0;
    std::ostringstream os;
    os << "H(xi0 = " << f.xi0 << ") = " << value;
    c.detail = os.str();
    report.checks.push_back(c);
  }
  if (f.closed_form_primitive) {
    ConditionCheck c{"H'=h", true, ""};
    double worst = 0.0;
    for (double t : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0}) {
      const double d = 1e-5 * t;
      const double fd = (f.H(t + d) - f.H(t - d)) / (2.0 * d);
      const double ref = f.h(t);
      worst = std::max(worst, std::abs(fd - ref) / std::max(1.0, std::abs(ref)));
    }
    c.pass = worst <= 1e-6;
    c.detail = "finite-difference relative gap " + std::to_string(worst);
    report.checks.push_back(c);
  }
  return report;
}

double h1_of(const BLNonlinearity& f, const DualTransform& g, double s) {
  if (s < 0.0) return -h1_of(f, g, -s);
  const double gs = g(s);
  return std::max(f.h(gs) + f.m * gs, 0.0);
}

double h2_of(const BLNonlinearity& f, const DualTransform& g, double s) {
  return h1_of(f, g, s) - f.h(g(s));
}

namespace {

double H_split(const BLNonlinearity& f, const DualTransform& g, double s, bool first) {
  const double a = std::abs(s);
  auto integrand = [&](double t) {
    const double gt = g(t);
    const double hi = first ? h1_of(f, g, t) : h2_of(f, g, t);
    return hi * g.derivative_from_value(gt);
  };
  return integrate_adaptive(integrand, 0.0, a, 1e-12);
}

}  // namespace

double H1_of(const BLNonlinearity& f, const DualTransform& g, double s) {
  return H_split(f, g, s, true);
}

double H2_of(const BLNonlinearity& f, const DualTransform& g, double s) {
  return H_split(f, g, s, false);
}

}  // namespace qlse
