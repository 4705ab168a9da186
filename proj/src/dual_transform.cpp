#include "qlse/dual_transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qlse/error.hpp"

namespace qlse {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
const double kQuarticRoot2 = std::pow(2.0, 0.25);

// Below this magnitude g is evaluated from its Taylor series.
constexpr double kSeriesCutoff = 1e-6;

double g_positive(double t, double tol, int max_iter) {
  if (t < kSeriesCutoff) {
    const double t2 = t * t;
    return t * (1.0 - t2 / 3.0 + 13.0 * t2 * t2 / 30.0);
  }
  // g^{-1} is convex on [0, inf), so Newton started to the right of the root
  // decreases monotonically; [0, hi] brackets the root because g(t) <= t and
  // g(t) <= 2^{1/4} sqrt(t).
  double hi = std::min(t, kQuarticRoot2 * std::sqrt(t));
  double lo = 0.0;
  double u = hi;
  for (int it = 0; it < max_iter; ++it) {
    const double residual = g_inverse_positive(u) - t;
    if (residual > 0.0) {
      hi = u;
    } else {
      lo = u;
    }
    const double slope = std::sqrt(1.0 + 2.0 * u * u);
    double next = u - residual / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) <= tol * u || next == u) return next;
    u = next;
  }
  fail(ErrorKind::Numeric, "g: Newton iteration did not converge for t = " + std::to_string(t));
}

}  // namespace

double g_inverse_positive(double u) {
  const double s = kSqrt2 * u;
  return 0.5 * u * std::sqrt(1.0 + 2.0 * u * u) + std::asinh(s) / (2.0 * kSqrt2);
}

DualTransform::DualTransform(double newton_tol, int newton_max_iter, Mode mode)
    : newton_tol_(newton_tol), newton_max_iter_(newton_max_iter), mode_(mode) {
  if (!(newton_tol > 0.0) || newton_max_iter < 1) {
    fail(ErrorKind::Validation, "DualTransform: tolerance must be positive and max_iter >= 1");
  }
}

DualTransform DualTransform::faulty(double scale) {
  DualTransform g;
  g.fault_scale_ = scale;
  return g;
}

double DualTransform::inverse(double u) const {
  if (!std::isfinite(u)) fail(ErrorKind::Domain, "g_inverse: non-finite input");
  if (mode_ == Mode::Identity) return u;
  const double a = std::abs(u) / fault_scale_;
  return std::copysign(g_inverse_positive(a), u);
}

double DualTransform::value(double t) const {
  if (!std::isfinite(t)) fail(ErrorKind::Domain, "g: non-finite input");
  if (mode_ == Mode::Identity) return t;
  return fault_scale_ * std::copysign(g_positive(std::abs(t), newton_tol_, newton_max_iter_), t);
}

double DualTransform::derivative_from_value(double g) const {
  if (mode_ == Mode::Identity) return 1.0;
  const double base = g / fault_scale_;
  return fault_scale_ / std::sqrt(1.0 + 2.0 * base * base);
}

double DualTransform::derivative(double t) const { return derivative_from_value(value(t)); }

// ---------------------------------------------------------------------------
// Property suite

bool PropertyReport::all_pass() const {
  return std::all_of(items.begin(), items.end(), [](const PropertyItem& i) { return i.pass; });
}

std::string PropertyReport::format() const {
  std::ostringstream os;
  os.precision(6);
  for (const auto& it : items) {
    os << "item " << it.item << (it.item < 10 ? "  " : " ") << (it.pass ? "PASS" : "FAIL")
       << "  margin=" << std::scientific << it.worst_margin << std::defaultfloat << "  "
       << it.statement;
    if (!it.detail.empty()) os << "  [" << it.detail << "]";
    os << "\n";
  }
  os << std::scientific << "round trip worst = " << round_trip_worst
     << "\nclosed form vs quadrature worst = " << closed_form_worst << "\n";
  return os.str();
}

std::vector<double> default_property_sample(int per_decade) {
  std::vector<double> out;
  const int n = 16 * per_decade;
  for (int i = 0; i <= n; ++i) {
    const double t = std::pow(10.0, -8.0 + 16.0 * static_cast<double>(i) / n);
    out.push_back(t);
    out.push_back(-t);
  }
  return out;
}

namespace {

constexpr double kPassMargin = -1e-12;

struct ItemAccumulator {
  PropertyItem item;
  bool first = true;
  void add(double margin) {
    if (first || margin < item.worst_margin) item.worst_margin = margin;
    first = false;
  }
  PropertyItem finish(bool extra_ok = true) {
    item.pass = extra_ok && !first && item.worst_margin >= kPassMargin;
    return item;
  }
};

ItemAccumulator make_item(int n, const char* statement) {
  ItemAccumulator acc;
  acc.item.item = n;
  acc.item.statement = statement;
  return acc;
}

}  // namespace

PropertyReport property_suite(const DualTransform& g, std::span<const double> sample) {
  PropertyReport report;

  std::vector<double> pos;
  for (double t : sample) {
    if (std::isfinite(t) && t > 0.0) pos.push_back(t);
  }
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());

  // (1) invertible: odd, strictly increasing, round trip.
  {
    auto acc = make_item(1, "g is odd, strictly increasing and invertible");
    for (double t : sample) {
      acc.add(-std::abs(g(-t) + g(t)));
      const double u = g(t);
      const double rt = std::abs(g(g.inverse(u)) - u) / (1.0 + std::abs(u));
      report.round_trip_worst = std::max(report.round_trip_worst, rt);
      acc.add(1e-10 - rt);
    }
    for (std::size_t i = 0; i + 1 < pos.size(); ++i) acc.add(g(pos[i + 1]) - g(pos[i]));
    const bool strict = std::adjacent_find(pos.begin(), pos.end(), [&](double a, double b) {
                          return !(g(b) > g(a));
                        }) == pos.end();
    report.items.push_back(acc.finish(strict));
  }
  {
    auto acc = make_item(2, "|g'(t)| <= 1");
    for (double t : sample) acc.add(1.0 - std::abs(g.derivative(t)));
    report.items.push_back(acc.finish());
  }
  {
    auto acc = make_item(3, "|g(t)| <= |t|");
    for (double t : sample) acc.add(std::abs(t) - std::abs(g(t)));
    report.items.push_back(acc.finish());
  }
  {
    auto acc = make_item(4, "g(t)/t -> 1 as t -> 0 (checked at |t| = 1e-8, tol 1e-3)");
    for (double t : {1e-8, -1e-8}) acc.add(1e-3 - std::abs(g(t) / t - 1.0));
    report.items.push_back(acc.finish());
  }
  {
    auto acc = make_item(5, "g(t)/sqrt(t) -> 2^(1/4) as t -> inf (checked at t = 1e8, tol 1e-3)");
    const double t = 1e8;
    acc.add(1e-3 - std::abs(g(t) / std::sqrt(t) - kQuarticRoot2));
    report.items.push_back(acc.finish());
  }
  {
    auto acc = make_item(6, "g(t)/2 <= t g'(t) <= g(t) for t > 0");
    for (double t : pos) {
      const double gt = g(t);
      const double tg = t * g.derivative_from_value(gt);
      acc.add(tg - 0.5 * gt);
      acc.add(gt - tg);
    }
    report.items.push_back(acc.finish());
  }
  {
    auto acc = make_item(7, "|g(t)| <= 2^(1/4) |t|^(1/2)");
    for (double t : sample) acc.add(kQuarticRoot2 * std::sqrt(std::abs(t)) - std::abs(g(t)));
    report.items.push_back(acc.finish());
  }
  {
    auto acc = make_item(8, "g(t)^2 - g(t) g'(t) t >= 0");
    for (double t : sample) {
      const double gt = g(t);
      acc.add(gt * gt - gt * g.derivative_from_value(gt) * t);
    }
    report.items.push_back(acc.finish());
  }
  {
    auto acc = make_item(9, "|g(t)| >= C|t| (|t| <= 1), >= C|t|^(1/2) (|t| > 1), C > 0");
    double c = std::numeric_limits<double>::infinity();
    for (double t : sample) {
      const double a = std::abs(t);
      const double ratio = std::abs(g(t)) / (a <= 1.0 ? a : std::sqrt(a));
      c = std::min(c, ratio);
    }
    acc.add(c);
    acc.item.detail = "estimated C = " + std::to_string(c);
    report.items.push_back(acc.finish(c > 0.0));
  }
  {
    auto acc = make_item(10, "|g(t) g'(t)| <= 1/sqrt(2)");
    for (double t : sample) {
      const double gt = g(t);
      acc.add(1.0 / kSqrt2 - std::abs(gt * g.derivative_from_value(gt)));
    }
    report.items.push_back(acc.finish());
  }
  {
    auto acc = make_item(11, "g(t) g'(t) / t is decreasing for t > 0");
    auto f = [&](double t) {
      const double gt = g(t);
      return gt * g.derivative_from_value(gt) / t;
    };
    for (std::size_t i = 0; i + 1 < pos.size(); ++i) acc.add(f(pos[i]) - f(pos[i + 1]));
    report.items.push_back(acc.finish());
  }
  {
    auto acc = make_item(12, "g(t)^p g'(t) / t is increasing for t > 0 (p = 3)");
    auto f = [&](double t) {
      const double gt = g(t);
      return gt * gt * gt * g.derivative_from_value(gt) / t;
    };
    for (std::size_t i = 0; i + 1 < pos.size(); ++i) acc.add(f(pos[i + 1]) - f(pos[i]));
    report.items.push_back(acc.finish());
  }
  {
    auto acc = make_item(13, "g^2(rt) >= C r g^2(t) (r >= 1), >= C r^2 g^2(t) (r <= 1), C > 0");
    double c = std::numeric_limits<double>::infinity();
    std::vector<double> radii;
    for (int i = -16; i <= 16; ++i) radii.push_back(std::pow(10.0, i / 4.0));
    for (double t : sample) {
      const double gt2 = g(t) * g(t);
      for (double r : radii) {
        const double rt = r * t;
        if (std::abs(rt) > 1e12) continue;
        const double grt = g(rt);
        const double denom = (r >= 1.0 ? r : r * r) * gt2;
        c = std::min(c, grt * grt / denom);
      }
    }
    c -= 1e-9;
    acc.add(c);
    acc.item.detail = "estimated C = " + std::to_string(c);
    report.items.push_back(acc.finish(c > 0.0));
  }

  // Closed form of g^{-1} against adaptive quadrature of sqrt(1 + 2 s^2).
  if (!g.is_identity()) {
    using boost::math::quadrature::gauss_kronrod;
    for (double u : pos) {
      if (u > 1e8) continue;
      // Geometric panels [0, 1], [1, 10], ... keep every panel well scaled.
      auto integrand = [](double s) { return std::sqrt(1.0 + 2.0 * s * s); };
      double q = 0.0;
      for (double a = 0.0, b = std::min(u, 1.0); a < u; a = b, b = std::min(u, 10.0 * b)) {
        q += gauss_kronrod<double, 31>::integrate(integrand, a, b, 12, 1e-14);
      }
      const double closed = g.inverse(u);
      report.closed_form_worst = std::max(report.closed_form_worst, std::abs(closed - q) / q);
    }
  }
  return report;
}

}  // namespace qlse
