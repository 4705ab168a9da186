#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "qlse/dual_transform.hpp"
#include "qlse/error.hpp"

using qlse::DualTransform;

namespace {

// Log-uniform magnitudes in [1e-6, 1e6] with random signs.
std::vector<double> random_points(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> expo(-6.0, 6.0);
  std::bernoulli_distribution neg(0.5);
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    const double x = std::pow(10.0, expo(rng));
    out.push_back(neg(rng) ? -x : x);
  }
  return out;
}

// int_0^u sqrt(1 + 2 s^2) ds by composite Simpson; independent of the library.
double inverse_by_simpson(double u) {
  const int n = 20000;
  const double h = u / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * std::sqrt(1.0 + 2.0 * x * x);
  }
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("g inverts the closed-form antiderivative") {
  const DualTransform g;
  for (double u : {1e-3, 0.1, 0.5, 1.0, 2.0, 7.5}) {
    CHECK(g.inverse(u) == doctest::Approx(inverse_by_simpson(u)).epsilon(1e-12));
  }
  for (double t : random_points(11, 400)) {
    const double u = g(t);
    CHECK(std::abs(g.inverse(u) - t) <= 1e-12 * (1.0 + std::abs(t)));
  }
}

TEST_CASE("g solves g' = 1/sqrt(1 + 2 g^2)") {
  const DualTransform g;
  for (double t : random_points(12, 200)) {
    const double h = 1e-6 * std::max(1.0, std::abs(t));
    const double fd = (g(t + h) - g(t - h)) / (2.0 * h);
    const double gt = g(t);
    CHECK(fd == doctest::Approx(1.0 / std::sqrt(1.0 + 2.0 * gt * gt)).epsilon(1e-6));
    CHECK(g.derivative(t) == doctest::Approx(g.derivative_from_value(gt)).epsilon(1e-15));
  }
}

TEST_CASE("g is odd, increasing and below both envelopes") {
  const DualTransform g;
  auto pts = random_points(13, 500);
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double t = pts[i];
    CHECK(g(-t) == -g(t));
    CHECK(std::abs(g(t)) <= std::abs(t));
    CHECK(std::abs(g(t)) <= std::pow(2.0, 0.25) * std::sqrt(std::abs(t)) * (1.0 + 1e-15));
    if (i > 0 && pts[i] > pts[i - 1]) CHECK(g(pts[i]) >= g(pts[i - 1]));
    // g(t)/2 <= t g'(t) <= g(t) for t >= 0.
    const double a = std::abs(t);
    CHECK(0.5 * g(a) <= a * g.derivative(a) * (1.0 + 1e-14));
    CHECK(a * g.derivative(a) <= g(a) * (1.0 + 1e-14));
  }
}

TEST_CASE("asymptotics at zero and infinity") {
  const DualTransform g;
  CHECK(g(1e-8) / 1e-8 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g(1e12) / std::sqrt(1e12) == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-5));
}

TEST_CASE("property suite passes on the default sample and reports every item") {
  const auto sample = qlse::default_property_sample();
  const auto report = qlse::property_suite(DualTransform(), sample);
  CHECK(report.items.size() == 13);
  for (const auto& item : report.items) {
    INFO(item.item << ": " << item.statement << " " << item.detail);
    CHECK(item.pass);
    CHECK(item.worst_margin >= -1e-12);
  }
  CHECK(report.round_trip_worst <= 1e-10);
  CHECK(report.closed_form_worst <= 1e-12);
  CHECK(report.all_pass());
  CHECK(report.format().find("margin=") != std::string::npos);
}

TEST_CASE("a broken transform fails the suite") {
  const auto sample = qlse::default_property_sample();
  CHECK_FALSE(qlse::property_suite(DualTransform::faulty(1.5), sample).all_pass());
}

TEST_CASE("identity mode") {
  const auto g = DualTransform::identity();
  CHECK(g.is_identity());
  for (double t : random_points(14, 50)) {
    CHECK(g(t) == t);
    CHECK(g.inverse(t) == t);
    CHECK(g.derivative(t) == 1.0);
  }
}

TEST_CASE("non-finite input is a domain error") {
  const DualTransform g;
  try {
    g.inverse(std::numeric_limits<double>::quiet_NaN());
    FAIL("expected an error");
  } catch (const qlse::Error& e) {
    CHECK(e.kind() == qlse::ErrorKind::Domain);
  }
}
