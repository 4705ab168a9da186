#include <cmath>

#include "doctest.h"
#include "qlse/error.hpp"
#include "qlse/shooting.hpp"

using namespace qlse;

TEST_CASE("semilinear cubic ground state in R^3") {
  // -u'' - 2u'/r + u = u^3 has u(0) = 4.33738767997... (classical value).
  ShootingOptions opt;
  const auto res = shooting_oracle(DualTransform::identity(), model_power(3, 1, 3), 3, std::nullopt, opt);
  CHECK(res.a_star == doctest::Approx(4.3373876799).epsilon(1e-9));
  CHECK(res.bracket_width <= 1e-10);
}

TEST_CASE("quasilinear ground state: classification and Pohozaev balance") {
  const DualTransform g;
  const auto f = model_power(3, 1, 3);
  ShootingOptions opt;
  const auto res = shooting_oracle(g, f, 3, std::nullopt, opt);
  CHECK(res.u0 == doctest::Approx(g(res.a_star)).epsilon(1e-15));
  CHECK(res.bracket_width <= 1e-10);

  CHECK(shoot(g, f, 3, res.a_star * (1 - 1e-4), opt).outcome == ShotOutcome::Undershoot);
  CHECK(shoot(g, f, 3, res.a_star * (1 + 1e-4), opt).outcome == ShotOutcome::Overshoot);

  // Along the profile psi = 2* int H(g(v)) and J = psi / N.
  const double two_star = 6.0;
  CHECK(res.psi == doctest::Approx(two_star * res.profile.Phi).epsilon(1e-5));
  CHECK(res.energy == doctest::Approx(res.psi / 3.0).epsilon(1e-5));
  // The profile is positive and decreasing while it is resolved.
  const auto& v = res.profile.v;
  for (std::size_t i = 1; i < v.size() && v[i] > 1e-3; ++i) CHECK(v[i] < v[i - 1]);
}

TEST_CASE("small initial values undershoot") {
  const DualTransform g;
  const auto f = model_power(3, 1, 3);
  const Shot s = shoot(g, f, 3, 0.5, ShootingOptions{});
  CHECK(s.outcome == ShotOutcome::Undershoot);
}

TEST_CASE("oracle guards") {
  const auto f = model_power(3, 1, 3);
  try {
    shooting_oracle(DualTransform(), f, 3, std::make_pair(10.0, 20.0), ShootingOptions{});
    FAIL("expected a bracket error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Bracket);
  }
  const FunctionalContext ctx(DualTransform(), model_power(3, 1, 4),
                              Grid(SectorSpec::make(4, 2, Sector::BiaxialTau), 4.0, 0.5));
  try {
    shooting_oracle(ctx);
    FAIL("expected a usage error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Usage);
  }
}
