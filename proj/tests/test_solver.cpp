#include <cmath>

#include "doctest.h"
#include "qlse/error.hpp"
#include "qlse/shooting.hpp"
#include "qlse/solver.hpp"

using namespace qlse;

namespace {

FunctionalContext coarse_radial() {
  return FunctionalContext(DualTransform(), model_power(3, 1, 3),
                           Grid(SectorSpec::make(3, 0, Sector::Radial), 15.0, 0.05));
}

Field gaussian_seed(const FunctionalContext& ctx, double amp) {
  return ctx.grid().sample([&](const auto& x) { return amp * std::exp(-x[0] * x[0] / 4); });
}

}  // namespace

TEST_CASE("radial ground state agrees with the shooting oracle") {
  const auto ctx = coarse_radial();
  const SolveReport r = minimize(ctx, gaussian_seed(ctx, 10.0), SolveConfig{});
  REQUIRE(r.converged);
  const auto oracle = shooting_oracle(ctx);
  const double u0 = ctx.transform()(r.field[0]);
  CHECK(u0 == doctest::Approx(oracle.u0).epsilon(1e-3));
  CHECK(r.beta == doctest::Approx(oracle.energy).epsilon(2e-3));

  CHECK(std::abs(r.deficit) <= 1e-12);
  CHECK(std::abs(ctx.J(r.field) - r.psi / 3.0) <= 1e-10 * r.psi);
  CHECK(std::abs(r.theta - 1.0) <= 1e-3);
  CHECK(r.el_residual < 1e-3);
  CHECK(r.quasilinear_residual < 1e-3);
  CHECK(std::abs(ctx.I_original(ctx.g_of(r.field)) - ctx.J(r.field)) <= 1e-8 * (1 + ctx.J(r.field)));
  // Energies along the history never increase within a round.
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    if (r.history[i].round == r.history[i - 1].round) {
      CHECK(r.history[i].energy <= r.history[i - 1].energy * (1 + 1e-12));
    }
  }
}

TEST_CASE("the solution does not depend on the seed") {
  const auto ctx = coarse_radial();
  const SolveReport a = minimize(ctx, gaussian_seed(ctx, 10.0), SolveConfig{});
  const Field wide = ctx.grid().sample([](const auto& x) {
    const double q = 1 + x[0] * x[0] / 4;
    return 8.0 / (q * q);
  });
  const SolveReport b = minimize(ctx, wide, SolveConfig{});
  CHECK(b.beta == doctest::Approx(a.beta).epsilon(1e-6));
  CHECK(field_distance(ctx.grid(), a.field, b.field) < 1e-3);
}

TEST_CASE("amplitude correction lands on the manifold") {
  const auto ctx = coarse_radial();
  const Field v = ctx.project_to_manifold(gaussian_seed(ctx, 10.0));
  const Field w = amplitude_correct(ctx, Field(1.01 * v));
  CHECK(std::abs(ctx.deficit(w)) <= 1e-12 * ctx.psi(w));
}

TEST_CASE("input validation") {
  const auto ctx = coarse_radial();
  SolveConfig bad;
  bad.grad_tol = 0.0;
  CHECK_THROWS_AS(minimize(ctx, gaussian_seed(ctx, 10.0), bad), Error);
  try {
    minimize(ctx, gaussian_seed(ctx, 0.1), SolveConfig{});
    FAIL("expected an admissibility error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Admissibility);
  }
  try {
    multistart(ctx, {}, SolveConfig{});
    FAIL("expected a usage error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Usage);
  }
}

TEST_CASE("multistart merges repeated solutions and records failures") {
  const auto ctx = coarse_radial();
  const std::vector<Field> seeds{gaussian_seed(ctx, 10.0), gaussian_seed(ctx, 14.0),
                                 gaussian_seed(ctx, 0.1)};
  const auto res = multistart(ctx, seeds, SolveConfig{});
  CHECK(res.runs == 3);
  CHECK(res.solutions.size() == 1);
  CHECK(res.seed_of_solution.front() == 0);
  CHECK(res.failures.size() == 1);
}

TEST_CASE("field distance is sign blind") {
  const auto ctx = coarse_radial();
  const Field v = gaussian_seed(ctx, 1.0);
  CHECK(field_distance(ctx.grid(), v, v) == 0.0);
  CHECK(field_distance(ctx.grid(), v, Field(-v)) == 0.0);
  CHECK(field_distance(ctx.grid(), v, Field(2 * v)) == doctest::Approx(1.0));
}
