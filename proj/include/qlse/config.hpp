#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlse/dual_transform.hpp"
#include "qlse/grid.hpp"
#include "qlse/nonlinearity.hpp"
#include "qlse/solver.hpp"

namespace qlse {

// A run configuration, read from an INI file:
//
//   [problem]  N, M, sector, kappa, nonlinearity, p, m, semilinear
//   [grid]     R_max, delta
//   [solver]   max_iter, grad_tol, max_rounds, precondition_shift
//   [seed]     amplitude, width
//   [paths]    k, R, samples, s, fill, multistart
//   [oracle]   a_lo, a_hi
//   [sweep]    p, m, N          (comma separated lists)
//   [output]   directory
//   [random]   seed
//
// Unknown sections or keys are rejected so that typos do not silently fall
// back to defaults.
struct RunConfig {
  struct Problem {
    int N = 3;
    int M = 0;
    Sector sector = Sector::Radial;
    double kappa = 1.0;
    std::string nonlinearity = "power";
    double p = 3.0;
    double m = 1.0;
    bool semilinear = false;  // g = identity: the classical -Delta u + m u = ... problem
  } problem;

  struct GridSize {
    double R_max = 20.0;
    double delta = 0.0;  // 0: 0.05 radial, 0.1 otherwise
  } grid;

  SolveConfig solver;

  struct Seed {
    double amplitude = 2.0;  // doubled until the seed is admissible
    double width = 2.0;
  } seed;

  struct Paths {
    int k = 0;              // 0: no path seeds
    double R = 0.0;         // 0: tuned
    int samples = 100;      // random points of Sigma_k besides the vertices
    std::vector<double> s;  // explicit parameter for `solve`
    double fill = 0.75;     // support radius as a fraction of R_max
    bool multistart = false;
  } paths;

  struct Oracle {
    std::optional<double> a_lo, a_hi;
  } oracle;

  struct Sweep {
    std::vector<double> p, m;
    std::vector<int> N;
  } sweep;

  std::string output_dir = "qlse-out";
  std::uint64_t random_seed = 1;

  SectorSpec sector_spec() const;
  double effective_delta() const;
  DualTransform transform() const;
  // The kappa = 1 form of the configured nonlinearity.
  BLNonlinearity nonlinearity() const;
  Grid make_grid(bool refine = false) const;
  void validate() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace qlse
