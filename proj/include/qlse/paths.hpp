#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qlse/grid.hpp"
#include "qlse/nonlinearity.hpp"

namespace qlse {

// Components of s reordered by increasing absolute value; ties keep their
// original order.
std::vector<double> rearrange(std::span<const double> s);

// Odd C^1 cutoff: sign(s) m^2 (3 - 2m) with m = min(|s|, 1).
double odd_cutoff(double s);

// k nested annular bumps. Bumps 1..k-1 live on [4i, 4i + 3 rho]; bump k is the
// large shell [4kR rho, (8k+3)R rho]. The profile of a parameter s puts
// sgn(sigma(s)_i) xi0 chi_i(|sigma(s)_i|) on bump i.
struct PathFamily {
  int k = 1;
  double xi0 = 1.0;
  double R = 10.0;
  SectorSpec sector;

  static PathFamily make(int k, double xi0, double R, SectorSpec sector);
  // Outer radius of the support of every profile, (8k + 3) R.
  double support_radius() const { return (8.0 * k + 3.0) * R; }
};

double bump(int i, double rho, double radius, const PathFamily& fam);

// Plateau intervals (where a bump equals 1) and support intervals of the bumps
// used by s, in bump order.
struct Interval {
  double lo = 0.0, hi = 0.0;
};
std::vector<Interval> bump_supports(std::span<const double> s, const PathFamily& fam);
bool supports_disjoint(std::span<const double> s, const PathFamily& fam);

// s is normalised to max-norm 1 first; s = 0 is a degenerate error.
double profile(std::span<const double> s, double radius, const PathFamily& fam);

// x -> g^{-1}(profile(|scale x|) phi(scale (r1 - r2))) on the grid (no phi in
// the radial sector). The spatial scale maps the support into the grid; the
// reduced energy does not see it.
Field seed_field(std::span<const double> s, const PathFamily& fam, const Grid& grid,
                 const DualTransform& g, double scale);

// Scale putting the support radius at `fill` R_max.
double fit_scale(const PathFamily& fam, double R_max, double fill = 0.75);

// int over R^N of H(profile(|x|) phi(|x1| - |x2|)) (no phi in the radial sector), by
// nested adaptive quadrature in spherical coordinates with breakpoints at the
// bump corners and at the edges of the cutoff.
double h_integral(std::span<const double> s, const PathFamily& fam, const BLNonlinearity& f);

// The 2^k vertices of the max-norm sphere followed by `random_count` Gaussian
// vectors normalised by their max-norm.
std::vector<std::vector<double>> sigma_samples(int k, int random_count, std::uint64_t seed);

struct TuneResult {
  double R = 0.0;
  double min_integral = 0.0;
  std::vector<double> R_history;
  std::vector<double> min_history;
};

// Doubling search from R = 10k for the smallest R with min over samples of
// h_integral >= 1. Gives up (tuning error) beyond 2^20 * 10k.
TuneResult tune_R(int k, double xi0, const SectorSpec& sector, const BLNonlinearity& f,
                  const std::vector<std::vector<double>>& samples);

double min_h_integral(const PathFamily& fam, const BLNonlinearity& f,
                      const std::vector<std::vector<double>>& samples);

}  // namespace qlse
