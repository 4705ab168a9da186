#include "qlse/paths.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qlse/error.hpp"

namespace qlse {

std::vector<double> rearrange(std::span<const double> s) {
  std::vector<double> out(s.begin(), s.end());
  std::stable_sort(out.begin(), out.end(),
                   [](double a, double b) { return std::abs(a) < std::abs(b); });
  return out;
}

double odd_cutoff(double s) {
  const double m = std::min(std::abs(s), 1.0);
  const double v = m * m * (3.0 - 2.0 * m);
  return s < 0.0 ? -v : v;
}

PathFamily PathFamily::make(int k, double xi0, double R, SectorSpec sector) {
  if (k < 1) fail(ErrorKind::Validation, "paths: k must be >= 1");
  if (!(xi0 > 0.0)) fail(ErrorKind::Validation, "paths: xi0 must be positive");
  if (!(R >= 10.0 * k)) {
    std::ostringstream os;
    os << "paths: R = " << R << " must be at least 10k = " << 10 * k;
    fail(ErrorKind::Validation, os.str());
  }
  PathFamily fam;
  fam.k = k;
  fam.xi0 = xi0;
  fam.R = R;
  fam.sector = sector;
  return fam;
}

double bump(int i, double rho, double radius, const PathFamily& fam) {
  if (i < 1 || i > fam.k) fail(ErrorKind::Usage, "bump: index out of range");
  if (rho <= 0.0) return 0.0;
  const double t = std::abs(radius);
  if (i < fam.k) {
    const double a = 4.0 * i;
    if (t >= a && t <= a + rho) return (t - a) / rho;
    if (t > a + rho && t <= a + 2.0 * rho) return 1.0;
    if (t > a + 2.0 * rho && t <= a + 3.0 * rho) return (-t + 3.0 * rho + a) / rho;
    return 0.0;
  }
  const double k = fam.k;
  const double unit = fam.R * rho;
  if (t >= 4.0 * k * unit && t <= (4.0 * k + 1.0) * unit) return t / unit - 4.0 * k;
  if (t >= (4.0 * k + 1.0) * unit && t <= (8.0 * k + 2.0) * unit) return 1.0;
  if (t >= (8.0 * k + 2.0) * unit && t <= (8.0 * k + 3.0) * unit) return -t / unit + 3.0 + 8.0 * k;
  return 0.0;
}

namespace {

std::vector<double> normalized(std::span<const double> s, int k) {
  if (static_cast<int>(s.size()) != k) {
    fail(ErrorKind::Validation, "paths: parameter vector must have k components");
  }
  double mx = 0.0;
  for (double x : s) mx = std::max(mx, std::abs(x));
  if (!(mx > 0.0)) fail(ErrorKind::Degenerate, "paths: parameter vector is zero");
  std::vector<double> out(s.begin(), s.end());
  for (double& x : out) x /= mx;
  return out;
}

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Radii where the profile of s has a corner.
std::vector<double> corners(const std::vector<double>& sigma, const PathFamily& fam) {
  std::vector<double> out;
  for (int i = 1; i <= fam.k; ++i) {
    const double rho = std::abs(sigma[i - 1]);
    if (rho <= 0.0) continue;
    if (i < fam.k) {
      for (int j = 0; j < 4; ++j) out.push_back(4.0 * i + j * rho);
    } else {
      const double k = fam.k, u = fam.R * rho;
      for (double c : {4.0 * k, 4.0 * k + 1.0, 8.0 * k + 2.0, 8.0 * k + 3.0}) out.push_back(c * u);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double profile_sorted(const std::vector<double>& sigma, double radius, const PathFamily& fam) {
  double sum = 0.0;
  for (int i = 1; i <= fam.k; ++i) {
    const double si = sigma[i - 1];
    if (si == 0.0) continue;
    sum += fam.xi0 * sgn(si) * bump(i, std::abs(si), radius, fam);
  }
  return sum;
}

}  // namespace

std::vector<Interval> bump_supports(std::span<const double> s, const PathFamily& fam) {
  const auto sigma = rearrange(normalized(s, fam.k));
  std::vector<Interval> out;
  for (int i = 1; i <= fam.k; ++i) {
    const double rho = std::abs(sigma[i - 1]);
    if (rho <= 0.0) continue;
    if (i < fam.k) {
      out.push_back({4.0 * i, 4.0 * i + 3.0 * rho});
    } else {
      out.push_back({4.0 * fam.k * fam.R * rho, (8.0 * fam.k + 3.0) * fam.R * rho});
    }
  }
  return out;
}

bool supports_disjoint(std::span<const double> s, const PathFamily& fam) {
  auto iv = bump_supports(s, fam);
  std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i + 1 < iv.size(); ++i) {
    if (!(iv[i].hi < iv[i + 1].lo)) return false;
  }
  return true;
}

double profile(std::span<const double> s, double radius, const PathFamily& fam) {
  return profile_sorted(rearrange(normalized(s, fam.k)), radius, fam);
}

double fit_scale(const PathFamily& fam, double R_max, double fill) {
  return fam.support_radius() / (fill * R_max);
}

Field seed_field(std::span<const double> s, const PathFamily& fam, const Grid& grid,
                 const DualTransform& g, double scale) {
  if (fam.sector.sector != grid.sector().sector || fam.sector.N != grid.sector().N) {
    fail(ErrorKind::Validation, "seed_field: family and grid sectors differ");
  }
  if (!(scale > 0.0)) fail(ErrorKind::Validation, "seed_field: scale must be positive");
  const auto sigma = rearrange(normalized(s, fam.k));
  const bool tau = grid.sector().tau();
  const int d = grid.dims();
  return grid.sample([&](const std::array<double, 3>& x) {
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) r2 += x[a] * x[a];
    double value = profile_sorted(sigma, scale * std::sqrt(r2), fam);
    if (tau) value *= odd_cutoff(scale * (x[0] - x[1]));
    return g.inverse(value);
  });
}

namespace {

using boost::math::quadrature::gauss_kronrod;

double gk(const std::function<double(double)>& fn, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  return gauss_kronrod<double, 15>::integrate(fn, a, b, 10, tol);
}

// Integral over theta in [0, pi/4] (doubled by the tau-symmetry of |phi|) of
// H(P phi(rho (cos - sin))) with weight (cos sin)^{M-1}.
double theta_integral(double P, double rho, int M, const BLNonlinearity& f) {
  constexpr double quarter = std::numbers::pi / 4.0;
  auto fn = [&](double th) {
    const double c = std::cos(th), s = std::sin(th);
    const double w = std::pow(c * s, M - 1);
    return f.H(P * odd_cutoff(rho * (c - s))) * w;
  };
  std::vector<double> br{0.0};
  const double q = 1.0 / (rho * std::numbers::sqrt2);
  if (rho > 0.0 && q <= 1.0) {
    const double tc = std::acos(q) - quarter;
    if (tc > 0.0 && tc < quarter) br.push_back(tc);
  }
  br.push_back(quarter);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) sum += gk(fn, br[i], br[i + 1], 1e-10);
  return 2.0 * sum;
}

double angular_integral(double P, double rho, const SectorSpec& sec, const BLNonlinearity& f) {
  if (P == 0.0) return 0.0;
  if (!sec.tau()) return sphere_measure(sec.N) * f.H(P);
  const int M = sec.M;
  const int d3 = sec.N - 2 * M;
  const double om = sphere_measure(M);
  if (d3 == 0) return om * om * theta_integral(P, rho, M, f);
  auto fn = [&](double ph) {
    const double sp = std::sin(ph), cp = std::cos(ph);
    return theta_integral(P, rho * sp, M, f) * std::pow(sp, 2 * M - 1) * std::pow(cp, d3 - 1);
  };
  // phi(rho sin(ph) (cos - sin)) saturates for every theta below the edge once
  // rho sin(ph) is large; put a breakpoint where rho sin(ph) = sqrt(2).
  std::vector<double> br{0.0};
  if (rho > std::numbers::sqrt2) br.push_back(std::asin(std::numbers::sqrt2 / rho));
  br.push_back(std::numbers::pi / 2.0);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) sum += gk(fn, br[i], br[i + 1], 1e-10);
  return om * om * sphere_measure(d3) * sum;
}

}  // namespace

double h_integral(std::span<const double> s, const PathFamily& fam, const BLNonlinearity& f) {
  const auto sigma = rearrange(normalized(s, fam.k));
  const auto br = corners(sigma, fam);
  const int N = fam.sector.N;
  auto fn = [&](double rho) {
    const double P = profile_sorted(sigma, rho, fam);
    return angular_integral(P, rho, fam.sector, f) * std::pow(rho, N - 1);
  };
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    if (br[i + 1] > br[i]) sum += gk(fn, br[i], br[i + 1], 1e-9);
  }
  return sum;
}

std::vector<std::vector<double>> sigma_samples(int k, int random_count, std::uint64_t seed) {
  if (k < 1 || k > 20) fail(ErrorKind::Validation, "sigma_samples: k must be in [1, 20]");
  std::vector<std::vector<double>> out;
  for (std::uint64_t mask = 0; mask < (1ULL << k); ++mask) {
    std::vector<double> v(k);
    for (int i = 0; i < k; ++i) v[i] = ((mask >> i) & 1ULL) ? -1.0 : 1.0;
    out.push_back(std::move(v));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int j = 0; j < random_count; ++j) {
    std::vector<double> v(k);
    double mx = 0.0;
    do {
      for (double& x : v) x = normal(rng);
      mx = 0.0;
      for (double x : v) mx = std::max(mx, std::abs(x));
    } while (!(mx > 0.0));
    for (double& x : v) x /= mx;
    out.push_back(std::move(v));
  }
  return out;
}

double min_h_integral(const PathFamily& fam, const BLNonlinearity& f,
                      const std::vector<std::vector<double>>& samples) {
  if (samples.empty()) fail(ErrorKind::Validation, "paths: empty sample set");
  double mn = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) mn = std::min(mn, h_integral(s, fam, f));
  return mn;
}

TuneResult tune_R(int k, double xi0, const SectorSpec& sector, const BLNonlinearity& f,
                  const std::vector<std::vector<double>>& samples) {
  TuneResult out;
  const double start = 10.0 * k;
  const double limit = std::ldexp(start, 20);
  for (double R = start; R <= limit; R *= 2.0) {
    const PathFamily fam = PathFamily::make(k, xi0, R, sector);
    const double mn = min_h_integral(fam, f, samples);
    out.R_history.push_back(R);
    out.min_history.push_back(mn);
    if (mn >= 1.0) {
      out.R = R;
      out.min_integral = mn;
      return out;
    }
  }
  std::ostringstream os;
  os << "tune_R: no R <= 2^20 * 10k gives min int H >= 1 (last minimum "
     << out.min_history.back() << "); check xi0 and the nonlinearity";
  fail(ErrorKind::Tuning, os.str());
}

}  // namespace qlse
