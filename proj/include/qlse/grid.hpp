#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace qlse {

using Field = Eigen::VectorXd;

enum class Sector { Radial, BiaxialTau, BiaxialCompactTau };

const char* to_string(Sector s);
Sector parse_sector(const std::string& name);

// Surface measure of the unit sphere in R^d: 2 pi^{d/2} / Gamma(d/2). d = 1 gives 2.
double sphere_measure(int d);

// Dimension N, block size M and symmetry sector. Built through make(), which
// enforces the admissible (N, M) combinations.
struct SectorSpec {
  int N = 3;
  int M = 0;
  Sector sector = Sector::Radial;

  static SectorSpec make(int N, int M, Sector sector);

  double two_star() const { return 2.0 * N / (N - 2.0); }
  bool tau() const { return sector != Sector::Radial; }
  // BiaxialCompactTau with N = 2M has an empty third block and is the same
  // space as BiaxialTau.
  bool is_alias() const { return sector == Sector::BiaxialCompactTau && N == 2 * M; }
  std::string describe() const;
};

// One reduced coordinate. Radial axes carry a measure r^{dim-1} and a regular
// origin; line axes are Cartesian on [-extent, extent]. Outer nodes are Dirichlet.
struct Axis {
  enum class Kind { Radial, Line };
  Kind kind = Kind::Radial;
  int dim = 1;
  int n = 0;
  double delta = 0.0;
  double extent = 0.0;
  std::vector<double> x;       // node coordinates
  std::vector<double> weight;  // exact measure of each node's cell (including sphere factor)
  std::vector<double> face;    // face[i]: flux coefficient between nodes i and i+1

  bool dirichlet(int i) const { return i == n - 1 || (kind == Kind::Line && i == 0); }
};

// Tensor-product finite-volume grid for a sector. Fields are stored flat with
// index (i0 * n1 + i1) * n2 + i2 (missing axes have size 1).
//
// The discrete Dirichlet form is psi(v) = sum over faces of coef * (v_j - v_i)^2
// times the cell weights of the remaining axes, and -Laplacian = W^{-1} K where
// K is the matrix of that form. This makes -Laplacian exactly self-adjoint for
// the weighted inner product and psi(v) = <v, -Laplacian v>.
class Grid {
 public:
  Grid(SectorSpec sector, double R_max, double delta);

  const SectorSpec& sector() const { return sector_; }
  double R_max() const { return R_max_; }
  double delta() const { return delta_; }
  int dims() const { return static_cast<int>(axes_.size()); }
  const Axis& axis(int a) const { return axes_[a]; }
  std::size_t size() const { return size_; }
  const Field& weights() const { return weights_; }
  std::array<int, 3> shape() const { return shape_; }

  std::size_t index(int i0, int i1 = 0, int i2 = 0) const {
    return (static_cast<std::size_t>(i0) * shape_[1] + i1) * shape_[2] + i2;
  }
  std::array<int, 3> unravel(std::size_t idx) const;
  // Reduced coordinates of node idx (dims() entries used).
  std::array<double, 3> coordinates(std::size_t idx) const;
  bool on_boundary(std::size_t idx) const { return boundary_[idx] != 0; }

  Field zeros() const { return Field::Zero(static_cast<Eigen::Index>(size_)); }
  // Evaluates fn(coordinates) at every node; Dirichlet nodes are set to zero.
  template <class Fn>
  Field sample(Fn&& fn) const {
    Field v(static_cast<Eigen::Index>(size_));
    for (std::size_t i = 0; i < size_; ++i) v[i] = on_boundary(i) ? 0.0 : fn(coordinates(i));
    return v;
  }

  void apply_boundary(Field& v) const;

  double integrate(const Field& f) const;
  double inner(const Field& a, const Field& b) const;
  Field laplacian(const Field& v) const;      // Delta_h v
  Field neg_laplacian(const Field& v) const;  // -Delta_h v = W^{-1} K v
  double dirichlet_energy(const Field& v) const;
  // psi with a per-face multiplier c(v_i, v_j) on every squared difference.
  template <class Coef>
  double weighted_dirichlet_energy(const Field& v, Coef&& coef) const;

  // (v - tau v) / 2. Usage error on the radial sector.
  Field antisymmetrize(const Field& v) const;
  // Max |v + tau v| over nodes (0 for exactly antisymmetric fields).
  double antisymmetry_defect(const Field& v) const;

  // w(x) = v(r x) by multilinear interpolation; zero outside the grid.
  Field dilate(const Field& v, double r) const;

  // Visits every face: fn(i, j, coef) with coef including the other axes' weights.
  template <class Fn>
  void for_each_face(Fn&& fn) const;

 private:
  SectorSpec sector_;
  double R_max_;
  double delta_;
  std::vector<Axis> axes_;
  std::array<int, 3> shape_{1, 1, 1};
  std::array<std::size_t, 3> stride_{1, 1, 1};
  std::size_t size_ = 0;
  Field weights_;
  std::vector<char> boundary_;
  std::vector<std::size_t> face_i_, face_j_;
  std::vector<double> face_coef_;
};

template <class Fn>
void Grid::for_each_face(Fn&& fn) const {
  for (std::size_t f = 0; f < face_coef_.size(); ++f) fn(face_i_[f], face_j_[f], face_coef_[f]);
}

template <class Coef>
double Grid::weighted_dirichlet_energy(const Field& v, Coef&& coef) const {
  long double sum = 0.0L;
  for_each_face([&](std::size_t i, std::size_t j, double c) {
    const double dv = v[j] - v[i];
    if (dv != 0.0) sum += static_cast<long double>(c) * coef(v[i], v[j]) * dv * dv;
  });
  return static_cast<double>(sum);
}

// Solver for (-Delta_h + c I) x = y: tridiagonal elimination on radial grids,
// separable eigen-decomposition on tensor grids.
class Smoother {
 public:
  Smoother(const Grid& grid, double shift);
  Field apply(const Field& y) const;
  double shift() const { return shift_; }

 private:
  struct AxisBasis {
    std::vector<int> interior;      // node indices carrying unknowns
    Eigen::MatrixXd phi;            // W-orthonormal eigenvectors (columns)
    Eigen::VectorXd lambda;         // generalized eigenvalues
  };
  Grid grid_;
  double shift_;
  std::vector<AxisBasis> basis_;
  // Radial factorisation.
  std::vector<double> lower_, diag_, upper_;
};

}  // namespace qlse
