#include "qlse/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qlse/error.hpp"

namespace qlse {

const char* to_string(Sector s) {
  switch (s) {
    case Sector::Radial: return "radial";
    case Sector::BiaxialTau: return "biaxial-tau";
    case Sector::BiaxialCompactTau: return "biaxial-compact-tau";
  }
  return "unknown";
}

Sector parse_sector(const std::string& name) {
  std::string s;
  for (char c : name) {
    if (c == '_') c = '-';
    s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (s == "radial") return Sector::Radial;
  if (s == "biaxial-tau" || s == "biaxialtau" || s == "biaxial") return Sector::BiaxialTau;
  if (s == "biaxial-compact-tau" || s == "biaxialcompacttau" || s == "compact")
    return Sector::BiaxialCompactTau;
  fail(ErrorKind::Config, "unknown sector '" + name + "'");
}

double sphere_measure(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

SectorSpec SectorSpec::make(int N, int M, Sector sector) {
  if (N < 3) fail(ErrorKind::Validation, "N must be >= 3");
  SectorSpec s;
  s.N = N;
  s.M = sector == Sector::Radial ? 0 : M;
  s.sector = sector;
  if (sector == Sector::Radial) return s;

  if (N < 4) fail(ErrorKind::Validation, "biaxial sectors require N >= 4");
  if (M < 2 || 2 * M > N) {
    fail(ErrorKind::Validation, "biaxial sectors require 2 <= M <= N/2");
  }
  if (sector == Sector::BiaxialTau) {
    if (N - 2 * M >= 2) {
      fail(ErrorKind::Validation,
           "BiaxialTau with N - 2M >= 2 leaves an unconstrained block of dimension >= 2; "
           "only N = 2M and N = 2M + 1 are supported");
    }
  } else {
    if (N == 5) fail(ErrorKind::Validation, "BiaxialCompactTau requires N != 5");
    if (2 * M == N - 1) fail(ErrorKind::Validation, "BiaxialCompactTau requires 2M != N - 1");
  }
  return s;
}

std::string SectorSpec::describe() const {
  std::ostringstream os;
  os << to_string(sector) << " N=" << N;
  if (sector != Sector::Radial) os << " M=" << M;
  if (is_alias()) os << " (empty third block: same space as biaxial-tau)";
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

int node_count(double extent, double delta) {
  const double q = extent / delta;
  const double k = std::round(q);
  if (k < 2.0 || std::abs(q - k) > 1e-9 * std::max(1.0, q)) {
    std::ostringstream os;
    os << "R_max = " << extent << " must be an integer multiple (>= 2) of delta = " << delta;
    fail(ErrorKind::Validation, os.str());
  }
  return static_cast<int>(k);
}

Axis radial_axis(int dim, double R, double delta) {
  Axis ax;
  ax.kind = Axis::Kind::Radial;
  ax.dim = dim;
  ax.delta = delta;
  ax.extent = R;
  ax.n = node_count(R, delta) + 1;
  const double omega = sphere_measure(dim);
  for (int i = 0; i < ax.n; ++i) {
    ax.x.push_back(i * delta);
    const double lo = std::max(0.0, (i - 0.5) * delta);
    const double hi = std::min(R, (i + 0.5) * delta);
    ax.weight.push_back(omega * (std::pow(hi, dim) - std::pow(lo, dim)) / dim);
  }
  for (int i = 0; i + 1 < ax.n; ++i) {
    ax.face.push_back(omega * std::pow((i + 0.5) * delta, dim - 1) / delta);
  }
  return ax;
}

Axis line_axis(double R, double delta) {
  Axis ax;
  ax.kind = Axis::Kind::Line;
  ax.dim = 1;
  ax.delta = delta;
  ax.extent = R;
  ax.n = 2 * node_count(R, delta) + 1;
  for (int i = 0; i < ax.n; ++i) {
    ax.x.push_back(-R + i * delta);
    ax.weight.push_back((i == 0 || i == ax.n - 1) ? 0.5 * delta : delta);
  }
  ax.face.assign(ax.n - 1, 1.0 / delta);
  return ax;
}

}  // namespace

Grid::Grid(SectorSpec sector, double R_max, double delta)
    : sector_(sector), R_max_(R_max), delta_(delta) {
  if (!(delta > 0.0) || !(R_max > 0.0)) {
    fail(ErrorKind::Validation, "grid: R_max and delta must be positive");
  }
  const int N = sector.N, M = sector.M;
  switch (sector.sector) {
    case Sector::Radial:
      axes_.push_back(radial_axis(N, R_max, delta));
      break;
    case Sector::BiaxialTau:
    case Sector::BiaxialCompactTau:
      axes_.push_back(radial_axis(M, R_max, delta));
      axes_.push_back(radial_axis(M, R_max, delta));
      if (N - 2 * M == 1 && sector.sector == Sector::BiaxialTau) {
        axes_.push_back(line_axis(R_max, delta));
      } else if (N - 2 * M >= 1) {
        axes_.push_back(radial_axis(N - 2 * M, R_max, delta));
      }
      break;
  }
  for (int a = 0; a < dims(); ++a) shape_[a] = axes_[a].n;
  stride_ = {static_cast<std::size_t>(shape_[1]) * shape_[2], static_cast<std::size_t>(shape_[2]),
             1};
  size_ = static_cast<std::size_t>(shape_[0]) * shape_[1] * shape_[2];

  weights_.resize(static_cast<Eigen::Index>(size_));
  boundary_.assign(size_, 0);
  for (std::size_t idx = 0; idx < size_; ++idx) {
    const auto ii = unravel(idx);
    double w = 1.0;
    bool b = false;
    for (int a = 0; a < dims(); ++a) {
      w *= axes_[a].weight[ii[a]];
      b = b || axes_[a].dirichlet(ii[a]);
    }
    weights_[idx] = w;
    boundary_[idx] = b ? 1 : 0;
  }
  for (std::size_t idx = 0; idx < size_; ++idx) {
    const auto ii = unravel(idx);
    for (int a = 0; a < dims(); ++a) {
      if (ii[a] + 1 >= axes_[a].n) continue;
      double other = 1.0;
      for (int b = 0; b < dims(); ++b) {
        if (b != a) other *= axes_[b].weight[ii[b]];
      }
      face_i_.push_back(idx);
      face_j_.push_back(idx + stride_[a]);
      face_coef_.push_back(axes_[a].face[ii[a]] * other);
    }
  }
}

std::array<int, 3> Grid::unravel(std::size_t idx) const {
  const int i2 = static_cast<int>(idx % shape_[2]);
  const std::size_t t = idx / shape_[2];
  return {static_cast<int>(t / shape_[1]), static_cast<int>(t % shape_[1]), i2};
}

std::array<double, 3> Grid::coordinates(std::size_t idx) const {
  const auto ii = unravel(idx);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dims(); ++a) x[a] = axes_[a].x[ii[a]];
  return x;
}

void Grid::apply_boundary(Field& v) const {
  for (std::size_t i = 0; i < size_; ++i) {
    if (boundary_[i]) v[i] = 0.0;
  }
}

double Grid::inner(const Field& a, const Field& b) const {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < size_; ++i) sum += static_cast<long double>(weights_[i]) * a[i] * b[i];
  return static_cast<double>(sum);
}

double Grid::integrate(const Field& f) const {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < size_; ++i) sum += static_cast<long double>(weights_[i]) * f[i];
  return static_cast<double>(sum);
}

Field Grid::neg_laplacian(const Field& v) const {
  Field out = Field::Zero(v.size());
  for (std::size_t f = 0; f < face_coef_.size(); ++f) {
    const std::size_t i = face_i_[f], j = face_j_[f];
    const double flux = face_coef_[f] * (v[i] - v[j]);
    out[i] += flux;
    out[j] -= flux;
  }
  for (std::size_t i = 0; i < size_; ++i) out[i] = boundary_[i] ? 0.0 : out[i] / weights_[i];
  if (sector_.tau()) out = antisymmetrize(out);
  return out;
}

Field Grid::laplacian(const Field& v) const { return -neg_laplacian(v); }

double Grid::dirichlet_energy(const Field& v) const {
  long double sum = 0.0L;
  for (std::size_t f = 0; f < face_coef_.size(); ++f) {
    const double dv = v[face_j_[f]] - v[face_i_[f]];
    sum += static_cast<long double>(face_coef_[f]) * dv * dv;
  }
  return static_cast<double>(sum);
}

Field Grid::antisymmetrize(const Field& v) const {
  if (!sector_.tau()) fail(ErrorKind::Usage, "antisymmetrize: radial sector has no tau symmetry");
  Field out(v.size());
  for (int i0 = 0; i0 < shape_[0]; ++i0) {
    for (int i1 = 0; i1 < shape_[1]; ++i1) {
      for (int i2 = 0; i2 < shape_[2]; ++i2) {
        out[index(i0, i1, i2)] = 0.5 * (v[index(i0, i1, i2)] - v[index(i1, i0, i2)]);
      }
    }
  }
  return out;
}

double Grid::antisymmetry_defect(const Field& v) const {
  if (!sector_.tau()) return 0.0;
  double worst = 0.0;
  for (int i0 = 0; i0 < shape_[0]; ++i0) {
    for (int i1 = 0; i1 < shape_[1]; ++i1) {
      for (int i2 = 0; i2 < shape_[2]; ++i2) {
        worst = std::max(worst, std::abs(v[index(i0, i1, i2)] + v[index(i1, i0, i2)]));
      }
    }
  }
  return worst;
}

Field Grid::dilate(const Field& v, double r) const {
  if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorKind::Domain, "dilate: factor must be positive");
  Field out = zeros();
  const int d = dims();
  for (std::size_t idx = 0; idx < size_; ++idx) {
    if (boundary_[idx]) continue;
    const auto ii = unravel(idx);
    std::array<int, 3> lo{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
    bool outside = false;
    for (int a = 0; a < d; ++a) {
      const Axis& ax = axes_[a];
      double p;
      if (ax.kind == Axis::Kind::Radial) {
        p = r * ii[a];
      } else {
        p = (r * ax.x[ii[a]] + ax.extent) / ax.delta;
      }
      const double pr = std::round(p);
      if (std::abs(p - pr) <= 1e-12 * std::max(1.0, std::abs(p))) p = pr;
      if (p < 0.0 || p > ax.n - 1) {
        outside = true;
        break;
      }
      lo[a] = std::min(static_cast<int>(std::floor(p)), ax.n - 1);
      frac[a] = p - lo[a];
    }
    if (outside) continue;
    double value = 0.0;
    for (int corner = 0; corner < (1 << d); ++corner) {
      double w = 1.0;
      std::array<int, 3> jj{0, 0, 0};
      bool skip = false;
      for (int a = 0; a < d; ++a) {
        const bool up = (corner >> a) & 1;
        if (up && frac[a] == 0.0) {
          skip = true;
          break;
        }
        w *= up ? frac[a] : 1.0 - frac[a];
        jj[a] = lo[a] + (up ? 1 : 0);
      }
      if (skip || w == 0.0) continue;
      value += w * v[index(jj[0], jj[1], jj[2])];
    }
    out[idx] = value;
  }
  if (sector_.tau()) out = antisymmetrize(out);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Tridiagonal (K_a, W_a) restricted to the unknown nodes of one axis.
void axis_operator(const Axis& ax, const std::vector<int>& interior, std::vector<double>& diag,
                   std::vector<double>& off, std::vector<double>& mass) {
  const std::size_t m = interior.size();
  diag.assign(m, 0.0);
  off.assign(m > 0 ? m - 1 : 0, 0.0);
  mass.assign(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const int i = interior[k];
    if (i > 0) diag[k] += ax.face[i - 1];
    if (i + 1 < ax.n) diag[k] += ax.face[i];
    mass[k] = ax.weight[i];
    if (k + 1 < m) off[k] = -ax.face[i];
  }
}

std::vector<int> interior_nodes(const Axis& ax) {
  std::vector<int> out;
  for (int i = 0; i < ax.n; ++i) {
    if (!ax.dirichlet(i)) out.push_back(i);
  }
  return out;
}

}  // namespace

Smoother::Smoother(const Grid& grid, double shift) : grid_(grid), shift_(shift) {
  if (!(shift > 0.0)) fail(ErrorKind::Validation, "precondition shift must be positive");
  if (grid.dims() == 1) {
    const Axis& ax = grid.axis(0);
    const auto interior = interior_nodes(ax);
    std::vector<double> diag, off, mass;
    axis_operator(ax, interior, diag, off, mass);
    const std::size_t m = interior.size();
    lower_.assign(m, 0.0);
    diag_.assign(m, 0.0);
    upper_.assign(m, 0.0);
    // LU factors of the tridiagonal K + cW.
    for (std::size_t k = 0; k < m; ++k) {
      const double a = diag[k] + shift * mass[k];
      if (k == 0) {
        diag_[k] = a;
      } else {
        lower_[k] = off[k - 1] / diag_[k - 1];
        diag_[k] = a - lower_[k] * off[k - 1];
      }
      if (k + 1 < m) upper_[k] = off[k];
    }
    return;
  }
  for (int a = 0; a < grid.dims(); ++a) {
    const Axis& ax = grid.axis(a);
    AxisBasis basis;
    basis.interior = interior_nodes(ax);
    std::vector<double> diag, off, mass;
    axis_operator(ax, basis.interior, diag, off, mass);
    const auto m = static_cast<Eigen::Index>(basis.interior.size());
    Eigen::VectorXd d(m), sub(std::max<Eigen::Index>(m - 1, 0)), isq(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      isq[k] = 1.0 / std::sqrt(mass[k]);
      d[k] = diag[k] * isq[k] * isq[k];
    }
    for (Eigen::Index k = 0; k + 1 < m; ++k) sub[k] = off[k] * isq[k] * isq[k + 1];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(d, sub, Eigen::ComputeEigenvectors);
    if (eig.info() != Eigen::Success) fail(ErrorKind::Numeric, "smoother: eigen-decomposition failed");
    basis.lambda = eig.eigenvalues();
    basis.phi = isq.asDiagonal() * eig.eigenvectors();
    basis_.push_back(std::move(basis));
  }
}

namespace {

// out = A applied along `axis` of a tensor with extents m.
void mode_product(const Eigen::MatrixXd& A, int axis, const std::array<int, 3>& m,
                  const std::vector<double>& in, std::vector<double>& out) {
  out.assign(in.size(), 0.0);
  std::array<std::size_t, 3> stride{static_cast<std::size_t>(m[1]) * m[2],
                                    static_cast<std::size_t>(m[2]), 1};
  const int n = m[axis];
  std::vector<double> line(n), res(n);
  std::array<int, 3> ext = m;
  ext[axis] = 1;
  for (int a0 = 0; a0 < ext[0]; ++a0) {
    for (int a1 = 0; a1 < ext[1]; ++a1) {
      for (int a2 = 0; a2 < ext[2]; ++a2) {
        const std::size_t base = a0 * stride[0] + a1 * stride[1] + a2 * stride[2];
        for (int k = 0; k < n; ++k) line[k] = in[base + k * stride[axis]];
        Eigen::Map<Eigen::VectorXd> lv(line.data(), n), rv(res.data(), n);
        rv.noalias() = A * lv;
        for (int k = 0; k < n; ++k) out[base + k * stride[axis]] = res[k];
      }
    }
  }
}

}  // namespace

Field Smoother::apply(const Field& y) const {
  const Grid& g = grid_;
  Field x = g.zeros();
  if (g.dims() == 1) {
    const Axis& ax = g.axis(0);
    const auto interior = interior_nodes(ax);
    const std::size_t m = interior.size();
    std::vector<double> z(m);
    for (std::size_t k = 0; k < m; ++k) z[k] = ax.weight[interior[k]] * y[interior[k]];
    for (std::size_t k = 1; k < m; ++k) z[k] -= lower_[k] * z[k - 1];
    for (std::size_t k = m; k-- > 0;) {
      double s = z[k];
      if (k + 1 < m) s -= upper_[k] * z[k + 1];
      z[k] = s / diag_[k];
    }
    for (std::size_t k = 0; k < m; ++k) x[interior[k]] = z[k];
    return x;
  }

  const int d = g.dims();
  std::array<int, 3> m{1, 1, 1};
  for (int a = 0; a < d; ++a) m[a] = static_cast<int>(basis_[a].interior.size());
  const std::size_t total = static_cast<std::size_t>(m[0]) * m[1] * m[2];
  std::vector<double> t(total), tmp;
  auto node = [&](int k0, int k1, int k2) {
    std::array<int, 3> k{k0, k1, k2};
    std::array<int, 3> i{0, 0, 0};
    for (int a = 0; a < d; ++a) i[a] = basis_[a].interior[k[a]];
    return g.index(i[0], i[1], i[2]);
  };
  std::size_t p = 0;
  for (int k0 = 0; k0 < m[0]; ++k0)
    for (int k1 = 0; k1 < m[1]; ++k1)
      for (int k2 = 0; k2 < m[2]; ++k2, ++p) {
        const std::size_t idx = node(k0, k1, k2);
        t[p] = g.weights()[idx] * y[idx];
      }
  for (int a = 0; a < d; ++a) {
    mode_product(basis_[a].phi.transpose(), a, m, t, tmp);
    t.swap(tmp);
  }
  p = 0;
  for (int k0 = 0; k0 < m[0]; ++k0)
    for (int k1 = 0; k1 < m[1]; ++k1)
      for (int k2 = 0; k2 < m[2]; ++k2, ++p) {
        double lam = shift_;
        const std::array<int, 3> k{k0, k1, k2};
        for (int a = 0; a < d; ++a) lam += basis_[a].lambda[k[a]];
        t[p] /= lam;
      }
  for (int a = 0; a < d; ++a) {
    mode_product(basis_[a].phi, a, m, t, tmp);
    t.swap(tmp);
  }
  p = 0;
  for (int k0 = 0; k0 < m[0]; ++k0)
    for (int k1 = 0; k1 < m[1]; ++k1)
      for (int k2 = 0; k2 < m[2]; ++k2, ++p) x[node(k0, k1, k2)] = t[p];
  if (g.sector().tau()) x = g.antisymmetrize(x);
  return x;
}

}  // namespace qlse
