#include "llhmm/grid.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace llhmm {

namespace {

double wrap_unit(double y) {
  y -= std::floor(y);
  return y < 1.0 ? y : 0.0;  // guard against floor rounding at integers
}

}  // namespace

PeriodicGrid::PeriodicGrid(int dim_, int n_, double length_)
    : dim(dim_), n(n_), length(length_), h(length_ / n_) {
  if (dim < 1 || dim > 3) {
    throw Error("PeriodicGrid: dim must be 1, 2 or 3");
  }
  if (n < 4) {
    throw Error("PeriodicGrid: need at least 4 points per axis");
  }
  if (!(length > 0.0)) {
    throw Error("PeriodicGrid: length must be positive");
  }
}

std::size_t PeriodicGrid::node_count() const {
  std::size_t c = 1;
  for (int a = 0; a < dim; ++a) {
    c *= static_cast<std::size_t>(n);
  }
  return c;
}

std::size_t PeriodicGrid::index(int i0, int i1, int i2) const {
  std::size_t idx = static_cast<std::size_t>(wrap(i0));
  if (dim > 1) idx = idx * n + wrap(i1);
  if (dim > 2) idx = idx * n + wrap(i2);
  return idx;
}

Point PeriodicGrid::coord(std::size_t flat) const {
  Point p{0.0, 0.0, 0.0};
  for (int a = dim - 1; a >= 0; --a) {
    p[a] = static_cast<double>(flat % n) * h;
    flat /= n;
  }
  return p;
}

double ScalarField::mean() const {
  double s = 0.0;
  for (double x : v_) s += x;
  return s / static_cast<double>(v_.size());
}

void ScalarField::subtract_mean() {
  const double m = mean();
  for (double& x : v_) x -= m;
}

double VectorField::max_unit_deviation() const {
  double worst = 0.0;
  for (const Vec3& m : v_) {
    worst = std::max(worst, std::abs(norm(m) - 1.0));
  }
  return worst;
}

void VectorField::renormalize() {
  for (Vec3& m : v_) m = normalized(m);
}

Coefficient::Coefficient(std::function<double(const Point&)> cell_fn, int dim, double epsilon,
                         std::string name)
    : fn_(std::move(cell_fn)), dim_(dim), eps_(epsilon), name_(std::move(name)) {
  if (!(eps_ > 0.0)) {
    throw Error("Coefficient: epsilon must be positive");
  }
  // Bound estimate by dense unit-cell sampling; also validates positivity.
  const int s = dim_ == 1 ? 4096 : (dim_ == 2 ? 512 : 64);
  double lo = 1e300, hi = -1e300;
  Point y{0.0, 0.0, 0.0};
  if (dim_ == 1) {
    for (int i = 0; i < s; ++i) {
      y[0] = (i + 0.5) / s;
      const double v = fn_(y);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  } else {
    const int s1 = s, s2 = s, s3 = dim_ > 2 ? s : 1;
    for (int i = 0; i < s1; ++i) {
      for (int j = 0; j < s2; ++j) {
        for (int k = 0; k < s3; ++k) {
          y = {(i + 0.5) / s1, (j + 0.5) / s2, dim_ > 2 ? (k + 0.5) / s3 : 0.0};
          const double v = fn_(y);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
    }
  }
  a_min_ = lo;
  a_max_ = hi;
  if (!(a_min_ > 0.0)) {
    throw Error("Coefficient '" + name_ + "': sampled minimum " + std::to_string(a_min_) +
                " is not positive");
  }
}

double Coefficient::eval_cell(const Point& y) const {
  Point w{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) w[a] = wrap_unit(y[a]);
  return fn_(w);
}

double Coefficient::eval(const Point& x) const {
  Point y{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) y[a] = x[a] / eps_;
  return eval_cell(y);
}

Coefficient Coefficient::with_epsilon(double eps) const {
  Coefficient c = *this;
  c.eps_ = eps;
  if (!(eps > 0.0)) {
    throw Error("Coefficient: epsilon must be positive");
  }
  return c;
}

Coefficient Coefficient::constant(double c, int dim, double epsilon) {
  if (!(c > 0.0)) {
    throw Error("Coefficient::constant: value must be positive");
  }
  Coefficient out([c](const Point&) { return c; }, dim, epsilon, "constant");
  out.constant_ = true;
  return out;
}

Coefficient Coefficient::paper_1d(double epsilon) {
  using std::numbers::pi;
  return Coefficient(
      [](const Point& y) {
        return 1.0 + 0.5 * std::sin(2.0 * pi * y[0]) + 0.5 * std::sin(4.0 * pi * y[0]);
      },
      1, epsilon, "paper_1d");
}

Coefficient Coefficient::paper_2d(double epsilon) {
  using std::numbers::pi;
  return Coefficient(
      [](const Point& y) {
        const double s1 = std::sin(2.0 * pi * y[0]);
        const double s2 = std::sin(2.0 * pi * y[1]);
        return 0.5 + (0.5 + 0.25 * s1) * (0.5 + 0.25 * s2) +
               0.25 * std::cos(2.0 * pi * (y[0] - y[1])) + 0.25 * s1;
      },
      2, epsilon, "paper_2d");
}

FluxStencil::FluxStencil(const PeriodicGrid& g, const Coefficient& c, double min_points_per_period)
    : grid_(g), coeff_(c) {
  if (c.dim() != g.dim) {
    throw GridMismatch("FluxStencil: coefficient dimension does not match grid");
  }
  if (!c.is_constant() && min_points_per_period > 0.0 &&
      c.epsilon() / g.h < min_points_per_period * (1.0 - 1e-9)) {
    throw GridTooCoarse("FluxStencil: h = " + std::to_string(g.h) + " does not resolve eps = " +
                        std::to_string(c.epsilon()) + " (need >= " +
                        std::to_string(min_points_per_period) + " points per period)");
  }
  face_.resize(g.dim);
  const std::size_t nn = g.node_count();
  for (int a = 0; a < g.dim; ++a) {
    face_[a].resize(nn);
  }
  for (std::size_t i = 0; i < nn; ++i) {
    Point p = g.coord(i);
    for (int a = 0; a < g.dim; ++a) {
      Point q = p;
      q[a] += 0.5 * g.h;
      face_[a][i] = c.eval(q);
    }
  }
}

namespace {

// div(a grad u) assembled from per-axis face fluxes; T is double or Vec3.
template <typename FieldT>
void apply_flux(const PeriodicGrid& g, const std::vector<std::vector<double>>& face,
                const FieldT& u, FieldT& out) {
  const double inv_h2 = 1.0 / (g.h * g.h);
  const int n = g.n;
  if (g.dim == 1) {
    const auto& a = face[0];
    for (int i = 0; i < n; ++i) {
      const int ip = i + 1 == n ? 0 : i + 1;
      const int im = i == 0 ? n - 1 : i - 1;
      out[i] = (a[i] * (u[ip] - u[i]) - a[im] * (u[i] - u[im])) * inv_h2;
    }
    return;
  }
  if (g.dim == 2) {
    const auto& ax = face[0];
    const auto& ay = face[1];
    for (int i = 0; i < n; ++i) {
      const int ip = i + 1 == n ? 0 : i + 1;
      const int im = i == 0 ? n - 1 : i - 1;
      const std::size_t ri = static_cast<std::size_t>(i) * n;
      const std::size_t rp = static_cast<std::size_t>(ip) * n;
      const std::size_t rm = static_cast<std::size_t>(im) * n;
      for (int j = 0; j < n; ++j) {
        const int jp = j + 1 == n ? 0 : j + 1;
        const int jm = j == 0 ? n - 1 : j - 1;
        const std::size_t c = ri + j;
        out[c] = (ax[c] * (u[rp + j] - u[c]) - ax[rm + j] * (u[c] - u[rm + j]) +
                  ay[c] * (u[ri + jp] - u[c]) - ay[ri + jm] * (u[c] - u[ri + jm])) *
                 inv_h2;
      }
    }
    return;
  }
  // dim == 3: generic strided form.
  const std::size_t sx = static_cast<std::size_t>(n) * n, sy = n, sz = 1;
  const std::size_t strides[3] = {sx, sy, sz};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const std::size_t c = i * sx + j * sy + k;
        const int idx[3] = {i, j, k};
        auto acc = u[c];
        acc = acc - acc;  // zero of the node type
        for (int a = 0; a < 3; ++a) {
          const std::size_t st = strides[a];
          const std::size_t up = idx[a] + 1 == n ? c - (n - 1) * st : c + st;
          const std::size_t dn = idx[a] == 0 ? c + (n - 1) * st : c - st;
          acc = acc + face[a][c] * (u[up] - u[c]) - face[a][dn] * (u[c] - u[dn]);
        }
        out[c] = acc * inv_h2;
      }
    }
  }
}

}  // namespace

void FluxStencil::apply(const VectorField& u, VectorField& out) const {
  if (!(u.grid() == grid_)) throw GridMismatch("FluxStencil::apply: field grid mismatch");
  if (!(out.grid() == grid_)) out = VectorField(grid_);
  apply_flux(grid_, face_, u, out);
}

void FluxStencil::apply(const ScalarField& u, ScalarField& out) const {
  if (!(u.grid() == grid_)) throw GridMismatch("FluxStencil::apply: field grid mismatch");
  if (!(out.grid() == grid_)) out = ScalarField(grid_);
  apply_flux(grid_, face_, u, out);
}

VectorField FluxStencil::apply(const VectorField& u) const {
  VectorField out(grid_);
  apply(u, out);
  return out;
}

ScalarField FluxStencil::apply(const ScalarField& u) const {
  ScalarField out(grid_);
  apply(u, out);
  return out;
}

void FluxStencil::face_flux(const VectorField& u, int axis, VectorField& out) const {
  if (!(u.grid() == grid_)) throw GridMismatch("FluxStencil::face_flux: field grid mismatch");
  if (!(out.grid() == grid_)) out = VectorField(grid_);
  const int n = grid_.n;
  const double inv_h = 1.0 / grid_.h;
  const auto& a = face_[axis];
  std::size_t stride = 1;
  for (int d = grid_.dim - 1; d > axis; --d) stride *= n;
  const std::size_t nn = grid_.node_count();
  for (std::size_t c = 0; c < nn; ++c) {
    // coordinate along `axis` for wrap detection
    std::size_t along = (c / stride) % n;
    const std::size_t up = along + 1 == static_cast<std::size_t>(n)
                               ? c - (static_cast<std::size_t>(n) - 1) * stride
                               : c + stride;
    out[c] = a[c] * (u[up] - u[c]) * inv_h;
  }
}

double FluxStencil::energy(const VectorField& u) const {
  if (!(u.grid() == grid_)) throw GridMismatch("FluxStencil::energy: field grid mismatch");
  const int n = grid_.n;
  const double inv_h2 = 1.0 / (grid_.h * grid_.h);
  double cell = 1.0;
  for (int a = 0; a < grid_.dim; ++a) cell *= grid_.h;
  double e = 0.0;
  const std::size_t nn = grid_.node_count();
  for (int a = 0; a < grid_.dim; ++a) {
    std::size_t stride = 1;
    for (int d = grid_.dim - 1; d > a; --d) stride *= n;
    for (std::size_t c = 0; c < nn; ++c) {
      std::size_t along = (c / stride) % n;
      const std::size_t up = along + 1 == static_cast<std::size_t>(n)
                                 ? c - (static_cast<std::size_t>(n) - 1) * stride
                                 : c + stride;
      const Vec3 d = u[up] - u[c];
      e += face_[a][c] * dot(d, d) * inv_h2;
    }
  }
  return e * cell;
}

VectorField cross(const VectorField& u, const VectorField& v) {
  if (!(u.grid() == v.grid())) throw GridMismatch("cross: fields live on different grids");
  VectorField out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = cross(u[i], v[i]);
  return out;
}

VectorField triple(const VectorField& u, const VectorField& v, const VectorField& w) {
  if (!(u.grid() == v.grid()) || !(u.grid() == w.grid())) {
    throw GridMismatch("triple: fields live on different grids");
  }
  VectorField out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = cross(u[i], cross(v[i], w[i]));
  return out;
}

VectorField apply_L(const VectorField& u, const Coefficient& c, double min_points_per_period) {
  FluxStencil op(u.grid(), c, min_points_per_period);
  return op.apply(u);
}

}  // namespace llhmm
