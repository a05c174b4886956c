#include "llhmm/homogenized.hpp"

#include <cmath>

namespace llhmm {

AnisoStencil::AnisoStencil(const PeriodicGrid& g, const HomogenizedTensor& A)
    : grid_(g), A_(A) {
  if (A.dim != g.dim) {
    throw GridMismatch("AnisoStencil: tensor dimension does not match grid");
  }
  const auto ev = A.eigenvalues();
  lambda_max_ = ev[A.dim - 1];
  if (!(ev[0] > 0.0)) {
    throw Error("AnisoStencil: tensor is not positive definite");
  }
}

void AnisoStencil::apply(const VectorField& u, VectorField& out) const {
  if (!(u.grid() == grid_)) throw GridMismatch("AnisoStencil::apply: field grid mismatch");
  if (!(out.grid() == grid_)) out = VectorField(grid_);
  const int n = grid_.n;
  const double inv_h2 = 1.0 / (grid_.h * grid_.h);
  if (grid_.dim == 1) {
    const double a = A_(0, 0);
    for (int i = 0; i < n; ++i) {
      const int ip = i + 1 == n ? 0 : i + 1;
      const int im = i == 0 ? n - 1 : i - 1;
      out[i] = a * inv_h2 * (u[ip] - 2.0 * u[i] + u[im]);
    }
    return;
  }
  if (grid_.dim == 2) {
    const double axx = A_(0, 0), ayy = A_(1, 1), axy = A_(0, 1);
    const double cross_w = 2.0 * axy / 4.0;  // both mixed terms, 4-point stencil
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
        Vec3 v = axx * (u[rp + j] - 2.0 * u[c] + u[rm + j]) +
                 ayy * (u[ri + jp] - 2.0 * u[c] + u[ri + jm]) +
                 cross_w * (u[rp + jp] - u[rp + jm] - u[rm + jp] + u[rm + jm]);
        out[c] = v * inv_h2;
      }
    }
    return;
  }
  throw Error("AnisoStencil: dim 3 not exercised");
}

VectorField AnisoStencil::apply(const VectorField& u) const {
  VectorField out(grid_);
  apply(u, out);
  return out;
}

ReferenceQuantities reference_quantities(const MacroField& M, const HomogenizedTensor& A) {
  const int d = A.dim;
  const Point origin{0.0, 0.0, 0.0};
  ReferenceQuantities r;
  r.dim = d;
  r.m0 = M.value(origin);
  r.grad = M.jacobian(origin);
  const auto H = M.hessian(origin);
  for (int i = 0; i < d; ++i) {
    Vec3 f{};
    for (int j = 0; j < d; ++j) f += A(i, j) * r.grad[j];
    r.flux[i] = f;
  }
  r.field = {};
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) r.field += A(i, j) * H[i][j];
  }
  r.torque = cross(r.m0, r.field);
  return r;
}

}  // namespace llhmm
