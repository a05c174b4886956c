#include "llhmm/corrector.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>

namespace llhmm {

double EigenBasis::inner(const std::vector<double>& a, const std::vector<double>& b) const {
  double cell = 1.0;
  for (int d = 0; d < grid.dim; ++d) cell *= grid.h;
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * cell;
}

std::vector<double> EigenBasis::expand(const ScalarField& f) const {
  if (!(f.grid() == grid)) throw GridMismatch("EigenBasis::expand: field grid mismatch");
  std::vector<double> c(omega.size());
  double cell = 1.0;
  for (int d = 0; d < grid.dim; ++d) cell *= grid.h;
  for (std::size_t j = 0; j < phi.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < phi[j].size(); ++i) s += phi[j][i] * f[i];
    c[j] = s * cell;
  }
  return c;
}

EigenBasis eigendecompose(const Coefficient& a, int n, int j_max) {
  const int d = a.dim();
  PeriodicGrid g(d, n, 1.0);
  const std::size_t nn = g.node_count();
  if (nn > 4096) {
    throw TooLarge("eigendecompose: " + std::to_string(nn) + " nodes exceeds the dense guard");
  }
  FluxStencil st(g, a.with_epsilon(1.0), 0.0);

  // assemble -div(a grad) column by column
  Eigen::MatrixXd A(nn, nn);
  ScalarField e(g), col(g);
  for (std::size_t j = 0; j < nn; ++j) {
    for (auto& v : e.values()) v = 0.0;
    e[j] = 1.0;
    st.apply(e, col);
    for (std::size_t i = 0; i < nn; ++i) A(i, j) = -col[i];
  }
  // symmetrize rounding
  A = 0.5 * (A + A.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) {
    throw NoConvergence("eigendecompose: dense eigensolver failed");
  }

  EigenBasis basis;
  basis.grid = g;
  const int keep = (j_max > 0 && j_max < static_cast<int>(nn)) ? j_max : static_cast<int>(nn);
  basis.omega.resize(keep);
  basis.phi.resize(keep);
  double cell = 1.0;
  for (int dd = 0; dd < d; ++dd) cell *= g.h;
  const double scale = 1.0 / std::sqrt(cell);
  for (int j = 0; j < keep; ++j) {
    double w = es.eigenvalues()(j);
    if (w < 0.0) {
      if (w < -1e-10) {
        throw NoConvergence("eigendecompose: eigenvalue " + std::to_string(w) +
                            " below the round-off clip");
      }
      basis.clipped_negative = std::max(basis.clipped_negative, -w);
      w = 0.0;
    }
    basis.omega[j] = w;
    auto& v = basis.phi[j];
    v.resize(nn);
    // deterministic sign: largest-magnitude entry positive
    int arg = 0;
    for (std::size_t i = 1; i < nn; ++i) {
      if (std::abs(es.eigenvectors()(i, j)) > std::abs(es.eigenvectors()(arg, j))) {
        arg = static_cast<int>(i);
      }
    }
    const double sgn = es.eigenvectors()(arg, j) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < nn; ++i) {
      v[i] = sgn * scale * es.eigenvectors()(i, j);
    }
  }
  return basis;
}

VectorField schrodinger_map(const Vec3& b, const VectorField& f, double alpha, double t,
                            const EigenBasis& basis) {
  if (std::abs(norm(b) - 1.0) > 1e-12) {
    throw Error("schrodinger_map: |b| must be 1");
  }
  if (!(f.grid() == basis.grid)) {
    throw GridMismatch("schrodinger_map: field grid mismatch");
  }
  const std::size_t nn = f.size();
  double cell = 1.0;
  for (int d = 0; d < basis.grid.dim; ++d) cell *= basis.grid.h;

  // u(y, t) = sum_j f_j exp((i - alpha) omega_j t) phi_j(y), componentwise
  std::vector<std::complex<double>> ux(nn), uy(nn), uz(nn);
  for (int j = 0; j < basis.count(); ++j) {
    Vec3 fj{};
    const auto& ph = basis.phi[j];
    for (std::size_t i = 0; i < nn; ++i) fj += ph[i] * f[i];
    fj *= cell;
    const std::complex<double> factor =
        std::exp(std::complex<double>(-alpha, 1.0) * basis.omega[j] * t);
    for (std::size_t i = 0; i < nn; ++i) {
      const std::complex<double> w = factor * ph[i];
      ux[i] += fj.x * w;
      uy[i] += fj.y * w;
      uz[i] += fj.z * w;
    }
  }

  VectorField out(f.grid());
  for (std::size_t i = 0; i < nn; ++i) {
    const Vec3 re{ux[i].real(), uy[i].real(), uz[i].real()};
    const Vec3 im{ux[i].imag(), uy[i].imag(), uz[i].imag()};
    const Vec3 bbf = b * dot(b, f[i]);
    out[i] = bbf + re - b * dot(b, re) + cross(b, im);
  }
  return out;
}

CorrectorModes expand_chi(const EigenBasis& basis, const CellSolution& cell) {
  if (!(cell.grid == basis.grid)) {
    throw GridMismatch("expand_chi: cell and basis grids differ");
  }
  CorrectorModes modes;
  modes.dim = cell.grid.dim;
  modes.chi.assign(basis.count(), {0.0, 0.0, 0.0});
  for (int k = 0; k < modes.dim; ++k) {
    const auto coeff = basis.expand(cell.chi[k]);
    for (int j = 0; j < basis.count(); ++j) modes.chi[j][k] = coeff[j];
  }
  // truncation diagnostics: reconstruct and compare
  double num = 0.0, den = 0.0;
  for (int k = 0; k < modes.dim; ++k) {
    std::vector<double> rec(cell.grid.node_count(), 0.0);
    for (int j = 0; j < basis.count(); ++j) {
      const double c = modes.chi[j][k];
      if (c == 0.0) continue;
      const auto& ph = basis.phi[j];
      for (std::size_t i = 0; i < rec.size(); ++i) rec[i] += c * ph[i];
    }
    for (std::size_t i = 0; i < rec.size(); ++i) {
      const double diff = rec[i] - cell.chi[k][i];
      num += diff * diff;
      den += cell.chi[k][i] * cell.chi[k][i];
    }
  }
  modes.truncation_error = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return modes;
}

VectorField build_v(const Vec3& m0, const std::array<Vec3, 3>& grad_m0,
                    const CorrectorModes& modes, const EigenBasis& basis, double alpha,
                    double tau) {
  if (std::abs(norm(m0) - 1.0) > 1e-12) {
    throw Error("build_v: m0 must be unit");
  }
  for (int i = 0; i < modes.dim; ++i) {
    if (std::abs(dot(m0, grad_m0[i])) > 1e-10) {
      throw Error("build_v: grad rows must be orthogonal to m0");
    }
  }
  VectorField v(basis.grid);
  for (int j = 1; j < basis.count(); ++j) {
    Vec3 gchi{};
    for (int i = 0; i < modes.dim; ++i) gchi += modes.chi[j][i] * grad_m0[i];
    const double w = basis.omega[j];
    const double damp = std::exp(-alpha * w * tau);
    const Vec3 amp = damp * (std::cos(w * tau) * gchi + std::sin(w * tau) * cross(m0, gchi));
    if (std::abs(amp.x) + std::abs(amp.y) + std::abs(amp.z) == 0.0) continue;
    const auto& ph = basis.phi[j];
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] -= ph[i] * amp;
    }
  }
  return v;
}

}  // namespace llhmm
