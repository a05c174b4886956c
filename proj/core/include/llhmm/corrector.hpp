#pragma once

#include <vector>

#include "llhmm/cell.hpp"
#include "llhmm/grid.hpp"

namespace llhmm {

/// Discrete eigenpairs of -div(a grad .) on the unit cell with periodic
/// boundary conditions. Eigenvalues ascend; eigenvectors are orthonormal in
/// the h^d-weighted discrete L2 inner product, so mode 0 is the constant 1.
struct EigenBasis {
  PeriodicGrid grid;
  std::vector<double> omega;             // ascending, omega[0] == 0
  std::vector<std::vector<double>> phi;  // phi[j][node]
  double clipped_negative = 0.0;         // largest |negative| rounded up to 0

  int count() const { return static_cast<int>(omega.size()); }
  double inner(const std::vector<double>& a, const std::vector<double>& b) const;
  /// Expansion coefficients <phi_j, f> of a scalar field.
  std::vector<double> expand(const ScalarField& f) const;
};

/// Dense symmetric eigensolve of the flux-form cell operator. Throws TooLarge
/// when n^dim exceeds 4096 nodes; j_max <= 0 keeps the full spectrum.
EigenBasis eigendecompose(const Coefficient& a, int n, int j_max = 0);

/// Solution map of the constant-axis linear Landau-Lifshitz flow
///   d_t w = -b x Lw - alpha b x b x Lw,   w(0) = f,  |b| = 1:
/// evolve u mode-wise by exp((i - alpha) omega_j t) and recombine as
///   w = b b^T f + (I - b b^T) Re u + b x Im u.
VectorField schrodinger_map(const Vec3& b, const VectorField& f, double alpha, double t,
                            const EigenBasis& basis);

/// Eigen-expansion of the cell corrector chi (one d-vector per mode).
struct CorrectorModes {
  int dim = 1;
  std::vector<std::array<double, 3>> chi;  // chi[j][axis]
  double truncation_error = 0.0;           // ||chi - sum chi_j phi_j|| / ||chi||
};

CorrectorModes expand_chi(const EigenBasis& basis, const CellSolution& cell);

/// Fast-transient corrector sample on the cell at fast time tau:
///   v(y) = -sum_{j>=1} e^{-alpha w_j tau} [cos(w_j tau) G chi_j
///                                          + sin(w_j tau) m0 x (G chi_j)] phi_j(y)
/// with (G chi_j) = sum_i grad_m0[i] chi_j[i]. Requires m0 unit and
/// orthogonal to every row of grad_m0 (1e-10).
VectorField build_v(const Vec3& m0, const std::array<Vec3, 3>& grad_m0,
                    const CorrectorModes& modes, const EigenBasis& basis, double alpha,
                    double tau);

}  // namespace llhmm
