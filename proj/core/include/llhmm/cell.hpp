#pragma once

#include <array>
#include <vector>

#include "llhmm/grid.hpp"

namespace llhmm {

/// Symmetric positive definite effective tensor.
struct HomogenizedTensor {
  int dim = 1;
  std::array<double, 9> a{};  // row-major dim x dim

  HomogenizedTensor() = default;
  explicit HomogenizedTensor(int d) : dim(d) {}
  static HomogenizedTensor isotropic(int d, double value);

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * 3 + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * 3 + j]; }

  void symmetrize();
  /// max |A - A^T| entry before symmetrization bookkeeping.
  double asymmetry() const;
  /// Eigenvalues, ascending (dim <= 2 closed form, dim 3 via iteration).
  std::array<double, 3> eigenvalues() const;
  bool is_spd() const { return eigenvalues()[0] > 0.0; }
};

struct CellOptions {
  double tol = 1e-10;       // CG stop: ||r|| <= tol ||b||
  int max_iter = 0;         // 0: automatic (proportional to N)
  int min_n = 16;           // resolution precondition
};

/// Periodic cell solution: chi (zero mean per component), the flux table g
/// (per column k and axis j, one face value per node) and the resulting
/// homogenized tensor.
struct CellSolution {
  PeriodicGrid grid;
  std::vector<ScalarField> chi;                        // d components
  std::vector<std::array<std::vector<double>, 3>> g;   // g[k][axis][node]
  HomogenizedTensor AH;
  double asymmetry = 0.0;
  double cg_residual = 0.0;  // worst relative residual across components
  int cg_iterations = 0;

  /// chi_k at an arbitrary cell point by periodic multilinear interpolation;
  /// exact at grid nodes (commensurate resolutions map to nodes).
  double chi_value(int k, const Point& y) const;
  /// true when an n-point-per-period micro grid samples cell nodes exactly.
  bool commensurate(int n_micro_per_period) const;
  /// max over columns/nodes of |div g| relative to ||g||_inf.
  double div_g_residual() const;
};

/// Solve the periodic cell problem div(a grad chi_k) = -d_k a in flux form
/// with a zero-mean gauge, by conjugate gradients on the singular-consistent
/// system (mean projected every iteration). Throws NoConvergence when the
/// residual target is missed.
CellSolution solve_cell(const Coefficient& a, int n, const CellOptions& opt = {});

/// Trapezoid (= midpoint under periodicity) quadrature of g over the cell,
/// symmetrized; the pre-symmetrization asymmetry is recorded separately.
HomogenizedTensor compute_AH(const CellSolution& sol);

/// Effective tensor of the discrete flux stencil itself at a given sampling
/// resolution (the lattice cell problem on n points per period). Used as the
/// upscaling reference so that reported errors isolate the averaging error
/// from grid discretization. No minimum-resolution guard.
HomogenizedTensor discrete_effective_tensor(const Coefficient& a, int n_per_period);

}  // namespace llhmm
