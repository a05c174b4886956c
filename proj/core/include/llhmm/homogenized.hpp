#pragma once

#include "llhmm/cell.hpp"
#include "llhmm/grid.hpp"
#include "llhmm/micro.hpp"

namespace llhmm {

/// Constant-tensor operator div(grad(u) A): per-component sum of
/// A_ii second differences plus 4-point cross differences for the
/// off-diagonal entries.
class AnisoStencil final : public IFieldOperator {
 public:
  AnisoStencil(const PeriodicGrid& g, const HomogenizedTensor& A);

  void apply(const VectorField& u, VectorField& out) const override;
  VectorField apply(const VectorField& u) const;
  const PeriodicGrid& grid() const override { return grid_; }
  double stability_coefficient() const override { return lambda_max_; }
  const HomogenizedTensor& tensor() const { return A_; }

 private:
  PeriodicGrid grid_;
  HomogenizedTensor A_;
  double lambda_max_ = 0.0;
};

/// Homogenized reference quantities at the macro point (x, t) = (0, 0),
/// computed from analytic derivatives of the initial macro field so that
/// upscaling errors carry no grid differentiation error.
struct ReferenceQuantities {
  int dim = 1;
  Vec3 m0;                      // M(0)
  std::array<Vec3, 3> grad;     // rows: d_i M(0)
  std::array<Vec3, 3> flux;     // row i: sum_j A_ij d_j M(0)
  Vec3 field;                   // sum_ij A_ij d_i d_j M(0)
  Vec3 torque;                  // m0 x field
};

ReferenceQuantities reference_quantities(const MacroField& M, const HomogenizedTensor& A);

/// Homogenized state: the micro state type with a constant-tensor operator.
using HomState = LLState;

/// Same schemes as the micro integrator driven by the constant-tensor field.
inline void solve_homogenized(HomState& state, double T, const StepControl& ctl,
                              const std::vector<StepObserver>& observers = {}) {
  solve_window(state, T, ctl, observers);
}

}  // namespace llhmm
