#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "llhmm/grid.hpp"

namespace llhmm {

enum class Scheme { rk4_project, imex_midpoint };

/// Fixed-step time control. The invariant dt <= cfl * h^2 / a_max is checked
/// before stepping.
struct StepControl {
  double dt = 0.0;
  double cfl = 0.25;
  Scheme scheme = Scheme::rk4_project;

  /// Largest dt the invariant allows for this operator.
  static double max_dt(const IFieldOperator& op, double cfl = 0.25);
  /// Control with dt snapped so that `window` is an integer number of steps.
  static StepControl for_window(const IFieldOperator& op, double window, double cfl = 0.25,
                                Scheme scheme = Scheme::rk4_project);
};

/// Magnetization state; `m` must be unit to 1e-12 at every node.
struct LLState {
  double t = 0.0;
  VectorField m;
  double alpha = 0.1;
  std::shared_ptr<const IFieldOperator> op;

  LLState(VectorField m_, double alpha_, std::shared_ptr<const IFieldOperator> op_);
};

/// -m x Lm - alpha m x (m x Lm), given Lm.
void llg_rhs_from_Lm(const VectorField& m, const VectorField& Lm, double alpha,
                     VectorField& out);
/// Same, computing Lm with the operator.
VectorField llg_rhs(const VectorField& m, const IFieldOperator& op, double alpha);

/// One accepted step. rk4_project renormalizes nodewise after the classical
/// four-stage update; imex_midpoint iterates the implicit midpoint fixed
/// point (norm-preserving up to the 1e-12 solver tolerance, 50 iterations cap).
void step(LLState& state, const StepControl& ctl);

/// Called at every accepted-step boundary (including t = window start and
/// t = window end) with the state and its effective field.
using StepObserver = std::function<void(double t, const VectorField& m, const VectorField& Lm)>;

/// Advance from state.t to state.t + eta; the final step is shortened to land
/// exactly on the window end. Observers fire at each step boundary.
void solve_window(LLState& state, double eta, const StepControl& ctl,
                  const std::vector<StepObserver>& observers = {});

/// Analytic macro magnetization field: value plus first and second
/// derivatives. jacobian(x)[i] = d_i M, hessian(x)[i][j] = d_i d_j M; only
/// the first `dim` slots are meaningful.
struct MacroField {
  int dim = 1;
  std::string name = "custom";
  std::function<Vec3(const Point&)> value;
  std::function<std::array<Vec3, 3>(const Point&)> jacobian;
  std::function<std::array<std::array<Vec3, 3>, 3>(const Point&)> hessian;
};

/// Unit-normalized version of an arbitrary smooth field (value, jacobian and
/// hessian of F/|F| computed exactly from those of F).
MacroField normalized_field(const MacroField& f);

/// normalize(cos 2 pi x, sin 2 pi x, 1).
MacroField macro_helix();
/// normalize(cos 2 pi (x1 + x2/2), sin 2 pi (x1 + x2/2), 1 + cos(2 pi x2)/2).
MacroField macro_helix2d();
/// Constant unit field.
MacroField macro_constant(const Vec3& direction);
MacroField macro_preset(const std::string& name, int dim);

/// Direct nodewise sampling of an (already unit) macro field, with a
/// renormalization sweep to pin the unit constraint to rounding.
VectorField sample_macro(const MacroField& M, const PeriodicGrid& g);

/// Degree-2 Taylor restriction around the macro point x = 0 using the wrapped
/// signed coordinate, renormalized nodewise. Derivatives of the result at 0
/// match the macro field's up to order 2 exactly (the renormalization
/// corrections vanish there because the macro field is unit). Throws
/// DegenerateData when |Taylor value| < 0.1 anywhere.
VectorField restrict_taylor2(const MacroField& M, const PeriodicGrid& g);

}  // namespace llhmm
