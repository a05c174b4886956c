#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "llhmm/errors.hpp"
#include "llhmm/vec3.hpp"

namespace llhmm {

/// Uniform periodic lattice on [0, length]^dim. The node x = 0 has index 0,
/// so the macro point sits exactly on the grid. Index arithmetic wraps
/// modulo n on every axis.
struct PeriodicGrid {
  int dim = 1;
  int n = 4;            // points per axis
  double length = 1.0;  // edge length per axis
  double h = 0.25;      // spacing, length / n

  PeriodicGrid() = default;
  PeriodicGrid(int dim_, int n_, double length_ = 1.0);

  std::size_t node_count() const;

  int wrap(int i) const {
    i %= n;
    return i < 0 ? i + n : i;
  }

  /// Row-major flat index; the last axis is contiguous.
  std::size_t index(int i0, int i1 = 0, int i2 = 0) const;

  /// Node coordinates for a flat index.
  Point coord(std::size_t flat) const;

  bool operator==(const PeriodicGrid& o) const {
    return dim == o.dim && n == o.n && length == o.length;
  }
};

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const PeriodicGrid& g, double fill = 0.0)
      : grid_(g), v_(g.node_count(), fill) {}

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }

  double mean() const;
  void subtract_mean();

 private:
  PeriodicGrid grid_;
  std::vector<double> v_;
};

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const PeriodicGrid& g, const Vec3& fill = {})
      : grid_(g), v_(g.node_count(), fill) {}

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  Vec3& operator[](std::size_t i) { return v_[i]; }
  const Vec3& operator[](std::size_t i) const { return v_[i]; }
  std::span<Vec3> values() { return v_; }
  std::span<const Vec3> values() const { return v_; }

  /// max over nodes of | |v| - 1 |.
  double max_unit_deviation() const;
  void renormalize();

 private:
  PeriodicGrid grid_;
  std::vector<Vec3> v_;
};

/// Oscillatory material coefficient a^eps(x) = a(x / eps), with a 1-periodic
/// per axis on the unit cell. Bounds are estimated by dense sampling at
/// construction and checked positive.
class Coefficient {
 public:
  Coefficient() = default;
  Coefficient(std::function<double(const Point&)> cell_fn, int dim, double epsilon,
              std::string name = "custom");

  /// a(x / eps), periodic continuation.
  double eval(const Point& x) const;
  /// The unit-cell function a(y), y wrapped into [0,1)^dim.
  double eval_cell(const Point& y) const;

  int dim() const { return dim_; }
  double epsilon() const { return eps_; }
  double a_min() const { return a_min_; }
  double a_max() const { return a_max_; }
  const std::string& name() const { return name_; }
  bool is_constant() const { return constant_; }

  /// Same unit-cell function at a different oscillation scale.
  Coefficient with_epsilon(double eps) const;

  static Coefficient constant(double c, int dim = 1, double epsilon = 1.0);
  /// 1 + 0.5 sin(2 pi y) + 0.5 sin(4 pi y)
  static Coefficient paper_1d(double epsilon);
  /// 1/2 + (1/2 + 1/4 sin(2 pi y1))(1/2 + 1/4 sin(2 pi y2))
  ///     + 1/4 cos(2 pi (y1 - y2)) + 1/4 sin(2 pi y1)
  static Coefficient paper_2d(double epsilon);

 private:
  std::function<double(const Point&)> fn_;
  int dim_ = 1;
  double eps_ = 1.0;
  double a_min_ = 0.0, a_max_ = 0.0;
  std::string name_;
  bool constant_ = false;
};

/// Operator interface shared by the oscillatory-coefficient stencil and the
/// constant-tensor stencil. Implementations are pure: apply() does not mutate
/// the operator, so one instance can be shared across threads.
struct IFieldOperator {
  virtual ~IFieldOperator() = default;
  virtual void apply(const VectorField& u, VectorField& out) const = 0;
  virtual const PeriodicGrid& grid() const = 0;
  /// Scale entering the dt <= cfl h^2 / a_max stability bound.
  virtual double stability_coefficient() const = 0;
};

/// Conservative flux-form discretization of L u = div(a^eps grad u).
/// Per axis: (a_{i+1/2}(u_{i+1}-u_i) - a_{i-1/2}(u_i-u_{i-1})) / h^2 with the
/// coefficient sampled analytically at cell midpoints.
class FluxStencil final : public IFieldOperator {
 public:
  /// Throws GridTooCoarse when eps / h < min_points_per_period (the grid
  /// would not resolve the oscillation).
  FluxStencil(const PeriodicGrid& g, const Coefficient& c,
              double min_points_per_period = 8.0);

  void apply(const VectorField& u, VectorField& out) const override;
  void apply(const ScalarField& u, ScalarField& out) const;
  VectorField apply(const VectorField& u) const;
  ScalarField apply(const ScalarField& u) const;

  const PeriodicGrid& grid() const override { return grid_; }
  double stability_coefficient() const override { return coeff_.a_max(); }
  const Coefficient& coefficient() const { return coeff_; }

  /// Midpoint coefficient a at node + (h/2) e_axis, one value per node.
  std::span<const double> face(int axis) const { return face_[axis]; }

  /// Face flux of u along `axis`: a_{i+1/2} (u_{i+e} - u_i) / h.
  void face_flux(const VectorField& u, int axis, VectorField& out) const;

  /// Discrete exchange energy h^d sum over faces of a |du/h|^2.
  double energy(const VectorField& u) const;

 private:
  PeriodicGrid grid_;
  Coefficient coeff_;
  std::vector<std::vector<double>> face_;  // [axis][node]
};

/// Nodewise cross product u x v. Throws GridMismatch on different grids.
VectorField cross(const VectorField& u, const VectorField& v);
/// Nodewise triple product u x (v x w).
VectorField triple(const VectorField& u, const VectorField& v, const VectorField& w);

/// Convenience one-shot form of the flux stencil.
VectorField apply_L(const VectorField& u, const Coefficient& c,
                    double min_points_per_period = 8.0);

}  // namespace llhmm
