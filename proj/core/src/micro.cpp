#include "llhmm/micro.hpp"

#include <cmath>
#include <numbers>

namespace llhmm {

double StepControl::max_dt(const IFieldOperator& op, double cfl) {
  const PeriodicGrid& g = op.grid();
  return cfl * g.h * g.h / op.stability_coefficient();
}

StepControl StepControl::for_window(const IFieldOperator& op, double window, double cfl,
                                    Scheme scheme) {
  StepControl ctl;
  ctl.cfl = cfl;
  ctl.scheme = scheme;
  const double cap = max_dt(op, cfl);
  const int steps = std::max(1, static_cast<int>(std::ceil(window / cap)));
  ctl.dt = window / steps;
  return ctl;
}

LLState::LLState(VectorField m_, double alpha_, std::shared_ptr<const IFieldOperator> op_)
    : m(std::move(m_)), alpha(alpha_), op(std::move(op_)) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw Error("LLState: alpha must lie in (0, 1]");
  }
  const double dev = m.max_unit_deviation();
  if (dev > 1e-12) {
    throw Error("LLState: initial data is not unit (deviation " + std::to_string(dev) + ")");
  }
}

void llg_rhs_from_Lm(const VectorField& m, const VectorField& Lm, double alpha,
                     VectorField& out) {
  if (!(out.grid() == m.grid())) out = VectorField(m.grid());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Vec3 mxL = cross(m[i], Lm[i]);
    out[i] = -mxL - alpha * cross(m[i], mxL);
  }
}

VectorField llg_rhs(const VectorField& m, const IFieldOperator& op, double alpha) {
  VectorField Lm(m.grid());
  op.apply(m, Lm);
  VectorField out(m.grid());
  llg_rhs_from_Lm(m, Lm, alpha, out);
  return out;
}

namespace {

void check_dt(const LLState& state, const StepControl& ctl, double dt) {
  const double cap = ctl.cfl * state.m.grid().h * state.m.grid().h /
                     state.op->stability_coefficient();
  if (dt > cap * (1.0 + 1e-12)) {
    throw Error("step: dt = " + std::to_string(dt) + " violates dt <= cfl h^2 / a_max = " +
                std::to_string(cap));
  }
}

void axpy(VectorField& y, double a, const VectorField& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

struct Workspace {
  VectorField Lm, k1, k2, k3, k4, tmp;
  explicit Workspace(const PeriodicGrid& g) : Lm(g), k1(g), k2(g), k3(g), k4(g), tmp(g) {}
};

void rk4_project_step(LLState& s, double dt, Workspace& w) {
  const IFieldOperator& op = *s.op;
  op.apply(s.m, w.Lm);
  llg_rhs_from_Lm(s.m, w.Lm, s.alpha, w.k1);

  w.tmp = s.m;
  axpy(w.tmp, 0.5 * dt, w.k1);
  op.apply(w.tmp, w.Lm);
  llg_rhs_from_Lm(w.tmp, w.Lm, s.alpha, w.k2);

  w.tmp = s.m;
  axpy(w.tmp, 0.5 * dt, w.k2);
  op.apply(w.tmp, w.Lm);
  llg_rhs_from_Lm(w.tmp, w.Lm, s.alpha, w.k3);

  w.tmp = s.m;
  axpy(w.tmp, dt, w.k3);
  op.apply(w.tmp, w.Lm);
  llg_rhs_from_Lm(w.tmp, w.Lm, s.alpha, w.k4);

  for (std::size_t i = 0; i < s.m.size(); ++i) {
    s.m[i] = normalized(s.m[i] + (dt / 6.0) * (w.k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]));
  }
  s.t += dt;
}

void imex_midpoint_step(LLState& s, double dt, Workspace& w) {
  const IFieldOperator& op = *s.op;
  // Fixed point u = m + dt f((m + u)/2); iterate to machine-tight tolerance
  // so the midpoint norm identity carries through accumulated windows.
  VectorField u = s.m;
  VectorField& mid = w.tmp;
  const int cap = 50;
  for (int it = 0; it < cap; ++it) {
    for (std::size_t i = 0; i < u.size(); ++i) mid[i] = 0.5 * (s.m[i] + u[i]);
    op.apply(mid, w.Lm);
    llg_rhs_from_Lm(mid, w.Lm, s.alpha, w.k1);
    double delta = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const Vec3 next = s.m[i] + dt * w.k1[i];
      const Vec3 d = next - u[i];
      const double ad = std::abs(d.x) + std::abs(d.y) + std::abs(d.z);
      if (std::isnan(ad) || ad > delta) delta = ad;
      u[i] = next;
    }
    if (!std::isfinite(delta)) {
      throw FixedPointDiverged("imex_midpoint: iteration blew up (dt too large?)");
    }
    if (delta <= 1e-14) {
      s.m = u;
      s.t += dt;
      return;
    }
  }
  throw FixedPointDiverged("imex_midpoint: no contraction after 50 iterations (dt too large?)");
}

}  // namespace

void step(LLState& state, const StepControl& ctl) {
  check_dt(state, ctl, ctl.dt);
  Workspace w(state.m.grid());
  if (ctl.scheme == Scheme::rk4_project) {
    rk4_project_step(state, ctl.dt, w);
  } else {
    imex_midpoint_step(state, ctl.dt, w);
  }
}

void solve_window(LLState& state, double eta, const StepControl& ctl,
                  const std::vector<StepObserver>& observers) {
  if (!(eta > 0.0)) {
    throw Error("solve_window: eta must be positive");
  }
  check_dt(state, ctl, ctl.dt);
  const double t_end = state.t + eta;
  Workspace w(state.m.grid());

  auto notify = [&]() {
    if (observers.empty()) return;
    state.op->apply(state.m, w.Lm);
    for (const auto& obs : observers) obs(state.t, state.m, w.Lm);
  };

  notify();
  while (state.t < t_end - 1e-15 * eta) {
    double dt = std::min(ctl.dt, t_end - state.t);
    if (ctl.scheme == Scheme::rk4_project) {
      rk4_project_step(state, dt, w);
    } else {
      imex_midpoint_step(state, dt, w);
    }
    // land exactly on the window end
    if (t_end - state.t < 1e-12 * eta) state.t = t_end;
    notify();
  }
}

namespace {

Point wrap_signed(const Point& x, const PeriodicGrid& g) {
  Point w{0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim; ++a) {
    w[a] = x[a] - g.length * std::round(x[a] / g.length);
  }
  return w;
}

}  // namespace

MacroField normalized_field(const MacroField& f) {
  MacroField out;
  out.dim = f.dim;
  out.name = f.name;
  auto value = f.value;
  auto jac = f.jacobian;
  auto hess = f.hessian;
  out.value = [value](const Point& x) { return normalized(value(x)); };
  out.jacobian = [value, jac](const Point& x) {
    const Vec3 F = value(x);
    const auto J = jac(x);
    const double r = norm(F);
    const Vec3 u = F * (1.0 / r);
    std::array<Vec3, 3> out_j;
    for (int i = 0; i < 3; ++i) {
      out_j[i] = (J[i] - u * dot(u, J[i])) * (1.0 / r);
    }
    return out_j;
  };
  out.hessian = [value, jac, hess](const Point& x) {
    const Vec3 F = value(x);
    const auto J = jac(x);
    const auto H = hess(x);
    const double r = norm(F);
    const Vec3 u = F * (1.0 / r);
    std::array<Vec3, 3> du;       // d_i u
    std::array<double, 3> dr;     // d_i r = u . d_i F
    for (int i = 0; i < 3; ++i) {
      dr[i] = dot(u, J[i]);
      du[i] = (J[i] - u * dr[i]) * (1.0 / r);
    }
    std::array<std::array<Vec3, 3>, 3> out_h;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        // d_j d_i r = d_j u . d_i F + u . d_j d_i F
        const double ddr = dot(du[j], J[i]) + dot(u, H[i][j]);
        // d_j d_i u = [H_ij - d_j u (u.d_i F) - u (d_j u.d_i F + u.H_ij)]/r
        //             - (d_i F - u (u.d_i F)) d_j r / r^2
        Vec3 t = H[i][j] - du[j] * dr[i] - u * ddr;
        t = t * (1.0 / r) - (J[i] - u * dr[i]) * (dr[j] / (r * r));
        out_h[i][j] = t;
      }
    }
    return out_h;
  };
  return out;
}

MacroField macro_helix() {
  using std::numbers::pi;
  MacroField f;
  f.dim = 1;
  f.name = "helix";
  f.value = [](const Point& x) {
    return Vec3{std::cos(2.0 * pi * x[0]), std::sin(2.0 * pi * x[0]), 1.0};
  };
  f.jacobian = [](const Point& x) {
    std::array<Vec3, 3> j{};
    j[0] = {-2.0 * pi * std::sin(2.0 * pi * x[0]), 2.0 * pi * std::cos(2.0 * pi * x[0]), 0.0};
    return j;
  };
  f.hessian = [](const Point& x) {
    std::array<std::array<Vec3, 3>, 3> h{};
    const double w = 2.0 * pi;
    h[0][0] = {-w * w * std::cos(w * x[0]), -w * w * std::sin(w * x[0]), 0.0};
    return h;
  };
  return normalized_field(f);
}

MacroField macro_helix2d() {
  using std::numbers::pi;
  MacroField f;
  f.dim = 2;
  f.name = "helix2d";
  const double w = 2.0 * pi;
  f.value = [w](const Point& x) {
    const double ph = w * (x[0] + 0.5 * x[1]);
    return Vec3{std::cos(ph), std::sin(ph), 1.0 + 0.5 * std::cos(w * x[1])};
  };
  f.jacobian = [w](const Point& x) {
    const double ph = w * (x[0] + 0.5 * x[1]);
    std::array<Vec3, 3> j{};
    j[0] = {-w * std::sin(ph), w * std::cos(ph), 0.0};
    j[1] = {-0.5 * w * std::sin(ph), 0.5 * w * std::cos(ph), -0.5 * w * std::sin(w * x[1])};
    return j;
  };
  f.hessian = [w](const Point& x) {
    const double ph = w * (x[0] + 0.5 * x[1]);
    const Vec3 dd{-w * w * std::cos(ph), -w * w * std::sin(ph), 0.0};
    std::array<std::array<Vec3, 3>, 3> h{};
    h[0][0] = dd;
    h[0][1] = 0.5 * dd;
    h[1][0] = 0.5 * dd;
    h[1][1] = 0.25 * dd + Vec3{0.0, 0.0, -0.5 * w * w * std::cos(w * x[1])};
    return h;
  };
  return normalized_field(f);
}

MacroField macro_constant(const Vec3& direction) {
  MacroField f;
  f.dim = 1;
  f.name = "constant";
  const Vec3 u = normalized(direction);
  f.value = [u](const Point&) { return u; };
  f.jacobian = [](const Point&) { return std::array<Vec3, 3>{}; };
  f.hessian = [](const Point&) { return std::array<std::array<Vec3, 3>, 3>{}; };
  return f;
}

MacroField macro_preset(const std::string& name, int dim) {
  if (name == "helix") {
    MacroField f = dim >= 2 ? macro_helix2d() : macro_helix();
    return f;
  }
  if (name == "helix2d") return macro_helix2d();
  if (name == "constant" || name == "constant_z") {
    MacroField f = macro_constant({0.0, 0.0, 1.0});
    f.dim = dim;
    return f;
  }
  throw Error("unknown macro field preset '" + name + "'");
}

VectorField sample_macro(const MacroField& M, const PeriodicGrid& g) {
  VectorField out(g);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = normalized(M.value(g.coord(i)));
  }
  return out;
}

VectorField restrict_taylor2(const MacroField& M, const PeriodicGrid& g) {
  const Point origin{0.0, 0.0, 0.0};
  const Vec3 m0 = M.value(origin);
  const auto J = M.jacobian(origin);
  const auto H = M.hessian(origin);
  VectorField out(g);
  for (std::size_t c = 0; c < out.size(); ++c) {
    const Point x = wrap_signed(g.coord(c), g);
    Vec3 t = m0;
    for (int i = 0; i < g.dim; ++i) {
      t += x[i] * J[i];
      for (int j = 0; j < g.dim; ++j) {
        t += 0.5 * x[i] * x[j] * H[i][j];
      }
    }
    const double len = norm(t);
    if (len < 0.1) {
      throw DegenerateData("restrict_taylor2: |Taylor value| = " + std::to_string(len) +
                           " < 0.1 at a node");
    }
    out[c] = t * (1.0 / len);
  }
  return out;
}

}  // namespace llhmm
