#include "llhmm/cell.hpp"

#include <algorithm>
#include <cmath>

namespace llhmm {

HomogenizedTensor HomogenizedTensor::isotropic(int d, double value) {
  HomogenizedTensor t(d);
  for (int i = 0; i < d; ++i) t(i, i) = value;
  return t;
}

void HomogenizedTensor::symmetrize() {
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const double s = 0.5 * ((*this)(i, j) + (*this)(j, i));
      (*this)(i, j) = s;
      (*this)(j, i) = s;
    }
  }
}

double HomogenizedTensor::asymmetry() const {
  double worst = 0.0;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
    }
  }
  return worst;
}

std::array<double, 3> HomogenizedTensor::eigenvalues() const {
  std::array<double, 3> ev{0.0, 0.0, 0.0};
  if (dim == 1) {
    ev[0] = (*this)(0, 0);
    return ev;
  }
  if (dim == 2) {
    const double a = (*this)(0, 0), b = (*this)(0, 1), d = (*this)(1, 1);
    const double tr = a + d;
    const double disc = std::sqrt(std::max(0.0, 0.25 * (a - d) * (a - d) + b * b));
    ev[0] = 0.5 * tr - disc;
    ev[1] = 0.5 * tr + disc;
    return ev;
  }
  // dim == 3: cyclic Jacobi on a copy.
  std::array<std::array<double, 3>, 3> m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m[i][j] = (*this)(i, j);
  }
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) off += m[i][j] * m[i][j];
    }
    if (off < 1e-30) break;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        if (m[i][j] == 0.0) continue;
        const double theta = 0.5 * std::atan2(2.0 * m[i][j], m[j][j] - m[i][i]);
        const double c = std::cos(theta), s = std::sin(theta);
        for (int k = 0; k < 3; ++k) {
          const double mik = m[i][k], mjk = m[j][k];
          m[i][k] = c * mik - s * mjk;
          m[j][k] = s * mik + c * mjk;
        }
        for (int k = 0; k < 3; ++k) {
          const double mki = m[k][i], mkj = m[k][j];
          m[k][i] = c * mki - s * mkj;
          m[k][j] = s * mki + c * mkj;
        }
      }
    }
  }
  ev = {m[0][0], m[1][1], m[2][2]};
  std::sort(ev.begin(), ev.end());
  return ev;
}

namespace {

// -div(a grad u) with mean projection, reusing the flux stencil machinery.
class CellOperator {
 public:
  CellOperator(const PeriodicGrid& g, const Coefficient& a)
      : stencil_(g, a, 0.0) {}  // resolution guard handled by the caller

  const FluxStencil& stencil() const { return stencil_; }

  void apply(const ScalarField& u, ScalarField& out) const {
    stencil_.apply(u, out);
    for (auto& v : out.values()) v = -v;
  }

 private:
  FluxStencil stencil_;
};

double dot_fields(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
  return s;
}

// rhs for component k: div(a e_k) in flux form, zero mean by telescoping.
ScalarField cell_rhs(const PeriodicGrid& g, const FluxStencil& st, int k) {
  ScalarField b(g);
  const auto a = st.face(k);
  const int n = g.n;
  std::size_t stride = 1;
  for (int d = g.dim - 1; d > k; --d) stride *= n;
  for (std::size_t c = 0; c < b.size(); ++c) {
    const std::size_t along = (c / stride) % n;
    const std::size_t dn =
        along == 0 ? c + (static_cast<std::size_t>(n) - 1) * stride : c - stride;
    b[c] = (a[c] - a[dn]) / g.h;
  }
  return b;
}

CellSolution solve_cell_impl(const Coefficient& a, int n, const CellOptions& opt) {
  const int d = a.dim();
  PeriodicGrid g(d, n, 1.0);
  CellOperator A(g, a.with_epsilon(1.0));

  CellSolution sol;
  sol.grid = g;
  sol.chi.reserve(d);

  const int cap = opt.max_iter > 0 ? opt.max_iter : 200 * n;
  for (int k = 0; k < d; ++k) {
    ScalarField b = cell_rhs(g, A.stencil(), k);
    b.subtract_mean();
    const double nb = std::sqrt(dot_fields(b, b));
    ScalarField x(g), r = b, p = b, Ap(g);
    double rs = dot_fields(r, r);
    int it = 0;
    if (nb > 0.0) {
      for (; it < cap && std::sqrt(rs) > opt.tol * nb; ++it) {
        A.apply(p, Ap);
        const double alpha = rs / dot_fields(p, Ap);
        for (std::size_t i = 0; i < x.size(); ++i) {
          x[i] += alpha * p[i];
          r[i] -= alpha * Ap[i];
        }
        x.subtract_mean();
        const double rs_new = dot_fields(r, r);
        const double beta = rs_new / rs;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
        rs = rs_new;
      }
      const double rel = std::sqrt(rs) / nb;
      if (rel > opt.tol) {
        throw NoConvergence("solve_cell: CG residual " + std::to_string(rel) + " > tol after " +
                            std::to_string(it) + " iterations");
      }
      sol.cg_residual = std::max(sol.cg_residual, rel);
    }
    sol.cg_iterations = std::max(sol.cg_iterations, it);
    x.subtract_mean();
    sol.chi.push_back(std::move(x));
  }

  // face-flux table g[k][axis][node] = a_face (d_axis chi_k + delta_{axis,k})
  sol.g.resize(d);
  const int nn = static_cast<int>(g.node_count());
  for (int k = 0; k < d; ++k) {
    for (int axis = 0; axis < d; ++axis) {
      auto& col = sol.g[k][axis];
      col.resize(nn);
      const auto af = A.stencil().face(axis);
      std::size_t stride = 1;
      for (int dd = g.dim - 1; dd > axis; --dd) stride *= g.n;
      for (std::size_t c = 0; c < static_cast<std::size_t>(nn); ++c) {
        const std::size_t along = (c / stride) % g.n;
        const std::size_t up = along + 1 == static_cast<std::size_t>(g.n)
                                   ? c - (static_cast<std::size_t>(g.n) - 1) * stride
                                   : c + stride;
        const double grad = (sol.chi[k][up] - sol.chi[k][c]) / g.h;
        col[c] = af[c] * (grad + (axis == k ? 1.0 : 0.0));
      }
    }
  }

  sol.AH = compute_AH(sol);
  sol.asymmetry = sol.AH.asymmetry();
  sol.AH.symmetrize();
  return sol;
}

}  // namespace

CellSolution solve_cell(const Coefficient& a, int n, const CellOptions& opt) {
  if (n < opt.min_n) {
    throw Error("solve_cell: n = " + std::to_string(n) + " below the minimum resolution " +
                std::to_string(opt.min_n));
  }
  return solve_cell_impl(a, n, opt);
}

HomogenizedTensor compute_AH(const CellSolution& sol) {
  const int d = sol.grid.dim;
  HomogenizedTensor t(d);
  const double inv_nn = 1.0 / static_cast<double>(sol.grid.node_count());
  for (int k = 0; k < d; ++k) {
    for (int axis = 0; axis < d; ++axis) {
      double s = 0.0;
      for (double v : sol.g[k][axis]) s += v;
      t(axis, k) = s * inv_nn;
    }
  }
  return t;
}

HomogenizedTensor discrete_effective_tensor(const Coefficient& a, int n_per_period) {
  if (a.is_constant()) {
    return HomogenizedTensor::isotropic(a.dim(), a.a_max());
  }
  CellOptions opt;
  opt.tol = 1e-12;
  CellSolution sol = solve_cell_impl(a, n_per_period, opt);
  return sol.AH;
}

double CellSolution::chi_value(int k, const Point& y) const {
  const int n = grid.n;
  const double h = grid.h;
  // periodic multilinear interpolation
  int base[3] = {0, 0, 0};
  double frac[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < grid.dim; ++a) {
    double w = y[a] / h;
    w -= std::floor(w / n) * n;
    base[a] = static_cast<int>(std::floor(w));
    frac[a] = w - base[a];
    if (base[a] >= n) {
      base[a] = 0;
      frac[a] = 0.0;
    }
  }
  double v = 0.0;
  const int corners = 1 << grid.dim;
  for (int c = 0; c < corners; ++c) {
    double wgt = 1.0;
    int idx[3] = {0, 0, 0};
    for (int a = 0; a < grid.dim; ++a) {
      const int bit = (c >> a) & 1;
      wgt *= bit ? frac[a] : 1.0 - frac[a];
      idx[a] = base[a] + bit;
    }
    if (wgt == 0.0) continue;
    v += wgt * chi[k][grid.index(idx[0], idx[1], idx[2])];
  }
  return v;
}

bool CellSolution::commensurate(int n_micro_per_period) const {
  return n_micro_per_period % grid.n == 0 || grid.n % n_micro_per_period == 0;
}

double CellSolution::div_g_residual() const {
  const int d = grid.dim;
  double gmax = 0.0, worst = 0.0;
  for (int k = 0; k < d; ++k) {
    for (int axis = 0; axis < d; ++axis) {
      for (double v : g[k][axis]) gmax = std::max(gmax, std::abs(v));
    }
  }
  for (int k = 0; k < d; ++k) {
    for (std::size_t c = 0; c < grid.node_count(); ++c) {
      double div = 0.0;
      for (int axis = 0; axis < d; ++axis) {
        std::size_t stride = 1;
        for (int dd = grid.dim - 1; dd > axis; --dd) stride *= grid.n;
        const std::size_t along = (c / stride) % grid.n;
        const std::size_t dn =
            along == 0 ? c + (static_cast<std::size_t>(grid.n) - 1) * stride : c - stride;
        div += (g[k][axis][c] - g[k][axis][dn]) / grid.h;
      }
      worst = std::max(worst, std::abs(div));
    }
  }
  return gmax > 0.0 ? worst / gmax : 0.0;
}

}  // namespace llhmm
