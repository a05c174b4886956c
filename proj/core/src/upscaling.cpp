#include "llhmm/upscaling.hpp"

#include <cmath>
#include <memory>

namespace llhmm {

std::string model_name(Model m) {
  switch (m) {
    case Model::M1: return "M1";
    case Model::M2: return "M2";
    default: return "M3";
  }
}

Model model_from_name(const std::string& s) {
  if (s == "M1" || s == "m1") return Model::M1;
  if (s == "M2" || s == "m2") return Model::M2;
  if (s == "M3" || s == "m3") return Model::M3;
  throw Error("unknown model '" + s + "'");
}

AveragingWindow::AveragingWindow(double mu_, double eta_, int px, int qx, int pt, int qt)
    : mu(mu_),
      eta(eta_),
      space_kernel(Kernel::symmetric(px, qx)),
      time_kernel(Kernel::one_sided(pt, qt)) {
  if (!(mu > 0.0) || !(eta > 0.0)) {
    throw Error("AveragingWindow: mu and eta must be positive");
  }
}

SpaceAverager::SpaceAverager(const PeriodicGrid& g, const Kernel& kernel, double mu)
    : grid_(g) {
  cells_ = static_cast<int>(std::round(mu / g.h));
  if (cells_ < 1) cells_ = 1;
  mu_ = cells_ * g.h;
  if (2 * cells_ >= g.n) {
    throw WindowExceedsDomain("SpaceAverager: support [-mu, mu] with mu = " +
                              std::to_string(mu_) + " does not fit in the periodic domain");
  }
  const int d = g.dim;
  const int w = 2 * cells_ + 1;
  double cellvol = 1.0;
  for (int a = 0; a < d; ++a) cellvol *= g.h;

  std::vector<double> k1(w);
  for (int o = -cells_; o <= cells_; ++o) {
    k1[o + cells_] = kernel.scaled(mu_, o * g.h);
  }

  if (d == 1) {
    for (int o = -cells_; o <= cells_; ++o) {
      const double wt = k1[o + cells_] * cellvol;
      if (wt == 0.0) continue;
      idx_.push_back(g.index(o));
      w_.push_back(wt);
    }
  } else if (d == 2) {
    for (int o1 = -cells_; o1 <= cells_; ++o1) {
      for (int o2 = -cells_; o2 <= cells_; ++o2) {
        const double wt = k1[o1 + cells_] * k1[o2 + cells_] * cellvol;
        if (wt == 0.0) continue;
        idx_.push_back(g.index(o1, o2));
        w_.push_back(wt);
      }
    }
  } else {
    for (int o1 = -cells_; o1 <= cells_; ++o1) {
      for (int o2 = -cells_; o2 <= cells_; ++o2) {
        for (int o3 = -cells_; o3 <= cells_; ++o3) {
          const double wt = k1[o1 + cells_] * k1[o2 + cells_] * k1[o3 + cells_] * cellvol;
          if (wt == 0.0) continue;
          idx_.push_back(g.index(o1, o2, o3));
          w_.push_back(wt);
        }
      }
    }
  }
}

double SpaceAverager::average(const ScalarField& f) const {
  if (!(f.grid() == grid_)) throw GridMismatch("SpaceAverager: field grid mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < idx_.size(); ++k) s += f[idx_[k]] * w_[k];
  return s;
}

Vec3 SpaceAverager::average(const VectorField& f) const {
  if (!(f.grid() == grid_)) throw GridMismatch("SpaceAverager: field grid mismatch");
  Vec3 s{};
  for (std::size_t k = 0; k < idx_.size(); ++k) s += f[idx_[k]] * w_[k];
  return s;
}

TimeAccumulator::TimeAccumulator(const Kernel& time_kernel, double eta, int n_values)
    : kernel_(&time_kernel), eta_(eta), n_(n_values), v_prev_(n_values), acc_(n_values, 0.0) {
  if (time_kernel.spec().family != KernelFamily::one_sided) {
    throw Error("TimeAccumulator: the temporal kernel must be one-sided");
  }
  if (!(eta > 0.0)) throw Error("TimeAccumulator: eta must be positive");
}

void TimeAccumulator::add(double t, std::span<const double> values) {
  if (static_cast<int>(values.size()) != n_) {
    throw Error("TimeAccumulator::add: value count mismatch");
  }
  const double w = kernel_->scaled(eta_, t);
  if (has_prev_) {
    const double half = 0.5 * (t - t_prev_);
    for (int i = 0; i < n_; ++i) {
      acc_[i] += half * (w_prev_ * v_prev_[i] + w * values[i]);
    }
  }
  has_prev_ = true;
  t_prev_ = t;
  w_prev_ = w;
  std::copy(values.begin(), values.end(), v_prev_.begin());
  if (t >= eta_ * (1.0 - 1e-12)) complete_ = true;
}

std::span<const double> TimeAccumulator::result() const {
  if (!complete_) {
    throw Error("TimeAccumulator::result: window has not completed");
  }
  return acc_;
}

namespace {

// per-step integrand block layout: [flux (d*3)] [field (3)] [torque (3)]
struct ObserverBlock {
  int dim;
  int n_flux;  // d * 3
  int total;
  explicit ObserverBlock(int d) : dim(d), n_flux(3 * d), total(3 * d + 6) {}
};

}  // namespace

std::array<UpscalingReport, 3> upscale_all(const UpscaleSetup& setup, int eps_n, double alpha,
                                           const AveragingWindow& window) {
  const int d = setup.coefficient.dim();
  const double eps = 1.0 / eps_n;
  const int n = setup.points_per_eps * eps_n;
  PeriodicGrid grid(d, n, 1.0);
  const Coefficient coeff = setup.coefficient.with_epsilon(eps);

  auto stencil = std::make_shared<FluxStencil>(grid, coeff, setup.points_per_eps);
  SpaceAverager space(grid, window.space_kernel, window.mu);

  // reference tensor
  HomogenizedTensor AH;
  if (setup.reference_tensor) {
    AH = *setup.reference_tensor;
  } else if (setup.reference == ReferenceMode::discrete) {
    AH = discrete_effective_tensor(coeff, setup.points_per_eps);
  } else {
    AH = setup.coefficient.is_constant()
             ? HomogenizedTensor::isotropic(d, setup.coefficient.a_max())
             : solve_cell(setup.coefficient, setup.continuum_cell_n).AH;
  }
  const ReferenceQuantities ref = reference_quantities(setup.m_init, AH);

  LLState state(sample_macro(setup.m_init, grid), alpha, stencil);
  StepControl ctl = StepControl::for_window(*stencil, window.eta, setup.cfl, setup.scheme);
  if (window.eta / ctl.dt < 8.0 - 1e-9) {
    throw Error("upscale: eta spans fewer than 8 steps; the temporal quadrature would be "
                "unresolved");
  }

  const ObserverBlock blk(d);
  TimeAccumulator acc(window.time_kernel, window.eta, blk.total);
  std::vector<double> sample(blk.total);
  std::vector<VectorField> flux(d, VectorField(grid));

  StepObserver observer = [&](double t, const VectorField& m, const VectorField& Lm) {
    // flux a grad m at nodes: neighboring face fluxes averaged per axis
    for (int axis = 0; axis < d; ++axis) {
      stencil->face_flux(m, axis, flux[axis]);
    }
    int pos = 0;
    for (int axis = 0; axis < d; ++axis) {
      std::size_t stride = 1;
      for (int dd = d - 1; dd > axis; --dd) stride *= grid.n;
      const auto& fx = flux[axis];
      const Vec3 avg = space.average_with([&](std::size_t c) {
        const std::size_t along = (c / stride) % grid.n;
        const std::size_t dn =
            along == 0 ? c + (static_cast<std::size_t>(grid.n) - 1) * stride : c - stride;
        return 0.5 * (fx[c] + fx[dn]);
      });
      sample[pos++] = avg.x;
      sample[pos++] = avg.y;
      sample[pos++] = avg.z;
    }
    const Vec3 favg = space.average(Lm);
    sample[pos++] = favg.x;
    sample[pos++] = favg.y;
    sample[pos++] = favg.z;
    const Vec3 tavg = space.average_with([&](std::size_t c) { return cross(m[c], Lm[c]); });
    sample[pos++] = tavg.x;
    sample[pos++] = tavg.y;
    sample[pos++] = tavg.z;
    acc.add(t, sample);
  };

  solve_window(state, window.eta, ctl, {observer});

  const auto result = acc.result();

  UpscalingReport base;
  base.epsilon = eps;
  base.mu = space.mu_snapped();
  base.mu_requested = window.mu;
  base.eta = window.eta;
  base.alpha = alpha;
  base.px = window.space_kernel.spec().p;
  base.qx = window.space_kernel.spec().q;
  base.pt = window.time_kernel.spec().p;
  base.qt = window.time_kernel.spec().q;
  base.n = n;
  base.dt = ctl.dt;
  base.preconditions_met = window.preconditions_met(eps);

  std::array<UpscalingReport, 3> out{base, base, base};

  // M1: flux against sum_j A_ij d_j m
  out[0].model = Model::M1;
  double e1 = 0.0;
  for (int axis = 0; axis < d; ++axis) {
    for (int c = 0; c < 3; ++c) {
      const double F = result[3 * axis + c];
      const double R = ref.flux[axis][c];
      out[0].F[3 * axis + c] = F;
      out[0].ref[3 * axis + c] = R;
      e1 += (F - R) * (F - R);
    }
  }
  out[0].error = std::sqrt(e1);

  out[1].model = Model::M2;
  out[2].model = Model::M3;
  double e2 = 0.0, e3 = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double F2 = result[blk.n_flux + c];
    const double F3 = result[blk.n_flux + 3 + c];
    out[1].F[c] = F2;
    out[1].ref[c] = ref.field[c];
    out[2].F[c] = F3;
    out[2].ref[c] = ref.torque[c];
    e2 += (F2 - ref.field[c]) * (F2 - ref.field[c]);
    e3 += (F3 - ref.torque[c]) * (F3 - ref.torque[c]);
  }
  out[1].error = std::sqrt(e2);
  out[2].error = std::sqrt(e3);
  return out;
}

UpscalingReport upscale(Model model, const UpscaleSetup& setup, int eps_n, double alpha,
                        const AveragingWindow& window) {
  const auto all = upscale_all(setup, eps_n, alpha, window);
  return all[static_cast<int>(model)];
}

}  // namespace llhmm
