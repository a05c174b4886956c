// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one [PASS]/[FAIL] line per criterion. Exit code = number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "llhmm/cell.hpp"
#include "llhmm/corrector.hpp"
#include "llhmm/harness.hpp"
#include "llhmm/homogenized.hpp"
#include "llhmm/kernels.hpp"
#include "llhmm/micro.hpp"
#include "llhmm/upscaling.hpp"

using namespace llhmm;
using std::numbers::pi;

namespace {

int failures = 0;

struct Criterion {
  std::ostringstream detail;
  bool ok = true;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << "  FAILED: " << what << "\n";
    } else {
      detail << "  ok: " << what << "\n";
    }
  }
  void note(const std::string& what) { detail << "  " << what << "\n"; }
};

void run(int number, const std::string& title, double runtime_bound_s,
         const std::function<void(Criterion&)>& body) {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail << "  EXCEPTION: " << e.what() << "\n";
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (runtime_bound_s > 0.0 && secs > runtime_bound_s) {
    c.ok = false;
    c.detail << "  FAILED: runtime " << secs << " s exceeds bound " << runtime_bound_s << " s\n";
  }
  if (!c.ok) ++failures;
  std::printf("[%s] criterion %2d: %s (%.2f s)\n", c.ok ? "PASS" : "FAIL", number, title.c_str(),
              secs);
  std::fputs(c.detail.str().c_str(), stdout);
  std::fflush(stdout);
}

double simpson(double a, double b, int n, const std::function<double(double)>& f) {
  const double h = (b - a) / (n - 1);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    s += w * f(a + i * h);
  }
  return s * h / 3.0;
}

double paper_1d_fn(double y) {
  return 1.0 + 0.5 * std::sin(2 * pi * y) + 0.5 * std::sin(4 * pi * y);
}

double max_diff(const VectorField& a, const VectorField& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, norm(a[i] - b[i]));
  return worst;
}

double slope_of(const std::vector<std::pair<double, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, e] : pts) {
    const double lx = std::log(x), ly = std::log(e);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(pts.size());
  return (sxy - sx * sy / n) / (sxx - sx * sx / n);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void criterion_kernels(Criterion& c) {
  for (auto [p, q] : std::vector<std::pair<int, int>>{{0, 0}, {1, 0}, {3, 3}, {5, 7}}) {
    const Kernel k = Kernel::one_sided(p, q);
    auto moment = [&](int r) {
      return simpson(0.0, 1.0, 160001, [&](double t) { return k(t) * std::pow(t, r); });
    };
    c.require(std::abs(moment(0) - 1.0) <= 1e-10,
              "(" + std::to_string(p) + "," + std::to_string(q) + ") mass within 1e-10");
    bool mom_ok = true;
    for (int r = 1; r <= p; ++r) mom_ok = mom_ok && std::abs(moment(r)) <= 1e-8;
    if (p > 0) {
      c.require(mom_ok, "(" + std::to_string(p) + "," + std::to_string(q) +
                            ") vanishing moments within 1e-8");
    }
  }
  const Kernel k00 = Kernel::one_sided(0, 0);
  c.require(std::abs(k00.ansatz_coeffs()[0] - 6.0) <= 1e-10, "(0,0) coefficient equals 6");
  const Kernel k10 = Kernel::one_sided(1, 0);
  c.require(std::abs(k10.ansatz_coeffs()[0] - 36.0) <= 1e-10 &&
                std::abs(k10.ansatz_coeffs()[1] + 60.0) <= 1e-10,
            "(1,0) coefficients equal (36, -60)");
}

void criterion_ah_1d(Criterion& c) {
  const CellSolution sol = solve_cell(Coefficient::paper_1d(1.0), 2048);
  const double oracle = 1.0 / simpson(0.0, 1.0, 200001, [](double y) {
    return 1.0 / paper_1d_fn(y);
  });
  c.note("computed " + std::to_string(sol.AH(0, 0)) + ", harmonic-mean oracle " +
         std::to_string(oracle));
  c.require(std::abs(sol.AH(0, 0) - oracle) <= 1e-8, "|AH - oracle| <= 1e-8 at N = 2048");
}

void criterion_ah_2d(Criterion& c) {
  const CellSolution sol = solve_cell(Coefficient::paper_2d(1.0), 256);
  const double want[2][2] = {{0.61720765, 0.02618130}, {0.02618130, 0.71523722}};
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) worst = std::max(worst, std::abs(sol.AH(i, j) - want[i][j]));
  }
  c.note("max entry deviation " + fmt(worst));
  c.require(worst <= 1e-3, "entrywise within 1e-3 of the reference matrix at N = 256");
}

void criterion_sphere(Criterion& c) {
  double worst = 0.0;
  StepObserver track = [&](double, const VectorField& m, const VectorField&) {
    worst = std::max(worst, m.max_unit_deviation());
  };
  {
    const int eps_n = 140;
    PeriodicGrid g(1, 8 * eps_n);
    const Coefficient a = Coefficient::paper_1d(1.0 / eps_n);
    auto op = std::make_shared<FluxStencil>(g, a);
    LLState s(sample_macro(macro_helix(), g), 0.05, op);
    StepControl ctl = StepControl::for_window(*op, 1.5e-4);
    solve_window(s, 1.5e-4, ctl, {track});
  }
  {
    PeriodicGrid g(1, 64);
    auto op = std::make_shared<FluxStencil>(g, Coefficient::constant(1.0));
    LLState s(sample_macro(macro_helix(), g), 0.5, op);
    StepControl ctl = StepControl::for_window(*op, 5e-4, 0.25, Scheme::imex_midpoint);
    solve_window(s, 5e-4, ctl, {track});
  }
  c.note("max | |m| - 1 | over windows: " + fmt(worst));
  c.require(worst <= 1e-12, "sphere constraint within 1e-12 on every accepted step");
}

void criterion_solver_oracle(Criterion& c) {
  PeriodicGrid g(1, 8);
  auto op = std::make_shared<FluxStencil>(g, Coefficient::constant(1.0));
  const double t_end = 1e-3;
  auto init = [&]() { return sample_macro(macro_helix(), g); };

  LLState coarse(init(), 0.5, op);
  StepControl ctl = StepControl::for_window(*op, t_end);
  ctl.dt = StepControl::max_dt(*op) / 8.0;  // a few steps inside the window
  solve_window(coarse, t_end, ctl);

  LLState fine(init(), 0.5, op);
  StepControl fine_ctl = ctl;
  fine_ctl.dt = ctl.dt / 100.0;
  solve_window(fine, t_end, fine_ctl);

  LLState imex(init(), 0.5, op);
  StepControl imex_ctl = ctl;
  imex_ctl.scheme = Scheme::imex_midpoint;
  solve_window(imex, t_end, imex_ctl);

  const double e_ref = max_diff(coarse.m, fine.m);
  const double e_schemes = max_diff(coarse.m, imex.m);
  c.note("|rk4(dt) - rk4(dt/100)| = " + fmt(e_ref) + ", |rk4 - imex| = " + fmt(e_schemes));
  c.require(e_ref <= 1e-6, "dt vs dt/100 agreement within 1e-6");
  c.require(e_schemes <= 1e-6, "scheme cross-agreement within 1e-6");
}

void criterion_solution_map(Criterion& c) {
  const int n = 32;
  const double t_end = 1e-3;
  const Coefficient a = Coefficient::paper_1d(1.0);
  const EigenBasis basis = eigendecompose(a, n);
  PeriodicGrid g(1, n);
  FluxStencil op(g, a.with_epsilon(1.0), 0.0);
  std::mt19937 rng(2024);
  std::normal_distribution<double> dist;
  double worst = 0.0;
  for (int draw = 0; draw < 5; ++draw) {
    const Vec3 b = normalized({dist(rng), dist(rng), dist(rng)});
    VectorField f(g);
    for (auto& v : f.values()) v = {dist(rng), dist(rng), dist(rng)};
    const double alpha = 0.05 + 0.18 * draw;
    const VectorField spectral = schrodinger_map(b, f, alpha, t_end, basis);

    VectorField w = f, Lw(g), k1(g), k2(g), k3(g), k4(g), tmp(g);
    const int steps = 20000;
    const double dt = t_end / steps;
    auto rhs = [&](const VectorField& u, VectorField& out) {
      op.apply(u, Lw);
      for (std::size_t i = 0; i < u.size(); ++i) {
        const Vec3 bxL = cross(b, Lw[i]);
        out[i] = -bxL - alpha * cross(b, bxL);
      }
    };
    for (int s = 0; s < steps; ++s) {
      rhs(w, k1);
      for (std::size_t i = 0; i < w.size(); ++i) tmp[i] = w[i] + 0.5 * dt * k1[i];
      rhs(tmp, k2);
      for (std::size_t i = 0; i < w.size(); ++i) tmp[i] = w[i] + 0.5 * dt * k2[i];
      rhs(tmp, k3);
      for (std::size_t i = 0; i < w.size(); ++i) tmp[i] = w[i] + dt * k3[i];
      rhs(tmp, k4);
      for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
    }
    worst = std::max(worst, max_diff(spectral, w));
  }
  c.note("worst spectral-vs-direct deviation: " + fmt(worst));
  c.require(worst <= 1e-6, "5 random draws within 1e-6 at t = 1e-3, N = 32");
}

void criterion_corrector(Criterion& c) {
  const int n = 32;
  const Coefficient a = Coefficient::paper_1d(1.0);
  const EigenBasis basis = eigendecompose(a, n);
  const CellSolution cell = solve_cell(a, n);
  const CorrectorModes modes = expand_chi(basis, cell);
  const Vec3 m0 = normalized({1.0, 0.0, 1.0});
  std::array<Vec3, 3> grad{};
  grad[0] = cross(m0, Vec3{0.0, 1.0, 0.0}) * (2 * pi);

  double worst_orth = 0.0, worst_mean = 0.0;
  bool envelope_ok = true;
  auto l2 = [&](const VectorField& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += dot(v[i], v[i]);
    return std::sqrt(s / static_cast<double>(v.size()));
  };
  const VectorField v0 = build_v(m0, grad, modes, basis, 0.2, 0.0);
  const double n0 = l2(v0);
  for (double tau : {0.0, 0.02, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6}) {
    const VectorField v = build_v(m0, grad, modes, basis, 0.2, tau);
    Vec3 mean{};
    for (std::size_t i = 0; i < v.size(); ++i) {
      worst_orth = std::max(worst_orth, std::abs(dot(v[i], m0)));
      mean += v[i] * (1.0 / static_cast<double>(v.size()));
    }
    worst_mean = std::max(worst_mean, norm(mean));
    envelope_ok = envelope_ok &&
                  l2(v) <= n0 * std::exp(-0.2 * basis.omega[1] * tau) * (1.0 + 1e-6);
  }
  c.note("max |v . m0| = " + fmt(worst_orth) + ", max |cell mean| = " + fmt(worst_mean));
  c.require(worst_orth <= 1e-8, "v orthogonal to m0 within 1e-8");
  c.require(worst_mean <= 1e-10, "cell mean of v within 1e-10");
  c.require(envelope_ok, "||v(tau)|| below the exp(-alpha omega_1 tau) envelope");
}

void criterion_eps_convergence(Criterion& c) {
  SweepConfig cfg = preset("fig2");
  cfg.alpha = {0.1};
  cfg.jobs = 4;
  const SweepResult res = run_sweep(cfg);
  c.require(res.failures.empty(), "all ladder points completed");
  std::vector<double> e1, e2, e3, eps;
  for (const auto& r : res.reports) {
    if (r.model == Model::M1) {
      eps.push_back(r.epsilon);
      e1.push_back(r.error);
    }
    if (r.model == Model::M2) e2.push_back(r.error);
    if (r.model == Model::M3) e3.push_back(r.error);
  }
  {
    std::ostringstream tab;
    tab << "eps ladder errors:";
    for (std::size_t i = 0; i < eps.size(); ++i) {
      tab << " [1/" << std::lround(1.0 / eps[i]) << ": E1=" << fmt(e1[i]) << " E2=" << fmt(e2[i])
          << " E3=" << fmt(e3[i]) << "]";
    }
    c.note(tab.str());
  }
  bool ordering = true;
  bool ratio = true;
  for (std::size_t i = 0; i < e1.size(); ++i) {
    ordering = ordering && e1[i] <= e2[i];
    const double q = e2[i] / e3[i];
    ratio = ratio && q >= 0.5 && q <= 2.0;
  }
  c.require(ordering, "E1 <= E2 at every ladder point");
  c.require(ratio, "E2/E3 within [0.5, 2] at every ladder point");

  // small-eps fit window: the three smallest epsilon values of the ladder
  std::vector<std::pair<double, double>> tail;
  for (std::size_t i = eps.size() - 3; i < eps.size(); ++i) tail.emplace_back(eps[i], e1[i]);
  const double slope = slope_of(tail);
  c.note("small-eps fit window: eps in {1/100, 1/120, 1/140}, slope = " + fmt(slope));
  c.require(slope >= 1.7 && slope <= 2.3, "small-eps slope of E1 within [1.7, 2.3]");

  // Diagnostic only (not part of the criterion): with the window length held
  // proportional to the fast time scale (eta = 6 eps^2) the same pipeline
  // shows the quadratic trend inside a reachable ladder.
  UpscaleSetup setup{make_coefficient(cfg.coefficient, 1), macro_preset(cfg.m_init, 1)};
  std::vector<std::pair<double, double>> diag;
  for (int n : {100, 140, 200, 280}) {
    AveragingWindow w(0.03, 6.0 / (static_cast<double>(n) * n), 5, 7, 5, 7);
    diag.emplace_back(1.0 / n, upscale_all(setup, n, 0.1, w)[0].error);
  }
  c.note("diagnostic (not part of the criterion): eta = 6 eps^2 ladder slope = " +
         fmt(slope_of(diag)));
}

void criterion_eta_study(Criterion& c) {
  const int eps_n = 140;
  const double eps2 = 1.0 / (static_cast<double>(eps_n) * eps_n);
  UpscaleSetup setup{Coefficient::paper_1d(1.0), macro_helix()};
  const std::vector<double> factors = {0.5, 1, 2, 3, 4, 6, 8, 16, 32, 64};

  auto ladder = [&](int pt) {
    std::vector<double> errors;
    for (double f : factors) {
      AveragingWindow w(0.03, f * eps2, 5, 7, pt, 7);
      errors.push_back(upscale_all(setup, eps_n, 0.1, w)[0].error);
    }
    return errors;
  };

  const std::vector<double> e5 = ladder(5);
  {
    std::ostringstream tab;
    tab << "p_t=5 ladder (eta/eps^2: E1):";
    for (std::size_t i = 0; i < factors.size(); ++i) {
      tab << " " << factors[i] << ": " << fmt(e5[i]);
    }
    c.note(tab.str());
  }
  const double peak = *std::max_element(e5.begin(), e5.end());
  const double plateau = e5[e5.size() - 2];
  c.require(peak / plateau >= 1e2, "E1 decreases by at least two orders before the plateau");
  const double rel = std::abs(e5.back() - plateau) / plateau;
  c.require(rel <= 0.2, "plateau: top two eta values within 20% (" + fmt(rel) + ")");

  const std::vector<double> e1 = ladder(1);
  {
    std::ostringstream tab;
    tab << "p_t=1 ladder (eta/eps^2: E1):";
    for (std::size_t i = 0; i < factors.size(); ++i) {
      tab << " " << factors[i] << ": " << fmt(e1[i]);
    }
    c.note(tab.str());
  }
  const double vmin = *std::min_element(e1.begin(), e1.end());
  c.require(e1.back() >= 2.0 * vmin,
            "p_t = 1: error rises again after the plateau (last/min = " +
                fmt(e1.back() / vmin) + ")");
}

void criterion_determinism(Criterion& c) {
  SweepConfig cfg = preset("fig2");
  cfg.jobs = 1;
  std::ostringstream a, b;
  emit(run_sweep(cfg).reports, a);
  cfg.jobs = 4;
  emit(run_sweep(cfg).reports, b);
  c.require(a.str() == b.str(), "jobs = 1 and jobs = 4 produce byte-identical CSV for fig2");
}

void criterion_2d_ordering(Criterion& c) {
  UpscaleSetup setup{Coefficient::paper_2d(1.0), macro_helix2d()};
  AveragingWindow window(0.06, 3e-4, 5, 7, 3, 7);
  const auto reports = upscale_all(setup, 40, 0.1, window);
  c.note("2D at eps = 1/40: E1 = " + fmt(reports[0].error) + ", E2 = " + fmt(reports[1].error) +
         ", E3 = " + fmt(reports[2].error));
  c.require(reports[0].error < reports[1].error, "E1 < E2 for the 2D coefficient at eps = 1/40");
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  run(1, "one-sided kernel moments and closed-form coefficients", 1.0, criterion_kernels);
  run(2, "1D homogenized coefficient vs harmonic-mean oracle", 1.0, criterion_ah_1d);
  run(3, "2D homogenized tensor vs reference matrix", 30.0, criterion_ah_2d);
  run(4, "sphere constraint across windows", 0.0, criterion_sphere);
  run(5, "time-integrator oracle and scheme agreement", 0.0, criterion_solver_oracle);
  run(6, "spectral solution map vs direct integration", 10.0, criterion_solution_map);
  run(7, "corrector orthogonality, zero mean and decay", 0.0, criterion_corrector);
  run(8, "eps-convergence study (flux/field/torque)", 600.0, criterion_eps_convergence);
  run(9, "eta-study: decrease, plateau, p_t = 1 regrowth", 0.0, criterion_eta_study);
  run(10, "sweep determinism across thread counts", 0.0, criterion_determinism);
  run(11, "2D model ordering at eps = 1/40", 900.0, criterion_2d_ordering);
  if (failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criterion(s) failed\n", failures);
  }
  return failures;
}
