#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "llhmm/upscaling.hpp"

using namespace llhmm;
using std::numbers::pi;

namespace {

double simpson(double a, double b, int n, const std::function<double(double)>& f) {
  const double h = (b - a) / (n - 1);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    s += w * f(a + i * h);
  }
  return s * h / 3.0;
}

}  // namespace

TEST_SUITE("upscaling") {

TEST_CASE("spatial averaging: unit mass and odd moments") {
  PeriodicGrid g(1, 1120);
  const Kernel k = Kernel::symmetric(5, 7);
  SpaceAverager avg(g, k, 0.03);
  CHECK(std::abs(avg.mu_snapped() - 0.03) <= 0.5 * g.h);

  ScalarField ones(g, 1.0);
  CHECK(avg.average(ones) == doctest::Approx(1.0).epsilon(1e-12));

  // signed coordinate is odd through the symmetric window
  ScalarField xs(g);
  for (int i = 0; i < g.n; ++i) {
    const double x = i * g.h;
    xs[i] = x - std::round(x);
  }
  CHECK(std::abs(avg.average(xs)) <= 1e-10);
}

TEST_CASE("spatial averaging suppresses resolved oscillations") {
  const Kernel k = Kernel::symmetric(5, 7);
  auto averaged = [&](int eps_n, double phase, int ppe) {
    PeriodicGrid g(1, ppe * eps_n);
    SpaceAverager avg(g, k, 0.03);
    ScalarField osc(g);
    for (int i = 0; i < g.n; ++i) {
      osc[i] = std::sin(2 * pi * i * g.h * eps_n + phase);
    }
    return std::abs(avg.average(osc));
  };
  CHECK(averaged(140, 0.0, 16) <= 1e-6);
  // with a generic phase the average is nonzero but decays fast in eps
  const double coarse = averaged(70, 0.7, 16);
  const double fine = averaged(140, 0.7, 16);
  CHECK(fine <= 0.05 * coarse);
}

TEST_CASE("window must fit the domain") {
  PeriodicGrid g(1, 32);
  const Kernel k = Kernel::symmetric(1, 1);
  CHECK_THROWS_AS(SpaceAverager(g, k, 0.49), WindowExceedsDomain);
}

TEST_CASE("time accumulation of a constant reproduces it") {
  const Kernel k0 = Kernel::one_sided(5, 7);
  const double eta = 1.5e-4;
  TimeAccumulator acc(k0, eta, 1);
  const int steps = 1500;
  for (int s = 0; s <= steps; ++s) {
    const double v = 0.8;
    acc.add(s * eta / steps, std::span<const double>(&v, 1));
  }
  REQUIRE(acc.complete());
  CHECK(acc.result()[0] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("vanishing temporal moments") {
  const Kernel k0 = Kernel::one_sided(5, 7);
  const double eta = 1.5e-4;
  for (int r = 1; r <= 5; ++r) {
    TimeAccumulator acc(k0, eta, 1);
    const int steps = 2000;
    for (int s = 0; s <= steps; ++s) {
      const double t = s * eta / steps;
      const double v = std::pow(t, r);
      acc.add(t, std::span<const double>(&v, 1));
    }
    CHECK(std::abs(acc.result()[0]) <= 1e-7 * std::pow(eta, r));
  }
}

TEST_CASE("temporal oscillation decay follows the kernel order") {
  // integrand cos(omega t / eps^2); magnitude decays like (eps^2/eta)^{q+1..q+2}
  const Kernel k0 = Kernel::one_sided(3, 3);
  const double eps = 0.01, omega = 20.0;
  std::vector<double> lx, ly;
  for (double f : {2.0, 4.0, 8.0, 16.0}) {
    const double eta = f * eps * eps;
    const double period = 2 * pi * eps * eps / omega;
    int steps = static_cast<int>(std::ceil(eta / (period / 256.0)));
    TimeAccumulator acc(k0, eta, 1);
    for (int s = 0; s <= steps; ++s) {
      const double t = s * eta / steps;
      const double v = std::cos(omega * t / (eps * eps));
      acc.add(t, std::span<const double>(&v, 1));
    }
    const double got = acc.result()[0];
    const double oracle = simpson(0.0, eta, 2000001, [&](double t) {
      return k0.scaled(eta, t) * std::cos(omega * t / (eps * eps));
    });
    if (std::abs(oracle) > 1e-8) {
      CHECK(std::abs(got - oracle) <= 1e-4 * std::abs(oracle));
    }
    lx.push_back(std::log(eps * eps / eta));
    ly.push_back(std::log(std::abs(got)));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(lx.size());
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
  CHECK(slope >= 3.0 + 1.0);  // q_t + 1
}

TEST_CASE("constant coefficient, constant data: all quantities vanish") {
  UpscaleSetup setup{Coefficient::constant(1.3), macro_constant({0, 0, 1})};
  AveragingWindow window(0.05, 2e-4, 2, 2, 2, 2);
  const auto reports = upscale_all(setup, 16, 0.5, window);
  for (const auto& r : reports) {
    CHECK(r.error <= 1e-10);
    for (double f : r.F) CHECK(std::abs(f) <= 1e-10);
  }
}

TEST_CASE("constant coefficient, helix data: errors at the discretization floor") {
  const double c = 1.3;
  UpscaleSetup setup{Coefficient::constant(c), macro_helix()};
  setup.points_per_eps = 8;
  AveragingWindow window(0.06, 5e-3, 3, 3, 3, 3);
  const int eps_n = 16;  // N = 128
  const auto reports = upscale_all(setup, eps_n, 0.5, window);
  const double h = 1.0 / 128.0;
  const double dt = reports[0].dt;
  double scale = 0.0;
  for (const auto& r : reports) {
    for (double v : r.ref) scale = std::max(scale, std::abs(v));
  }
  const double floor = 10.0 * (h * h + dt * dt) * scale;
  for (const auto& r : reports) {
    CHECK(r.error <= floor);
  }
  // F1 ~ c grad m(0)
  const auto J = macro_helix().jacobian({0, 0, 0});
  for (int comp = 0; comp < 3; ++comp) {
    CHECK(std::abs(reports[0].F[comp] - c * J[0][comp]) <= floor);
  }
}

TEST_CASE("torque consistency between M2 and M3") {
  UpscaleSetup setup{Coefficient::paper_1d(1.0), macro_helix()};
  AveragingWindow window(0.03, 1.5e-4, 5, 7, 5, 7);
  const auto reports = upscale_all(setup, 70, 0.1, window);
  const Vec3 m0 = reference_quantities(macro_helix(), HomogenizedTensor::isotropic(1, 1.0)).m0;
  const Vec3 F2{reports[1].F[0], reports[1].F[1], reports[1].F[2]};
  const Vec3 F3{reports[2].F[0], reports[2].F[1], reports[2].F[2]};
  CHECK(norm(F3 - cross(m0, F2)) <= reports[1].error + reports[2].error + 1e-9);
}

TEST_CASE("reference study point: flux beats field, field tracks torque") {
  UpscaleSetup setup{Coefficient::paper_1d(1.0), macro_helix()};
  AveragingWindow window(0.03, 1.5e-4, 5, 7, 5, 7);
  const auto r = upscale_all(setup, 140, 0.05, window);
  CHECK(r[0].error < r[1].error);
  CHECK(r[1].error / r[2].error >= 0.5);
  CHECK(r[1].error / r[2].error <= 2.0);
}

TEST_CASE("eta ladder decreases then plateaus") {
  UpscaleSetup setup{Coefficient::paper_1d(1.0), macro_helix()};
  const int eps_n = 70;
  const double eps2 = 1.0 / (static_cast<double>(eps_n) * eps_n);
  std::vector<double> errors;
  for (double f : {1.0, 2.0, 4.0, 8.0, 16.0, 24.0}) {
    AveragingWindow window(0.03, f * eps2, 5, 7, 5, 7);
    errors.push_back(upscale_all(setup, eps_n, 0.1, window)[0].error);
  }
  CHECK(errors[0] / errors[4] >= 1e2);  // at least two orders of decrease
  const double rel = std::abs(errors[5] - errors[4]) / errors[4];
  CHECK(rel <= 0.5);  // plateau-ish at the top of the ladder
}

TEST_CASE("window precondition diagnosis") {
  UpscaleSetup setup{Coefficient::paper_1d(1.0), macro_helix()};
  AveragingWindow window(0.03, 1.5e-4, 5, 7, 5, 7);
  CHECK(!window.preconditions_met(1.0 / 20.0));  // eps > mu
  CHECK(window.preconditions_met(1.0 / 140.0));
  const auto r = upscale_all(setup, 20, 0.1, window);
  CHECK(!r[0].preconditions_met);
}

TEST_CASE("mu snapping is reported") {
  UpscaleSetup setup{Coefficient::paper_1d(1.0), macro_helix()};
  AveragingWindow window(0.03, 2e-4, 3, 3, 3, 3);
  const auto r = upscale_all(setup, 50, 0.1, window);
  const double h = 1.0 / r[0].n;
  CHECK(r[0].mu_requested == 0.03);
  CHECK(std::abs(r[0].mu - 0.03) <= 0.5 * h + 1e-15);
  CHECK(std::abs(r[0].mu / h - std::round(r[0].mu / h)) <= 1e-9);
}

}  // TEST_SUITE
