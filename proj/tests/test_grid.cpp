#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "llhmm/grid.hpp"
#include "llhmm/homogenized.hpp"

using namespace llhmm;
using std::numbers::pi;

namespace {

VectorField random_unit_field(const PeriodicGrid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  VectorField f(g);
  for (auto& v : f.values()) {
    v = normalized({dist(rng), dist(rng), dist(rng)});
  }
  return f;
}

VectorField random_field(const PeriodicGrid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  VectorField f(g);
  for (auto& v : f.values()) v = {dist(rng), dist(rng), dist(rng)};
  return f;
}

double dot_fields(const VectorField& a, const VectorField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += dot(a[i], b[i]);
  return s;
}

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("coefficient evaluation") {
  const Coefficient c2 = Coefficient::constant(2.0);
  CHECK(c2.eval({0.123, 0, 0}) == 2.0);
  CHECK(c2.eval({-41.0, 0, 0}) == 2.0);

  const Coefficient a = Coefficient::paper_1d(1.0 / 140.0);
  CHECK(a.eval({0.0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-14));
  // x = eps/4 -> y = 1/4: 1 + 0.5*1 + 0.5*0 = 1.5
  CHECK(a.eval({0.25 / 140.0, 0, 0}) == doctest::Approx(1.5).epsilon(1e-13));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double v = a.eval({u(rng), 0, 0});
    CHECK(v >= a.a_min() - 1e-12);
    CHECK(v <= a.a_max() + 1e-12);
  }
}

TEST_CASE("coefficient must be positive") {
  CHECK_THROWS_AS(Coefficient([](const Point& y) { return std::sin(2 * pi * y[0]); }, 1, 1.0),
                  Error);
}

TEST_CASE("apply_L of a constant field vanishes") {
  PeriodicGrid g(1, 64);
  const Coefficient a = Coefficient::paper_1d(0.125);
  VectorField u(g, {0.3, -0.4, 0.86});
  const VectorField Lu = apply_L(u, a);
  for (std::size_t i = 0; i < Lu.size(); ++i) {
    CHECK(norm(Lu[i]) <= 1e-11);
  }
}

TEST_CASE("apply_L matches the analytic Laplacian at second order") {
  const Coefficient one = Coefficient::constant(1.0);
  auto error_at = [&](int n) {
    PeriodicGrid g(1, n);
    VectorField u(g);
    for (int i = 0; i < n; ++i) u[i] = {std::sin(2 * pi * i * g.h), 0, 0};
    const VectorField Lu = apply_L(u, one);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const double exact = -(2 * pi) * (2 * pi) * std::sin(2 * pi * i * g.h);
      worst = std::max(worst, std::abs(Lu[i].x - exact));
    }
    return worst;
  };
  const double e1 = error_at(64);
  const double e2 = error_at(128);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("flux form conserves: sum of apply_L vanishes") {
  for (int dim : {1, 2}) {
    PeriodicGrid g(dim, dim == 1 ? 128 : 24);
    const Coefficient a =
        dim == 1 ? Coefficient::paper_1d(1.0 / 8.0) : Coefficient::paper_2d(1.0 / 2.0);
    const VectorField u = random_field(g, 42 + dim);
    const VectorField Lu = apply_L(u, a);
    Vec3 total{};
    double scale = 0.0;
    for (std::size_t i = 0; i < Lu.size(); ++i) {
      total += Lu[i];
      scale = std::max(scale, norm(u[i]));
    }
    double cell = 1.0;
    for (int d = 0; d < dim; ++d) cell *= g.h;
    CHECK(norm(total) * cell <= 1e-10 * scale);
  }
}

TEST_CASE("apply_L is self-adjoint") {
  for (int dim : {1, 2}) {
    PeriodicGrid g(dim, dim == 1 ? 96 : 20);
    const Coefficient a =
        dim == 1 ? Coefficient::paper_1d(1.0 / 8.0) : Coefficient::paper_2d(1.0 / 2.0);
    FluxStencil op(g, a);
    const VectorField u = random_field(g, 1);
    const VectorField v = random_field(g, 2);
    const double a1 = dot_fields(u, op.apply(v));
    const double a2 = dot_fields(v, op.apply(u));
    CHECK(std::abs(a1 - a2) <= 1e-10 * std::max(std::abs(a1), 1.0));
  }
}

TEST_CASE("constant coefficient reduces to the scaled Laplacian") {
  PeriodicGrid g(2, 16);
  const double c = 1.37;
  FluxStencil flux(g, Coefficient::constant(c, 2));
  AnisoStencil lap(g, HomogenizedTensor::isotropic(2, c));
  const VectorField u = random_field(g, 3);
  VectorField a(g), b(g);
  flux.apply(u, a);
  lap.apply(u, b);
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(norm(a[i] - b[i]) <= 1e-14 * (norm(a[i]) + 1.0));
  }
}

TEST_CASE("second-order convergence for smooth coefficient") {
  // a and u analytic, eps = 1: L u = a' u' + a u''
  const Coefficient a(
      [](const Point& y) { return 1.0 + 0.3 * std::sin(2 * pi * y[0]); }, 1, 1.0, "smooth");
  auto err = [&](int n) {
    PeriodicGrid g(1, n);
    VectorField u(g);
    for (int i = 0; i < n; ++i) u[i] = {std::sin(2 * pi * i * g.h), 0, 0};
    const VectorField Lu = apply_L(u, a);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = i * g.h;
      const double ap = 0.3 * 2 * pi * std::cos(2 * pi * x);
      const double av = 1.0 + 0.3 * std::sin(2 * pi * x);
      const double exact = ap * 2 * pi * std::cos(2 * pi * x) -
                           av * (2 * pi) * (2 * pi) * std::sin(2 * pi * x);
      worst = std::max(worst, std::abs(Lu[i].x - exact));
    }
    return worst;
  };
  const double e1 = err(32), e2 = err(64), e3 = err(128);
  const double r1 = std::log2(e1 / e2);
  const double r2 = std::log2(e2 / e3);
  CHECK(r1 >= 1.8);
  CHECK(r1 <= 2.2);
  CHECK(r2 >= 1.8);
  CHECK(r2 <= 2.2);
}

TEST_CASE("resolution guard") {
  PeriodicGrid g(1, 280);  // 2 points per period at eps = 1/140
  const Coefficient a = Coefficient::paper_1d(1.0 / 140.0);
  CHECK_THROWS_AS(FluxStencil(g, a), GridTooCoarse);
  PeriodicGrid fine(1, 1120);
  CHECK_NOTHROW(FluxStencil(fine, a));
}

TEST_CASE("cross and triple products") {
  PeriodicGrid g(1, 16);
  const VectorField u = random_unit_field(g, 11);
  const VectorField v = random_field(g, 12);

  const VectorField uxu = cross(u, u);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(norm(uxu[i]) <= 1e-15);

  VectorField ex(g, {1, 0, 0}), ey(g, {0, 1, 0});
  const VectorField exy = cross(ex, ey);
  for (std::size_t i = 0; i < exy.size(); ++i) {
    CHECK(exy[i].x == 0.0);
    CHECK(exy[i].y == 0.0);
    CHECK(exy[i].z == 1.0);
  }

  const VectorField uxv = cross(u, v);
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(std::abs(dot(u[i], uxv[i])) <= 1e-14 * norm(v[i]));
  }

  const VectorField t = triple(u, u, v);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Vec3 expect = cross(u[i], cross(u[i], v[i]));
    CHECK(norm(t[i] - expect) <= 1e-15 * (1.0 + norm(expect)));
  }

  PeriodicGrid other(1, 32);
  VectorField w(other);
  CHECK_THROWS_AS(cross(u, w), GridMismatch);
}

TEST_CASE("grid constraints") {
  CHECK_THROWS_AS(PeriodicGrid(1, 3), Error);
  CHECK_THROWS_AS(PeriodicGrid(4, 8), Error);
  PeriodicGrid g(2, 8);
  CHECK(g.wrap(-1) == 7);
  CHECK(g.wrap(8) == 0);
  CHECK(g.index(-1, 9) == g.index(7, 1));
  const Point p = g.coord(g.index(3, 5));
  CHECK(p[0] == doctest::Approx(3 * g.h));
  CHECK(p[1] == doctest::Approx(5 * g.h));
}

}  // TEST_SUITE
