#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "llhmm/errors.hpp"
#include "llhmm/vec3.hpp"

namespace llhmm {

enum class KernelFamily { symmetric, one_sided };

struct KernelSpec {
  int p = 0;  // vanishing moments
  int q = 0;  // derivatives vanishing at the support endpoints
  KernelFamily family = KernelFamily::symmetric;
};

/// Polynomial averaging kernel with unit mass and p vanishing moments.
///
/// one_sided:  K(t) = t^{q+1} (1-t)^{q+1} P(t) on (0,1), zero elsewhere.
/// symmetric:  K(t) = (1-t^2)^{q+1} P(t) on (-1,1), zero elsewhere, P even.
///
/// P solves the Beta-moment system; construction verifies the moments by
/// quadrature and throws IllConditioned when the verification fails.
class Kernel {
 public:
  static Kernel one_sided(int p, int q);
  static Kernel symmetric(int p, int q);
  static Kernel make(const KernelSpec& spec);

  const KernelSpec& spec() const { return spec_; }
  double support_lo() const { return spec_.family == KernelFamily::one_sided ? 0.0 : -1.0; }
  double support_hi() const { return 1.0; }

  /// Kernel value on the reference support.
  double operator()(double t) const;
  /// K_mu(x) = K(x / mu) / mu.
  double scaled(double mu, double x) const;
  /// Tensor-product evaluation K_mu(x_1) ... K_mu(x_dim).
  double tensor(double mu, const Point& x, int dim) const;

  /// Ansatz coefficients c_0..c_p of P.
  std::span<const double> ansatz_coeffs() const { return c_; }

  /// j-th derivative at t, evaluated in the factored ansatz form (Leibniz
  /// rule on the endpoint factors), so the endpoint zeros are exact.
  double derivative_at(int j, double t) const;

  /// Quadrature moments from the construction check, index 0..p.
  std::span<const double> moments() const { return moments_; }

 private:
  Kernel() = default;
  KernelSpec spec_;
  std::vector<double> c_;
  std::vector<double> moments_;
};

namespace quadrature {
/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);
/// Integral of f over [a, b] with an n-point rule.
double integrate(double a, double b, int n, const std::function<double(double)>& f);
}  // namespace quadrature

}  // namespace llhmm
