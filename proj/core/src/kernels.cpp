#include "llhmm/kernels.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace llhmm {

namespace quadrature {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    long double x = std::cos(std::numbers::pi * (i + 0.75L) / (n + 0.5L));
    long double pp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1.0L, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0L);
      const long double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-19L) break;
    }
    nodes[i] = static_cast<double>(-x);
    nodes[n - 1 - i] = static_cast<double>(x);
    const double w = static_cast<double>(2.0L / ((1.0L - x * x) * pp * pp));
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

double integrate(double a, double b, int n, const std::function<double(double)>& f) {
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    s += w[i] * f(mid + half * x[i]);
  }
  return s * half;
}

}  // namespace quadrature

namespace {

long double beta_ld(long double a, long double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

// Partial-pivot Gaussian elimination in long double; the Hankel systems here
// are small (order <= 13) but poorly conditioned for large p.
std::vector<double> solve_dense_ld(std::vector<std::vector<long double>> A,
                                   std::vector<long double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    }
    std::swap(A[col], A[piv]);
    std::swap(b[col], b[piv]);
    if (A[col][col] == 0.0L) {
      throw IllConditioned("kernel moment system is singular");
    }
    for (int r = col + 1; r < n; ++r) {
      const long double f = A[r][col] / A[col][col];
      for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (int r = n - 1; r >= 0; --r) {
    long double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= A[r][c] * x[c];
    x[r] = static_cast<double>(s / A[r][r]);
  }
  return x;
}

// a-th derivative of (c0 + c1 t)^m: m!/(m-a)! c1^a (c0 + c1 t)^{m-a};
// vanishes identically for a > m.
double linpow_derivative(double c0, double c1, int m, int a, double t) {
  if (a > m) return 0.0;
  double fac = 1.0;
  for (int k = 0; k < a; ++k) fac *= (m - k) * c1;
  return fac * std::pow(c0 + c1 * t, m - a);
}

constexpr int kMaxP = 12;

}  // namespace

Kernel Kernel::one_sided(int p, int q) {
  if (p < 0 || q < 0) throw Error("Kernel: p and q must be nonnegative");
  if (p > kMaxP) {
    throw IllConditioned("Kernel::one_sided: p > 12 exceeds the conditioning guard");
  }
  // Hankel system M c = e_1 with M_{jk} = I_{j+k}, I_m = B(q+2+m, q+2).
  std::vector<std::vector<long double>> M(p + 1, std::vector<long double>(p + 1));
  for (int j = 0; j <= p; ++j) {
    for (int k = 0; k <= p; ++k) {
      M[j][k] = beta_ld(static_cast<long double>(q + 2 + j + k), static_cast<long double>(q + 2));
    }
  }
  std::vector<long double> rhs(p + 1, 0.0L);
  rhs[0] = 1.0L;

  Kernel k;
  k.spec_ = {p, q, KernelFamily::one_sided};
  k.c_ = solve_dense_ld(std::move(M), std::move(rhs));

  // moment verification by quadrature
  const int nodes = std::max(32, 2 * (p + q) + 8);
  k.moments_.resize(p + 1);
  for (int r = 0; r <= p; ++r) {
    k.moments_[r] = quadrature::integrate(0.0, 1.0, nodes, [&](double t) {
      return k(t) * std::pow(t, r);
    });
  }
  if (std::abs(k.moments_[0] - 1.0) > 1e-10) {
    throw IllConditioned("Kernel::one_sided(" + std::to_string(p) + "," + std::to_string(q) +
                         "): mass check failed");
  }
  for (int r = 1; r <= p; ++r) {
    if (std::abs(k.moments_[r]) > 1e-8) {
      throw IllConditioned("Kernel::one_sided(" + std::to_string(p) + "," + std::to_string(q) +
                           "): moment " + std::to_string(r) + " check failed");
    }
  }
  return k;
}

Kernel Kernel::symmetric(int p, int q) {
  if (p < 0 || q < 0) throw Error("Kernel: p and q must be nonnegative");
  if (p > kMaxP) {
    throw IllConditioned("Kernel::symmetric: p > 12 exceeds the conditioning guard");
  }
  // Even ansatz: moments over even powers only; odd moments vanish by parity.
  // With s = a + b, int_{-1}^{1} (1-t^2)^{q+1} t^{2s} dt = B(s + 1/2, q + 2).
  const int m = p / 2 + 1;
  std::vector<std::vector<long double>> M(m, std::vector<long double>(m));
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      M[a][b] = beta_ld(a + b + 0.5L, static_cast<long double>(q + 2));
    }
  }
  std::vector<long double> rhs(m, 0.0L);
  rhs[0] = 1.0L;

  Kernel k;
  k.spec_ = {p, q, KernelFamily::symmetric};
  const std::vector<double> even = solve_dense_ld(std::move(M), std::move(rhs));
  k.c_.assign(p + 1, 0.0);
  for (int a = 0; a < m; ++a) k.c_[2 * a] = even[a];

  const int nodes = std::max(32, 2 * (p + q) + 8);
  k.moments_.resize(p + 1);
  for (int r = 0; r <= p; ++r) {
    k.moments_[r] = quadrature::integrate(-1.0, 1.0, nodes, [&](double t) {
      return k(t) * std::pow(t, r);
    });
  }
  if (std::abs(k.moments_[0] - 1.0) > 1e-10) {
    throw IllConditioned("Kernel::symmetric: mass check failed");
  }
  for (int r = 1; r <= p; ++r) {
    if (std::abs(k.moments_[r]) > 1e-8) {
      throw IllConditioned("Kernel::symmetric: moment " + std::to_string(r) + " check failed");
    }
  }
  return k;
}

Kernel Kernel::make(const KernelSpec& spec) {
  return spec.family == KernelFamily::one_sided ? one_sided(spec.p, spec.q)
                                                : symmetric(spec.p, spec.q);
}

double Kernel::operator()(double t) const {
  const int q = spec_.q;
  if (spec_.family == KernelFamily::one_sided) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    double P = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) P = P * t + *it;
    return std::pow(t * (1.0 - t), q + 1) * P;
  }
  if (t <= -1.0 || t >= 1.0) return 0.0;
  double P = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) P = P * t + *it;
  return std::pow(1.0 - t * t, q + 1) * P;
}

double Kernel::scaled(double mu, double x) const {
  if (!(mu > 0.0)) throw Error("Kernel::scaled: scale must be positive");
  return (*this)(x / mu) / mu;
}

double Kernel::tensor(double mu, const Point& x, int dim) const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= scaled(mu, x[a]);
  return v;
}

double Kernel::derivative_at(int j, double t) const {
  // outside the support the kernel is identically zero
  if (spec_.family == KernelFamily::one_sided) {
    if (t < 0.0 || t > 1.0) return 0.0;
  } else if (t < -1.0 || t > 1.0) {
    return 0.0;
  }
  // K = f g P with f, g the endpoint factors; Leibniz over three factors
  // keeps each term's endpoint zeros exact.
  const int q1 = spec_.q + 1;
  const double f0 = spec_.family == KernelFamily::one_sided ? 0.0 : 1.0;
  const double f1 = 1.0;  // f = t (one-sided) or 1 + t (symmetric)
  auto p_deriv = [&](int order, double x) {
    double v = 0.0;
    for (int i = static_cast<int>(c_.size()) - 1; i >= order; --i) {
      double fac = 1.0;
      for (int k = 0; k < order; ++k) fac *= static_cast<double>(i - k);
      v = v * x + fac * c_[i];
    }
    return v;
  };
  double total = 0.0;
  for (int a = 0; a <= j; ++a) {
    for (int b = 0; a + b <= j; ++b) {
      const int cc = j - a - b;
      // trinomial coefficient j! / (a! b! cc!)
      double w = 1.0;
      for (int k = 1; k <= j; ++k) w *= k;
      for (int k = 1; k <= a; ++k) w /= k;
      for (int k = 1; k <= b; ++k) w /= k;
      for (int k = 1; k <= cc; ++k) w /= k;
      const double fa = linpow_derivative(f0, f1, q1, a, t);
      if (fa == 0.0) continue;
      const double gb = linpow_derivative(1.0, -1.0, q1, b, t);
      if (gb == 0.0) continue;
      total += w * fa * gb * p_deriv(cc, t);
    }
  }
  return total;
}

}  // namespace llhmm
