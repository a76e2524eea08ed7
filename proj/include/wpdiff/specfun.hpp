#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wpdiff/errors.hpp"

// Special functions and small numeric kernels shared by the physics modules.
// Everything here is pure; no hidden state beyond function-local constant tables.

namespace wpdiff {

using cplx = std::complex<double>;

namespace specfun {

inline constexpr double pi = std::numbers::pi;
inline constexpr double sqrt_pi = 1.7724538509055160273;
inline constexpr cplx I{0.0, 1.0};

namespace detail {

// Weideman's rational expansion of the Faddeeva function, 40 terms.
// Accurate to ~1e-15 relative everywhere in the closed upper half-plane.
struct WeidemanTable {
  static constexpr int N = 40;
  double L = 0.0;
  std::array<double, N> coeff{}; // coeff[n] multiplies Z^n

  WeidemanTable() {
    constexpr int M = 2 * N;
    constexpr int M2 = 2 * M;
    L = std::sqrt(N / std::sqrt(2.0));
    // samples f_k for k = -M+1..M-1, prefixed by a zero, then fftshifted
    std::array<double, M2> f{};
    for (int k = -M + 1; k <= M - 1; ++k) {
      const double theta = k * pi / M;
      const double t = L * std::tan(theta / 2.0);
      f[static_cast<std::size_t>(k + M)] = std::exp(-t * t) * (L * L + t * t);
    }
    std::array<double, M2> g{};
    for (int i = 0; i < M2; ++i) g[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>((i + M) % M2)];
    for (int n = 1; n <= N; ++n) {
      double acc = 0.0;
      for (int i = 0; i < M2; ++i) acc += g[static_cast<std::size_t>(i)] * std::cos(2.0 * pi * n * i / M2);
      coeff[static_cast<std::size_t>(n - 1)] = acc / M2;
    }
  }
};

inline const WeidemanTable& weideman() {
  static const WeidemanTable table;
  return table;
}

inline cplx faddeeva_upper(cplx z) {
  const auto& tab = weideman();
  const cplx denom = tab.L - I * z;
  const cplx Z = (tab.L + I * z) / denom;
  cplx p = 0.0;
  for (int n = WeidemanTable::N - 1; n >= 0; --n) p = p * Z + tab.coeff[static_cast<std::size_t>(n)];
  return 2.0 * p / (denom * denom) + (1.0 / sqrt_pi) / denom;
}

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// exp(a) * b without intermediate overflow when |exp(a)| is huge and |b| tiny.
inline cplx exp_times(cplx a, cplx b) {
  if (b == 0.0) return 0.0;
  if (std::abs(a.real()) < 700.0) return std::exp(a) * b;
  const cplx r = std::exp(a + std::log(b));
  return r;
}

} // namespace detail

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz), the scaled complex error function.
inline cplx faddeeva_w(cplx z) {
  if (z.imag() >= 0.0) return detail::faddeeva_upper(z);
  // reflection into the upper half-plane: w(z) = 2 exp(-z^2) - w(-z)
  const cplx wz = 2.0 * std::exp(-z * z) - detail::faddeeva_upper(-z);
  if (!detail::finite(wz)) throw OverflowError("faddeeva_w: result not representable");
  return wz;
}

/// Complementary error function of complex argument.
/// Re z >= 0 goes through w(iz); the left half-plane uses erfc(z) = 2 - erfc(-z),
/// so the reflection identity holds to rounding.
inline cplx erfc(cplx z) {
  if (!(std::abs(z) < 1e8)) throw ConfigError("erfc: |z| must be below 1e8");
  if (z == 0.0) return 1.0;
  if (z.real() < 0.0) return 2.0 - erfc(-z);
  const cplx w = detail::faddeeva_upper(I * z);
  const cplx r = detail::exp_times(-z * z, w);
  if (!detail::finite(r)) throw OverflowError("erfc: result not representable");
  return r;
}

/// Spherical Bessel function j_l(z) for integer 0 <= l <= 10 and complex z.
inline cplx spherical_bessel_j(int l, cplx z) {
  if (l < 0 || l > 10) throw ConfigError("spherical_bessel_j: order must be in [0, 10]");
  if (std::abs(z.imag()) > 700.0) throw OverflowError("spherical_bessel_j: |Im z| too large");
  const double az = std::abs(z);

  if (az < 1.0) {
    // power series z^l/(2l+1)!! * sum_k (-z^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))
    cplx lead = 1.0;
    double dfact = 1.0;
    for (int j = 1; j <= l; ++j) {
      lead *= z;
      dfact *= 2.0 * j + 1.0;
    }
    lead /= dfact;
    const cplx h = -z * z / 2.0;
    cplx term = 1.0;
    cplx sum = 1.0;
    for (int k = 1; k < 60; ++k) {
      term *= h / (static_cast<double>(k) * (2.0 * l + 2.0 * k + 1.0));
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return lead * sum;
  }

  const cplx s = std::sin(z);
  const cplx c = std::cos(z);
  const cplx j0 = s / z;
  if (l == 0) return j0;
  const cplx j1 = s / (z * z) - c / z;
  if (l == 1) return j1;
  if (l == 2) return (3.0 / (z * z) - 1.0) * s / z - 3.0 * c / (z * z);

  if (az >= l) {
    cplx prev = j0;
    cplx cur = j1;
    for (int n = 1; n < l; ++n) {
      const cplx next = (2.0 * n + 1.0) / z * cur - prev;
      prev = cur;
      cur = next;
    }
    return cur;
  }

  // Miller's downward recurrence, normalised against whichever of j0, j1 is larger
  const int start = l + 20 + static_cast<int>(az);
  cplx above = 0.0;
  cplx cur = 1e-30;
  cplx at_l = 0.0;
  cplx at_1 = 0.0;
  cplx at_0 = 0.0;
  for (int n = start; n >= 1; --n) {
    const cplx below = (2.0 * n + 1.0) / z * cur - above;
    above = cur;
    cur = below; // cur is now j_{n-1}
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      above *= 1e-250;
      at_l *= 1e-250;
      at_1 *= 1e-250;
    }
    if (n - 1 == l) at_l = cur;
    if (n - 1 == 1) at_1 = cur;
    if (n - 1 == 0) at_0 = cur;
  }
  if (std::abs(j0) >= std::abs(j1)) return at_l * (j0 / at_0);
  return at_l * (j1 / at_1);
}

/// Logarithmic derivative z_l = x j_l'(x) / j_l(x) for real x.
/// Throws PoleError when j_l(x) is numerically zero.
inline double bessel_log_derivative(int l, double x) {
  if (l < 0) throw ConfigError("bessel_log_derivative: negative order");
  if (x == 0.0) throw PoleError("bessel_log_derivative: x = 0");
  if (l == 0) {
    const double s = std::sin(x);
    if (std::abs(s / x) < 1e-12) throw PoleError("bessel_log_derivative: j_0(x) vanishes");
    return x * std::cos(x) / s - 1.0;
  }
  const double jl = spherical_bessel_j(l, x).real();
  const double jm = spherical_bessel_j(l - 1, x).real();
  if (std::abs(jl) < 1e-12 * std::max(1.0, std::abs(jm))) {
    throw PoleError("bessel_log_derivative: j_l(x) vanishes");
  }
  // j_l' = j_{l-1} - (l+1)/x j_l
  return x * jm / jl - (l + 1.0);
}

/// Tridiagonal system: diag has n entries, lower/upper n-1.
/// lower[i] couples row i+1 to column i; upper[i] couples row i to column i+1.
struct TridiagonalSystem {
  std::vector<cplx> lower;
  std::vector<cplx> diag;
  std::vector<cplx> upper;
  std::vector<cplx> rhs;
};

/// Thomas factorisation of a fixed tridiagonal matrix; solve() can be called
/// repeatedly with new right-hand sides.
class TridiagonalFactor {
public:
  TridiagonalFactor() = default;

  TridiagonalFactor(std::span<const cplx> lower, std::span<const cplx> diag, std::span<const cplx> upper)
      : lower_(lower.begin(), lower.end()), upper_(upper.begin(), upper.end()) {
    const std::size_t n = diag.size();
    if (n == 0) throw ConfigError("tridiagonal: empty system");
    if (lower.size() + 1 != n || upper.size() + 1 != n) {
      throw ConfigError("tridiagonal: lower/upper must have length n-1");
    }
    inv_pivot_.resize(n);
    cprime_.resize(n > 1 ? n - 1 : 0);
    cplx pivot = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) pivot = diag[i] - lower[i - 1] * cprime_[i - 1];
      const double scale = std::abs(diag[i]) + (i > 0 ? std::abs(lower[i - 1]) : 0.0) +
                           (i + 1 < n ? std::abs(upper[i]) : 0.0);
      if (!(std::abs(pivot) > 1e-14 * scale)) {
        throw SingularPivotError("tridiagonal: vanishing pivot at row " + std::to_string(i));
      }
      inv_pivot_[i] = 1.0 / pivot;
      if (i + 1 < n) cprime_[i] = upper[i] * inv_pivot_[i];
    }
  }

  std::size_t size() const noexcept { return inv_pivot_.size(); }

  // Solves in place: on entry x holds the rhs.
  void solve_in_place(std::span<cplx> x) const {
    const std::size_t n = size();
    if (x.size() != n) throw ConfigError("tridiagonal: rhs length mismatch");
    x[0] *= inv_pivot_[0];
    for (std::size_t i = 1; i < n; ++i) x[i] = (x[i] - lower_[i - 1] * x[i - 1]) * inv_pivot_[i];
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= cprime_[i] * x[i + 1];
  }

private:
  std::vector<cplx> lower_;
  std::vector<cplx> upper_;
  std::vector<cplx> inv_pivot_;
  std::vector<cplx> cprime_;
};

inline std::vector<cplx> solve_tridiagonal(const TridiagonalSystem& sys) {
  if (sys.rhs.size() != sys.diag.size()) throw ConfigError("tridiagonal: rhs length mismatch");
  TridiagonalFactor f(sys.lower, sys.diag, sys.upper);
  std::vector<cplx> x = sys.rhs;
  f.solve_in_place(x);
  return x;
}

/// 2x2 complex block, row-major.
struct Block2 {
  cplx a00{}, a01{}, a10{}, a11{};

  friend Block2 operator*(const Block2& p, const Block2& q) {
    return {p.a00 * q.a00 + p.a01 * q.a10, p.a00 * q.a01 + p.a01 * q.a11,
            p.a10 * q.a00 + p.a11 * q.a10, p.a10 * q.a01 + p.a11 * q.a11};
  }
  friend Block2 operator-(const Block2& p, const Block2& q) {
    return {p.a00 - q.a00, p.a01 - q.a01, p.a10 - q.a10, p.a11 - q.a11};
  }
  std::pair<cplx, cplx> apply(cplx x0, cplx x1) const { return {a00 * x0 + a01 * x1, a10 * x0 + a11 * x1}; }
  cplx det() const { return a00 * a11 - a01 * a10; }
  double norm1() const { return std::abs(a00) + std::abs(a01) + std::abs(a10) + std::abs(a11); }
  Block2 inverse() const {
    const cplx d = det();
    return {a11 / d, -a01 / d, -a10 / d, a00 / d};
  }
};

/// Block Thomas factorisation for block-tridiagonal systems with 2x2 blocks.
/// Unknowns are interleaved pairs (u_i, v_i).
class BlockTridiagonalFactor {
public:
  BlockTridiagonalFactor() = default;

  BlockTridiagonalFactor(std::vector<Block2> lower, std::vector<Block2> diag, std::vector<Block2> upper)
      : lower_(std::move(lower)) {
    const std::size_t n = diag.size();
    if (n == 0) throw ConfigError("block tridiagonal: empty system");
    if (lower_.size() + 1 != n || upper.size() + 1 != n) {
      throw ConfigError("block tridiagonal: lower/upper must have length n-1");
    }
    inv_pivot_.resize(n);
    cprime_.resize(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      Block2 pivot = diag[i];
      if (i > 0) pivot = diag[i] - lower_[i - 1] * cprime_[i - 1];
      const double scale = diag[i].norm1();
      if (!(std::abs(pivot.det()) > 1e-14 * scale * scale)) {
        throw SingularPivotError("block tridiagonal: singular pivot at block " + std::to_string(i));
      }
      inv_pivot_[i] = pivot.inverse();
      if (i + 1 < n) cprime_[i] = inv_pivot_[i] * upper[i];
    }
  }

  std::size_t size() const noexcept { return inv_pivot_.size(); }

  // Entries whose parts both fall below `flush_below` are set to zero as the
  // sweeps go; decaying tails otherwise run into subnormal arithmetic.
  void solve_in_place(std::span<cplx> u, std::span<cplx> v, double flush_below = 0.0) const {
    const std::size_t n = size();
    if (u.size() != n || v.size() != n) throw ConfigError("block tridiagonal: rhs length mismatch");
    auto flush = [flush_below](cplx& z) {
      if (std::abs(z.real()) < flush_below && std::abs(z.imag()) < flush_below) z = 0.0;
    };
    std::tie(u[0], v[0]) = inv_pivot_[0].apply(u[0], v[0]);
    for (std::size_t i = 1; i < n; ++i) {
      const auto [lu, lv] = lower_[i - 1].apply(u[i - 1], v[i - 1]);
      std::tie(u[i], v[i]) = inv_pivot_[i].apply(u[i] - lu, v[i] - lv);
      flush(u[i]);
      flush(v[i]);
    }
    for (std::size_t i = n - 1; i-- > 0;) {
      const auto [cu, cv] = cprime_[i].apply(u[i + 1], v[i + 1]);
      u[i] -= cu;
      v[i] -= cv;
      flush(u[i]);
      flush(v[i]);
    }
  }

private:
  std::vector<Block2> lower_;
  std::vector<Block2> inv_pivot_;
  std::vector<Block2> cprime_;
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree <= 2n-1.
inline QuadratureRule gauss_quadrature_nodes(int n, double a, double b) {
  if (n < 2) throw ConfigError("gauss_quadrature_nodes: n must be >= 2");
  if (!(a < b)) throw ConfigError("gauss_quadrature_nodes: interval must satisfy a < b");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      // final derivative at the converged root
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = mid - half * x;
    rule.nodes[hi] = mid + half * x;
    rule.weights[lo] = half * w;
    rule.weights[hi] = half * w;
  }
  return rule;
}

/// Composite Gauss-Legendre: `panels` equal panels of an n-point rule on [a, b].
inline QuadratureRule composite_gauss_legendre(int n, double a, double b, std::size_t panels) {
  if (panels == 0) throw ConfigError("composite_gauss_legendre: need at least one panel");
  const QuadratureRule base = gauss_quadrature_nodes(n, -1.0, 1.0);
  QuadratureRule rule;
  rule.nodes.reserve(panels * base.nodes.size());
  rule.weights.reserve(panels * base.nodes.size());
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    const double mid = lo + 0.5 * h;
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
      rule.nodes.push_back(mid + 0.5 * h * base.nodes[i]);
      rule.weights.push_back(0.5 * h * base.weights[i]);
    }
  }
  return rule;
}

} // namespace specfun
} // namespace wpdiff
