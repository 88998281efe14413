#pragma once

// Reference implementations used only by the tests. They are deliberately
// naive and share no code with the library.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

// Direct O(N²) real DFT: a_k, b_k with f = a0 + Σ a_k cos + b_k sin.
struct Dft {
  std::vector<double> a, b;
};

inline Dft direct_dft(const std::vector<double>& f) {
  const int n = static_cast<int>(f.size());
  Dft d;
  d.a.assign(n / 2 + 1, 0.0);
  d.b.assign(n / 2 + 1, 0.0);
  for (int k = 0; k <= n / 2; ++k) {
    long double sa = 0, sb = 0;
    for (int j = 0; j < n; ++j) {
      const long double t = 2.0L * pi * j * k / n;
      sa += f[j] * std::cos(t);
      sb += f[j] * std::sin(t);
    }
    const double w = (k == 0 || k == n / 2) ? 1.0 / n : 2.0 / n;
    d.a[k] = static_cast<double>(sa * w);
    d.b[k] = (k == 0 || k == n / 2) ? 0.0 : static_cast<double>(sb * w);
  }
  return d;
}

// Radial offset of the circle of radius r centred at c, seen from the origin
// along angle φ, relative to r_e.
inline double shifted_circle_offset(double phi, double r, double cx, double cy, double r_e) {
  const double ux = std::cos(phi), uy = std::sin(phi);
  const double p = ux * cx + uy * cy;
  return p + std::sqrt(p * p - (cx * cx + cy * cy - r * r)) - r_e;
}

// Poisson kernel on the disk of radius R, normalised so ∫ P dφ = 1.
inline double poisson(double r, double theta, double phi, double R) {
  return (R * R - r * r) / (2 * pi * (r * r + R * R - 2 * R * r * std::cos(theta - phi)));
}

// Harmonic extension into the disk from boundary data g(φ) by trapezoidal
// quadrature of the Poisson integral.
template <class G>
double poisson_extension(G g, double r, double theta, double R, int m = 4096) {
  double s = 0.0;
  for (int j = 0; j < m; ++j) {
    const double phi = 2 * pi * j / m;
    s += poisson(r, theta, phi, R) * g(phi);
  }
  return s * 2 * pi / m;
}

}  // namespace oracle
