#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <omp.h>

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "droplet/kernels.hpp"
#include "droplet/solver.hpp"
#include "oracles.hpp"

using namespace droplet;
using kernels::cplx;

namespace {

struct Curve {
  std::vector<cplx> z, dz, ddz;
  std::vector<Vec2> pts;
};

// ζ = R e^{iθ} with R = 1 + 0.1 cos 3θ + 0.05 sin 2θ, derivatives in closed form.
Curve sample_curve(int n) {
  Curve c;
  for (int j = 0; j < n; ++j) {
    const double t = 2 * oracle::pi * j / n;
    const double r = 1 + 0.1 * std::cos(3 * t) + 0.05 * std::sin(2 * t);
    const double dr = -0.3 * std::sin(3 * t) + 0.1 * std::cos(2 * t);
    const double ddr = -0.9 * std::cos(3 * t) - 0.2 * std::sin(2 * t);
    const cplx e = std::polar(1.0, t);
    c.z.push_back(r * e);
    c.dz.push_back(cplx(dr, r) * e);
    c.ddz.push_back(cplx(ddr - r, 2 * dr) * e);
    c.pts.push_back(Vec2(0.7 * r * std::cos(t + 0.1), 0.7 * r * std::sin(t + 0.1)));
  }
  return c;
}

struct ThreadScope {
  explicit ThreadScope(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~ThreadScope() { omp_set_num_threads(saved); }
  int saved;
};

}  // namespace

TEST_CASE("serial and parallel kernels agree bitwise") {
  ThreadScope threads(4);
  const Curve c = sample_curve(96);

  SUBCASE("nystrom_matrix") {
    const Eigen::MatrixXd a = kernels::nystrom_matrix(c.z, c.dz, c.ddz, Exec::serial);
    const Eigen::MatrixXd b = kernels::nystrom_matrix(c.z, c.dz, c.ddz, Exec::parallel);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("conjugate_trace") {
    std::vector<double> mu(96), dmu(96);
    for (int j = 0; j < 96; ++j) {
      const double t = 2 * oracle::pi * j / 96;
      mu[j] = std::cos(2 * t) + 0.3 * std::sin(5 * t);
      dmu[j] = -2 * std::sin(2 * t) + 1.5 * std::cos(5 * t);
    }
    CHECK(kernels::conjugate_trace(c.z, c.dz, mu, dmu, Exec::serial) ==
          kernels::conjugate_trace(c.z, c.dz, mu, dmu, Exec::parallel));
  }
  SUBCASE("cauchy_evaluate") {
    std::vector<cplx> w(96), f(96);
    for (int j = 0; j < 96; ++j) {
      w[j] = c.dz[j] / 96.0;
      f[j] = c.z[j] * c.z[j];
    }
    std::vector<cplx> f1(96), d1(96), f2(96), d2(96);
    kernels::cauchy_evaluate(c.z, w, f, c.pts, f1, d1, Exec::serial);
    kernels::cauchy_evaluate(c.z, w, f, c.pts, f2, d2, Exec::parallel);
    CHECK(f1 == f2);
    CHECK(d1 == d2);
    // Barycentric Cauchy reproduces z² and its derivative 2z inside.
    for (int j = 0; j < 96; ++j) {
      const cplx z(c.pts[j].x(), c.pts[j].y());
      CHECK(std::abs(f1[j] - z * z) < 1e-10);
      CHECK(std::abs(d1[j] - 2.0 * z) < 1e-8);
    }
  }
  SUBCASE("polynomial kernels") {
    std::vector<double> coeffs(2 * 8 + 1);
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] = std::sin(1.0 + i);
    CHECK(kernels::harmonic_values(coeffs, 1.2, c.pts, Exec::serial) ==
          kernels::harmonic_values(coeffs, 1.2, c.pts, Exec::parallel));
    const auto g1 = kernels::harmonic_gradients(coeffs, 1.2, c.pts, Exec::serial);
    const auto g2 = kernels::harmonic_gradients(coeffs, 1.2, c.pts, Exec::parallel);
    for (std::size_t j = 0; j < g1.size(); ++j) CHECK(g1[j] == g2[j]);
    CHECK(kernels::harmonic_radial_integrals(coeffs, 1.2, c.pts, Exec::serial) ==
          kernels::harmonic_radial_integrals(coeffs, 1.2, c.pts, Exec::parallel));
    const Eigen::MatrixXd a = kernels::collocation_matrix(c.pts, 8, 1.2, Exec::serial);
    const Eigen::MatrixXd b = kernels::collocation_matrix(c.pts, 8, 1.2, Exec::parallel);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("whole solve is independent of the execution policy") {
  ThreadScope threads(3);
  std::vector<double> rho(64);
  for (int j = 0; j < 64; ++j) rho[j] = 0.05 * std::cos(2 * oracle::pi * 3 * j / 64);
  const ShapeFunction s = ShapeFunction::from_samples(1.0, rho);
  SolverOptions a, b;
  a.exec = Exec::serial;
  b.exec = Exec::parallel;
  const SolveResult x = solve_base(s, 0.8, a), y = solve_base(s, 0.8, b);
  CHECK(x.flux == y.flux);
  CHECK(x.I == y.I);
}

TEST_CASE("harmonic polynomial kernels match direct evaluation") {
  const Curve c = sample_curve(16);
  std::vector<double> coeffs{0.5, 1.0, -2.0, 0.25, 0.75};  // 0.5 + Re(z) − 2 Im(z) + 0.25 Re z² + 0.75 Im z²
  const double rs = 1.5;
  const auto v = kernels::harmonic_values(coeffs, rs, c.pts, Exec::serial);
  const auto g = kernels::harmonic_gradients(coeffs, rs, c.pts, Exec::serial);
  for (std::size_t j = 0; j < c.pts.size(); ++j) {
    const cplx z = cplx(c.pts[j].x(), c.pts[j].y()) / rs;
    const double expect = 0.5 + z.real() - 2 * z.imag() + 0.25 * (z * z).real() + 0.75 * (z * z).imag();
    CHECK(v[j] == doctest::Approx(expect).epsilon(1e-14));
    // f(z) = 0.5 + (1 + 2i) z + (0.25 − 0.75i) z²; ∇Re f = (Re f′, −Im f′).
    const cplx fp = (cplx(1, 2) + 2.0 * cplx(0.25, -0.75) * z) / rs;
    CHECK(g[j].x() == doctest::Approx(fp.real()).epsilon(1e-13));
    CHECK(g[j].y() == doctest::Approx(-fp.imag()).epsilon(1e-13));
  }
}

TEST_CASE("for_each_index visits every index and rethrows") {
  ThreadScope threads(4);
  for (Exec e : {Exec::serial, Exec::parallel}) {
    std::vector<int> hits(100, 0);
    for_each_index(100, e, [&](long i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    std::atomic<int> count{0};
    CHECK_THROWS_AS(for_each_index(50, e,
                                   [&](long i) {
                                     ++count;
                                     if (i == 7) throw std::runtime_error("boom");
                                   }),
                    std::runtime_error);
  }
}
