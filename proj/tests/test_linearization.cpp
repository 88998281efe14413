#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "droplet/linearization.hpp"
#include "oracles.hpp"

using namespace droplet;

namespace {

FourierCoeffs mode(int n, int k, bool sine = false) {
  FourierCoeffs h(n);
  (sine ? h.b : h.a)[k] = 1.0;
  return h;
}

DynamicsConfig with_radius(double r_e, int n) {
  DynamicsConfig c;
  c.V0 = oracle::pi * r_e * r_e * r_e / 4;
  c.n_nodes = n;
  return c;
}

// Central difference of I, λ and the nodal flux along direction h.
struct Fd {
  double dI, dlambda;
  std::vector<double> dflux;
};

Fd finite_difference(const FourierCoeffs& h, const DynamicsConfig& c, double eps) {
  const double r_e = c.base_radius();
  auto at = [&](double s) {
    FourierCoeffs x = h;
    for (auto& v : x.a) v *= s;
    for (auto& v : x.b) v *= s;
    return solve_base(ShapeFunction::from_coeffs(r_e, x), c.V0);
  };
  const SolveResult p = at(eps), m = at(-eps);
  Fd d{(p.I - m.I) / (2 * eps), (p.lambda - m.lambda) / (2 * eps), {}};
  for (std::size_t j = 0; j < p.flux.size(); ++j) d.dflux.push_back((p.flux[j] - m.flux[j]) / (2 * eps));
  return d;
}

}  // namespace

TEST_CASE("volume derivative") {
  CHECK(volume_derivative(mode(32, 1), 1.0) == 0.0);
  CHECK(volume_derivative(mode(32, 0), 1.0) == doctest::Approx(oracle::pi / 2));
  CHECK(volume_derivative(mode(32, 5), 1.0) == 0.0);
  const DynamicsConfig c = with_radius(1.0, 128);
  CHECK(std::abs(finite_difference(mode(128, 5), c, 1e-4).dI) <= 1e-8);
  CHECK(finite_difference(mode(128, 0), c, 1e-4).dI == doctest::Approx(oracle::pi / 2).epsilon(1e-6));
}

TEST_CASE("lambda derivative") {
  const DynamicsConfig c1 = with_radius(1.0, 128), c2 = with_radius(2.0, 128);
  CHECK(lambda_derivative(mode(32, 3, true), c1) == 0.0);
  CHECK(lambda_derivative(mode(32, 0), c1) == doctest::Approx(-8.0));
  CHECK(lambda_derivative(mode(32, 0), c2) == doctest::Approx(-2.0));
  CHECK(finite_difference(mode(128, 0), c1, 1e-4).dlambda == doctest::Approx(-8.0).epsilon(1e-6));
  CHECK(finite_difference(mode(128, 0), c2, 1e-4).dlambda == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("flux derivative") {
  const FourierCoeffs d1 = flux_derivative(mode(32, 1), 1.0);
  CHECK(d1.a[1] == 0.0);
  const FourierCoeffs d2 = flux_derivative(mode(32, 2), 1.0);
  CHECK(d2.a[2] == 0.5);
  CHECK(flux_derivative(mode(32, 0), 1.0).a[0] == -0.5);

  const DynamicsConfig c = with_radius(1.0, 128);
  const Fd fd = finite_difference(mode(128, 2), c, 1e-5);
  const std::vector<double> expect = to_samples(flux_derivative(mode(128, 2), 1.0));
  for (int j = 0; j < 128; ++j) CHECK(std::abs(fd.dflux[j] - expect[j]) <= 1e-6);
}

TEST_CASE("all three derivatives match finite differences on modes up to 8") {
  for (double r_e : {1.0, 1.5}) {
    const DynamicsConfig c = with_radius(r_e, 128);
    for (int k = 0; k <= 8; ++k) {
      for (bool sine : {false, true}) {
        if (k == 0 && sine) continue;
        const FourierCoeffs h = mode(128, k, sine);
        const Fd fd = finite_difference(h, c, 1e-4 * r_e);
        const double di = volume_derivative(h, r_e), dl = lambda_derivative(h, c);
        CHECK(std::abs(fd.dI - di) <= 1e-5 * std::max(1.0, std::abs(di)));
        CHECK(std::abs(fd.dlambda - dl) <= 1e-5 * std::max(1.0, std::abs(dl)));
        const std::vector<double> expect = to_samples(flux_derivative(h, r_e));
        double err = 0.0, scale = 0.0;
        for (int j = 0; j < 128; ++j) {
          err = std::max(err, std::abs(fd.dflux[j] - expect[j]));
          scale = std::max(scale, std::abs(expect[j]));
        }
        CHECK(err <= 1e-5 * std::max(scale, 1.0));
      }
    }
  }
}

TEST_CASE("analytic multipliers") {
  DynamicsConfig c;
  const LinearOperator op = analytic_dg0(c, 8);
  CHECK(op.multipliers[1] == 0.0);
  CHECK(op.multipliers[2] == doctest::Approx(-3.0));
  CHECK(op.multipliers[0] == doctest::Approx(-9.0));
  CHECK(op.multipliers[0] == doctest::Approx(radial_rhs_derivative(1.0, c)).epsilon(1e-7));
  CHECK(op.dense.rows() == 17);
  CHECK(op.dense(3, 3) == op.dense(4, 4));

  DynamicsConfig p = with_radius(2.0, 256);
  const LinearOperator g = analytic_dg0(p, 6);
  p.metric = MetricMode::paper;
  const LinearOperator q = analytic_dg0(p, 6);
  for (int k = 0; k <= 6; ++k) CHECK(q.multipliers[k] == doctest::Approx(2.0 * g.multipliers[k]));
}

TEST_CASE("finite-difference Jacobian") {
  DynamicsConfig c;
  c.n_nodes = 64;
  const int K = 8;
  JacobianOptions jo;
  const LinearOperator fd = numerical_jacobian(c, K, jo);
  const LinearOperator an = analytic_dg0(c, K);
  const double unit = c.law.derivative(1.0) / c.base_radius();

  CHECK(fd.dense.col(1).norm() <= 1e-6 * unit);
  CHECK(fd.dense.col(2).norm() <= 1e-6 * unit);
  for (int i = 0; i < fd.dense.rows(); ++i) {
    if (an.dense(i, i) != 0.0) CHECK(std::abs(fd.dense(i, i) - an.dense(i, i)) <= 1e-4 * std::abs(an.dense(i, i)));
    for (int j = 0; j < fd.dense.cols(); ++j) {
      if (packed_mode(i) != packed_mode(j)) CHECK(std::abs(fd.dense(i, j)) <= 1e-6 * unit);
    }
  }

  SUBCASE("error is second order in the step") {
    JacobianOptions a, b;
    a.eps = 2e-3 * 0.5;
    b.eps = 1e-3 * 0.5;
    const double ea = (numerical_jacobian(c, 3, a).dense - analytic_dg0(c, 3).dense).cwiseAbs().maxCoeff();
    const double eb = (numerical_jacobian(c, 3, b).dense - analytic_dg0(c, 3).dense).cwiseAbs().maxCoeff();
    CHECK(ea / eb == doctest::Approx(4.0).epsilon(0.1));
    MESSAGE("measured C = " << eb / (b.eps * b.eps));
  }
  SUBCASE("Richardson extrapolation removes the leading term") {
    JacobianOptions r;
    r.eps = 1e-3;
    r.richardson = true;
    const double e = (numerical_jacobian(c, 3, r).dense - analytic_dg0(c, 3).dense).cwiseAbs().maxCoeff();
    CHECK(e <= 1e-7);
  }
  SUBCASE("invariant under grid rotations") {
    const double alpha = 2 * oracle::pi * 5 / 64;
    Eigen::MatrixXd rot = Eigen::MatrixXd::Zero(2 * K + 1, 2 * K + 1);
    rot(0, 0) = 1;
    for (int k = 1; k <= K; ++k) {
      // h(θ − α): (a, b) ↦ (a cos kα − b sin kα, a sin kα + b cos kα)
      const double cs = std::cos(k * alpha), sn = std::sin(k * alpha);
      rot(2 * k - 1, 2 * k - 1) = cs;
      rot(2 * k - 1, 2 * k) = -sn;
      rot(2 * k, 2 * k - 1) = sn;
      rot(2 * k, 2 * k) = cs;
    }
    CHECK((rot * fd.dense * rot.transpose() - fd.dense).cwiseAbs().maxCoeff() <= 1e-8);
  }
  CHECK_THROWS(numerical_jacobian(c, K, JacobianOptions{1e-2}));
}

TEST_CASE("spectrum report") {
  DynamicsConfig c;
  c.law = ContactLaw::power(2.0);
  c.n_nodes = 128;
  const SpectrumReport r = spectrum(c, 12);
  CHECK(r.kernel_dim == 2);
  CHECK(r.rate_unit == doctest::Approx(2.0));
  CHECK(r.spectral_gap == doctest::Approx(2.0).epsilon(1e-6));
  for (double x : r.numerical_eigenvalues) {
    CHECK(x <= 1e-6);
    CHECK_FALSE((x < -1e-6 && x > -r.rate_unit / 2));
    // every eigenvalue is −(F′(1)/r_e)·k for an integer k
    CHECK(std::abs(x / r.rate_unit - std::round(x / r.rate_unit)) <= 1e-5);
  }
  CHECK(r.max_imag <= 1e-8);
  CHECK(r.constant_mode == doctest::Approx(-6.0).epsilon(1e-6));
  CHECK(r.labels.size() == r.analytic.size());
  for (double e : r.abs_err) CHECK(e <= 1e-4);
  // Multiplicity two for every nonzero eigenvalue from modes k ≥ 2, plus μ₀.
  int found_constant = 0;
  for (const Eigenspace& e : r.eigenspaces) {
    const bool has_constant = std::find(e.modes.begin(), e.modes.end(), "1") != e.modes.end();
    found_constant += has_constant;
    CHECK(e.modes.size() == (has_constant ? 3u : 2u));
  }
  CHECK(found_constant == 1);
  CHECK(!r.paper_value_note.empty());

  DynamicsConfig p = with_radius(2.0, 128);
  p.law = ContactLaw::power(2.0);
  const SpectrumReport rg = spectrum(p, 6);
  p.metric = MetricMode::paper;
  const SpectrumReport rp = spectrum(p, 6);
  for (std::size_t i = 0; i < rg.numerical_eigenvalues.size(); ++i) {
    CHECK(rp.numerical_eigenvalues[i] == doctest::Approx(2.0 * rg.numerical_eigenvalues[i]).epsilon(1e-6));
  }
}

TEST_CASE("disk Green's function radial derivative") {
  CHECK(disk_green_radial_derivative(0.0, 0.3, 2.0, 1.0) == doctest::Approx(1 / (2 * oracle::pi)));
  const int m = 2000;
  double total = 0.0, moment = 0.0;
  for (int j = 0; j < m; ++j) {
    const double phi = 2 * oracle::pi * j / m;
    total += disk_green_radial_derivative(0.5, 1.0, phi, 1.0);
    moment += disk_green_radial_derivative(0.5, 1.0, phi, 1.0) * std::cos(3 * phi);
  }
  CHECK(total * 2 * oracle::pi / m == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(moment * 2 * oracle::pi / m - std::pow(0.5, 3) * std::cos(3.0)) <= 1e-10);
  CHECK_THROWS_AS(disk_green_radial_derivative(1.0, 0.0, 0.0, 1.0), std::domain_error);

  // Poisson quadrature agrees with harmonic_extend on the disk.
  const ShapeFunction disk = ShapeFunction::circle(1.0, 64);
  std::vector<double> g(64);
  for (int j = 0; j < 64; ++j) g[j] = std::sin(disk.grid().node(j)) + 0.2 * std::cos(4 * disk.grid().node(j));
  const HarmonicExtension e = harmonic_extend(disk, g);
  for (double r : {0.2, 0.6}) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
      const double phi = 2 * oracle::pi * j / m;
      s += disk_green_radial_derivative(r, 0.7, phi, 1.0) * (std::sin(phi) + 0.2 * std::cos(4 * phi));
    }
    CHECK(std::abs(s * 2 * oracle::pi / m - e.field.value(Vec2(r * std::cos(0.7), r * std::sin(0.7)))) <= 1e-9);
  }
}
