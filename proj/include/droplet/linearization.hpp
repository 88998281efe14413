#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "droplet/dynamics.hpp"
#include "droplet/fourier.hpp"

namespace droplet {

// Derivatives at the equilibrium circle of radius r_e along a direction h,
// given by its Fourier coefficients.

/// dI[h] = (π r_e³ / 2) ĥ₀.
double volume_derivative(const FourierCoeffs& h, double r_e);
/// dλ[h] = −(V₀ / I_e²) dI[h], which is −(8 / r_e²) ĥ₀ when V₀ = π r_e³ / 4.
double lambda_derivative(const FourierCoeffs& h, const DynamicsConfig& config);
/// d(∂_ν ū)[h] = ½ (r_e DTN(h) − h).
FourierCoeffs flux_derivative(const FourierCoeffs& h, double r_e);

/// DG(0) restricted to modes k ≤ max_mode, acting on packed coefficients
/// [a0, a1, b1, ..., aK, bK].
struct LinearOperator {
  MetricMode metric = MetricMode::geometric;
  int max_mode = 0;
  /// μ_k for k = 0..max_mode (analytic form only; empty for FD operators).
  std::vector<double> multipliers;
  Eigen::MatrixXd dense;
};

/// Assembled from the three derivatives above:
/// DG(0)h = −F′(1) [dλ[h] ∂_ν ū_e + λ_e d(∂_ν ū)[h]], times r_e in paper mode.
LinearOperator analytic_dg0(const DynamicsConfig& config, int max_mode);

struct JacobianOptions {
  /// Central-difference step relative to r_e.
  double eps = 1e-5;
  /// Combine steps ε and ε/2 to cancel the O(ε²) term.
  bool richardson = false;
  Exec exec = default_exec();
};

/// Column j = (G(ε e_j) − G(−ε e_j)) / 2ε on the grid config.n_nodes.
LinearOperator numerical_jacobian(const DynamicsConfig& config, int max_mode,
                                  const JacobianOptions& options = {});

struct Eigenspace {
  double value = 0.0;
  std::vector<std::string> modes;
};

struct SpectrumReport {
  static constexpr int kFormatVersion = 1;
  MetricMode metric = MetricMode::geometric;
  int max_mode = 0;
  double base_radius = 1.0;
  double fprime1 = 0.0;
  /// F′(1)/r_e (geometric) or F′(1) (paper): the unit of the eigenvalue set.
  double rate_unit = 0.0;
  double eps = 0.0;
  bool richardson = false;
  /// Per packed slot: label, analytic multiplier, FD diagonal entry, |difference|.
  std::vector<std::string> labels;
  std::vector<double> analytic;
  std::vector<double> numerical;
  std::vector<double> abs_err;
  /// Sorted (descending) eigenvalues of both dense forms.
  std::vector<double> analytic_eigenvalues;
  std::vector<double> numerical_eigenvalues;
  double max_imag = 0.0;
  double max_entry_error = 0.0;
  double coupling_norm = 0.0;
  double kernel_tol = 1e-6;
  int kernel_dim = 0;
  double kernel_residual = 0.0;
  double spectral_gap = 0.0;
  double constant_mode = 0.0;
  double radial_derivative = 0.0;
  /// Eigenvalues of the FD operator grouped by the modes that carry them.
  std::vector<Eigenspace> eigenspaces;
  std::vector<double> paper_claimed;
  std::string paper_value_note;
};

SpectrumReport spectrum(const DynamicsConfig& config, int max_mode,
                        const JacobianOptions& options = {});

/// Labels "1", "cos1", "sin1", ... for the packed slots.
std::vector<std::string> packed_labels(int max_mode);

/// ∂_r G at the disk boundary, the Poisson kernel
/// (1/2π)(r_e² − r²)/(r² + r_e² − 2 r_e r cos(θ − φ)). Throws std::domain_error
/// unless 0 ≤ r < r_e.
double disk_green_radial_derivative(double r, double theta, double phi, double r_e);

/// d/dr of radial_rhs at r by central differences with step h.
double radial_rhs_derivative(double r, const DynamicsConfig& config, double h = 1e-5);

}  // namespace droplet
