#pragma once

#include <span>
#include <vector>

namespace droplet {

/// Real trigonometric coefficients of a 2π-periodic function sampled on an
/// N-point equispaced grid:
///
///   f(θ) = a[0] + Σ_{k=1}^{N/2} (a[k] cos kθ + b[k] sin kθ)
///
/// Both vectors have length N/2 + 1. b[0] is always zero and so is b[N/2],
/// since sin(Nθ/2) vanishes on the grid.
struct FourierCoeffs {
  std::vector<double> a;
  std::vector<double> b;

  FourierCoeffs() = default;
  /// Zero coefficients for an n-point grid.
  explicit FourierCoeffs(int n_nodes);

  int n_nodes() const { return 2 * (static_cast<int>(a.size()) - 1); }
  int nyquist() const { return static_cast<int>(a.size()) - 1; }
};

/// Forward transform. Throws ValidationError for odd or too-short input.
FourierCoeffs to_coeffs(std::span<const double> samples);
/// Inverse transform onto an n-point grid (n must equal coeffs.n_nodes()).
std::vector<double> to_samples(const FourierCoeffs& coeffs);

/// Number of entries in the packed ordering [a0, a1, b1, ..., aK, bK].
constexpr int packed_size(int max_mode) { return 2 * max_mode + 1; }
/// Mode index of a packed position.
constexpr int packed_mode(int index) { return (index + 1) / 2; }

std::vector<double> pack(const FourierCoeffs& c, int max_mode);
FourierCoeffs unpack(std::span<const double> packed, int n_nodes);

/// A periodic function held both as grid samples and as its interpolating
/// trigonometric polynomial. Immutable.
class PeriodicField {
 public:
  PeriodicField() = default;

  static PeriodicField from_samples(std::vector<double> samples);
  static PeriodicField from_coeffs(FourierCoeffs coeffs);
  static PeriodicField zero(int n_nodes);

  int size() const { return static_cast<int>(samples_.size()); }
  std::span<const double> samples() const { return samples_; }
  double operator[](int j) const { return samples_[static_cast<std::size_t>(j)]; }
  const FourierCoeffs& coeffs() const { return coeffs_; }

  /// Mean value, (1/2π)∫f dθ.
  double mean() const { return coeffs_.a[0]; }
  double max_abs() const;

  /// Value of the trigonometric interpolant at an arbitrary angle. The
  /// Nyquist mode is taken as a[N/2] cos(Nθ/2).
  double operator()(double theta) const;
  /// Value and first derivative of the interpolant at an arbitrary angle.
  void evaluate(double theta, double& value, double& slope) const;

  /// Spectral derivative. The Nyquist term is dropped.
  PeriodicField derivative() const;
  /// Same function on an m-point grid: zero-padding when m > N, truncation to
  /// modes k < m/2 when m < N.
  PeriodicField resampled(int m) const;
  /// Copy with mode k (both cos and sin) set to zero.
  PeriodicField without_mode(int k) const;
  /// Copy with every mode k >= kmax zeroed (kmax = N/2 drops only Nyquist).
  PeriodicField band_limited(int kmax) const;

 private:
  PeriodicField(std::vector<double> samples, FourierCoeffs coeffs);

  std::vector<double> samples_;
  FourierCoeffs coeffs_;
};

PeriodicField operator+(const PeriodicField& x, const PeriodicField& y);
PeriodicField operator-(const PeriodicField& x, const PeriodicField& y);
PeriodicField operator*(double s, const PeriodicField& x);

/// Mean inner product ⟨f, g⟩ = (1/2π)∫ f g dθ, evaluated on a 2N grid so that
/// products of band-limited fields are integrated exactly.
double inner(const PeriodicField& f, const PeriodicField& g);
/// sqrt(⟨f, f⟩).
double l2_norm(const PeriodicField& f);

}  // namespace droplet
