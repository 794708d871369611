#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace brq {

using Complex = std::complex<double>;

/// Uniform periodic grid on the torus [-L/2, L/2)^dim with n points per axis.
/// Point i along an axis sits at x_i = -L/2 + i*h; frequency index k along an
/// axis (FFT order: 0..n/2-1, -n/2..-1) maps to xi_k = 2*pi*k/L.
class GridSpec {
 public:
  GridSpec() = default;

  int dim() const noexcept { return dim_; }
  std::size_t n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return length_ / static_cast<double>(n_); }
  double frequency_step() const noexcept;
  /// Largest resolved frequency, pi/h.
  double nyquist() const noexcept;
  std::size_t size() const noexcept;

  /// Cell volume h^dim.
  double cell_volume() const noexcept;

  /// Signed frequency index along one axis for storage index i.
  std::int64_t signed_index(std::size_t i) const noexcept;
  double coordinate(std::size_t i) const noexcept;

  /// Splits a flat row-major index into per-axis indices (unused axes are 0).
  std::array<std::size_t, 3> unflatten(std::size_t flat) const noexcept;
  std::size_t flatten(const std::array<std::size_t, 3>& idx) const noexcept;

  /// Position vector of a flat index (unused components are 0).
  std::array<double, 3> position(std::size_t flat) const noexcept;
  std::array<double, 3> wavevector(std::size_t flat) const noexcept;
  double frequency_norm(std::size_t flat) const noexcept;

  /// Flat index of the grid point nearest to x (periodic wrap).
  std::size_t nearest_index(const std::array<double, 3>& x) const noexcept;

  bool operator==(const GridSpec&) const = default;

 private:
  friend GridSpec make_grid(int dim, std::size_t n, double length);
  GridSpec(int dim, std::size_t n, double length)
      : dim_(dim), n_(n), length_(length) {}

  int dim_ = 1;
  std::size_t n_ = 8;
  double length_ = 1.0;
};

/// Throws Error{InvalidDimension | InvalidSize | InvalidLength}.
GridSpec make_grid(int dim, std::size_t n, double length);

struct SampledField {
  GridSpec grid;
  std::vector<Complex> values;

  /// Builds a field by evaluating fn(position) at every grid point.
  template <typename Fn>
  static SampledField from_function(const GridSpec& g, Fn&& fn) {
    SampledField f{g, std::vector<Complex>(g.size())};
    for (std::size_t i = 0; i < g.size(); ++i) f.values[i] = fn(g.position(i));
    return f;
  }

  static SampledField zeros(const GridSpec& g) {
    return SampledField{g, std::vector<Complex>(g.size())};
  }

  /// Throws if the value count does not match the grid or any value is not finite.
  void validate() const;

  /// Largest |Im| over all samples.
  double max_imag() const noexcept;
  std::vector<double> real_part() const;
};

struct SpectralField {
  GridSpec grid;
  std::vector<Complex> coefficients;
};

/// Continuum-normalized DFT: coefficients approximate the integral of
/// exp(-i x.xi) f(x) dx at each lattice frequency.
SpectralField forward(const SampledField& field);
/// Inverse of forward: f(x) = L^{-dim} sum_k fhat_k exp(i x.xi_k).
SampledField inverse(const SpectralField& spectrum);

/// Riemann-sum L^p norm, h^dim * sum |f|^p, then the p-th root. 1 <= p < inf.
double lp_norm(const SampledField& field, double p);
double lp_norm(std::span<const Complex> values, const GridSpec& grid, double p);
/// Discrete Plancherel norm ((1/L^dim) sum |fhat_k|^2)^{1/2}.
double l2_norm(const SpectralField& spectrum);

/// Returns x -> f(x + offset), realized by the phase exp(i xi.offset).
/// Requires |offset| < L/2.
SampledField shift(const SampledField& field, const std::array<double, 3>& offset);
/// Same as shift but for an already transformed field; saves one FFT per call.
SampledField shift(const SpectralField& spectrum, const std::array<double, 3>& offset);
/// Exact periodic translation by whole grid steps: x -> f(x + steps*h).
SampledField lattice_shift(const SampledField& field, const std::array<std::int64_t, 3>& steps);

/// Offsets probed by modulus_of_continuity.
struct OmegaSampling {
  enum class Mode {
    /// Radii t*k/radii for k = 1..radii along each direction, spectral shifts.
    Spectral,
    /// Radii t*k/radii rounded down to whole lattice steps (or every step
    /// multiple when exhaustive), realized by exact circular shifts. Use for
    /// discontinuous fields.
    Lattice,
  };
  Mode mode = Mode::Spectral;
  int radii = 8;
  bool exhaustive = false;
  /// Include the (normalized) diagonals besides the +/- coordinate axes.
  bool diagonals = true;
};

/// Sampled sup over |offset| <= t of ||f(. + offset) - f||_p.
double modulus_of_continuity(const SampledField& field, double t, double p,
                             const OmegaSampling& sampling = {});

/// Real random field with Hermitian spectrum supported in |xi| <= cutoff.
/// Deterministic for a fixed seed. Requires 0 <= cutoff < pi/h.
SampledField random_band_limited(const GridSpec& grid, std::uint64_t seed, double cutoff);

}  // namespace brq
