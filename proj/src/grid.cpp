#include "brq/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <tuple>

#include "brq/error.hpp"

namespace brq {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// FFTW planning is not thread-safe, execution with the new-array interface is.
// Plans are created once per (shape, sign) and kept for the process lifetime.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int dim, std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t total = static_cast<std::size_t>(std::pow(n, dim));
    auto* buf = fftw_alloc_complex(total);
    int dims[3] = {static_cast<int>(n), static_cast<int>(n), static_cast<int>(n)};
    fftw_plan plan = fftw_plan_dft(dim, dims, buf, buf, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<int, std::size_t, int>, fftw_plan> plans_;
};

void execute(const GridSpec& g, std::vector<Complex>& data, int sign) {
  fftw_plan plan = PlanCache::instance().get(g.dim(), g.n(), sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

// (-1)^(k_1+...+k_d): moves the origin of the sampled coordinates from the
// corner (index 0) to the torus center.
double center_phase(const GridSpec& g, std::size_t flat) {
  auto idx = g.unflatten(flat);
  std::size_t parity = 0;
  for (int a = 0; a < g.dim(); ++a) parity += idx[a];
  return (parity % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

double GridSpec::frequency_step() const noexcept {
  return 2.0 * std::numbers::pi / length_;
}

double GridSpec::nyquist() const noexcept { return std::numbers::pi / spacing(); }

std::size_t GridSpec::size() const noexcept {
  std::size_t s = 1;
  for (int a = 0; a < dim_; ++a) s *= n_;
  return s;
}

double GridSpec::cell_volume() const noexcept { return std::pow(spacing(), dim_); }

std::int64_t GridSpec::signed_index(std::size_t i) const noexcept {
  const auto half = static_cast<std::int64_t>(n_ / 2);
  const auto k = static_cast<std::int64_t>(i);
  return k < half ? k : k - static_cast<std::int64_t>(n_);
}

double GridSpec::coordinate(std::size_t i) const noexcept {
  return -0.5 * length_ + static_cast<double>(i) * spacing();
}

std::array<std::size_t, 3> GridSpec::unflatten(std::size_t flat) const noexcept {
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = flat % n_;
    flat /= n_;
  }
  return idx;
}

std::size_t GridSpec::flatten(const std::array<std::size_t, 3>& idx) const noexcept {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) flat = flat * n_ + idx[a];
  return flat;
}

std::array<double, 3> GridSpec::position(std::size_t flat) const noexcept {
  auto idx = unflatten(flat);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = coordinate(idx[a]);
  return x;
}

std::array<double, 3> GridSpec::wavevector(std::size_t flat) const noexcept {
  auto idx = unflatten(flat);
  std::array<double, 3> xi{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a)
    xi[a] = frequency_step() * static_cast<double>(signed_index(idx[a]));
  return xi;
}

double GridSpec::frequency_norm(std::size_t flat) const noexcept {
  auto xi = wavevector(flat);
  return std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
}

std::size_t GridSpec::nearest_index(const std::array<double, 3>& x) const noexcept {
  std::array<std::size_t, 3> idx{0, 0, 0};
  const auto n = static_cast<std::int64_t>(n_);
  for (int a = 0; a < dim_; ++a) {
    auto i = static_cast<std::int64_t>(std::llround((x[a] + 0.5 * length_) / spacing()));
    idx[a] = static_cast<std::size_t>(((i % n) + n) % n);
  }
  return flatten(idx);
}

GridSpec make_grid(int dim, std::size_t n, double length) {
  if (dim < 1 || dim > 3)
    throw Error(ErrorCode::InvalidDimension, "grid dimension must be 1, 2 or 3");
  if (n < 8 || !is_power_of_two(n))
    throw Error(ErrorCode::InvalidSize, "points per axis must be a power of two >= 8");
  if (!(length > 0.0) || !std::isfinite(length))
    throw Error(ErrorCode::InvalidLength, "grid length must be positive");
  return GridSpec(dim, n, length);
}

void SampledField::validate() const {
  if (values.size() != grid.size())
    throw Error(ErrorCode::InvalidSize, "field value count does not match grid");
  for (const auto& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error(ErrorCode::InvalidArgument, "field contains non-finite values");
}

double SampledField::max_imag() const noexcept {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v.imag()));
  return m;
}

std::vector<double> SampledField::real_part() const {
  std::vector<double> r(values.size());
  std::transform(values.begin(), values.end(), r.begin(),
                 [](const Complex& v) { return v.real(); });
  return r;
}

SpectralField forward(const SampledField& field) {
  if (field.values.size() != field.grid.size())
    throw Error(ErrorCode::InvalidSize, "field value count does not match grid");
  const auto& g = field.grid;
  SpectralField out{g, field.values};
  execute(g, out.coefficients, FFTW_FORWARD);
  const double vol = g.cell_volume();
  for (std::size_t i = 0; i < out.coefficients.size(); ++i)
    out.coefficients[i] *= vol * center_phase(g, i);
  return out;
}

SampledField inverse(const SpectralField& spectrum) {
  const auto& g = spectrum.grid;
  if (spectrum.coefficients.size() != g.size())
    throw Error(ErrorCode::InvalidSize, "coefficient count does not match grid");
  SampledField out{g, spectrum.coefficients};
  const double scale = 1.0 / std::pow(g.length(), g.dim());
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] *= scale * center_phase(g, i);
  execute(g, out.values, FFTW_BACKWARD);
  return out;
}

double lp_norm(std::span<const Complex> values, const GridSpec& grid, double p) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw Error(ErrorCode::OutOfRange, "norm exponent must satisfy 1 <= p < inf");
  double acc = 0.0;
  if (p == 2.0) {
    for (const auto& v : values) acc += std::norm(v);
    return std::sqrt(grid.cell_volume() * acc);
  }
  if (p == 1.0) {
    for (const auto& v : values) acc += std::abs(v);
    return grid.cell_volume() * acc;
  }
  // Scale by the max to keep large p from overflowing.
  double vmax = 0.0;
  for (const auto& v : values) vmax = std::max(vmax, std::abs(v));
  if (vmax == 0.0) return 0.0;
  for (const auto& v : values) acc += std::pow(std::abs(v) / vmax, p);
  return vmax * std::pow(grid.cell_volume() * acc, 1.0 / p);
}

double lp_norm(const SampledField& field, double p) {
  return lp_norm(field.values, field.grid, p);
}

double l2_norm(const SpectralField& spectrum) {
  double acc = 0.0;
  for (const auto& c : spectrum.coefficients) acc += std::norm(c);
  return std::sqrt(acc / std::pow(spectrum.grid.length(), spectrum.grid.dim()));
}

SampledField shift(const SpectralField& spectrum, const std::array<double, 3>& offset) {
  const auto& g = spectrum.grid;
  double len2 = 0.0;
  for (int a = 0; a < g.dim(); ++a) len2 += offset[a] * offset[a];
  if (!(std::sqrt(len2) < 0.5 * g.length()))
    throw Error(ErrorCode::OutOfRange, "shift offset must be shorter than L/2");
  SpectralField shifted = spectrum;
  // Separable phase: precompute per-axis factors.
  std::array<std::vector<Complex>, 3> phase;
  for (int a = 0; a < g.dim(); ++a) {
    phase[a].resize(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) {
      const double xi = g.frequency_step() * static_cast<double>(g.signed_index(i));
      // The Nyquist mode is real on a real field; a half-sample phase on it
      // would break Hermitian symmetry, so use the cosine there.
      if (g.signed_index(i) == -static_cast<std::int64_t>(g.n() / 2))
        phase[a][i] = std::cos(xi * offset[a]);
      else
        phase[a][i] = std::polar(1.0, xi * offset[a]);
    }
  }
  for (std::size_t flat = 0; flat < shifted.coefficients.size(); ++flat) {
    auto idx = g.unflatten(flat);
    Complex ph = 1.0;
    for (int a = 0; a < g.dim(); ++a) ph *= phase[a][idx[a]];
    shifted.coefficients[flat] *= ph;
  }
  return inverse(shifted);
}

SampledField shift(const SampledField& field, const std::array<double, 3>& offset) {
  return shift(forward(field), offset);
}

SampledField lattice_shift(const SampledField& field,
                           const std::array<std::int64_t, 3>& steps) {
  const auto& g = field.grid;
  SampledField out{g, std::vector<Complex>(field.values.size())};
  const auto n = static_cast<std::int64_t>(g.n());
  for (std::size_t flat = 0; flat < field.values.size(); ++flat) {
    auto idx = g.unflatten(flat);
    std::array<std::size_t, 3> src{0, 0, 0};
    for (int a = 0; a < g.dim(); ++a) {
      auto s = (static_cast<std::int64_t>(idx[a]) + steps[a]) % n;
      src[a] = static_cast<std::size_t>(s < 0 ? s + n : s);
    }
    out.values[flat] = field.values[g.flatten(src)];
  }
  return out;
}

namespace {

// Unit directions: +/- coordinate axes, optionally +/- body diagonals.
std::vector<std::array<int, 3>> sign_directions(int dim, bool diagonals) {
  std::vector<std::array<int, 3>> dirs;
  for (int a = 0; a < dim; ++a)
    for (int s : {1, -1}) {
      std::array<int, 3> d{0, 0, 0};
      d[a] = s;
      dirs.push_back(d);
    }
  if (diagonals && dim > 1) {
    for (int mask = 0; mask < (1 << dim); ++mask) {
      std::array<int, 3> d{0, 0, 0};
      for (int a = 0; a < dim; ++a) d[a] = (mask >> a) & 1 ? -1 : 1;
      dirs.push_back(d);
    }
  }
  return dirs;
}

double difference_norm(const SampledField& a, const SampledField& b, double p) {
  std::vector<Complex> diff(a.values.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = a.values[i] - b.values[i];
  return lp_norm(diff, a.grid, p);
}

}  // namespace

double modulus_of_continuity(const SampledField& field, double t, double p,
                             const OmegaSampling& sampling) {
  if (!(t >= 0.0)) throw Error(ErrorCode::OutOfRange, "modulus radius t must be >= 0");
  if (!(p >= 1.0) || !std::isfinite(p))
    throw Error(ErrorCode::OutOfRange, "norm exponent must satisfy 1 <= p < inf");
  if (sampling.radii < 1) throw Error(ErrorCode::InvalidArgument, "need at least one radius");
  if (t == 0.0) return 0.0;
  const auto& g = field.grid;
  const auto dirs = sign_directions(g.dim(), sampling.diagonals);
  double best = 0.0;

  if (sampling.mode == OmegaSampling::Mode::Lattice) {
    for (const auto& d : dirs) {
      int nonzero = 0;
      for (int a = 0; a < g.dim(); ++a) nonzero += d[a] != 0;
      const double step_len = g.spacing() * std::sqrt(static_cast<double>(nonzero));
      const auto kmax = static_cast<std::int64_t>(std::floor(t / step_len * (1.0 + 1e-12)));
      std::vector<std::int64_t> ks;
      if (sampling.exhaustive) {
        for (std::int64_t k = 1; k <= kmax; ++k) ks.push_back(k);
      } else {
        for (int j = 1; j <= sampling.radii; ++j) {
          const auto k = kmax * j / sampling.radii;
          if (k >= 1 && (ks.empty() || ks.back() != k)) ks.push_back(k);
        }
      }
      for (std::int64_t k : ks) {
        std::array<std::int64_t, 3> steps{0, 0, 0};
        for (int a = 0; a < g.dim(); ++a) steps[a] = k * d[a];
        if (static_cast<double>(k) * step_len >= 0.5 * g.length()) break;
        best = std::max(best, difference_norm(lattice_shift(field, steps), field, p));
      }
    }
    return best;
  }

  if (!(t < 0.5 * g.length()))
    throw Error(ErrorCode::OutOfRange, "modulus radius must be shorter than L/2");
  const SpectralField spectrum = forward(field);
  for (const auto& d : dirs) {
    int nonzero = 0;
    for (int a = 0; a < g.dim(); ++a) nonzero += d[a] != 0;
    const double norm = std::sqrt(static_cast<double>(nonzero));
    for (int k = 1; k <= sampling.radii; ++k) {
      const double r = t * static_cast<double>(k) / sampling.radii;
      std::array<double, 3> off{0.0, 0.0, 0.0};
      for (int a = 0; a < g.dim(); ++a) off[a] = r * d[a] / norm;
      best = std::max(best, difference_norm(shift(spectrum, off), field, p));
    }
  }
  return best;
}

SampledField random_band_limited(const GridSpec& grid, std::uint64_t seed, double cutoff) {
  if (!(cutoff >= 0.0) || !(cutoff < grid.nyquist()))
    throw Error(ErrorCode::OutOfRange, "cutoff must satisfy 0 <= cutoff < pi/h");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField spec{grid, std::vector<Complex>(grid.size())};
  // Draw in flat order, then symmetrize: c(-k) = conj(c(k)).
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    if (grid.frequency_norm(i) <= cutoff) spec.coefficients[i] = Complex(re, im);
  }
  const auto n = grid.n();
  std::vector<Complex> sym(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto idx = grid.unflatten(i);
    std::array<std::size_t, 3> neg{0, 0, 0};
    for (int a = 0; a < grid.dim(); ++a) neg[a] = (n - idx[a]) % n;
    const auto j = grid.flatten(neg);
    sym[i] = 0.5 * (spec.coefficients[i] + std::conj(spec.coefficients[j]));
  }
  // Modes with k = -k on the torus (zero and Nyquist) became real above;
  // Nyquist modes lie beyond any admissible cutoff anyway.
  spec.coefficients = std::move(sym);
  // Normalize to unit L^2 norm.
  const double norm = l2_norm(spec);
  if (norm > 0.0)
    for (auto& c : spec.coefficients) c /= norm;
  SampledField out = inverse(spec);
  for (auto& v : out.values) v = Complex(v.real(), 0.0);
  return out;
}

}  // namespace brq
