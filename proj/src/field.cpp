#include "pdefix/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "pdefix/errors.hpp"

namespace pdefix {

MultiIndex::MultiIndex(std::vector<int> e) : exponents(std::move(e)) {
  for (int v : exponents) {
    if (v < 0) throw Error(ErrorCode::InvalidArgument, "multi-index entries must be non-negative");
  }
}

int MultiIndex::order() const noexcept {
  return std::accumulate(exponents.begin(), exponents.end(), 0);
}

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "multi-index arity differs");
  std::vector<int> e(a.size());
  for (std::size_t j = 0; j < e.size(); ++j) e[j] = a.exponents[j] + b.exponents[j];
  return MultiIndex(std::move(e));
}

WaveVector WaveVector::from_kappa(std::vector<double> kappa) {
  WaveVector w;
  w.modes.assign(kappa.size(), 0);
  w.nyquist.assign(kappa.size(), 0);
  w.kappa = std::move(kappa);
  return w;
}

double WaveVector::derivative_kappa(int axis) const noexcept {
  return nyquist[axis] ? 0.0 : kappa[axis];
}

Complex fourier_symbol(const MultiIndex& alpha, const WaveVector& kappa) {
  if (alpha.size() != kappa.size()) {
    throw Error(ErrorCode::DimensionMismatch, "multi-index has " + std::to_string(alpha.size()) +
                                                  " entries, wave vector has " +
                                                  std::to_string(kappa.size()));
  }
  Complex result(1.0, 0.0);
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    const int p = alpha.exponents[j];
    if (p == 0) continue;
    if (kappa.nyquist[j] && (p % 2 == 1)) return Complex(0.0, 0.0);
    // (i k)^p = k^p * i^p, with i^p cycling through 1, i, -1, -i.
    const double mag = std::pow(kappa.kappa[j], p);
    switch (p % 4) {
      case 0: result *= Complex(mag, 0.0); break;
      case 1: result *= Complex(0.0, mag); break;
      case 2: result *= Complex(-mag, 0.0); break;
      default: result *= Complex(0.0, -mag); break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Grid

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid::Grid(std::vector<int> points, std::vector<double> lengths)
    : points_(std::move(points)), lengths_(std::move(lengths)) {
  if (points_.empty() || points_.size() > static_cast<std::size_t>(kMaxDim)) {
    throw Error(ErrorCode::InvalidArgument, "grid dimension must be 1, 2 or 3");
  }
  if (points_.size() != lengths_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "grid has " + std::to_string(points_.size()) +
                                                  " axes but domain has " +
                                                  std::to_string(lengths_.size()));
  }
  size_ = 1;
  for (std::size_t j = 0; j < points_.size(); ++j) {
    const int g = points_[j];
    if (!is_power_of_two(g) || g < kMinGridPoints || g > kMaxGridPoints) {
      throw Error(ErrorCode::InvalidArgument,
                  "grid size " + std::to_string(g) + " is not a power of two in [8, 256]");
    }
    if (!std::isfinite(lengths_[j]) || lengths_[j] <= 0.0) {
      throw Error(ErrorCode::InvalidArgument, "domain lengths must be finite and positive");
    }
    size_ *= static_cast<std::size_t>(g);
  }
}

double Grid::cell_volume() const noexcept {
  double v = 1.0;
  for (int j = 0; j < dim(); ++j) v *= lengths_[j] / points_[j];
  return v;
}

double Grid::volume() const noexcept {
  double v = 1.0;
  for (double l : lengths_) v *= l;
  return v;
}

std::array<int, kMaxDim> Grid::unflatten(std::size_t flat) const noexcept {
  std::array<int, kMaxDim> idx{0, 0, 0};
  for (int j = dim() - 1; j >= 0; --j) {
    idx[j] = static_cast<int>(flat % points_[j]);
    flat /= points_[j];
  }
  return idx;
}

std::size_t Grid::flatten(const std::array<int, kMaxDim>& idx) const noexcept {
  std::size_t flat = 0;
  for (int j = 0; j < dim(); ++j) flat = flat * points_[j] + idx[j];
  return flat;
}

int Grid::mode(int axis, int index) const noexcept {
  const int g = points_[axis];
  return index <= g / 2 ? index : index - g;
}

WaveVector Grid::wave_vector(std::size_t flat) const {
  const auto idx = unflatten(flat);
  WaveVector w;
  w.modes.resize(dim());
  w.kappa.resize(dim());
  w.nyquist.resize(dim());
  for (int j = 0; j < dim(); ++j) {
    w.modes[j] = mode(j, idx[j]);
    w.kappa[j] = 2.0 * std::numbers::pi * w.modes[j] / lengths_[j];
    w.nyquist[j] = (2 * idx[j] == points_[j]) ? 1 : 0;
  }
  return w;
}

std::size_t Grid::conjugate_index(std::size_t flat) const noexcept {
  auto idx = unflatten(flat);
  for (int j = 0; j < dim(); ++j) idx[j] = (points_[j] - idx[j]) % points_[j];
  return flatten(idx);
}

bool Grid::retained_by_dealiasing(std::size_t flat) const noexcept {
  const auto idx = unflatten(flat);
  for (int j = 0; j < dim(); ++j) {
    if (3 * std::abs(mode(j, idx[j])) > points_[j]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Transforms

namespace {

// Unnormalized complex DFT along every axis, in place. sign < 0 is forward.
void transform_axes(const Grid& grid, std::vector<Complex>& data, bool forward) {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<Complex> line, out;
  const std::size_t total = grid.size();
  std::size_t stride = 1;
  for (int axis = grid.dim() - 1; axis >= 0; --axis) {
    const std::size_t g = static_cast<std::size_t>(grid.points(axis));
    line.resize(g);
    const std::size_t block = stride * g;
    for (std::size_t base = 0; base < total; base += block) {
      for (std::size_t offset = 0; offset < stride; ++offset) {
        const std::size_t start = base + offset;
        for (std::size_t i = 0; i < g; ++i) line[i] = data[start + i * stride];
        if (forward) {
          fft.fwd(out, line);
        } else {
          fft.inv(out, line);
        }
        for (std::size_t i = 0; i < g; ++i) data[start + i * stride] = out[i];
      }
    }
    stride = block;
  }
}

}  // namespace

std::vector<Complex> forward_transform(const Grid& grid, std::span<const Complex> values) {
  if (values.size() != grid.size()) {
    throw Error(ErrorCode::ShapeMismatch, "transform input size does not match grid");
  }
  std::vector<Complex> data(values.begin(), values.end());
  transform_axes(grid, data, true);
  const double inv_n = 1.0 / static_cast<double>(grid.size());
  for (auto& c : data) c *= inv_n;
  return data;
}

std::vector<Complex> forward_transform(const Grid& grid, std::span<const double> values) {
  std::vector<Complex> data(values.begin(), values.end());
  return forward_transform(grid, std::span<const Complex>(data));
}

std::vector<double> inverse_transform(const Grid& grid, std::span<const Complex> coeffs) {
  if (coeffs.size() != grid.size()) {
    throw Error(ErrorCode::ShapeMismatch, "transform input size does not match grid");
  }
  std::vector<Complex> data(coeffs.begin(), coeffs.end());
  transform_axes(grid, data, false);
  std::vector<double> out(data.size());
  std::transform(data.begin(), data.end(), out.begin(), [](const Complex& c) { return c.real(); });
  return out;
}

// ---------------------------------------------------------------------------
// SpectralField

namespace {

void check_components(int components) {
  if (components < 1 || components > kMaxComponents) {
    throw Error(ErrorCode::InvalidArgument, "component count must be in [1, 4]");
  }
}

}  // namespace

SpectralField SpectralField::zeros(const Grid& grid, int components) {
  check_components(components);
  SpectralField f;
  f.grid_ = grid;
  f.components_ = components;
  f.physical_.assign(grid.size() * components, 0.0);
  f.spectral_.assign(grid.size() * components, Complex(0.0, 0.0));
  return f;
}

SpectralField SpectralField::from_physical(const Grid& grid, int components,
                                           std::vector<double> values) {
  check_components(components);
  const std::size_t n = grid.size();
  if (values.size() != n * components) {
    throw Error(ErrorCode::ShapeMismatch, "physical data size does not match grid");
  }
  SpectralField f;
  f.grid_ = grid;
  f.components_ = components;
  f.physical_ = std::move(values);
  f.spectral_.resize(n * components);
  for (int c = 0; c < components; ++c) {
    auto coeffs = forward_transform(grid, std::span<const double>(f.physical_).subspan(c * n, n));
    std::copy(coeffs.begin(), coeffs.end(), f.spectral_.begin() + c * n);
  }
  return f;
}

SpectralField SpectralField::from_spectral(const Grid& grid, int components,
                                           std::span<const Complex> coeffs) {
  check_components(components);
  const std::size_t n = grid.size();
  if (coeffs.size() != n * components) {
    throw Error(ErrorCode::ShapeMismatch, "spectral data size does not match grid");
  }
  std::vector<double> values(n * components);
  for (int c = 0; c < components; ++c) {
    auto v = inverse_transform(grid, coeffs.subspan(c * n, n));
    std::copy(v.begin(), v.end(), values.begin() + c * n);
  }
  // Re-deriving the spectral view drops any anti-Hermitian round-off.
  return from_physical(grid, components, std::move(values));
}

SpectralField SpectralField::sample(const Grid& grid, int components,
                                    const std::function<double(int, std::span<const double>)>& fn) {
  check_components(components);
  const std::size_t n = grid.size();
  std::vector<double> values(n * components);
  std::array<double, kMaxDim> x{};
  for (std::size_t p = 0; p < n; ++p) {
    const auto idx = grid.unflatten(p);
    for (int j = 0; j < grid.dim(); ++j) x[j] = grid.coordinate(j, idx[j]);
    for (int c = 0; c < components; ++c) {
      values[c * n + p] = fn(c, std::span<const double>(x.data(), grid.dim()));
    }
  }
  return from_physical(grid, components, std::move(values));
}

std::span<const double> SpectralField::physical(int component) const {
  if (component < 0 || component >= components_) {
    throw Error(ErrorCode::ComponentOutOfRange, std::to_string(component));
  }
  return std::span<const double>(physical_).subspan(component * points(), points());
}

std::span<const Complex> SpectralField::spectral(int component) const {
  if (component < 0 || component >= components_) {
    throw Error(ErrorCode::ComponentOutOfRange, std::to_string(component));
  }
  return std::span<const Complex>(spectral_).subspan(component * points(), points());
}

bool SpectralField::same_shape(const SpectralField& other) const noexcept {
  return components_ == other.components_ && grid_.point_counts() == other.grid_.point_counts() &&
         grid_.lengths() == other.grid_.lengths();
}

SpectralField to_spectral(const SpectralField& field) {
  return SpectralField::from_physical(field.grid(), field.components(),
                                      {field.physical().begin(), field.physical().end()});
}

SpectralField to_physical(const SpectralField& field) {
  return SpectralField::from_spectral(field.grid(), field.components(), field.spectral());
}

double norm(const SpectralField& field, NormKind kind) {
  const auto v = field.physical();
  if (kind == NormKind::Linf) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(field.grid().cell_volume() * s);
}

double spectral_l2_norm(const SpectralField& field) {
  double s = 0.0;
  for (const auto& c : field.spectral()) s += std::norm(c);
  return std::sqrt(field.grid().volume() * s);
}

SpectralField axpby(double a, const SpectralField& u, double b, const SpectralField& v) {
  if (!u.same_shape(v)) throw Error(ErrorCode::ShapeMismatch, "fields differ in shape");
  const auto pu = u.physical();
  const auto pv = v.physical();
  std::vector<double> out(pu.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * pu[i] + b * pv[i];
  return SpectralField::from_physical(u.grid(), u.components(), std::move(out));
}

SpectralField operator-(const SpectralField& u, const SpectralField& v) { return axpby(1.0, u, -1.0, v); }
SpectralField operator+(const SpectralField& u, const SpectralField& v) { return axpby(1.0, u, 1.0, v); }

SpectralField scaled(double a, const SpectralField& u) {
  std::vector<double> out(u.physical().begin(), u.physical().end());
  for (double& x : out) x *= a;
  return SpectralField::from_physical(u.grid(), u.components(), std::move(out));
}

SpectralField extract_component(const SpectralField& field, int component) {
  const auto p = field.physical(component);
  return SpectralField::from_physical(field.grid(), 1, {p.begin(), p.end()});
}

SpectralField stack_components(std::span<const SpectralField> parts) {
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to stack");
  const Grid& grid = parts.front().grid();
  std::vector<double> values;
  int components = 0;
  for (const auto& part : parts) {
    if (!(part.grid() == grid)) throw Error(ErrorCode::ShapeMismatch, "stacked fields differ in grid");
    values.insert(values.end(), part.physical().begin(), part.physical().end());
    components += part.components();
  }
  return SpectralField::from_physical(grid, components, std::move(values));
}

bool all_finite(const SpectralField& field) noexcept {
  return std::all_of(field.physical().begin(), field.physical().end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace pdefix
