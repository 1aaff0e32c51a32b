#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pdefix {

using Complex = std::complex<double>;

inline constexpr int kMaxDim = 3;
inline constexpr int kMaxComponents = 4;
inline constexpr int kMinGridPoints = 8;
inline constexpr int kMaxGridPoints = 256;

/// Derivative exponents, one per spatial axis. D^alpha = D_1^a1 ... D_d^ad.
struct MultiIndex {
  std::vector<int> exponents;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> e);

  std::size_t size() const noexcept { return exponents.size(); }
  int order() const noexcept;
  bool is_zero() const noexcept { return order() == 0; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b);

/// Per-axis mode numbers with their radian wavenumbers. An axis flagged
/// `nyquist` holds the unpaired g/2 mode: odd derivatives vanish there.
struct WaveVector {
  std::vector<int> modes;
  std::vector<double> kappa;
  std::vector<unsigned char> nyquist;

  /// Wave vector given directly by wavenumbers (no grid, no Nyquist axes).
  static WaveVector from_kappa(std::vector<double> kappa);

  std::size_t size() const noexcept { return kappa.size(); }
  /// Wavenumber seen by a first derivative (zero on Nyquist axes).
  double derivative_kappa(int axis) const noexcept;
};

/// Symbol of D^alpha at kappa: prod_j (i kappa_j)^alpha_j.
/// Throws DimensionMismatch when the lengths differ.
Complex fourier_symbol(const MultiIndex& alpha, const WaveVector& kappa);

/// Uniform periodic grid on the torus [0,L_1) x ... x [0,L_d). Flat indices
/// are row-major: the last axis varies fastest. Spectral coefficients share
/// the same layout, with index i on an axis holding mode i for i <= g/2 and
/// i - g above.
class Grid {
 public:
  Grid() = default;
  /// Throws InvalidArgument unless 1 <= dim <= 3, every count is a power of
  /// two in [8, 256] and every length is finite and positive.
  Grid(std::vector<int> points, std::vector<double> lengths);

  int dim() const noexcept { return static_cast<int>(points_.size()); }
  int points(int axis) const { return points_.at(axis); }
  double length(int axis) const { return lengths_.at(axis); }
  double spacing(int axis) const { return lengths_.at(axis) / points_.at(axis); }
  const std::vector<int>& point_counts() const noexcept { return points_; }
  const std::vector<double>& lengths() const noexcept { return lengths_; }

  std::size_t size() const noexcept { return size_; }
  double cell_volume() const noexcept;
  double volume() const noexcept;

  std::array<int, kMaxDim> unflatten(std::size_t flat) const noexcept;
  std::size_t flatten(const std::array<int, kMaxDim>& idx) const noexcept;
  double coordinate(int axis, int index) const { return spacing(axis) * index; }

  int mode(int axis, int index) const noexcept;
  WaveVector wave_vector(std::size_t flat) const;
  /// Flat index of the mode -kappa.
  std::size_t conjugate_index(std::size_t flat) const noexcept;
  /// False for modes removed by the 2/3 rule (3|m_j| > g_j on any axis).
  bool retained_by_dealiasing(std::size_t flat) const noexcept;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::vector<int> points_;
  std::vector<double> lengths_;
  std::size_t size_ = 0;
};

/// Forward DFT normalized by the point count (mode 0 equals the mean).
std::vector<Complex> forward_transform(const Grid& grid, std::span<const double> values);
std::vector<Complex> forward_transform(const Grid& grid, std::span<const Complex> values);
/// Inverse of forward_transform; the real part is returned.
std::vector<double> inverse_transform(const Grid& grid, std::span<const Complex> coeffs);

/// N-component field with physical and spectral views kept in agreement.
/// Immutable after construction.
class SpectralField {
 public:
  SpectralField() = default;

  static SpectralField zeros(const Grid& grid, int components);
  /// Values laid out component-major: values[c * grid.size() + point].
  static SpectralField from_physical(const Grid& grid, int components, std::vector<double> values);
  static SpectralField from_spectral(const Grid& grid, int components,
                                     std::span<const Complex> coeffs);
  /// Samples fn(component, x) at every grid point.
  static SpectralField sample(const Grid& grid, int components,
                              const std::function<double(int, std::span<const double>)>& fn);

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  int dim() const noexcept { return grid_.dim(); }
  std::size_t points() const noexcept { return grid_.size(); }

  std::span<const double> physical() const noexcept { return physical_; }
  std::span<const double> physical(int component) const;
  std::span<const Complex> spectral() const noexcept { return spectral_; }
  std::span<const Complex> spectral(int component) const;

  bool same_shape(const SpectralField& other) const noexcept;

 private:
  Grid grid_;
  int components_ = 0;
  std::vector<double> physical_;
  std::vector<Complex> spectral_;
};

/// Recompute the spectral view from the physical one, and vice versa.
SpectralField to_spectral(const SpectralField& field);
SpectralField to_physical(const SpectralField& field);

enum class NormKind { L2, Linf };

/// L2: sqrt(cell volume * sum of squares over points and components).
/// Linf: largest absolute physical value.
double norm(const SpectralField& field, NormKind kind);
/// L2 norm from spectral coefficients: sqrt(volume * sum |c|^2).
double spectral_l2_norm(const SpectralField& field);

/// a*u + b*v in physical space. Throws ShapeMismatch.
SpectralField axpby(double a, const SpectralField& u, double b, const SpectralField& v);
SpectralField operator-(const SpectralField& u, const SpectralField& v);
SpectralField operator+(const SpectralField& u, const SpectralField& v);
SpectralField scaled(double a, const SpectralField& u);

SpectralField extract_component(const SpectralField& field, int component);
/// Concatenate single- or multi-component fields on the same grid.
SpectralField stack_components(std::span<const SpectralField> parts);

bool all_finite(const SpectralField& field) noexcept;

}  // namespace pdefix
