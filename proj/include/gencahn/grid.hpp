#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace gencahn {

/// Orthonormal DCT-II matrix for one axis together with the eigenvalues of
/// the three-point Neumann stencil in that basis.
struct CosineBasis {
  std::size_t n = 0;
  std::vector<double> matrix;       // n*n, row k holds mode k sampled at cell centres
  std::vector<double> eigenvalues;  // (2/h^2)(1 - cos(k pi / n))
};

/// Uniform cell-centred rectangle in one or two dimensions.
///
/// Axis 0 is the slowest index of the row-major value layout. The cosine bases
/// are built once at construction and never mutated, so a Grid can be shared
/// freely between threads.
class Grid {
 public:
  static std::shared_ptr<const Grid> make(std::span<const std::size_t> cells,
                                          std::span<const double> lengths);
  static std::shared_ptr<const Grid> make_1d(std::size_t cells, double length);
  static std::shared_ptr<const Grid> make_2d(std::size_t nx, std::size_t ny,
                                             double lx, double ly);

  std::size_t dim() const { return dim_; }
  std::size_t cells(std::size_t axis) const { return cells_[axis]; }
  double length(std::size_t axis) const { return lengths_[axis]; }
  double spacing(std::size_t axis) const { return spacing_[axis]; }
  std::size_t size() const { return size_; }
  double volume() const { return volume_; }
  double cell_volume() const { return cell_volume_; }

  /// Cell-centre coordinate along one axis.
  double centre(std::size_t axis, std::size_t i) const {
    return (static_cast<double>(i) + 0.5) * spacing_[axis];
  }

  const CosineBasis& basis(std::size_t axis) const { return *bases_[axis]; }

  /// Same dimension, cell counts and lengths.
  bool same_shape(const Grid& other) const;

 private:
  Grid() = default;

  std::size_t dim_ = 1;
  std::array<std::size_t, 2> cells_{1, 1};
  std::array<double, 2> lengths_{1.0, 1.0};
  std::array<double, 2> spacing_{1.0, 1.0};
  std::size_t size_ = 1;
  double volume_ = 1.0;
  double cell_volume_ = 1.0;
  std::array<std::shared_ptr<const CosineBasis>, 2> bases_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Real-valued cell data on a grid. Value semantics; the grid is shared.
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid, double fill = 0.0);
  Field(GridPtr grid, std::vector<double> values);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool all_finite() const;
  double max_abs() const;

  Field& operator+=(const Field& rhs);
  Field& operator-=(const Field& rhs);
  Field& operator*=(double s);
  Field& operator+=(double c);

  friend Field operator+(Field lhs, const Field& rhs) { return lhs += rhs; }
  friend Field operator-(Field lhs, const Field& rhs) { return lhs -= rhs; }
  friend Field operator*(double s, Field rhs) { return rhs *= s; }
  friend Field operator*(Field lhs, double s) { return lhs *= s; }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Throws GridMismatch unless both fields live on grids of the same shape.
void require_same_grid(const Field& a, const Field& b);

}  // namespace gencahn
