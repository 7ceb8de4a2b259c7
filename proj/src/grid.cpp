#include "gencahn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gencahn/error.hpp"

namespace gencahn {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonZeroMeanInput: return "NonZeroMeanInput";
    case ErrorKind::QOutOfRange: return "QOutOfRange";
    case ErrorKind::ZeroInput: return "ZeroInput";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NonPositiveM: return "NonPositiveM";
    case ErrorKind::NonPositiveMu: return "NonPositiveMu";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::SigmaOutOfRange: return "SigmaOutOfRange";
    case ErrorKind::EmptyRange: return "EmptyRange";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::DomainEscape: return "DomainEscape";
    case ErrorKind::MeanOutOfDomain: return "MeanOutOfDomain";
    case ErrorKind::IntervalOutOfRange: return "IntervalOutOfRange";
    case ErrorKind::DegenerateInitialGap: return "DegenerateInitialGap";
    case ErrorKind::NoConvergenceWithinBudget: return "NoConvergenceWithinBudget";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::shared_ptr<const CosineBasis> make_basis(std::size_t n, double h) {
  auto basis = std::make_shared<CosineBasis>();
  basis->n = n;
  basis->matrix.resize(n * n);
  basis->eigenvalues.resize(n);
  const double nd = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
    for (std::size_t j = 0; j < n; ++j) {
      // Reduce the argument exactly in integers before calling cos.
      const std::size_t phase = (k * (2 * j + 1)) % (4 * n);
      basis->matrix[k * n + j] =
          scale * std::cos(std::numbers::pi * static_cast<double>(phase) / (2.0 * nd));
    }
    basis->eigenvalues[k] =
        (2.0 / (h * h)) * (1.0 - std::cos(std::numbers::pi * static_cast<double>(k) / nd));
  }
  basis->eigenvalues[0] = 0.0;
  return basis;
}

}  // namespace

std::shared_ptr<const Grid> Grid::make(std::span<const std::size_t> cells,
                                       std::span<const double> lengths) {
  if (cells.size() != lengths.size() || cells.empty() || cells.size() > 2) {
    throw Error(ErrorKind::InvalidArgument, "grid must be 1D or 2D with one length per axis");
  }
  std::shared_ptr<Grid> grid(new Grid());
  grid->dim_ = cells.size();
  grid->size_ = 1;
  grid->volume_ = 1.0;
  grid->cell_volume_ = 1.0;
  for (std::size_t a = 0; a < grid->dim_; ++a) {
    if (cells[a] == 0) throw Error(ErrorKind::InvalidArgument, "cells per axis must be positive");
    if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) {
      throw Error(ErrorKind::InvalidArgument, "lengths must be positive and finite");
    }
    grid->cells_[a] = cells[a];
    grid->lengths_[a] = lengths[a];
    grid->spacing_[a] = lengths[a] / static_cast<double>(cells[a]);
    grid->size_ *= cells[a];
    grid->volume_ *= lengths[a];
    grid->cell_volume_ *= grid->spacing_[a];
  }
  for (std::size_t a = 0; a < grid->dim_; ++a) {
    // Share the basis between identical axes.
    if (a == 1 && cells[1] == cells[0] && lengths[1] == lengths[0]) {
      grid->bases_[1] = grid->bases_[0];
    } else {
      grid->bases_[a] = make_basis(cells[a], grid->spacing_[a]);
    }
  }
  return grid;
}

std::shared_ptr<const Grid> Grid::make_1d(std::size_t cells, double length) {
  const std::array<std::size_t, 1> c{cells};
  const std::array<double, 1> l{length};
  return make(c, l);
}

std::shared_ptr<const Grid> Grid::make_2d(std::size_t nx, std::size_t ny, double lx, double ly) {
  const std::array<std::size_t, 2> c{nx, ny};
  const std::array<double, 2> l{lx, ly};
  return make(c, l);
}

bool Grid::same_shape(const Grid& other) const {
  if (dim_ != other.dim_) return false;
  for (std::size_t a = 0; a < dim_; ++a) {
    if (cells_[a] != other.cells_[a] || lengths_[a] != other.lengths_[a]) return false;
  }
  return true;
}

Field::Field(GridPtr grid, double fill) : grid_(std::move(grid)) {
  values_.assign(grid_->size(), fill);
}

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) {
    throw Error(ErrorKind::InvalidArgument,
                "field has " + std::to_string(values_.size()) + " values, grid has " +
                    std::to_string(grid_->size()) + " cells");
  }
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Field& Field::operator+=(const Field& rhs) {
  require_same_grid(*this, rhs);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += rhs.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& rhs) {
  require_same_grid(*this, rhs);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= rhs.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field& Field::operator+=(double c) {
  for (double& v : values_) v += c;
  return *this;
}

void require_same_grid(const Field& a, const Field& b) {
  if (a.grid_ptr() == b.grid_ptr()) return;
  if (!a.grid_ptr() || !b.grid_ptr() || !a.grid().same_shape(b.grid())) {
    throw Error(ErrorKind::GridMismatch, "fields live on different grids");
  }
}

}  // namespace gencahn
