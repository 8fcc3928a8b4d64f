#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stefan {

/// Uniform partition of [0, length] into n_cells cells (n_cells + 1 nodes).
/// Used for space (x or r) as well as for time levels.
class Grid1D {
 public:
  Grid1D(std::size_t n_cells, double length);

  std::size_t n_cells() const { return n_cells_; }
  std::size_t node_count() const { return n_cells_ + 1; }
  double length() const { return length_; }
  double spacing() const { return spacing_; }

  /// Coordinate of node j, j * spacing.
  double node(std::size_t j) const { return static_cast<double>(j) * spacing_; }
  std::vector<double> nodes() const;

  bool operator==(const Grid1D&) const = default;

 private:
  std::size_t n_cells_;
  double length_;
  double spacing_;
};

/// Grid-sampled dimensionless temperature at one time level.
class TemperatureField {
 public:
  TemperatureField(Grid1D grid, std::vector<double> values, double time);

  /// Uniform field at the given temperature.
  static TemperatureField uniform(const Grid1D& grid, double value, double time = 0.0);

  const Grid1D& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }
  double time() const { return time_; }
  std::size_t size() const { return values_.size(); }

  double max() const;
  double min() const;

 private:
  Grid1D grid_;
  std::vector<double> values_;
  double time_;
};

}  // namespace stefan
