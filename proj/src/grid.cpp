#include "stefan/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace stefan {

Grid1D::Grid1D(std::size_t n_cells, double length)
    : n_cells_(n_cells), length_(length), spacing_(0.0) {
  if (n_cells == 0) throw std::invalid_argument("Grid1D: n_cells must be positive");
  if (!(length > 0.0) || !std::isfinite(length))
    throw std::invalid_argument("Grid1D: length must be positive and finite");
  spacing_ = length / static_cast<double>(n_cells);
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> x(node_count());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = node(j);
  return x;
}

TemperatureField::TemperatureField(Grid1D grid, std::vector<double> values, double time)
    : grid_(grid), values_(std::move(values)), time_(time) {
  if (values_.size() != grid_.node_count())
    throw std::invalid_argument("TemperatureField: expected " +
                                std::to_string(grid_.node_count()) + " values, got " +
                                std::to_string(values_.size()));
  for (std::size_t j = 0; j < values_.size(); ++j)
    if (!std::isfinite(values_[j]))
      throw std::invalid_argument("TemperatureField: non-finite value at node " +
                                  std::to_string(j));
}

TemperatureField TemperatureField::uniform(const Grid1D& grid, double value, double time) {
  return TemperatureField(grid, std::vector<double>(grid.node_count(), value), time);
}

double TemperatureField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double TemperatureField::min() const { return *std::min_element(values_.begin(), values_.end()); }

}  // namespace stefan
