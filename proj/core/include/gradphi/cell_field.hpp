#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "gradphi/geometry.hpp"

namespace gradphi {

/// Piecewise-constant function on a uniform cell grid. Cell j (multi-index)
/// covers [lower + j h, lower + (j + 1) h) in every axis. Storage is
/// lexicographic with the first axis most significant.
class CellField {
 public:
  CellField() = default;
  CellField(int dim, Point lower, double spacing, std::array<int, kMaxDim> counts,
            double fill = 0.0);

  int dim() const noexcept { return dim_; }
  double spacing() const noexcept { return spacing_; }
  const Point& lower() const noexcept { return lower_; }
  const std::array<int, kMaxDim>& counts() const noexcept { return counts_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::vector<double>& values() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  std::size_t flat(const std::array<int, kMaxDim>& j) const noexcept;
  std::array<int, kMaxDim> multi(std::size_t k) const noexcept;
  Point center(std::size_t k) const noexcept;

  /// Cell containing theta; false when theta lies outside the grid.
  bool locate(const Point& theta, std::array<int, kMaxDim>& j) const noexcept;
  /// Value at theta; throws InvalidArgument outside the grid.
  double operator()(const Point& theta) const;

 private:
  int dim_ = 1;
  Point lower_{};
  double spacing_ = 1.0;
  std::array<int, kMaxDim> counts_{1, 1, 1};
  std::vector<double> values_;
};

/// Integral over D of (a - b)^2 by the midpoint rule on the common refinement
/// of the two cell grids (cells restricted to the bounding box of D). Exact
/// for piecewise constants away from the boundary of D.
double l2_distance_squared(const CellField& a, const CellField& b, const DomainSpec& domain);
/// Integral over D of a^2 on the cells of a.
double l2_norm_squared(const CellField& a, const DomainSpec& domain);

}  // namespace gradphi
