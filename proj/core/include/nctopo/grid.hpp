#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace nctopo {

using Coord = std::array<int, 3>;
using Point = std::array<double, 3>;

/// Site layout of a finite box. Linear site index runs axis 0 fastest; the full Hilbert
/// space index is site * dofs + dof.
struct Grid {
  int dim = 1;
  Coord extent{1, 1, 1};
  double spacing = 1.0;
  int dofs = 1;
  std::array<bool, 3> periodic{false, false, false};

  std::size_t sites() const;
  std::size_t size() const { return sites() * std::size_t(dofs); }
  double length(int axis) const { return extent[axis] * spacing; }
  double cell_volume() const;

  Coord coords(std::size_t site) const;
  std::size_t site_index(const Coord& c) const;
  /// Neighbor along `axis` by `step` sites; returns false across an open boundary.
  bool neighbor(std::size_t site, int axis, int step, std::size_t& out) const;

  /// Coordinate relative to the box center.
  double position(std::size_t site, int axis) const;
  /// x_axis(a) - x_axis(b). Periodic axes use the minimum image; an exact half-box
  /// separation is ambiguous and maps to 0 so the displacement stays antisymmetric.
  double displacement(std::size_t a, std::size_t b, int axis) const;
  double distance(std::size_t a, std::size_t b) const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

}  // namespace nctopo
