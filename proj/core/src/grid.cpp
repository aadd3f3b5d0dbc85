#include "nctopo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace nctopo {

std::size_t Grid::sites() const {
  std::size_t s = 1;
  for (int k = 0; k < dim; ++k) s *= std::size_t(extent[k]);
  return s;
}

double Grid::cell_volume() const { return std::pow(spacing, dim); }

Coord Grid::coords(std::size_t site) const {
  Coord c{0, 0, 0};
  for (int k = 0; k < dim; ++k) {
    c[k] = int(site % std::size_t(extent[k]));
    site /= std::size_t(extent[k]);
  }
  return c;
}

std::size_t Grid::site_index(const Coord& c) const {
  std::size_t s = 0;
  for (int k = dim - 1; k >= 0; --k) s = s * std::size_t(extent[k]) + std::size_t(c[k]);
  return s;
}

bool Grid::neighbor(std::size_t site, int axis, int step, std::size_t& out) const {
  Coord c = coords(site);
  int v = c[axis] + step;
  const int n = extent[axis];
  if (v < 0 || v >= n) {
    if (!periodic[axis]) return false;
    v = ((v % n) + n) % n;
  }
  c[axis] = v;
  out = site_index(c);
  return true;
}

double Grid::position(std::size_t site, int axis) const {
  const Coord c = coords(site);
  return (c[axis] - 0.5 * (extent[axis] - 1)) * spacing;
}

double Grid::displacement(std::size_t a, std::size_t b, int axis) const {
  const Coord ca = coords(a), cb = coords(b);
  int diff = ca[axis] - cb[axis];
  if (periodic[axis]) {
    const int n = extent[axis];
    diff = ((diff % n) + n) % n;
    if (2 * diff == n)
      diff = 0;
    else if (2 * diff > n)
      diff -= n;
  }
  return diff * spacing;
}

double Grid::distance(std::size_t a, std::size_t b) const {
  double s = 0.0;
  const Coord ca = coords(a), cb = coords(b);
  for (int k = 0; k < dim; ++k) {
    int diff = std::abs(ca[k] - cb[k]);
    if (periodic[k]) diff = std::min(diff, extent[k] - diff);
    const double d = diff * spacing;
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace nctopo
