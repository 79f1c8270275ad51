#pragma once

#include <cstddef>
#include <stdexcept>

#include "spectral.hpp"

namespace tme {

// Uniform cell-centered grid on an interval or rectangle.
struct Grid {
  SpatialDomain domain;
  int nx = 0;
  int ny = 1;  // 1 in one dimension
  double dx = 0.0;
  double dy = 0.0;

  size_t cells() const { return static_cast<size_t>(nx) * static_cast<size_t>(ny); }
  double x(int i) const { return (static_cast<double>(i) + 0.5) * dx; }
  double y(int j) const { return (static_cast<double>(j) + 0.5) * dy; }
  size_t idx(int i, int j) const {
    return static_cast<size_t>(j) * static_cast<size_t>(nx) + static_cast<size_t>(i);
  }

  static Grid make(const SpatialDomain& domain, int nx, int ny = 1) {
    domain.validate();
    if (nx < 8 || (domain.dimension == 2 && ny < 8)) {
      throw std::domain_error("Grid: need at least 8 cells per axis");
    }
    Grid g;
    g.domain = domain;
    g.nx = nx;
    g.ny = domain.dimension == 2 ? ny : 1;
    g.dx = domain.Lx / nx;
    g.dy = domain.dimension == 2 ? domain.Ly / ny : 0.0;
    return g;
  }
};

}  // namespace tme
