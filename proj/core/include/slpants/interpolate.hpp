#pragma once

#include <optional>

#include "slpants/grid.hpp"

namespace slpants {

// Bilinear interpolation over a full lattice cell of interior nodes; exact
// node hits short-circuit. Empty when the cell is incomplete.
std::optional<double> bilinear_value(const Grid& grid, const Field& f, const Vec2& point);
std::optional<Vec2> bilinear_vector(const Grid& grid, const std::vector<Vec2>& f, const Vec2& point);

} // namespace slpants
