#pragma once

#include <cmath>
#include <random>

#include "slpants/geometry.hpp"

// Shared fixtures. The monopole triangle is the primary domain: unit-distance
// vertices, centroid at the origin.
inline slpants::Polygon monopole_triangle() {
    const double s = std::sqrt(3.0) / 2.0;
    return slpants::Polygon({{1.0, 0.0}, {-0.5, s}, {-0.5, -s}});
}

inline slpants::Polygon unit_square() {
    return slpants::Polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
}

inline slpants::Vec2 random_point_in(const slpants::Polygon& poly, std::mt19937& rng,
                                     double margin = 0.05) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double d = poly.diameter();
    for (;;) {
        const slpants::Vec2 p = poly.centroid() + slpants::Vec2(u(rng), u(rng)) * d;
        if (poly.contains(p, margin * d)) return p;
    }
}
