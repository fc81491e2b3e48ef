#include "slpants/interpolate.hpp"

#include <cmath>

namespace slpants {

namespace {

struct Cell {
    int k00, k10, k01, k11;
    double fx, fy;
    bool exact;     // point coincides with node k00
};

std::optional<Cell> locate(const Grid& g, const Vec2& point) {
    const Vec2 q = g.lattice_coords(point);
    const double xi = std::floor(q.x()), yj = std::floor(q.y());
    int i = static_cast<int>(xi), j = static_cast<int>(yj);
    double fx = q.x() - xi, fy = q.y() - yj;
    // snap to the nearest lattice point when the offset is rounding noise
    if (fx > 1.0 - 1e-12) { ++i; fx = 0.0; }
    if (fy > 1.0 - 1e-12) { ++j; fy = 0.0; }
    if (fx < 1e-12) fx = 0.0;
    if (fy < 1e-12) fy = 0.0;

    Cell c{};
    c.fx = fx; c.fy = fy;
    c.k00 = g.find_node(i, j);
    if (fx == 0.0 && fy == 0.0) {
        if (c.k00 < 0) return std::nullopt;
        c.exact = true;
        return c;
    }
    c.exact = false;
    c.k10 = g.find_node(i + 1, j);
    c.k01 = g.find_node(i, j + 1);
    c.k11 = g.find_node(i + 1, j + 1);
    if (c.k00 < 0 || c.k10 < 0 || c.k01 < 0 || c.k11 < 0) return std::nullopt;
    return c;
}

} // namespace

std::optional<double> bilinear_value(const Grid& g, const Field& f, const Vec2& point) {
    const auto c = locate(g, point);
    if (!c) return std::nullopt;
    if (c->exact) return f[c->k00];
    const double a = (1.0 - c->fx) * (1.0 - c->fy), b = c->fx * (1.0 - c->fy);
    const double d = (1.0 - c->fx) * c->fy, e = c->fx * c->fy;
    return a * f[c->k00] + b * f[c->k10] + d * f[c->k01] + e * f[c->k11];
}

std::optional<Vec2> bilinear_vector(const Grid& g, const std::vector<Vec2>& f, const Vec2& point) {
    const auto c = locate(g, point);
    if (!c) return std::nullopt;
    if (c->exact) return f[static_cast<size_t>(c->k00)];
    const double a = (1.0 - c->fx) * (1.0 - c->fy), b = c->fx * (1.0 - c->fy);
    const double d = (1.0 - c->fx) * c->fy, e = c->fx * c->fy;
    return a * f[static_cast<size_t>(c->k00)] + b * f[static_cast<size_t>(c->k10)] +
           d * f[static_cast<size_t>(c->k01)] + e * f[static_cast<size_t>(c->k11)];
}

} // namespace slpants
