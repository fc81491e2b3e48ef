#pragma once

#include <string>

#include "slpants/reconstruction.hpp"

namespace slpants {

// Topological data of the quotient surface: genus g, circle boundary
// components b of the associated 3-manifold, and end count n (>= 3), plus
// the measured invariants they came from.
struct QuotientTopology {
    int g = 0;
    int b = 0;
    int n = 3;
    int chi = 1;                // Euler characteristic V - E + F
    int boundary_cycles = 1;
};

// Homeomorphism type of the total space with the ends removed.
struct Classification {
    std::string descriptor;     // "S³ minus n points" or "#ₖ(S²×S¹) minus n points"
    int connected_sum = 0;      // k = 2g + b
    int raymond_count = 0;      // 2g + h - 1 with h = 1 + b; equals k
};

// Throws InvalidTopology when g < 0, b < 0, or n < 3.
Classification classify_total_space(const QuotientTopology& t);

// Euler characteristic and boundary-cycle count of the triangulated surface;
// g = (2 - chi - cycles) / 2 and b = cycles - 1 (a graph over the polygon
// interior has one outer cycle and genus 0). Throws NonManifoldMesh when an
// edge carries more than two triangles, a boundary vertex is not on exactly
// one boundary path, or a vertex link is disconnected; EmptyMesh without
// triangles.
QuotientTopology measure_quotient(const GraphMesh& mesh, int n_ends);

} // namespace slpants
