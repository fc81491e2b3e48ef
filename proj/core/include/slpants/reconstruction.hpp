#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "slpants/solver.hpp"

namespace slpants {

// The gradient graph of phi over the polygon interior: per node the projection
// u, the lift y = grad phi, the potential value, and a cell triangulation of
// the u-projection (counterclockwise, positive area).
struct GraphMesh {
    std::vector<Vec2> u;
    std::vector<Vec2> y;
    std::vector<double> phi;
    std::vector<std::array<int, 3>> triangles;
    std::vector<uint8_t> quality;   // 1 = well-shaped in the u-projection

    int node_count() const { return static_cast<int>(u.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }
};

// Gradient samples along the inward normal line {u2 = const} of one edge, in
// edge-frame coordinates. u1 is strictly positive and strictly decreasing:
// samples march toward the boundary. y1 is the outward-normal gradient
// component — the cylinder parameter, which for a convex potential grows
// toward an asymptotically cylindrical edge (u1 ~ e^{-lambda y1}); y2 is the
// tangential component. `asymptotic` records whether y1 grew monotonically at
// a sustained rate per log-step in u1 (the cylindrical-end signature);
// bounded gradients (e.g. the quadratic) leave it false.
struct EdgeSamples {
    int edge = 0;
    double u2 = 0.0;
    std::vector<double> u1;
    std::vector<double> y1;
    std::vector<double> y2;
    bool asymptotic = false;

    int size() const { return static_cast<int>(u1.size()); }
};

// Sup norms of the first-order optimality system evaluated on fully interior
// neighborhoods (nodes whose 3x3 stencil is interior): |det D2 phi - V|,
// the discrete curl of the gradient field, and the minimum of tr D2 phi.
// Counts tell how many nodes each statistic saw; zero-count statistics
// default to (0, 0, +infinity).
struct SLResiduals {
    double det_sup = 0.0;
    double curl_sup = 0.0;
    double trace_margin = 0.0;
    int det_nodes = 0;
    int curl_nodes = 0;
};

// Discrete gradient of phi at every node: three-point second-order
// differences along both lattice axes, rotated to world coordinates.
// Both-neighbor nodes get the centered formula; near-boundary nodes use the
// Dirichlet closure values, falling back to a one-sided interior stencil
// when the closure arm is shorter than half a spacing.
std::vector<Vec2> gradient_field(const Grid& grid, const Field& phi,
                                 const std::vector<double>& closure_vals);
std::vector<Vec2> gradient_field(const Grid& grid, const Field& phi,
                                 const DirichletProblem& pb);

SLResiduals sl_residuals(const Grid& grid, const Field& phi, const DirichletProblem& pb);
SLResiduals sl_residuals(const Grid& grid, const Field& phi, const GHParams& params);

// Triangulates the interior lattice (two triangles per full cell, one per
// three-corner cell) and lifts nodes by the gradient field. Throws
// TriangulationFailed if any node ends up outside every cell.
GraphMesh build_graph_mesh(const Grid& grid, const Field& phi, const DirichletProblem& pb);

// Gradient samples at kmax geometrically spaced depths u1 in
// [u1_min, u1_max] along the line {u2 = const} of the edge frame. Defaults:
// u1_min = 4h, u1_max = 0.2 * inradius. u2 must lie in the middle 60% of the
// edge; kmax >= 4. Throws InsufficientResolution when fewer than 4 samples
// can be interpolated.
EdgeSamples edge_samples(const Grid& grid, const Field& phi, const DirichletProblem& pb,
                         const EdgeFrame& frame, double u2, int kmax,
                         std::optional<double> u1_min = std::nullopt,
                         std::optional<double> u1_max = std::nullopt);

// Sup over samples at depth delta = 2h of |phi - trace at the projection|,
// one value per edge; edges too thin to interpolate report NaN.
std::vector<double> boundary_affinity_check(const Grid& grid, const Field& phi,
                                            const BoundaryTrace& trace);
std::vector<double> boundary_affinity_check(const Grid& grid, const Field& phi,
                                            const DirichletProblem& pb);

} // namespace slpants
