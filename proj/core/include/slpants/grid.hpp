#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "slpants/geometry.hpp"

namespace slpants {

// Lattice semi-direction with coprime components; e and -e share one entry.
struct StencilDirection {
    int p, q;
    double norm;    // |(p,q)|
};

// All coprime semi-directions with max(|p|,|q|) <= width, grouped into
// orthogonal frames ((p,q), (-q,p)). width=1 gives axes+diagonals (4 dirs),
// width=3 the default 16-direction set.
struct Stencil {
    int width = 3;
    std::vector<StencilDirection> dirs;
    std::vector<std::pair<int, int>> frames;    // indices into dirs
    int axis_u1 = -1, axis_u2 = -1;             // positions of (1,0), (0,1)
    int diag_pp = -1, diag_pm = -1;             // positions of (1,1), (1,-1)
};

Stencil make_stencil(int width);

// One arm of a second-difference stencil. ref >= 0 indexes an interior node;
// ref < 0 indexes closure point ~ref with a Dirichlet value bound at solve time.
struct Arm {
    int ref = 0;
    double rho = 0.0;   // physical distance from the center node
};

// Exact ray/boundary intersection. t is the affine parameter along edge
// (0 at p_edge); rays exiting within eps_v of a vertex are snapped to it.
struct Closure {
    Vec2 point;
    int edge = 0;
    double t = 0.0;
};

// Cartesian interior lattice over a convex polygon. The lattice may carry an
// orthonormal frame (columns = lattice axes): node(i,j) = h * frame * (i,j).
class Grid {
public:
    const Polygon& polygon() const { return poly_; }
    double h() const { return h_; }
    const Stencil& stencil() const { return stencil_; }
    const Mat2& frame() const { return frame_; }

    int node_count() const { return static_cast<int>(nodes_.size()); }
    const Vec2& node(int k) const { return nodes_[k]; }
    const std::vector<Vec2>& nodes() const { return nodes_; }
    std::pair<int, int> lattice(int k) const { return lattice_[k]; }

    int find_node(int i, int j) const;          // -1 if absent
    Vec2 lattice_coords(const Vec2& u) const { return frame_.transpose() * u / h_; }

    // sign: 0 = +dir, 1 = -dir
    const Arm& arm(int k, int dir, int sign) const { return arms_[(static_cast<size_t>(k) * stencil_.dirs.size() + dir) * 2 + sign]; }
    const Closure& closure(int ref) const { return closures_[static_cast<size_t>(-1 - ref)]; }
    int closure_count() const { return static_cast<int>(closures_.size()); }

    friend Grid build_grid(const Polygon&, double, int, const Mat2&);

private:
    Grid(Polygon poly, double h, Stencil st, Mat2 frame)
        : poly_(std::move(poly)), h_(h), stencil_(std::move(st)), frame_(frame) {}

    Polygon poly_;
    double h_;
    Stencil stencil_;
    Mat2 frame_;
    std::vector<Vec2> nodes_;
    std::vector<std::pair<int, int>> lattice_;
    std::unordered_map<uint64_t, int> index_;
    std::vector<Arm> arms_;
    std::vector<Closure> closures_;
};

// Requires h < min edge length / 4; throws SpacingTooCoarse otherwise or when
// no interior node survives. Nodes keep >= 1e-3*h clearance from the boundary
// so closure arms cannot degenerate.
Grid build_grid(const Polygon& poly, double h, int stencil_width = 3,
                const Mat2& frame = Mat2::Identity());

// Nodal scalar field over a grid's interior nodes.
struct Field {
    std::vector<double> v;

    Field() = default;
    explicit Field(int n, double fill = 0.0) : v(static_cast<size_t>(n), fill) {}
    double& operator[](int k) { return v[static_cast<size_t>(k)]; }
    double operator[](int k) const { return v[static_cast<size_t>(k)]; }
    int size() const { return static_cast<int>(v.size()); }
};

} // namespace slpants
