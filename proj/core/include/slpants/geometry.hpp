#pragma once

#include <Eigen/Dense>
#include <vector>

#include "slpants/errors.hpp"

namespace slpants {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Clockwise quarter turn: (a,b) -> (b,-a).
inline Vec2 rotate90(const Vec2& v) { return Vec2(v.y(), -v.x()); }

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Strictly convex polygon, vertices in counterclockwise order, indices mod n.
class Polygon {
public:
    explicit Polygon(std::vector<Vec2> points);

    int n() const { return static_cast<int>(pts_.size()); }
    const Vec2& vertex(int i) const;                 // cyclic, i may be any int
    const std::vector<Vec2>& vertices() const { return pts_; }

    Vec2 edge_vector(int i) const;                   // vertex(i+1) - vertex(i)
    double edge_length(int i) const;
    Vec2 edge_midpoint(int i) const;
    double min_edge_length() const;
    double diameter() const;                         // max pairwise vertex distance
    Vec2 centroid() const;                           // vertex average
    double inradius() const;                         // min distance, centroid to edge lines

    // Strict interior test; margin > 0 demands that much clearance from every edge line.
    bool contains(const Vec2& u, double margin = 0.0) const;
    double distance_to_boundary(const Vec2& u) const;   // >= 0 inside, 0 on boundary

private:
    std::vector<Vec2> pts_;
};

// Throws TooFewPoints / DuplicateVertex / NotCounterclockwise / NotStrictlyConvex.
void validate_polygon(const std::vector<Vec2>& points);

struct GHParams {
    Polygon polygon;
    double A = 0.0;     // A = 0 ALE-like, A > 0 ALF-like
};

// V(u) = A + sum_i 1/(2|u - p_i|). Throws PotentialSingular within
// eps_v = 1e-8 * diameter of any vertex.
double potential(const GHParams& params, const Vec2& u);
Vec2 potential_gradient(const GHParams& params, const Vec2& u);

// Rigid motion carrying edge i of a CCW polygon onto {u1 = 0}: p_{i+1} -> (0,0),
// p_i -> (0, len_i), interior -> {u1 > 0}. The linear part is a pure rotation.
class EdgeFrame {
public:
    EdgeFrame(const Polygon& poly, int edge);

    Vec2 to_frame(const Vec2& u) const { return Q_ * (u - base_); }
    Vec2 to_world(const Vec2& f) const { return base_ + Q_.transpose() * f; }
    // Gradients transform by the same rotation: y_frame = Q * y_world.
    Vec2 gradient_to_frame(const Vec2& y) const { return Q_ * y; }

    const Mat2& rotation() const { return Q_; }
    int edge() const { return edge_; }
    double length() const { return len_; }

private:
    Mat2 Q_;
    Vec2 base_;     // p_{i+1}
    int edge_;
    double len_;
};

inline EdgeFrame edge_frame(const Polygon& poly, int edge) { return EdgeFrame(poly, edge); }

// Dirichlet data: phi restricted to edge i interpolates b_i at p_i and b_{i+1}
// at p_{i+1} affinely; b_1 = 0, b_{i+1} = b_i + c_i. Requires |sum c_i| <= eps_c.
class BoundaryTrace {
public:
    BoundaryTrace(const Polygon& poly, const std::vector<double>& c);

    const std::vector<double>& vertex_values() const { return b_; }
    const std::vector<double>& increments() const { return c_; }
    const Polygon& polygon() const { return poly_; }

    // Value at parameter t in [0,1] along edge i (0 at p_i). Vertex-exact at t=0,1.
    double edge_value(int edge, double t) const;

    // Value at a boundary point; throws NotOnBoundary beyond eps_b = 1e-8 * diam.
    double operator()(const Vec2& x) const;

private:
    Polygon poly_;
    std::vector<double> c_;
    std::vector<double> b_;
};

inline BoundaryTrace boundary_trace(const Polygon& poly, const std::vector<double>& c) {
    return BoundaryTrace(poly, c);
}
inline double trace_eval(const BoundaryTrace& trace, const Vec2& x) { return trace(x); }

} // namespace slpants
