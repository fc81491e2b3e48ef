#include "slpants/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace slpants {

namespace {

int cyc(int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
}

double polygon_scale(const std::vector<Vec2>& pts) {
    double s = 0.0;
    for (const auto& p : pts) s = std::max(s, p.cwiseAbs().maxCoeff());
    return std::max(s, 1.0);
}

} // namespace

void validate_polygon(const std::vector<Vec2>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 3) throw TooFewPoints("polygon needs at least 3 vertices, got " + std::to_string(n));

    const double dup_tol = 1e-12 * polygon_scale(points);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if ((points[i] - points[j]).norm() <= dup_tol)
                throw DuplicateVertex("vertices " + std::to_string(i) + " and " + std::to_string(j) + " coincide");

    double area2 = 0.0;
    for (int i = 0; i < n; ++i) area2 += cross2(points[i], points[cyc(i + 1, n)]);
    if (area2 <= 0.0)
        throw NotCounterclockwise("signed area is non-positive; vertices must run counterclockwise");

    for (int i = 0; i < n; ++i) {
        const Vec2 a = points[cyc(i + 1, n)] - points[i];
        const Vec2 b = points[cyc(i + 2, n)] - points[cyc(i + 1, n)];
        if (cross2(a, b) <= 0.0)
            throw NotStrictlyConvex("cross product at vertex " + std::to_string(cyc(i + 1, n)) + " is non-positive");
    }
}

Polygon::Polygon(std::vector<Vec2> points) : pts_(std::move(points)) {
    validate_polygon(pts_);
}

const Vec2& Polygon::vertex(int i) const { return pts_[cyc(i, n())]; }

Vec2 Polygon::edge_vector(int i) const { return vertex(i + 1) - vertex(i); }

double Polygon::edge_length(int i) const { return edge_vector(i).norm(); }

Vec2 Polygon::edge_midpoint(int i) const { return 0.5 * (vertex(i) + vertex(i + 1)); }

double Polygon::min_edge_length() const {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n(); ++i) m = std::min(m, edge_length(i));
    return m;
}

double Polygon::diameter() const {
    double d = 0.0;
    for (int i = 0; i < n(); ++i)
        for (int j = i + 1; j < n(); ++j) d = std::max(d, (pts_[i] - pts_[j]).norm());
    return d;
}

Vec2 Polygon::centroid() const {
    Vec2 c = Vec2::Zero();
    for (const auto& p : pts_) c += p;
    return c / static_cast<double>(n());
}

double Polygon::inradius() const {
    const Vec2 c = centroid();
    double r = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n(); ++i)
        r = std::min(r, cross2(edge_vector(i), c - vertex(i)) / edge_length(i));
    return r;
}

bool Polygon::contains(const Vec2& u, double margin) const {
    for (int i = 0; i < n(); ++i) {
        const double d = cross2(edge_vector(i), u - vertex(i)) / edge_length(i);
        if (d <= margin) return false;
    }
    return true;
}

double Polygon::distance_to_boundary(const Vec2& u) const {
    double dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n(); ++i) {
        const Vec2 e = edge_vector(i);
        const double t = std::clamp((u - vertex(i)).dot(e) / e.squaredNorm(), 0.0, 1.0);
        dmin = std::min(dmin, (u - (vertex(i) + t * e)).norm());
    }
    return dmin;
}

double potential(const GHParams& params, const Vec2& u) {
    const double eps_v = 1e-8 * params.polygon.diameter();
    double V = params.A;
    for (const auto& p : params.polygon.vertices()) {
        const double r = (u - p).norm();
        if (r < eps_v)
            throw PotentialSingular("potential evaluated within eps_v of a vertex");
        V += 0.5 / r;
    }
    return V;
}

Vec2 potential_gradient(const GHParams& params, const Vec2& u) {
    const double eps_v = 1e-8 * params.polygon.diameter();
    Vec2 g = Vec2::Zero();
    for (const auto& p : params.polygon.vertices()) {
        const Vec2 d = u - p;
        const double r = d.norm();
        if (r < eps_v)
            throw PotentialSingular("potential gradient evaluated within eps_v of a vertex");
        g -= d / (2.0 * r * r * r);
    }
    return g;
}

EdgeFrame::EdgeFrame(const Polygon& poly, int edge) : edge_(edge) {
    if (edge < 0 || edge >= poly.n())
        throw IndexOutOfRange("edge index " + std::to_string(edge) + " out of range");
    len_ = poly.edge_length(edge);
    base_ = poly.vertex(edge + 1);
    const Vec2 v = poly.edge_vector(edge) / len_;
    const Vec2 nin(-v.y(), v.x());      // inward for CCW order
    // rows: inward normal, reversed edge direction; det = +1
    Q_ << nin.x(), nin.y(),
          -v.x(), -v.y();
}

BoundaryTrace::BoundaryTrace(const Polygon& poly, const std::vector<double>& c)
    : poly_(poly), c_(c) {
    const int n = poly_.n();
    if (static_cast<int>(c_.size()) != n)
        throw ConstraintViolated("c has " + std::to_string(c_.size()) + " entries, polygon has " + std::to_string(n) + " edges");
    double sum = 0.0, cmax = 0.0;
    for (double ci : c_) { sum += ci; cmax = std::max(cmax, std::abs(ci)); }
    const double eps_c = 1e-9 * (cmax + 1.0);
    if (std::abs(sum) > eps_c)
        throw ConstraintViolated("sum of c_i must vanish (closed trace), got " + std::to_string(sum));
    b_.resize(n);
    b_[0] = 0.0;
    for (int i = 0; i + 1 < n; ++i) b_[i + 1] = b_[i] + c_[i];
}

double BoundaryTrace::edge_value(int edge, double t) const {
    const int n = poly_.n();
    const int i = cyc(edge, n);
    if (t == 0.0) return b_[i];
    if (t == 1.0) return b_[cyc(i + 1, n)];
    return (1.0 - t) * b_[i] + t * b_[cyc(i + 1, n)];
}

double BoundaryTrace::operator()(const Vec2& x) const {
    const int n = poly_.n();
    const double eps_b = 1e-8 * poly_.diameter();
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity(), best_t = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec2 e = poly_.edge_vector(i);
        const double t = std::clamp((x - poly_.vertex(i)).dot(e) / e.squaredNorm(), 0.0, 1.0);
        const double d = (x - (poly_.vertex(i) + t * e)).norm();
        if (d < best_d) { best_d = d; best = i; best_t = t; }
    }
    if (best_d > eps_b)
        throw NotOnBoundary("point is " + std::to_string(best_d) + " from the boundary, beyond eps_b");
    // vertex-exact within eps_b
    if ((x - poly_.vertex(best)).norm() <= eps_b) return b_[best];
    if ((x - poly_.vertex(best + 1)).norm() <= eps_b) return b_[cyc(best + 1, n)];
    return edge_value(best, best_t);
}

} // namespace slpants
