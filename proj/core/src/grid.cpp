#include "slpants/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace slpants {

namespace {

uint64_t key(int i, int j) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(i)) << 32) | static_cast<uint32_t>(j);
}

} // namespace

Stencil make_stencil(int width) {
    if (width < 1) throw PreconditionViolated("stencil width must be >= 1");
    Stencil st;
    st.width = width;
    for (int p = 0; p <= width; ++p) {
        for (int q = -width; q <= width; ++q) {
            if (p == 0 && q <= 0) continue;      // canonical: p > 0, or p == 0 && q > 0
            if (p > 0 && q == 0 && p != 1) continue;
            if (std::gcd(p, std::abs(q)) != 1) continue;
            st.dirs.push_back({p, q, std::hypot(static_cast<double>(p), static_cast<double>(q))});
        }
    }
    std::sort(st.dirs.begin(), st.dirs.end(), [](const StencilDirection& a, const StencilDirection& b) {
        const int ma = std::max(std::abs(a.p), std::abs(a.q));
        const int mb = std::max(std::abs(b.p), std::abs(b.q));
        if (ma != mb) return ma < mb;
        return std::atan2(static_cast<double>(a.q), static_cast<double>(a.p)) <
               std::atan2(static_cast<double>(b.q), static_cast<double>(b.p));
    });

    auto find_dir = [&](int p, int q) {
        // canonicalize up to sign
        if (p < 0 || (p == 0 && q < 0)) { p = -p; q = -q; }
        for (int d = 0; d < static_cast<int>(st.dirs.size()); ++d)
            if (st.dirs[d].p == p && st.dirs[d].q == q) return d;
        return -1;
    };

    st.axis_u1 = find_dir(1, 0);
    st.axis_u2 = find_dir(0, 1);
    st.diag_pp = find_dir(1, 1);
    st.diag_pm = find_dir(1, -1);

    std::vector<bool> used(st.dirs.size(), false);
    for (int d = 0; d < static_cast<int>(st.dirs.size()); ++d) {
        if (used[d]) continue;
        const int e = find_dir(-st.dirs[d].q, st.dirs[d].p);
        used[d] = used[e] = true;
        st.frames.emplace_back(d, e);
    }
    return st;
}

Grid build_grid(const Polygon& poly, double h, int stencil_width, const Mat2& frame) {
    if (!(h > 0.0)) throw SpacingTooCoarse("grid spacing must be positive");
    if (!(h < poly.min_edge_length() / 4.0))
        throw SpacingTooCoarse("grid spacing " + std::to_string(h) + " must be < min edge length / 4");

    Grid g(poly, h, make_stencil(stencil_width), frame);

    double ilo = std::numeric_limits<double>::infinity(), ihi = -ilo;
    double jlo = ilo, jhi = -ilo;
    for (const auto& p : poly.vertices()) {
        const Vec2 q = g.lattice_coords(p);
        ilo = std::min(ilo, q.x()); ihi = std::max(ihi, q.x());
        jlo = std::min(jlo, q.y()); jhi = std::max(jhi, q.y());
    }

    const double clearance = 1e-3 * h;
    const int i0 = static_cast<int>(std::floor(ilo)) - 1, i1 = static_cast<int>(std::ceil(ihi)) + 1;
    const int j0 = static_cast<int>(std::floor(jlo)) - 1, j1 = static_cast<int>(std::ceil(jhi)) + 1;
    for (int i = i0; i <= i1; ++i) {
        for (int j = j0; j <= j1; ++j) {
            const Vec2 x = h * (frame * Vec2(i, j));
            if (!poly.contains(x, clearance)) continue;
            g.index_.emplace(key(i, j), g.node_count());
            g.nodes_.push_back(x);
            g.lattice_.emplace_back(i, j);
        }
    }
    if (g.nodes_.empty())
        throw SpacingTooCoarse("no interior node at spacing " + std::to_string(h));

    const double eps_v = 1e-8 * poly.diameter();
    const int D = static_cast<int>(g.stencil_.dirs.size());
    g.arms_.resize(static_cast<size_t>(g.node_count()) * D * 2);

    auto boundary_hit = [&](const Vec2& x, const Vec2& w) -> int {
        // first exit of the ray x + s*w, s > 0, through the polygon boundary
        int best_edge = -1;
        double best_s = std::numeric_limits<double>::infinity(), best_t = 0.0;
        for (int e = 0; e < poly.n(); ++e) {
            const Vec2 a = poly.vertex(e);
            const Vec2 ev = poly.edge_vector(e);
            const double den = cross2(w, ev);
            if (std::abs(den) < 1e-15 * w.norm() * ev.norm()) continue;
            const Vec2 r = a - x;
            const double s = cross2(r, ev) / den;
            const double t = cross2(r, w) / den;
            if (s <= 0.0 || t < -1e-12 || t > 1.0 + 1e-12) continue;
            if (s < best_s) { best_s = s; best_edge = e; best_t = std::clamp(t, 0.0, 1.0); }
        }
        if (best_edge < 0)
            throw DegenerateIntersection("stencil ray failed to exit the polygon");
        Closure c;
        c.edge = best_edge;
        c.t = best_t;
        c.point = x + best_s * w;
        // rays exiting through a vertex neighbourhood take the vertex value
        if ((c.point - poly.vertex(best_edge)).norm() <= eps_v) {
            c.t = 0.0;
            c.point = poly.vertex(best_edge);
        } else if ((c.point - poly.vertex(best_edge + 1)).norm() <= eps_v) {
            c.t = 1.0;
            c.point = poly.vertex(best_edge + 1);
        }
        g.closures_.push_back(c);
        return -static_cast<int>(g.closures_.size());   // ref = -1 - idx
    };

    for (int k = 0; k < g.node_count(); ++k) {
        const auto [i, j] = g.lattice_[k];
        for (int d = 0; d < D; ++d) {
            const auto& dir = g.stencil_.dirs[d];
            for (int sign = 0; sign < 2; ++sign) {
                const int sp = sign == 0 ? dir.p : -dir.p;
                const int sq = sign == 0 ? dir.q : -dir.q;
                Arm arm;
                const int nb = g.find_node(i + sp, j + sq);
                if (nb >= 0) {
                    arm.ref = nb;
                    arm.rho = h * dir.norm;
                } else {
                    const Vec2 w = frame * Vec2(sp, sq);
                    arm.ref = boundary_hit(g.nodes_[k], w);
                    arm.rho = (g.closures_[static_cast<size_t>(-1 - arm.ref)].point - g.nodes_[k]).norm();
                }
                g.arms_[(static_cast<size_t>(k) * D + d) * 2 + sign] = arm;
            }
        }
    }
    return g;
}

int Grid::find_node(int i, int j) const {
    const auto it = index_.find(key(i, j));
    return it == index_.end() ? -1 : it->second;
}

} // namespace slpants
