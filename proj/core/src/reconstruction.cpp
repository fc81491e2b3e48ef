#include "slpants/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slpants/interpolate.hpp"
#include "slpants/parallel.hpp"

namespace slpants {

namespace {

inline double arm_value(const Field& phi, const std::vector<double>& cv, int ref) {
    return ref >= 0 ? phi[ref] : cv[static_cast<size_t>(-1 - ref)];
}

// First derivative along one lattice axis at node k, exact on quadratics.
double axis_derivative(const Grid& g, const Field& phi, const std::vector<double>& cv,
                       int k, int dir) {
    const Arm& ap = g.arm(k, dir, 0);
    const Arm& am = g.arm(k, dir, 1);
    const double h = g.h();
    const auto [i, j] = g.lattice(k);
    const auto& e = g.stencil().dirs[static_cast<size_t>(dir)];

    // A closure hugging the node would put enormous weight on one boundary
    // value; prefer a one-sided interior stencil when one exists.
    if (ap.ref < 0 && ap.rho < 0.5 * h) {
        const int n1 = g.find_node(i - e.p, j - e.q);
        const int n2 = g.find_node(i - 2 * e.p, j - 2 * e.q);
        if (n1 >= 0 && n2 >= 0)
            return (3.0 * phi[k] - 4.0 * phi[n1] + phi[n2]) / (2.0 * h);
    }
    if (am.ref < 0 && am.rho < 0.5 * h) {
        const int n1 = g.find_node(i + e.p, j + e.q);
        const int n2 = g.find_node(i + 2 * e.p, j + 2 * e.q);
        if (n1 >= 0 && n2 >= 0)
            return (-3.0 * phi[k] + 4.0 * phi[n1] - phi[n2]) / (2.0 * h);
    }

    // three-point formula with unequal arms; centered when both arms are h
    const double rp = ap.rho, rm = am.rho;
    const double fp = arm_value(phi, cv, ap.ref);
    const double fm = arm_value(phi, cv, am.ref);
    return (rm * rm * fp - rp * rp * fm + (rp * rp - rm * rm) * phi[k]) /
           (rp * rm * (rp + rm));
}

} // namespace

std::vector<Vec2> gradient_field(const Grid& g, const Field& phi,
                                 const std::vector<double>& cv) {
    if (phi.size() != g.node_count()) throw GridMismatch("field size does not match the grid");
    const Stencil& st = g.stencil();
    std::vector<Vec2> y(static_cast<size_t>(g.node_count()));
    const Mat2& F = g.frame();
    parallel_for(g.node_count(), [&](int k) {
        const double d1 = axis_derivative(g, phi, cv, k, st.axis_u1);
        const double d2 = axis_derivative(g, phi, cv, k, st.axis_u2);
        y[static_cast<size_t>(k)] = F * Vec2(d1, d2);
    });
    return y;
}

std::vector<Vec2> gradient_field(const Grid& g, const Field& phi, const DirichletProblem& pb) {
    return gradient_field(g, phi, closure_values(g, pb));
}

SLResiduals sl_residuals(const Grid& g, const Field& phi, const DirichletProblem& pb) {
    if (phi.size() != g.node_count()) throw GridMismatch("field size does not match the grid");
    const auto cv = closure_values(g, pb);
    const auto y = gradient_field(g, phi, cv);
    const Mat2& F = g.frame();
    const double h = g.h();

    SLResiduals r;
    r.trace_margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < g.node_count(); ++k) {
        const auto [i, j] = g.lattice(k);
        const int E = g.find_node(i + 1, j), W = g.find_node(i - 1, j);
        const int N = g.find_node(i, j + 1), S = g.find_node(i, j - 1);
        if (E < 0 || W < 0 || N < 0 || S < 0) continue;

        // discrete curl of the gradient field in lattice coordinates
        const auto lat = [&](int n) -> Vec2 { return F.transpose() * y[static_cast<size_t>(n)]; };
        const double curl = (lat(N).x() - lat(S).x() - lat(E).y() + lat(W).y()) / (2.0 * h);
        r.curl_sup = std::max(r.curl_sup, std::abs(curl));
        ++r.curl_nodes;

        const int NE = g.find_node(i + 1, j + 1), SW = g.find_node(i - 1, j - 1);
        const int NW = g.find_node(i - 1, j + 1), SE = g.find_node(i + 1, j - 1);
        if (NE < 0 || SW < 0 || NW < 0 || SE < 0) continue;

        const double h2 = h * h;
        const double A = (phi[E] - 2.0 * phi[k] + phi[W]) / h2;
        const double C = (phi[N] - 2.0 * phi[k] + phi[S]) / h2;
        const double Bp = (phi[NE] - 2.0 * phi[k] + phi[SW]) / (2.0 * h2);
        const double Bm = (phi[NW] - 2.0 * phi[k] + phi[SE]) / (2.0 * h2);
        const double M = 0.5 * (Bp - Bm);
        r.det_sup = std::max(r.det_sup, std::abs(A * C - M * M - pb.V(g.node(k))));
        r.trace_margin = std::min(r.trace_margin, A + C);
        ++r.det_nodes;
    }
    return r;
}

SLResiduals sl_residuals(const Grid& g, const Field& phi, const GHParams& params) {
    DirichletProblem pb;
    pb.V = [&params](const Vec2& u) { return potential(params, u); };
    pb.boundary = [](int, double, const Vec2&) { return 0.0; };    // unused: interior stats only
    return sl_residuals(g, phi, pb);
}

GraphMesh build_graph_mesh(const Grid& g, const Field& phi, const DirichletProblem& pb) {
    if (phi.size() != g.node_count()) throw GridMismatch("field size does not match the grid");
    GraphMesh mesh;
    mesh.u.reserve(static_cast<size_t>(g.node_count()));
    mesh.phi = phi.v;
    for (int k = 0; k < g.node_count(); ++k) mesh.u.push_back(g.node(k));
    mesh.y = gradient_field(g, phi, closure_values(g, pb));

    // bounding lattice rectangle
    int imin = 0, imax = 0, jmin = 0, jmax = 0;
    for (int k = 0; k < g.node_count(); ++k) {
        const auto [i, j] = g.lattice(k);
        imin = std::min(imin, i); imax = std::max(imax, i);
        jmin = std::min(jmin, j); jmax = std::max(jmax, j);
    }

    // lattice orientation flips under a reflecting frame
    const bool flip = g.frame().determinant() < 0.0;
    std::vector<uint8_t> covered(static_cast<size_t>(g.node_count()), 0);
    const auto emit = [&](int a, int b, int c) {
        if (flip) std::swap(b, c);
        mesh.triangles.push_back({a, b, c});
        mesh.quality.push_back(1);   // lattice cells split into right isoceles triangles
        covered[static_cast<size_t>(a)] = covered[static_cast<size_t>(b)] =
            covered[static_cast<size_t>(c)] = 1;
    };

    for (int i = imin; i < imax + 1; ++i) {
        for (int j = jmin; j < jmax + 1; ++j) {
            const int a = g.find_node(i, j);        // SW
            const int b = g.find_node(i + 1, j);    // SE
            const int c = g.find_node(i + 1, j + 1);// NE
            const int d = g.find_node(i, j + 1);    // NW
            const int present = (a >= 0) + (b >= 0) + (c >= 0) + (d >= 0);
            if (present == 4) {
                emit(a, b, c);
                emit(a, c, d);
            } else if (present == 3) {
                if (a < 0) emit(b, c, d);
                else if (b < 0) emit(a, c, d);
                else if (c < 0) emit(a, b, d);
                else emit(a, b, c);
            }
        }
    }
    for (int k = 0; k < g.node_count(); ++k)
        if (!covered[static_cast<size_t>(k)])
            throw TriangulationFailed("interior node " + std::to_string(k) +
                                      " is not covered by any lattice cell");
    return mesh;
}

EdgeSamples edge_samples(const Grid& g, const Field& phi, const DirichletProblem& pb,
                         const EdgeFrame& frame, double u2, int kmax,
                         std::optional<double> u1_min, std::optional<double> u1_max) {
    if (kmax < 4) throw PreconditionViolated("edge_samples needs kmax >= 4");
    const double ell = frame.length();
    if (u2 < 0.2 * ell || u2 > 0.8 * ell)
        throw PreconditionViolated("transverse coordinate must lie in the middle 60% of the edge");

    const double lo = u1_min.value_or(4.0 * g.h());
    const double hi = u1_max.value_or(0.2 * g.polygon().inradius());
    if (!(lo > 0.0) || !(hi > lo))
        throw PreconditionViolated("edge sampling window must satisfy 0 < u1_min < u1_max");

    // enough grid support near the sampling line?
    int support = 0;
    for (int k = 0; k < g.node_count(); ++k) {
        const Vec2 f = frame.to_frame(g.node(k));
        if (std::abs(f.y() - u2) <= 2.0 * g.h() && f.x() >= lo - g.h() && f.x() <= hi + g.h())
            ++support;
    }
    if (support < 4)
        throw InsufficientResolution("fewer than 4 grid nodes near the sampling line");

    const auto y = gradient_field(g, phi, closure_values(g, pb));
    EdgeSamples s;
    s.edge = frame.edge();
    s.u2 = u2;
    const double ratio = std::pow(lo / hi, 1.0 / (kmax - 1));
    double u1 = hi;
    for (int k = 0; k < kmax; ++k, u1 *= ratio) {
        const Vec2 world = frame.to_world(Vec2(u1, u2));
        const auto yw = bilinear_vector(g, y, world);
        if (!yw) continue;
        const Vec2 yf = frame.gradient_to_frame(*yw);
        s.u1.push_back(u1);
        // cylinder parameter: the outward-normal gradient component. A convex
        // potential falls toward the interior, so its inward component drops
        // to -inf along a cylindrical end while this sign grows to +inf.
        s.y1.push_back(-yf.x());
        s.y2.push_back(yf.y());
    }
    if (s.size() < 4)
        throw InsufficientResolution("fewer than 4 samples could be interpolated in the strip");

    // Cylindrical ends keep a near-constant y1 increment per log-step in u1
    // (u1 ~ e^{-lambda y1}: slope -> 1/lambda); bounded gradients have slopes
    // proportional to u1 itself, decaying by the window ratio. Compare the
    // slope means of the two window halves against the geometric mean of the
    // two model predictions (1 vs e^{-span/2}).
    s.asymptotic = true;
    std::vector<double> slopes;
    for (size_t k = 0; k + 1 < s.y1.size(); ++k) {
        if (s.y1[k + 1] <= s.y1[k]) { s.asymptotic = false; break; }
        slopes.push_back((s.y1[k + 1] - s.y1[k]) / std::log(s.u1[k] / s.u1[k + 1]));
    }
    if (s.asymptotic) {
        const size_t half = slopes.size() / 2;
        double first = 0.0, last = 0.0;
        for (size_t k = 0; k < half; ++k) {
            first += slopes[k];
            last += slopes[slopes.size() - 1 - k];
        }
        const double span = std::log(s.u1.front() / s.u1.back());
        if (!(last > first * std::exp(-0.25 * span))) s.asymptotic = false;
    }
    return s;
}

namespace {

std::vector<double> affinity_impl(const Grid& g, const Field& phi,
                                  const std::function<double(int, double, const Vec2&)>& data) {
    const Polygon& poly = g.polygon();
    const double delta = 2.0 * g.h();
    std::vector<double> dev(static_cast<size_t>(poly.n()),
                            std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < poly.n(); ++i) {
        const double len = poly.edge_length(i);
        const Vec2 v = poly.edge_vector(i) / len;
        const Vec2 nin(-v.y(), v.x());
        const int m = std::max(8, static_cast<int>(std::ceil(len / g.h())));
        double sup = -1.0;
        for (int k = 1; k < m; ++k) {
            const double t = static_cast<double>(k) / m;
            const Vec2 base = poly.vertex(i) + t * len * v;
            const auto val = bilinear_value(g, phi, base + delta * nin);
            if (!val) continue;
            sup = std::max(sup, std::abs(*val - data(i, t, base)));
        }
        if (sup >= 0.0) dev[static_cast<size_t>(i)] = sup;
    }
    return dev;
}

} // namespace

std::vector<double> boundary_affinity_check(const Grid& g, const Field& phi,
                                            const BoundaryTrace& trace) {
    return affinity_impl(g, phi,
                         [&trace](int i, double t, const Vec2&) { return trace.edge_value(i, t); });
}

std::vector<double> boundary_affinity_check(const Grid& g, const Field& phi,
                                            const DirichletProblem& pb) {
    return affinity_impl(g, phi, pb.boundary);
}

} // namespace slpants
