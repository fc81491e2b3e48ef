#include "slpants/solver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "slpants/interpolate.hpp"
#include "slpants/parallel.hpp"

namespace slpants {

namespace {

// One Jacobian row; the wide-stencil active frame touches <= 5 nodes,
// the nine-point scheme <= 9.
struct RowBuf {
    int cnt = 0;
    int idx[9];
    double val[9];

    void add(int i, double v) {
        for (int s = 0; s < cnt; ++s)
            if (idx[s] == i) { val[s] += v; return; }
        idx[cnt] = i;
        val[cnt] = v;
        ++cnt;
    }
};

struct Diff2 {
    double value;
    double wp, wm, wc;  // weights on plus arm, minus arm, center
    int refp, refm;
};

inline double arm_value(const double* phi, const double* cv, int ref) {
    return ref >= 0 ? phi[ref] : cv[-1 - ref];
}

// Shortley-Weller second difference along a stencil direction, normalized to
// approximate the second derivative per unit length; exact on quadratics for
// any arm lengths.
inline Diff2 second_diff(const Grid& g, const double* phi, const double* cv, int k, int d) {
    const Arm& ap = g.arm(k, d, 0);
    const Arm& am = g.arm(k, d, 1);
    const double sum = ap.rho + am.rho;
    Diff2 r;
    r.wp = 2.0 / (ap.rho * sum);
    r.wm = 2.0 / (am.rho * sum);
    r.wc = -(r.wp + r.wm);
    r.refp = ap.ref;
    r.refm = am.ref;
    const double phi0 = phi[k];
    r.value = r.wp * (arm_value(phi, cv, ap.ref) - phi0) + r.wm * (arm_value(phi, cv, am.ref) - phi0);
    return r;
}

inline void add_direction(RowBuf& row, int k, const Diff2& d2, double scale) {
    if (scale == 0.0) return;
    row.add(k, scale * d2.wc);
    if (d2.refp >= 0) row.add(d2.refp, scale * d2.wp);
    if (d2.refm >= 0) row.add(d2.refm, scale * d2.wm);
}

double monotone_eval(const Grid& g, const double* phi, const double* cv, int k,
                     double penalty, RowBuf* row) {
    const auto& frames = g.stencil().frames;
    double best = std::numeric_limits<double>::infinity();
    int active = 0;
    for (int f = 0; f < static_cast<int>(frames.size()); ++f) {
        const double a = second_diff(g, phi, cv, k, frames[f].first).value;
        const double b = second_diff(g, phi, cv, k, frames[f].second).value;
        const double G = std::max(a, 0.0) * std::max(b, 0.0) -
                         penalty * (std::max(-a, 0.0) + std::max(-b, 0.0));
        if (G < best) { best = G; active = f; }
    }
    if (row) {
        const Diff2 da = second_diff(g, phi, cv, k, frames[active].first);
        const Diff2 db = second_diff(g, phi, cv, k, frames[active].second);
        const double a = da.value, b = db.value;
        // On the negative branch the exact slope is `penalty`, but right of
        // the kink it is the opposite clamped factor, which near a stiff
        // corner is orders of magnitude steeper; a step computed with the
        // flat slope overshoots by that ratio the moment it crosses zero.
        // Taking the steeper of the two generalized derivatives keeps the
        // crossing prediction honest, and at a convex root (a, b >= 0) it
        // coincides with the true derivative.
        const double ga = (a > 0.0 ? std::max(b, 0.0) : 0.0) +
                          (a < 0.0 ? std::max(penalty, std::max(b, 0.0)) : 0.0);
        const double gb = (b > 0.0 ? std::max(a, 0.0) : 0.0) +
                          (b < 0.0 ? std::max(penalty, std::max(a, 0.0)) : 0.0);
        add_direction(*row, k, da, ga);
        add_direction(*row, k, db, gb);
    }
    return best;
}

// plain = phi11*phi22 - phi12^2; guarded clamps the axis curvatures and
// penalizes their negative parts so concave configurations are no longer
// roots. Both forms agree wherever phi11, phi22 >= 0, in particular at any
// discretely convex solution, so the guard changes the Newton path, not the
// answer. The Jacobian returned through `row` belongs to the guarded form.
double ninepoint_eval(const Grid& g, const double* phi, const double* cv, int k,
                      double penalty, double* plain, RowBuf* row) {
    const Stencil& st = g.stencil();
    if (st.axis_u1 < 0 || st.axis_u2 < 0 || st.diag_pp < 0 || st.diag_pm < 0)
        throw SchemeUnavailable("nine-point scheme needs axis and diagonal directions");
    const Diff2 A = second_diff(g, phi, cv, k, st.axis_u1);
    const Diff2 C = second_diff(g, phi, cv, k, st.axis_u2);
    const Diff2 Bp = second_diff(g, phi, cv, k, st.diag_pp);
    const Diff2 Bm = second_diff(g, phi, cv, k, st.diag_pm);
    const double M = 0.5 * (Bp.value - Bm.value);     // phi_12
    const double a = A.value, c = C.value;
    if (plain) *plain = a * c - M * M;
    if (row) {
        // same kink-crossing slope selection as the monotone scheme
        const double ga = (a > 0.0 ? std::max(c, 0.0) : 0.0) +
                          (a < 0.0 ? std::max(penalty, std::max(c, 0.0)) : 0.0);
        const double gc = (c > 0.0 ? std::max(a, 0.0) : 0.0) +
                          (c < 0.0 ? std::max(penalty, std::max(a, 0.0)) : 0.0);
        add_direction(*row, k, A, ga);
        add_direction(*row, k, C, gc);
        add_direction(*row, k, Bp, -M);
        add_direction(*row, k, Bm, M);
    }
    return std::max(a, 0.0) * std::max(c, 0.0) - M * M -
           penalty * (std::max(-a, 0.0) + std::max(-c, 0.0));
}

// res receives the residual the Newton iteration drives (guarded for the
// nine-point scheme); plain, when given, receives the scheme's defining
// residual. The two coincide for the monotone scheme.
void eval_scheme(const Grid& g, const Field& phi, const std::vector<double>& cv,
                 const std::vector<double>& V, Scheme scheme, double penalty,
                 Field& res, Field* plain, std::vector<RowBuf>* rows) {
    const double* pphi = phi.v.data();
    const double* pcv = cv.data();
    parallel_for(g.node_count(), [&](int k) {
        RowBuf* rb = rows ? &(*rows)[static_cast<size_t>(k)] : nullptr;
        if (rb) rb->cnt = 0;
        double op, op_plain;
        if (scheme == Scheme::MonotoneWideStencil) {
            op = monotone_eval(g, pphi, pcv, k, penalty, rb);
            op_plain = op;
        } else {
            op = ninepoint_eval(g, pphi, pcv, k, penalty, &op_plain, rb);
        }
        res[k] = op - V[k];
        if (plain) (*plain)[k] = op_plain - V[k];
    });
}

double sup_norm(const Field& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
}

double median_curvature_scale(const std::vector<double>& V) {
    std::vector<double> vs = V;
    std::nth_element(vs.begin(), vs.begin() + vs.size() / 2, vs.end());
    return std::sqrt(std::max(vs[vs.size() / 2], 1e-8));
}

Field affine_seed(const Grid& g, const DirichletProblem& pb, const std::vector<double>& V) {
    const Polygon& poly = g.polygon();
    Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    for (int i = 0; i < poly.n(); ++i) {
        const Vec2& p = poly.vertex(i);
        const Eigen::Vector3d row(1.0, p.x(), p.y());
        M += row * row.transpose();
        rhs += pb.boundary(i, 0.0, p) * row;
    }
    M.diagonal().array() += 1e-14 * M.trace();
    const Eigen::Vector3d beta = M.ldlt().solve(rhs);

    // strictly convex start: a purely affine field has vanishing second
    // differences and a singular linearization
    const double kappa = median_curvature_scale(V);
    const Vec2 c = poly.centroid();

    Field f(g.node_count());
    for (int k = 0; k < g.node_count(); ++k) {
        const Vec2& x = g.node(k);
        f[k] = beta[0] + beta[1] * x.x() + beta[2] * x.y() + 0.5 * kappa * (x - c).squaredNorm();
    }
    return f;
}

Field initial_field(const Grid& g, const DirichletProblem& pb, const SolveParams& sp,
                    const std::vector<double>& V) {
    switch (sp.init) {
    case SolveParams::Init::UserField:
        if (sp.user_field == nullptr || sp.user_field->size() != g.node_count())
            throw GridMismatch("user init field does not match the grid");
        return *sp.user_field;
    case SolveParams::Init::CoarseGrid: {
        Field f = affine_seed(g, pb, V);
        try {
            const Grid cg = build_grid(g.polygon(), 2.0 * g.h(), g.stencil().width, g.frame());
            SolveParams csp = sp;
            csp.init = SolveParams::Init::AffineFromTrace;
            csp.user_field = nullptr;
            csp.tol = std::max(sp.tol, 1e-6);
            const auto [cphi, crep] = solve(cg, pb, csp);

            // nodes inside a complete coarse cell take the interpolant; the
            // near-boundary collar has none, and seeding it with the affine
            // field would leave second-difference kinks at the seam that throw
            // Newton far outside its basin. Extend harmonically instead:
            // relax the collar against the interpolated bulk and the exact
            // closure values.
            std::vector<uint8_t> covered(static_cast<size_t>(g.node_count()), 0);
            for (int k = 0; k < g.node_count(); ++k)
                if (const auto v = bilinear_value(cg, cphi, g.node(k))) {
                    f[k] = *v;
                    covered[static_cast<size_t>(k)] = 1;
                }
            const auto cv = closure_values(g, pb);
            const Stencil& st = g.stencil();
            for (int sweep = 0; sweep < 200; ++sweep) {
                double change = 0.0;
                for (int k = 0; k < g.node_count(); ++k) {
                    if (covered[static_cast<size_t>(k)]) continue;
                    double wsum = 0.0, vsum = 0.0;
                    for (const int dir : {st.axis_u1, st.axis_u2}) {
                        for (const int sign : {0, 1}) {
                            const Arm& a = g.arm(k, dir, sign);
                            const double w = 1.0 / std::max(a.rho, 1e-12);
                            const double val = a.ref >= 0 ? f[a.ref]
                                                          : cv[static_cast<size_t>(-1 - a.ref)];
                            wsum += w;
                            vsum += w * val;
                        }
                    }
                    const double next = vsum / wsum;
                    change = std::max(change, std::abs(next - f[k]));
                    f[k] = next;
                }
                if (change < 1e-12) break;
            }

            // the interpolant is piecewise linear, so inside coarse cells the
            // fine second differences vanish and the product-form
            // linearization degenerates; restore strict convexity with a small
            // quadratic, which the first Newton sweeps absorb
            const double bump = 0.25 * median_curvature_scale(V);
            const Vec2 c = g.polygon().centroid();
            for (int k = 0; k < g.node_count(); ++k)
                f[k] += 0.5 * bump * (g.node(k) - c).squaredNorm();
        } catch (const Error&) {
            // fall through with the affine seed
        }
        return f;
    }
    case SolveParams::Init::AffineFromTrace:
    default:
        return affine_seed(g, pb, V);
    }
}

} // namespace

DirichletProblem make_gh_problem(const GHParams& params, const BoundaryTrace& trace) {
    DirichletProblem pb;
    pb.geometric = true;
    pb.V = [params](const Vec2& u) { return potential(params, u); };
    pb.boundary = [trace](int edge, double t, const Vec2&) { return trace.edge_value(edge, t); };
    return pb;
}

DirichletProblem make_quadratic_problem(double V0) {
    DirichletProblem pb;
    pb.geometric = false;
    pb.V = [V0](const Vec2&) { return V0; };
    pb.boundary = [](int, double, const Vec2& p) { return 0.5 * p.squaredNorm(); };
    return pb;
}

DirichletProblem make_exp_problem() {
    DirichletProblem pb;
    pb.geometric = false;
    pb.V = [](const Vec2& u) {
        const double r2 = u.squaredNorm();
        return (1.0 + r2) * std::exp(r2);
    };
    pb.boundary = [](int, double, const Vec2& p) { return std::exp(0.5 * p.squaredNorm()); };
    return pb;
}

std::vector<double> closure_values(const Grid& g, const DirichletProblem& pb) {
    std::vector<double> cv(static_cast<size_t>(g.closure_count()));
    for (int i = 0; i < g.closure_count(); ++i) {
        const Closure& c = g.closure(-1 - i);
        cv[static_cast<size_t>(i)] = pb.boundary(c.edge, c.t, c.point);
    }
    return cv;
}

std::vector<double> node_potential(const Grid& g, const DirichletProblem& pb) {
    std::vector<double> V(static_cast<size_t>(g.node_count()));
    parallel_for(g.node_count(), [&](int k) { V[static_cast<size_t>(k)] = pb.V(g.node(k)); });
    return V;
}

Field ma_residual(const Grid& g, const Field& phi, const DirichletProblem& pb,
                  Scheme scheme, double penalty) {
    if (phi.size() != g.node_count()) throw GridMismatch("field size does not match the grid");
    const auto cv = closure_values(g, pb);
    const auto V = node_potential(g, pb);
    Field res(g.node_count());
    Field plain(g.node_count());
    eval_scheme(g, phi, cv, V, scheme, penalty, res, &plain, nullptr);
    return plain;
}

Field ma_residual(const Grid& g, const Field& phi, const GHParams& params,
                  const BoundaryTrace& trace, Scheme scheme) {
    return ma_residual(g, phi, make_gh_problem(params, trace), scheme);
}

double convexity_check(const Grid& g, const Field& phi, const std::vector<double>& cv) {
    double margin = std::numeric_limits<double>::infinity();
    const int D = static_cast<int>(g.stencil().dirs.size());
    for (int k = 0; k < g.node_count(); ++k)
        for (int d = 0; d < D; ++d)
            margin = std::min(margin, second_diff(g, phi.v.data(), cv.data(), k, d).value);
    return margin;
}

double convexity_check(const Grid& g, const Field& phi, const DirichletProblem& pb) {
    return convexity_check(g, phi, closure_values(g, pb));
}

double trace_margin(const Grid& g, const Field& phi, const std::vector<double>& cv) {
    const Stencil& st = g.stencil();
    double margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < g.node_count(); ++k) {
        const double t = second_diff(g, phi.v.data(), cv.data(), k, st.axis_u1).value +
                         second_diff(g, phi.v.data(), cv.data(), k, st.axis_u2).value;
        margin = std::min(margin, t);
    }
    return margin;
}

std::pair<Field, SolveReport> solve(const Grid& g, const DirichletProblem& pb, const SolveParams& sp) {
    if (!(sp.tol > 0.0)) throw PreconditionViolated("solver tol must be positive");
    if (sp.max_iter < 1) throw PreconditionViolated("solver max_iter must be >= 1");
    if (!(sp.damping > 0.0 && sp.damping <= 1.0))
        throw PreconditionViolated("solver damping must lie in (0, 1]");

    const auto t0 = std::chrono::steady_clock::now();
    const int n = g.node_count();
    const auto cv = closure_values(g, pb);
    const auto V = node_potential(g, pb);

    Field phi;
    if (sp.scheme == Scheme::NinePointNewton && sp.init != SolveParams::Init::UserField) {
        // The smooth scheme has a narrow Newton basin on irregular boundary
        // closures; cold starts go through the monotone solution instead.
        SolveParams pre = sp;
        pre.scheme = Scheme::MonotoneWideStencil;
        pre.tol = std::max(sp.tol, 1e-6);
        phi = solve(g, pb, pre).first;
    } else {
        phi = initial_field(g, pb, sp, V);
    }
    Field res(n);
    Field plain(n);
    std::vector<RowBuf> rows(static_cast<size_t>(n));
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::SparseMatrix<double> J(n, n);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;

    SolveReport rep;
    double damp = sp.damping;
    double prev = std::numeric_limits<double>::infinity();
    int decrease_streak = 0;

    for (int it = 0; it <= sp.max_iter; ++it) {
        eval_scheme(g, phi, cv, V, sp.scheme, sp.penalty, res, &plain, &rows);
        const double rnorm = sup_norm(res);       // drives Newton and damping
        const double pnorm = sup_norm(plain);     // the scheme's defining residual
        rep.residual_history.push_back(pnorm);
        rep.final_residual = pnorm;
        rep.iterations = it;

        if (!std::isfinite(rnorm) || !std::isfinite(pnorm))
            throw SingularJacobian("iterate diverged to non-finite values");
        if (rnorm <= sp.tol && pnorm <= sp.tol) {
            rep.converged = true;
            break;
        }
        if (it == sp.max_iter) break;

        if (rnorm > prev) {
            damp = std::max(0.5 * damp, 1.0 / 1024.0);
            decrease_streak = 0;
        } else if (prev != std::numeric_limits<double>::infinity()) {
            // restore gradually: jumping straight back to full steps re-fires
            // the overshoot that forced the damping down in the first place
            if (++decrease_streak >= 3) {
                damp = std::min(sp.damping, 2.0 * damp);
                decrease_streak = 0;
            }
        }
        prev = rnorm;

        trips.clear();
        for (int k = 0; k < n; ++k) {
            const RowBuf& rb = rows[static_cast<size_t>(k)];
            double diag = 0.0;
            for (int s = 0; s < rb.cnt; ++s) {
                if (rb.idx[s] == k) diag = rb.val[s];
                else trips.emplace_back(k, rb.idx[s], rb.val[s]);
            }
            const double reg = 1e-12 * (1.0 + std::abs(V[static_cast<size_t>(k)]));
            if (std::abs(diag) < reg) diag = -reg;    // keep the M-matrix sign
            trips.emplace_back(k, k, diag);
        }
        J.setFromTriplets(trips.begin(), trips.end());
        lu.compute(J);
        if (lu.info() != Eigen::Success)
            throw SingularJacobian("Newton linearization could not be factorized");
        const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(res.v.data(), n);
        const Eigen::VectorXd step = lu.solve(rhs);
        if (!step.allFinite())
            throw SingularJacobian("Newton step is not finite");
        for (int k = 0; k < n; ++k) phi[k] += damp * step[k];
    }

    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.convexity_margin = convexity_check(g, phi, cv);
    if (!rep.converged) {
        char msg[128];
        std::snprintf(msg, sizeof msg, "solver stalled at residual %.3e after %d iterations",
                      rep.final_residual, rep.iterations);
        throw NonConvergence(msg, rep.residual_history);
    }
    return {std::move(phi), rep};
}

std::pair<Field, SolveReport> solve(const Grid& g, const GHParams& params,
                                    const BoundaryTrace& trace, const SolveParams& sp) {
    return solve(g, make_gh_problem(params, trace), sp);
}

} // namespace slpants
