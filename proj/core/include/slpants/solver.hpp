#pragma once

#include <functional>
#include <limits>
#include <utility>

#include "slpants/grid.hpp"

namespace slpants {

enum class Scheme {
    MonotoneWideStencil,    // min over orthogonal frames of clamped products, penalty form
    // phi11*phi22 - phi12^2 via centered differences. solve() iterates on a
    // convexity-guarded variant with the same convex roots; ma_residual
    // reports the plain form.
    NinePointNewton,
};

// Dirichlet data and right-hand side for det D^2 phi = V on the polygon.
// boundary(edge, t, point) gives the imposed value at a closure point;
// geometric = false marks testing hooks (constant V, manufactured data).
struct DirichletProblem {
    std::function<double(const Vec2&)> V;
    std::function<double(int, double, const Vec2&)> boundary;
    bool geometric = true;
};

DirichletProblem make_gh_problem(const GHParams& params, const BoundaryTrace& trace);
// V == V0, boundary = trace of (u1^2+u2^2)/2; exact discrete fixed point for V0 = 1
DirichletProblem make_quadratic_problem(double V0 = 1.0);
// phi = exp(r^2/2), V = (1+r^2) exp(r^2)
DirichletProblem make_exp_problem();

struct SolveParams {
    Scheme scheme = Scheme::MonotoneWideStencil;
    double tol = 1e-8;              // sup-norm residual target
    int max_iter = 400;
    double damping = 1.0;           // initial Newton step fraction
    double penalty = 1.0;           // negative-part penalty of the monotone scheme

    enum class Init { AffineFromTrace, CoarseGrid, UserField };
    Init init = Init::AffineFromTrace;
    const Field* user_field = nullptr;
};

struct SolveReport {
    bool converged = false;
    int iterations = 0;
    double final_residual = std::numeric_limits<double>::infinity();
    double wall_time_s = 0.0;
    double convexity_margin = 0.0;
    std::vector<double> residual_history;
};

// Dirichlet values bound to every closure point of the grid, in closure order.
std::vector<double> closure_values(const Grid& grid, const DirichletProblem& pb);
std::vector<double> node_potential(const Grid& grid, const DirichletProblem& pb);

// Discrete operator minus V at every interior node.
Field ma_residual(const Grid& grid, const Field& phi, const DirichletProblem& pb,
                  Scheme scheme, double penalty = 1.0);
Field ma_residual(const Grid& grid, const Field& phi, const GHParams& params,
                  const BoundaryTrace& trace, Scheme scheme);

// Damped semismooth Newton. Throws NonConvergence (with residual history) after
// max_iter, SingularJacobian when the linearization cannot be factorized.
std::pair<Field, SolveReport> solve(const Grid& grid, const DirichletProblem& pb,
                                    const SolveParams& sp);
std::pair<Field, SolveReport> solve(const Grid& grid, const GHParams& params,
                                    const BoundaryTrace& trace, const SolveParams& sp);

// Min over nodes and stencil directions of the normalized second difference.
// Positive margin certifies discrete convexity along the stencil.
double convexity_check(const Grid& grid, const Field& phi, const std::vector<double>& closure_vals);
double convexity_check(const Grid& grid, const Field& phi, const DirichletProblem& pb);

// Min over nodes of the discrete Laplacian (trace of D^2), same closure rules.
double trace_margin(const Grid& grid, const Field& phi, const std::vector<double>& closure_vals);

} // namespace slpants
