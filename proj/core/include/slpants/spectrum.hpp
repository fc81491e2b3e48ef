#pragma once

#include <functional>

#include "slpants/geometry.hpp"

namespace slpants {

// Ground data of the edge problem -a'' = lambda^2 V(s) a on (0, ell) with
// Dirichlet ends: the decay rate of the corresponding cylindrical end.
// Sample points sit at s_j = (j + 1/2) * ell/m, keeping clear of endpoint
// singularities of V; `a` is the ground eigenfunction there, normalized to
// sup a = 1 and positive. `lambdas` holds the first few rates ascending
// (lambdas[0] == lambda) for nearest-mode reporting.
struct EdgeSpectrum {
    int edge = -1;
    double lambda = 0.0;
    std::vector<double> a;
    int m = 0;
    double ell = 0.0;
    std::vector<double> lambdas;
};

inline constexpr int kSpectrumModes = 5;

// V sampled along a general coefficient function on (0, ell). Half-offset
// second differences; inverse-power iteration with deflation on the
// generalized symmetric problem. Throws EigenFailure when the iteration
// stalls, NonPositiveGroundState if the ground eigenfunction changes sign.
EdgeSpectrum edge_eigen(const std::function<double(double)>& V, double ell, int m);

// V restricted to edge i of the polygon (singular like 1/(2 d) at the
// endpoints; the half-offset grid never evaluates there).
EdgeSpectrum edge_eigen(const GHParams& params, int edge, int m);

} // namespace slpants
