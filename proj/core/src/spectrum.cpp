#include "slpants/spectrum.hpp"

#include <algorithm>
#include <cmath>

namespace slpants {

namespace {

// Solves T x = b for the symmetric positive definite tridiagonal T given by
// its LDL^T factors (Thomas algorithm, precomputed).
struct Tridiag {
    std::vector<double> diag, off;      // T itself
    std::vector<double> d, l;           // factors: T = L D L^T

    explicit Tridiag(std::vector<double> dg, std::vector<double> of)
        : diag(std::move(dg)), off(std::move(of)) {
        const size_t n = diag.size();
        d.resize(n);
        l.assign(n, 0.0);
        d[0] = diag[0];
        for (size_t i = 1; i < n; ++i) {
            if (!(d[i - 1] > 0.0)) throw EigenFailure("edge operator is not positive definite");
            l[i] = off[i - 1] / d[i - 1];
            d[i] = diag[i] - l[i] * off[i - 1];
        }
        if (!(d[n - 1] > 0.0)) throw EigenFailure("edge operator is not positive definite");
    }

    void solve(std::vector<double>& x) const {
        const size_t n = d.size();
        for (size_t i = 1; i < n; ++i) x[i] -= l[i] * x[i - 1];
        for (size_t i = 0; i < n; ++i) x[i] /= d[i];
        for (size_t i = n - 1; i > 0; --i) x[i - 1] -= l[i] * x[i];
    }

    void multiply(const std::vector<double>& x, std::vector<double>& out) const {
        const size_t n = diag.size();
        for (size_t i = 0; i < n; ++i) {
            double v = diag[i] * x[i];
            if (i > 0) v += off[i - 1] * x[i - 1];
            if (i + 1 < n) v += off[i] * x[i + 1];
            out[i] = v;
        }
    }
};

double dot_weighted(const std::vector<double>& a, const std::vector<double>& b,
                    const std::vector<double>& w) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i] * w[i];
    return s;
}

} // namespace

EdgeSpectrum edge_eigen(const std::function<double(double)>& V, double ell, int m) {
    if (m < 16) throw PreconditionViolated("edge eigenproblem needs m >= 16");
    if (!(ell > 0.0)) throw PreconditionViolated("edge length must be positive");

    const double delta = ell / m;
    std::vector<double> w(static_cast<size_t>(m));    // V at half-offset samples
    for (int j = 0; j < m; ++j) {
        const double vj = V((j + 0.5) * delta);
        if (!(vj > 0.0) || !std::isfinite(vj))
            throw PreconditionViolated("edge coefficient V must be positive and finite");
        w[static_cast<size_t>(j)] = vj;
    }

    // -a'' with Dirichlet ends: antisymmetric ghost reflection about the
    // endpoints gives 3/delta^2 in the corner entries, and the discrete
    // ground pair of the constant-coefficient problem is exact in closed form
    std::vector<double> diag(static_cast<size_t>(m), 2.0 / (delta * delta));
    diag.front() = diag.back() = 3.0 / (delta * delta);
    std::vector<double> off(static_cast<size_t>(m - 1), -1.0 / (delta * delta));
    const Tridiag A(std::move(diag), std::move(off));

    EdgeSpectrum out;
    out.m = m;
    out.ell = ell;

    const int modes = std::min(kSpectrumModes, m);
    std::vector<std::vector<double>> vecs;
    std::vector<double> x(static_cast<size_t>(m)), Ax(static_cast<size_t>(m));

    for (int mode = 0; mode < modes; ++mode) {
        // all-ones targets the ground state; higher modes need a seed with
        // the right sign structure (an even seed never finds the odd modes)
        if (mode == 0) {
            std::fill(x.begin(), x.end(), 1.0);
        } else {
            for (int j = 0; j < m; ++j)
                x[static_cast<size_t>(j)] =
                    std::sin((mode + 1) * M_PI * (j + 0.5) / m);
        }
        double mu_prev = 0.0;
        bool settled = false;
        for (int it = 0; it < 2000; ++it) {
            // deflate against converged modes in the V-weighted inner product
            for (const auto& v : vecs) {
                const double c = dot_weighted(x, v, w) / dot_weighted(v, v, w);
                for (size_t i = 0; i < x.size(); ++i) x[i] -= c * v[i];
            }
            for (size_t i = 0; i < x.size(); ++i) x[i] *= w[i];    // x <- V x
            A.solve(x);                                            // x <- A^{-1} V x
            double nrm = 0.0;
            for (double v : x) nrm = std::max(nrm, std::abs(v));
            if (!(nrm > 0.0)) throw EigenFailure("inverse iteration collapsed to zero");
            for (double& v : x) v /= nrm;

            A.multiply(x, Ax);
            double num = 0.0;
            for (size_t i = 0; i < x.size(); ++i) num += x[i] * Ax[i];
            const double mu = num / dot_weighted(x, x, w);         // Rayleigh quotient
            if (it > 2 && std::abs(mu - mu_prev) <= 1e-13 * std::abs(mu)) {
                mu_prev = mu;
                settled = true;
                break;
            }
            mu_prev = mu;
        }
        if (!settled) throw EigenFailure("inverse iteration did not settle for mode " +
                                         std::to_string(mode));
        if (!(mu_prev > 0.0))
            throw EigenFailure("edge eigenvalue is not positive");
        out.lambdas.push_back(std::sqrt(mu_prev));
        vecs.push_back(x);
    }

    // ground pair: positive, sup-normalized
    std::vector<double>& a = vecs.front();
    double mx = 0.0;
    for (double v : a)
        if (std::abs(v) > std::abs(mx)) mx = v;
    for (double& v : a) v /= mx;
    for (double v : a)
        if (v < -1e-8)
            throw NonPositiveGroundState("ground eigenfunction changes sign");
    for (double& v : a) v = std::max(v, 0.0);

    std::sort(out.lambdas.begin(), out.lambdas.end());
    out.lambda = out.lambdas.front();
    out.a = std::move(a);
    return out;
}

EdgeSpectrum edge_eigen(const GHParams& params, int edge, int m) {
    const EdgeFrame frame(params.polygon, edge);
    EdgeSpectrum out = edge_eigen(
        [&](double s) { return potential(params, frame.to_world(Vec2(0.0, s))); },
        frame.length(), m);
    out.edge = frame.edge();
    return out;
}

} // namespace slpants
