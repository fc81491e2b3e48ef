#include "slpants/decay.hpp"

#include <cmath>

namespace slpants {

DecayFit fit_decay_rate(const std::vector<double>& u1, const std::vector<double>& y1) {
    const size_t n = u1.size();
    if (n != y1.size()) throw PreconditionViolated("sample arrays differ in length");
    if (n < 4) throw WindowTooSmall("decay fit needs at least 4 samples");
    for (double u : u1)
        if (!(u > 0.0)) throw PreconditionViolated("decay fit needs strictly positive u1");

    double sx = 0.0, sy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sx += std::log(u1[i]);
        sy += y1[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = std::log(u1[i]) - mx;
        const double dy = y1[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw WindowTooSmall("samples have no spread in u1");

    const double beta = sxy / sxx;
    if (beta >= 0.0) throw NotDecaying("fitted slope is nonnegative: y1 does not grow toward the edge");

    DecayFit fit;
    fit.lambda = -1.0 / beta;
    fit.intercept = my - beta * mx;
    fit.samples = static_cast<int>(n);
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

DecayFit fit_decay_rate(const EdgeSamples& samples) {
    return fit_decay_rate(samples.u1, samples.y1);
}

RateComparison compare_rates(const EdgeSpectrum& spectrum, const DecayFit& fit,
                             double threshold) {
    if (!(spectrum.lambda > 0.0)) throw PreconditionViolated("spectrum has no positive ground rate");
    if (!(threshold > 0.0)) throw PreconditionViolated("comparison threshold must be positive");

    RateComparison cmp;
    cmp.rel_error = std::abs(fit.lambda - spectrum.lambda) / spectrum.lambda;
    cmp.pass = cmp.rel_error <= threshold;

    for (size_t k = 0; k < spectrum.lambdas.size(); ++k) {
        const double rel = std::abs(fit.lambda - spectrum.lambdas[k]) / spectrum.lambdas[k];
        if (k == 0 || rel < cmp.nearest_rel_error) {
            cmp.nearest_rel_error = rel;
            cmp.nearest_mode = static_cast<int>(k);
        }
    }
    cmp.spectral_match_warning =
        !cmp.pass && cmp.nearest_mode > 0 && cmp.nearest_rel_error <= threshold;
    return cmp;
}

} // namespace slpants
