#pragma once

#include "slpants/reconstruction.hpp"
#include "slpants/spectrum.hpp"

namespace slpants {

// Least-squares fit of y1 = intercept + beta * ln u1 with lambda = -1/beta:
// the measured decay rate of a cylindrical end (u1 ~ e^{-lambda y1}).
struct DecayFit {
    double lambda = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int samples = 0;
};

// Throws WindowTooSmall (fewer than 4 samples or no spread in u1),
// NotDecaying (fitted slope beta >= 0, i.e. y1 does not grow toward the edge).
DecayFit fit_decay_rate(const std::vector<double>& u1, const std::vector<double>& y1);
DecayFit fit_decay_rate(const EdgeSamples& samples);

// Measured rate vs the edge spectrum. `pass` compares the ground rate at the
// threshold; when that fails but the fit matches one of the computed higher
// modes, `spectral_match_warning` marks the run as explained-but-unexpected.
struct RateComparison {
    double rel_error = 0.0;         // against the ground rate
    bool pass = false;
    int nearest_mode = 0;           // index into spectrum.lambdas
    double nearest_rel_error = 0.0;
    bool spectral_match_warning = false;
};

RateComparison compare_rates(const EdgeSpectrum& spectrum, const DecayFit& fit,
                             double threshold);

} // namespace slpants
