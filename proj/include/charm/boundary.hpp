#pragma once

#include <vector>

#include "charm/orbit.hpp"

namespace charm {

/// One Blaschke factor (z - w)/(z - conj w), named by its zero w in C_+.
struct BlaschkeFactor {
    Complex zero{0.0, 1.0};
};

struct AngularDerivativeResult {
    double x = 0.0;
    Complex limitValue{1.0, 0.0};      // w(x), unimodular
    double derivativeAbs = 0.0;        // |w'(x)| from the factor formulas
    double finiteDifferenceAbs = 0.0;  // Richardson nontangential estimate
    std::vector<std::pair<Complex, Complex>> approachSamples;  // (z, w(z)) up the ray
};

/// Carathéodory--Julia / Frostman identity for a finite Blaschke product:
/// |w'(x)| = sum |B_k'(x)|, cross-checked against the nontangential finite
/// difference along x + iy (Richardson over y = 1e-2, 1e-3, 1e-4). Throws
/// IdentityViolation when the two paths disagree beyond 1e-5 relative.
AngularDerivativeResult angularDerivative(const std::vector<BlaschkeFactor>& product, double x);

/// Boundary series |g'(x, zStar)| = 2 Im zStar sum |gamma'(x)|/|gamma(x)-conj zStar|^2,
/// for real x in a gap of the truncated configuration.
Evaluated<double> boundaryGPrime(const OrbitAccumulator& acc, Complex zStar, double x);

/// Boundary series m'(x) = sum gamma'(x) (1 + 1/gamma(x)^2), positive.
Evaluated<double> boundaryMPrime(const OrbitAccumulator& acc, double x);

struct LogPoissonCheck {
    double lhs = 0.0;  // Poisson integral of log of the boundary series
    double rhs = 0.0;  // log of the series at z
    double quadError = 0.0;
};

/// The log-subharmonicity estimate: Poisson integral of
/// log sum |gamma'(x)|/|gamma(x)-conj zStar|^2 dominates the log of the same
/// series at z.
LogPoissonCheck logPoissonCheck(const OrbitAccumulator& acc, Complex zStar, Complex z);

struct DensityTriple {
    double x = 0.0;
    double rho = 0.0;       // sum gamma'(x)
    double rhoI = 0.0;      // sum gamma'(x) / (1 + gamma(x)^2)
    double phiAbsSq = 0.0;  // rhoI / rho <= 1
};

/// The densities of the outer function phi; verifies the sandwich
/// 1/(1+x^2) <= rhoI <= rho internally.
DensityTriple densityTriple(const OrbitAccumulator& acc, double x);

/// Interior values of the outer function: log|phi(z)| as the Poisson integral
/// of (1/2) log(rhoI/rho); carries the quadrature error.
Evaluated<double> outerPhiLogAbs(const OrbitAccumulator& acc, Complex z);

/// Real poles of the enumerated elements (orbit of infinity) within [lo, hi];
/// used to subdivide boundary quadratures.
std::vector<double> realPolesWithin(const OrbitAccumulator& acc, double lo, double hi);

}  // namespace charm
