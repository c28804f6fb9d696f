#pragma once

#include <vector>

#include "charm/orbit.hpp"

namespace charm {

struct GreenEvaluation {
    Complex value{0.0, 0.0};
    double logAbs = 0.0;  // ln|g| = -G
    double tailBound = 0.0;
    int shellsUsed = 0;
    bool degraded = false;
};

struct CriticalPoint {
    int semicircleIndex = 0;
    Complex location{0.0, 0.0};
    double greenValueAt = 0.0;  // |g(location, zStar)| for the zStar in force
};

/// Orbit of zStar plus the data needed to evaluate g(., zStar) repeatedly.
/// Read-only after construction; safe to share across threads.
class GreenContext {
public:
    GreenContext(const OrbitAccumulator& acc, Complex zStar);

    const OrbitAccumulator& accumulator() const { return *acc_; }
    Complex zStar() const { return zStar_; }
    const std::vector<Complex>& orbitPoints() const { return orbit_; }
    const std::vector<std::size_t>& shellOffsets() const { return offsets_; }

private:
    const OrbitAccumulator* acc_;
    Complex zStar_;
    std::vector<Complex> orbit_;         // gamma(zStar), shells flattened
    std::vector<std::size_t> offsets_;   // shell start indices, size shells+1
};

/// Truncated Blaschke product over the enumerated orbit, computed in
/// log-space with compensated sums. Exactly 0 on the truncated orbit.
GreenEvaluation evalG(const GreenContext& ctx, Complex z);
GreenEvaluation evalG(const OrbitAccumulator& acc, Complex z, Complex zStar);

/// The log-derivative series sum S(z) = sum gamma'(z) / ((gamma(z)-zStar)(gamma(z)-conj zStar));
/// g' = (zStar - conj zStar) * g * S.
Evaluated<Complex> evalLogDerivativeSum(const OrbitAccumulator& acc, Complex z, Complex zStar);

/// g'(z, zStar) via the term-by-term series, with the product-rule branch at
/// exact zeros of g (z on the truncated orbit).
Evaluated<Complex> evalGPrime(const GreenContext& ctx, Complex z);
Evaluated<Complex> evalGPrime(const OrbitAccumulator& acc, Complex z, Complex zStar);

/// One critical point of g'(., zStar) per semicircle arc k != 0, located as
/// the interior minimum of |g| along the arc and polished on the tangential
/// derivative. Throws SearchError (with a sampling dump) if no interior
/// minimum is bracketed.
std::vector<CriticalPoint> findCriticalPoints(const OrbitAccumulator& acc, Complex zStar);
std::vector<CriticalPoint> findCriticalPoints(const GreenContext& ctx);

struct WidomProduct {
    double product = 1.0;  // prod |g(c_k, zStar)|
    double sum = 0.0;      // sum G(c_k) = -sum ln |g(c_k, zStar)|
};

WidomProduct widomProduct(const std::vector<CriticalPoint>& points);

/// The bounded-characteristic certificate for g',
///   f(z) = 2 Im zStar * |B(z)/g'(z,zStar)| * sum |gamma'(z)|/|gamma(z)-conj zStar|^2,
/// where B is the Blaschke product over the orbits of the critical points.
/// Must be <= 1 in the upper half plane, with equality on the real boundary
/// of the fundamental domain of a finitely generated group.
Evaluated<double> certificateF(const GreenContext& ctx, Complex z,
                               const std::vector<CriticalPoint>& points);

/// log |B(z)| for the Blaschke product over the enumerated orbits of the
/// given points (modulus only; the unimodular constants drop out).
Evaluated<double> logAbsCriticalBlaschke(const OrbitAccumulator& acc, Complex z,
                                         const std::vector<CriticalPoint>& points);

}  // namespace charm
