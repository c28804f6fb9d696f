#include "charm/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace charm {

namespace {

constexpr double kGoldenRatio = 0.6180339887498949;

// Unimodular constant making the factor positive at zStar; C_identity = 1.
Complex blaschkeConstant(Complex w, Complex zStar) {
    if (w == zStar) return {1.0, 0.0};
    const Complex num = zStar - w;
    const Complex den = zStar - std::conj(w);
    return std::abs(num / den) * (den / num);
}

}  // namespace

GreenContext::GreenContext(const OrbitAccumulator& acc, Complex zStar)
    : acc_(&acc), zStar_(zStar) {
    offsets_.push_back(0);
    orbit_.reserve(acc.elementCount());
    for (const OrbitShell& shell : acc.shells()) {
        for (const Mat2& m : shell.mats) orbit_.push_back(m.applyUpper(zStar));
        offsets_.push_back(orbit_.size());
    }
}

GreenEvaluation evalG(const GreenContext& ctx, Complex z) {
    KahanSum logAbs;
    KahanSum argSum;
    bool zeroHit = false;
    double lastIncrement = 0.0;
    const auto& offsets = ctx.shellOffsets();
    const auto& orbit = ctx.orbitPoints();
    const Complex zStar = ctx.zStar();

    for (std::size_t L = 0; L + 1 < offsets.size(); ++L) {
        KahanSum shellLog;
        for (std::size_t e = offsets[L]; e < offsets[L + 1]; ++e) {
            const Complex w = orbit[e];
            const Complex num = z - w;
            if (num == Complex{0.0, 0.0}) {
                zeroHit = true;
                continue;
            }
            const Complex factor = num / (z - std::conj(w)) * blaschkeConstant(w, zStar);
            shellLog.add(std::log(std::abs(factor)));
            argSum.add(std::arg(factor));
        }
        logAbs.add(shellLog.value());
        lastIncrement = std::abs(shellLog.value());
    }

    GreenEvaluation out;
    out.shellsUsed = static_cast<int>(offsets.size()) - 1;
    if (out.shellsUsed > 1) {
        // Truncation estimate from the last shell, floored at the rounding
        // noise of an n-factor compensated log-product.
        const double roundingFloor = 8.0 * std::numeric_limits<double>::epsilon() *
                                     std::sqrt(static_cast<double>(orbit.size()));
        out.tailBound = std::max(OrbitAccumulator::kTailSafetyFactor * lastIncrement,
                                 roundingFloor);
    }
    out.degraded = out.tailBound > ctx.accumulator().policy().targetTail;
    if (zeroHit) {
        out.value = {0.0, 0.0};
        out.logAbs = -std::numeric_limits<double>::infinity();
        return out;
    }
    out.logAbs = logAbs.value();
    const double arg = std::remainder(argSum.value(), 2.0 * std::numbers::pi);
    out.value = std::exp(Complex{out.logAbs, arg});
    return out;
}

GreenEvaluation evalG(const OrbitAccumulator& acc, Complex z, Complex zStar) {
    return evalG(GreenContext(acc, zStar), z);
}

Evaluated<Complex> evalLogDerivativeSum(const OrbitAccumulator& acc, Complex z, Complex zStar) {
    const Complex zStarBar = std::conj(zStar);
    return shellSum(acc, acc.policy().targetTail, [&](const Mat2& m) {
        const Complex den = m.c * z + m.d;
        const Complex gz = (m.a * z + m.b) / den;
        const Complex gprime = 1.0 / (den * den);
        return gprime / ((gz - zStar) * (gz - zStarBar));
    });
}

Evaluated<Complex> evalGPrime(const GreenContext& ctx, Complex z) {
    const OrbitAccumulator& acc = ctx.accumulator();
    const Complex zStar = ctx.zStar();
    const Complex twoImZStar = zStar - std::conj(zStar);

    // z on the truncated orbit: the product rule collapses to the single
    // nonvanishing term b'_g0(z) * prod_{e != e0} b_e(z).
    const auto& orbit = ctx.orbitPoints();
    for (std::size_t e0 = 0; e0 < orbit.size(); ++e0) {
        if (z != orbit[e0]) continue;
        KahanSum logAbs, argSum;
        for (std::size_t e = 0; e < orbit.size(); ++e) {
            if (e == e0) continue;
            const Complex w = orbit[e];
            const Complex factor = (z - w) / (z - std::conj(w)) * blaschkeConstant(w, zStar);
            logAbs.add(std::log(std::abs(factor)));
            argSum.add(std::arg(factor));
        }
        const Complex w0 = orbit[e0];
        const Complex db = (w0 - std::conj(w0)) / ((z - std::conj(w0)) * (z - std::conj(w0))) *
                           blaschkeConstant(w0, zStar);
        Evaluated<Complex> out;
        out.value = db * std::exp(Complex{logAbs.value(),
                                          std::remainder(argSum.value(), 2.0 * std::numbers::pi)});
        out.shells = static_cast<int>(acc.shells().size());
        out.tail = acc.tailBound();
        out.degraded = out.tail > acc.policy().targetTail;
        return out;
    }

    const GreenEvaluation g = evalG(ctx, z);
    const Evaluated<Complex> sum = evalLogDerivativeSum(acc, z, zStar);
    Evaluated<Complex> out;
    out.value = twoImZStar * g.value * sum.value;
    out.shells = sum.shells;
    out.tail = std::abs(twoImZStar) *
               (std::abs(g.value) * sum.tail + std::abs(sum.value) * g.tailBound);
    out.degraded = g.degraded || sum.degraded;
    return out;
}

Evaluated<Complex> evalGPrime(const OrbitAccumulator& acc, Complex z, Complex zStar) {
    return evalGPrime(GreenContext(acc, zStar), z);
}

namespace {

// d/dtheta of ln|g(z(theta))| along the arc, computable without g itself.
double tangentialLogDerivative(const GreenContext& ctx, const Semicircle& s, double theta) {
    const Complex z = s.arcPoint(theta);
    const Evaluated<Complex> sum =
        evalLogDerivativeSum(ctx.accumulator(), z, ctx.zStar());
    const Complex zPrime = Complex{0.0, s.radius} * std::exp(Complex{0.0, theta});
    const Complex twoImZStar = ctx.zStar() - std::conj(ctx.zStar());
    return (twoImZStar * sum.value * zPrime).real();
}

CriticalPoint locateOnArc(const GreenContext& ctx, const Semicircle& s) {
    constexpr int kScan = 64;
    const double pi = std::numbers::pi;

    std::vector<double> thetas(kScan), logAbsSamples(kScan);
    int best = -1;
    double bestVal = std::numeric_limits<double>::infinity();
    for (int j = 0; j < kScan; ++j) {
        const double t = pi * (j + 0.5) / kScan;
        thetas[j] = t;
        logAbsSamples[j] = evalG(ctx, s.arcPoint(t)).logAbs;
        if (logAbsSamples[j] < bestVal) {
            bestVal = logAbsSamples[j];
            best = j;
        }
    }
    if (best == 0 || best == kScan - 1) {
        std::ostringstream os;
        os << "no interior minimum of |g| bracketed on semicircle " << s.index
           << " (zStar = " << ctx.zStar() << "); scan of ln|g| over theta in (0,pi):";
        for (int j = 0; j < kScan; j += 8) os << " [" << thetas[j] << ", " << logAbsSamples[j] << "]";
        throw SearchError(os.str());
    }

    // Golden-section on ln|g|, bracketed by the scan neighbours.
    double lo = thetas[best - 1], hi = thetas[best + 1];
    double x1 = hi - kGoldenRatio * (hi - lo);
    double x2 = lo + kGoldenRatio * (hi - lo);
    double f1 = evalG(ctx, s.arcPoint(x1)).logAbs;
    double f2 = evalG(ctx, s.arcPoint(x2)).logAbs;
    while (hi - lo > 1e-4) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGoldenRatio * (hi - lo);
            f1 = evalG(ctx, s.arcPoint(x1)).logAbs;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGoldenRatio * (hi - lo);
            f2 = evalG(ctx, s.arcPoint(x2)).logAbs;
        }
    }

    // Polish on the tangential derivative; it changes sign across the minimum.
    double a = std::max(thetas[best - 1], lo - 8.0 * (hi - lo));
    double b = std::min(thetas[best + 1], hi + 8.0 * (hi - lo));
    double fa = tangentialLogDerivative(ctx, s, a);
    double fb = tangentialLogDerivative(ctx, s, b);
    if (!(fa < 0.0 && fb > 0.0)) {
        a = thetas[best - 1];
        b = thetas[best + 1];
        fa = tangentialLogDerivative(ctx, s, a);
        fb = tangentialLogDerivative(ctx, s, b);
    }
    if (!(fa < 0.0 && fb > 0.0)) {
        std::ostringstream os;
        os << "tangential derivative does not change sign around the minimum on semicircle "
           << s.index << ": phi(" << a << ") = " << fa << ", phi(" << b << ") = " << fb;
        throw SearchError(os.str());
    }
    for (int iter = 0; iter < 200 && b - a > 1e-15; ++iter) {
        const double mid = 0.5 * (a + b);
        const double fm = tangentialLogDerivative(ctx, s, mid);
        if (fm < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }

    CriticalPoint cp;
    cp.semicircleIndex = s.index;
    const double thetaC = 0.5 * (a + b);
    cp.location = s.arcPoint(thetaC);
    cp.greenValueAt = std::exp(evalG(ctx, cp.location).logAbs);
    return cp;
}

}  // namespace

std::vector<CriticalPoint> findCriticalPoints(const GreenContext& ctx) {
    std::vector<CriticalPoint> out;
    for (const Semicircle& s : ctx.accumulator().config().semicircles()) {
        if (s.index == 0) continue;
        out.push_back(locateOnArc(ctx, s));
    }
    return out;
}

std::vector<CriticalPoint> findCriticalPoints(const OrbitAccumulator& acc, Complex zStar) {
    return findCriticalPoints(GreenContext(acc, zStar));
}

WidomProduct widomProduct(const std::vector<CriticalPoint>& points) {
    WidomProduct out;
    KahanSum logSum;
    for (const CriticalPoint& p : points) logSum.add(std::log(p.greenValueAt));
    out.sum = -logSum.value();
    out.product = std::exp(logSum.value());
    return out;
}

Evaluated<double> logAbsCriticalBlaschke(const OrbitAccumulator& acc, Complex z,
                                         const std::vector<CriticalPoint>& points) {
    Evaluated<Complex> sum = shellSum(acc, acc.policy().targetTail, [&](const Mat2& m) {
        const Complex gz = m.apply(z);
        KahanSum part;
        for (const CriticalPoint& p : points)
            part.add(std::log(std::abs((gz - p.location) / (gz - std::conj(p.location)))));
        return Complex{part.value(), 0.0};
    });
    return {sum.value.real(), sum.tail, sum.shells, sum.degraded};
}

Evaluated<double> certificateF(const GreenContext& ctx, Complex z,
                               const std::vector<CriticalPoint>& points) {
    const OrbitAccumulator& acc = ctx.accumulator();
    const Complex zStar = ctx.zStar();
    const Complex zStarBar = std::conj(zStar);

    // One pass: the absolute series, the log-derivative series, and log|B|.
    KahanSum absSeries;
    KahanComplex logDerivSeries;
    KahanSum logAbsB;
    acc.forEachShell(
        [&](const Mat2& m) {
            const Complex den = m.c * z + m.d;
            const Complex gz = (m.a * z + m.b) / den;
            const Complex gprime = 1.0 / (den * den);
            absSeries.add(std::abs(gprime) / std::norm(gz - zStarBar));
            logDerivSeries.add(gprime / ((gz - zStar) * (gz - zStarBar)));
            for (const CriticalPoint& p : points)
                logAbsB.add(std::log(std::abs((gz - p.location) / (gz - std::conj(p.location)))));
        },
        [](int) {});

    const GreenEvaluation g = evalG(ctx, z);
    const double twoImZStar = 2.0 * zStar.imag();
    const double logAbsGPrime = std::log(twoImZStar) + g.logAbs +
                                std::log(std::abs(logDerivSeries.value()));

    Evaluated<double> out;
    out.value = twoImZStar * std::exp(logAbsB.value() - logAbsGPrime) * absSeries.value();
    out.shells = static_cast<int>(acc.shells().size());
    out.tail = acc.tailBound();
    out.degraded = out.tail > acc.policy().targetTail;
    return out;
}

}  // namespace charm
