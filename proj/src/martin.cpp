#include "charm/martin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace charm {

namespace {

constexpr double kGoldenRatio = 0.6180339887498949;
constexpr double kPoleRadius = 1e-8;

void guardPole(const Mat2& m, Complex z) {
    // Orbit points of infinity and 0 are the real poles/zeros of gamma;
    // refuse evaluations inside the 1e-8 proximity radius.
    const Complex den = m.c * z + m.d;
    if (m.c != 0.0 && std::abs(den) < kPoleRadius * std::abs(m.c))
        throw PoleError("martin series: z within 1e-8 of an orbit point of infinity");
    const Complex num = m.a * z + m.b;
    if (m.a != 0.0 && std::abs(num) < kPoleRadius * std::abs(m.a))
        throw PoleError("martin series: z within 1e-8 of an orbit point of 0");
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::Fails: return "fails";
        default: return "inconclusive";
    }
}

Verdict trendVerdict(const std::vector<double>& increments, double* fittedRatio) {
    if (fittedRatio) *fittedRatio = 0.0;
    std::vector<double> tail;
    for (double x : increments)
        if (x > 0.0) tail.push_back(x);
    // A decay fit needs three live increments; below that the finite partial
    // sum is the whole evidence.
    if (tail.size() < 3) return Verdict::Holds;
    const std::size_t n = std::min<std::size_t>(3, tail.size());
    // Log-linear fit of the last n increments; with n <= 3 the slope is the
    // mean of the successive log-ratios.
    KahanSum logRatio;
    for (std::size_t i = tail.size() - n; i + 1 < tail.size(); ++i)
        logRatio.add(std::log(tail[i + 1] / tail[i]));
    const double ratio = std::exp(logRatio.value() / static_cast<double>(n - 1));
    if (fittedRatio) *fittedRatio = ratio;
    if (ratio < 0.9) return Verdict::Holds;
    if (ratio > 1.1) return Verdict::Fails;
    return Verdict::Inconclusive;
}

MartinContext::MartinContext(const OrbitAccumulator& acc) : acc_(&acc) {
    const Complex i{0.0, 1.0};
    offsets_.push_back(0);
    reGammaI_.reserve(acc.elementCount());
    reInvGammaI_.reserve(acc.elementCount());
    for (const OrbitShell& shell : acc.shells()) {
        for (const Mat2& m : shell.mats) {
            const Complex gi = m.apply(i);
            reGammaI_.push_back(gi.real());
            reInvGammaI_.push_back((1.0 / gi).real());
        }
        offsets_.push_back(reGammaI_.size());
    }
}

namespace {

template <class TermFn>
Evaluated<Complex> martinShellSum(const MartinContext& ctx, TermFn&& term) {
    const auto& offsets = ctx.shellOffsets();
    const auto& shells = ctx.accumulator().shells();
    KahanComplex total;
    double lastIncrement = 0.0;
    for (std::size_t L = 0; L < shells.size(); ++L) {
        KahanComplex part;
        std::size_t e = offsets[L];
        for (const Mat2& m : shells[L].mats) part.add(term(m, e++));
        total.add(part.value());
        lastIncrement = std::abs(part.value());
    }
    Evaluated<Complex> out;
    out.value = total.value();
    out.shells = static_cast<int>(shells.size());
    out.tail = (shells.size() > 1) ? OrbitAccumulator::kTailSafetyFactor * lastIncrement : 0.0;
    out.degraded = out.tail > ctx.accumulator().policy().targetTail;
    return out;
}

}  // namespace

Evaluated<Complex> evalMPlus(const MartinContext& ctx, Complex z, double* imOverIm) {
    KahanSum absSeries;
    auto out = martinShellSum(ctx, [&](const Mat2& m, std::size_t e) {
        guardPole(m, z);
        const Complex den = m.c * z + m.d;
        const Complex gz = (m.a * z + m.b) / den;
        absSeries.add(1.0 / std::norm(den));
        return gz - ctx.reGammaI()[e];
    });
    if (imOverIm) *imOverIm = absSeries.value();
    return out;
}

Evaluated<Complex> evalMMinus(const MartinContext& ctx, Complex z, double* imOverIm) {
    KahanSum absSeries;
    auto out = martinShellSum(ctx, [&](const Mat2& m, std::size_t e) {
        guardPole(m, z);
        const Complex num = m.a * z + m.b;
        const Complex den = m.c * z + m.d;
        const Complex gz = num / den;
        absSeries.add(1.0 / std::norm(num));
        return -(1.0 / gz - ctx.reInvGammaI()[e]);
    });
    if (imOverIm) *imOverIm = absSeries.value();
    return out;
}

MartinEvaluation evalM(const MartinContext& ctx, Complex z) {
    KahanComplex mPrime;
    KahanSum imOverIm;
    const auto sum = martinShellSum(ctx, [&](const Mat2& m, std::size_t e) {
        guardPole(m, z);
        const Complex num = m.a * z + m.b;
        const Complex den = m.c * z + m.d;
        const Complex gz = num / den;
        const Complex gprime = 1.0 / (den * den);
        mPrime.add(gprime * (1.0 + 1.0 / (gz * gz)));
        imOverIm.add(std::abs(gprime) * (1.0 + 1.0 / std::norm(gz)));
        return (gz - 1.0 / gz) - (ctx.reGammaI()[e] - ctx.reInvGammaI()[e]);
    });
    MartinEvaluation out;
    out.m = sum.value;
    out.mPrime = mPrime.value();
    out.imOverIm = imOverIm.value();
    out.tailBound = sum.tail;
    out.shellsUsed = sum.shells;
    out.degraded = sum.degraded;
    return out;
}

MartinEvaluation evalM(const OrbitAccumulator& acc, Complex z) {
    return evalM(MartinContext(acc), z);
}

namespace {

// d/dtheta of Im m along the arc.
double tangentialImDerivative(const MartinContext& ctx, const Semicircle& s, double theta) {
    const Complex z = s.arcPoint(theta);
    const Complex zPrime = Complex{0.0, s.radius} * std::exp(Complex{0.0, theta});
    return (evalM(ctx, z).mPrime * zPrime).imag();
}

CriticalPoint locateMartinOnArc(const MartinContext& ctx, const Semicircle& s) {
    constexpr int kScan = 64;
    const double pi = std::numbers::pi;

    std::vector<double> thetas(kScan), imSamples(kScan);
    int best = -1;
    double bestVal = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < kScan; ++j) {
        const double t = pi * (j + 0.5) / kScan;
        thetas[j] = t;
        imSamples[j] = evalM(ctx, s.arcPoint(t)).m.imag();
        if (imSamples[j] > bestVal) {
            bestVal = imSamples[j];
            best = j;
        }
    }
    if (best == 0 || best == kScan - 1) {
        std::ostringstream os;
        os << "no interior maximum of Im m bracketed on semicircle " << s.index
           << "; scan over theta in (0,pi):";
        for (int j = 0; j < kScan; j += 8) os << " [" << thetas[j] << ", " << imSamples[j] << "]";
        throw SearchError(os.str());
    }

    double lo = thetas[best - 1], hi = thetas[best + 1];
    double x1 = hi - kGoldenRatio * (hi - lo);
    double x2 = lo + kGoldenRatio * (hi - lo);
    double f1 = evalM(ctx, s.arcPoint(x1)).m.imag();
    double f2 = evalM(ctx, s.arcPoint(x2)).m.imag();
    while (hi - lo > 1e-4) {
        if (f1 > f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGoldenRatio * (hi - lo);
            f1 = evalM(ctx, s.arcPoint(x1)).m.imag();
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGoldenRatio * (hi - lo);
            f2 = evalM(ctx, s.arcPoint(x2)).m.imag();
        }
    }

    double a = thetas[best - 1], b = thetas[best + 1];
    double fa = tangentialImDerivative(ctx, s, a);
    double fb = tangentialImDerivative(ctx, s, b);
    if (!(fa > 0.0 && fb < 0.0)) {
        std::ostringstream os;
        os << "tangential derivative of Im m does not change sign around the maximum on"
           << " semicircle " << s.index << ": psi(" << a << ") = " << fa << ", psi(" << b
           << ") = " << fb;
        throw SearchError(os.str());
    }
    for (int iter = 0; iter < 200 && b - a > 1e-15; ++iter) {
        const double mid = 0.5 * (a + b);
        if (tangentialImDerivative(ctx, s, mid) > 0.0)
            a = mid;
        else
            b = mid;
    }

    CriticalPoint cp;
    cp.semicircleIndex = s.index;
    cp.location = s.arcPoint(0.5 * (a + b));
    cp.greenValueAt = std::numeric_limits<double>::quiet_NaN();
    return cp;
}

}  // namespace

std::vector<CriticalPoint> findMartinCritical(const MartinContext& ctx) {
    std::vector<CriticalPoint> out;
    for (const Semicircle& s : ctx.accumulator().config().semicircles())
        out.push_back(locateMartinOnArc(ctx, s));
    return out;
}

std::vector<CriticalPoint> findMartinCritical(const OrbitAccumulator& acc) {
    return findMartinCritical(MartinContext(acc));
}

ConditionReport conditionReport(const OrbitAccumulator& acc, Complex zStar) {
    ConditionReport report;

    // Condition (b): sum Im gamma(i) with per-shell partial sums, plus the
    // four equivalent first-column/second-column sums.
    KahanSum bSum;
    KahanSum four[4];
    for (const OrbitShell& shell : acc.shells()) {
        KahanSum bPart, fourPart[4];
        for (const Mat2& m : shell.mats) {
            const double imGi = 1.0 / (m.c * m.c + m.d * m.d);
            bPart.add(imGi);
            fourPart[0].add(1.0 / (m.a * m.a + m.c * m.c));
            fourPart[1].add(1.0 / (m.b * m.b + m.d * m.d));
            fourPart[2].add(imGi);
            fourPart[3].add(1.0 / (m.a * m.a + m.b * m.b));
        }
        bSum.add(bPart.value());
        report.conditionB_shellSums.push_back(bSum.value());
        for (int q = 0; q < 4; ++q) {
            four[q].add(fourPart[q].value());
            report.fourSums_shellSums[q].push_back(four[q].value());
        }
    }
    report.conditionB_sum = bSum.value();
    for (int q = 0; q < 4; ++q) report.fourSums[q] = four[q].value();

    const auto incrementsOf = [](const std::vector<double>& partials) {
        std::vector<double> inc;
        for (std::size_t i = 0; i + 1 < partials.size(); ++i)
            inc.push_back(partials[i + 1] - partials[i]);
        return inc;
    };
    report.verdictB =
        trendVerdict(incrementsOf(report.conditionB_shellSums), &report.verdictB_decayRatio);
    for (int q = 0; q < 4; ++q)
        report.fourVerdicts[q] = trendVerdict(incrementsOf(report.fourSums_shellSums[q]));
    report.fourVerdictsAgree =
        report.fourVerdicts[0] == report.fourVerdicts[1] &&
        report.fourVerdicts[1] == report.fourVerdicts[2] &&
        report.fourVerdicts[2] == report.fourVerdicts[3];

    // Condition (A): Blaschke condition on the Martin critical points. The
    // points on the distinguished 0-th semicircle are diagnostics only.
    const GreenContext greenCtx(acc, zStar);
    auto criticals = findMartinCritical(MartinContext(acc));
    KahanSum aSum;
    for (CriticalPoint& c : criticals) {
        const GreenEvaluation g = evalG(greenCtx, c.location);
        c.greenValueAt = std::exp(g.logAbs);
        if (c.semicircleIndex == 0) continue;
        report.conditionA_terms.push_back(-g.logAbs);
        aSum.add(-g.logAbs);
    }
    report.conditionA_sum = aSum.value();
    report.conditionA_product = std::exp(-aSum.value());
    report.verdictA = trendVerdict(report.conditionA_terms);
    return report;
}

AdditiveCharacter etaCharacter(const MartinContext& ctx) {
    const std::vector<Complex> basePoints{{0.0, 1.7}, {0.4, 1.3}, {-0.6, 2.2}};
    AdditiveCharacter out;
    const SemicircleConfig& cfg = ctx.accumulator().config();
    for (int k : cfg.generatorIndices()) {
        const MoebiusMap gk = generator(cfg, k);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        Complex first{};
        for (const Complex& z : basePoints) {
            const Complex diff = evalM(ctx, gk.apply(z)).m - evalM(ctx, z).m;
            if (z == basePoints.front()) first = diff;
            lo = std::min(lo, diff.real());
            hi = std::max(hi, diff.real());
            if (std::abs(diff.imag()) > 1e-8) {
                std::ostringstream os;
                os << "eta(gamma_" << k << ") has nonreal part " << diff.imag() << " at z = " << z;
                throw IdentityViolation(os.str());
            }
        }
        if (hi - lo > 1e-6) {
            std::ostringstream os;
            os << "eta(gamma_" << k << ") is not z-independent: spread " << (hi - lo)
               << " over the base points";
            throw IdentityViolation(os.str());
        }
        out.generatorIndex.push_back(k);
        out.eta.push_back(first.real());
    }
    return out;
}

Evaluated<double> certificateFMartin(const MartinContext& ctx, Complex z,
                                     const std::vector<CriticalPoint>& points) {
    const OrbitAccumulator& acc = ctx.accumulator();
    KahanSum absSeries;
    KahanComplex mPrime;
    KahanSum logAbsB;
    acc.forEachShell(
        [&](const Mat2& m) {
            guardPole(m, z);
            const Complex den = m.c * z + m.d;
            const Complex gz = (m.a * z + m.b) / den;
            const Complex gprime = 1.0 / (den * den);
            mPrime.add(gprime * (1.0 + 1.0 / (gz * gz)));
            absSeries.add(std::abs(gprime) * (1.0 + 1.0 / std::norm(gz)));
            for (const CriticalPoint& p : points)
                logAbsB.add(std::log(std::abs((gz - p.location) / (gz - std::conj(p.location)))));
        },
        [](int) {});

    Evaluated<double> out;
    out.value = std::exp(logAbsB.value() - std::log(std::abs(mPrime.value()))) * absSeries.value();
    out.shells = static_cast<int>(acc.shells().size());
    out.tail = acc.tailBound();
    out.degraded = out.tail > acc.policy().targetTail;
    return out;
}

}  // namespace charm
