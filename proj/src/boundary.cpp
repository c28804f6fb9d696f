#include "charm/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "charm/quad.hpp"

namespace charm {

namespace {

Complex finiteProduct(const std::vector<BlaschkeFactor>& product, Complex z) {
    Complex w{1.0, 0.0};
    for (const auto& f : product) w *= (z - f.zero) / (z - std::conj(f.zero));
    return w;
}

// Lagrange extrapolation to y = 0 of samples (y_i, D_i).
Complex richardsonToZero(const std::vector<double>& ys, const std::vector<Complex>& ds) {
    Complex out{0.0, 0.0};
    for (std::size_t i = 0; i < ys.size(); ++i) {
        double coeff = 1.0;
        for (std::size_t j = 0; j < ys.size(); ++j) {
            if (j == i) continue;
            coeff *= -ys[j] / (ys[i] - ys[j]);
        }
        out += coeff * ds[i];
    }
    return out;
}

void guardRealPole(const Mat2& m, double x) {
    const double den = m.c * x + m.d;
    if (m.c != 0.0 && std::abs(den) < 1e-8 * std::abs(m.c)) {
        std::ostringstream os;
        os << "boundary series: x = " << x << " within 1e-8 of the pole " << -m.d / m.c;
        throw PoleError(os.str());
    }
}

}  // namespace

AngularDerivativeResult angularDerivative(const std::vector<BlaschkeFactor>& product, double x) {
    for (const auto& f : product)
        if (!(f.zero.imag() > 0.0))
            throw ConfigError("blaschke factor zeros must lie in the open upper half plane");

    AngularDerivativeResult out;
    out.x = x;
    out.limitValue = finiteProduct(product, x);

    KahanSum formula;
    for (const auto& f : product)
        formula.add(2.0 * f.zero.imag() / std::norm(x - std::conj(f.zero)));
    out.derivativeAbs = formula.value();

    const std::vector<double> ys{1e-2, 1e-3, 1e-4};
    std::vector<Complex> quotients;
    for (double y : ys) {
        const Complex z{x, y};
        const Complex wz = finiteProduct(product, z);
        out.approachSamples.emplace_back(z, wz);
        quotients.push_back((wz - out.limitValue) / Complex{0.0, y});
    }
    out.finiteDifferenceAbs = std::abs(richardsonToZero(ys, quotients));

    const double scale = std::max(out.derivativeAbs, 1e-30);
    if (std::abs(out.finiteDifferenceAbs - out.derivativeAbs) > 1e-5 * scale) {
        std::ostringstream os;
        os << "angular derivative mismatch at x = " << x << ": formula " << out.derivativeAbs
           << " vs finite difference " << out.finiteDifferenceAbs
           << " (insufficient y-range or x too close to the boundary spectrum)";
        throw IdentityViolation(os.str());
    }
    return out;
}

Evaluated<double> boundaryGPrime(const OrbitAccumulator& acc, Complex zStar, double x) {
    const Complex zStarBar = std::conj(zStar);
    const auto sum = shellSum(acc, acc.policy().targetTail, [&](const Mat2& m) {
        guardRealPole(m, x);
        const double den = m.c * x + m.d;
        const double gprime = 1.0 / (den * den);
        const double gx = (m.a * x + m.b) / den;
        return Complex{gprime / std::norm(Complex{gx, 0.0} - zStarBar), 0.0};
    });
    return {2.0 * zStar.imag() * sum.value.real(), 2.0 * zStar.imag() * sum.tail, sum.shells,
            sum.degraded};
}

Evaluated<double> boundaryMPrime(const OrbitAccumulator& acc, double x) {
    const auto sum = shellSum(acc, acc.policy().targetTail, [&](const Mat2& m) {
        guardRealPole(m, x);
        const double den = m.c * x + m.d;
        const double num = m.a * x + m.b;
        if (m.a != 0.0 && std::abs(num) < 1e-8 * std::abs(m.a))
            throw PoleError("boundary m': x within 1e-8 of an orbit point of 0");
        const double gprime = 1.0 / (den * den);
        const double gx = num / den;
        return Complex{gprime * (1.0 + 1.0 / (gx * gx)), 0.0};
    });
    return {sum.value.real(), sum.tail, sum.shells, sum.degraded};
}

std::vector<double> realPolesWithin(const OrbitAccumulator& acc, double lo, double hi) {
    std::vector<double> poles;
    acc.forEachShell(
        [&](const Mat2& m) {
            if (m.c == 0.0) return;
            const double p = -m.d / m.c;
            if (p >= lo && p <= hi) poles.push_back(p);
        },
        [](int) {});
    std::sort(poles.begin(), poles.end());
    return poles;
}

LogPoissonCheck logPoissonCheck(const OrbitAccumulator& acc, Complex zStar, Complex z) {
    if (!(z.imag() > 0.0)) throw ConfigError("log-poisson check: z must be in C_+");
    const Complex zStarBar = std::conj(zStar);

    const auto seriesAtReal = [&](double x) {
        KahanSum s;
        acc.forEachShell(
            [&](const Mat2& m) {
                const double den = m.c * x + m.d;
                const double gx = (m.a * x + m.b) / den;
                s.add((1.0 / (den * den)) / std::norm(Complex{gx, 0.0} - zStarBar));
            },
            [](int) {});
        return s.value();
    };
    const auto seriesAtZ = [&](Complex w) {
        KahanSum s;
        acc.forEachShell(
            [&](const Mat2& m) {
                const Complex den = m.c * w + m.d;
                const Complex gw = (m.a * w + m.b) / den;
                s.add((1.0 / std::norm(den)) / std::norm(gw - zStarBar));
            },
            [](int) {});
        return s.value();
    };

    // Subdivide at the real poles of gamma' (positive integrable spikes of
    // the log integrand).
    const double reach = 64.0 * (1.0 + std::abs(z));
    const auto poles = realPolesWithin(acc, z.real() - reach, z.real() + reach);

    LogPoissonCheck out;
    // The series has integrable +log spikes at the orbit poles; saturate the
    // integrand where a node lands beyond double range (the analytic mass of
    // such a neighbourhood is far below the quadrature tolerance).
    const auto integrand = [&](double x) {
        const double v = std::log(seriesAtReal(x));
        return std::isfinite(v) ? v : 709.78;
    };
    const PoissonResult lhs = poissonIntegral(integrand, z, poles, 1e-9);
    out.lhs = lhs.value;
    out.quadError = lhs.error;
    out.rhs = std::log(seriesAtZ(z));
    return out;
}

DensityTriple densityTriple(const OrbitAccumulator& acc, double x) {
    KahanSum rho, rhoI;
    acc.forEachShell(
        [&](const Mat2& m) {
            guardRealPole(m, x);
            const double den = m.c * x + m.d;
            const double num = m.a * x + m.b;
            rho.add(1.0 / (den * den));
            rhoI.add(1.0 / (den * den + num * num));
        },
        [](int) {});
    DensityTriple out;
    out.x = x;
    out.rho = rho.value();
    out.rhoI = rhoI.value();
    out.phiAbsSq = out.rhoI / out.rho;
    const double lower = 1.0 / (1.0 + x * x);
    if (out.rhoI < lower * (1.0 - 1e-12) || out.rhoI > out.rho * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "density sandwich violated at x = " << x << ": 1/(1+x^2) = " << lower
           << ", rho_i = " << out.rhoI << ", rho = " << out.rho;
        throw IdentityViolation(os.str());
    }
    return out;
}

Evaluated<double> outerPhiLogAbs(const OrbitAccumulator& acc, Complex z) {
    const double reach = 64.0 * (1.0 + std::abs(z));
    const auto poles = realPolesWithin(acc, z.real() - reach, z.real() + reach);
    const auto f = [&](double x) {
        KahanSum rho, rhoI;
        acc.forEachShell(
            [&](const Mat2& m) {
                const double den = m.c * x + m.d;
                const double num = m.a * x + m.b;
                rho.add(1.0 / (den * den));
                rhoI.add(1.0 / (den * den + num * num));
            },
            [](int) {});
        const double v = 0.5 * std::log(rhoI.value() / rho.value());
        return std::isfinite(v) ? v : -709.78;  // ratio -> 0 at the orbit poles
    };
    const PoissonResult r = poissonIntegral(f, z, poles, 1e-9);
    Evaluated<double> out;
    out.value = r.value;
    out.tail = r.error;
    out.shells = static_cast<int>(acc.shells().size());
    return out;
}

}  // namespace charm
