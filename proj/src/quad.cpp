#include "charm/quad.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace charm {

namespace {

GaussRule computeGauss(int n) {
    // Newton on P_n with the three-term recurrence; standard construction.
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const double pi = std::numbers::pi;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return rule;
}

std::map<int, GaussRule> g_rules;
std::mutex g_rulesMutex;

}  // namespace

const GaussRule& gaussLegendre(int order) {
    std::lock_guard<std::mutex> lock(g_rulesMutex);
    auto it = g_rules.find(order);
    if (it == g_rules.end()) it = g_rules.emplace(order, computeGauss(order)).first;
    return it->second;
}

namespace {

template <class Fn>
Complex gaussOnPhi(const Fn& fphi, int order) {
    // Integral over phi in [0, pi], mapped from the [-1, 1] rule.
    const GaussRule& rule = gaussLegendre(order);
    const double pi = std::numbers::pi;
    KahanComplex sum;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double phi = 0.5 * pi * (rule.nodes[i] + 1.0);
        sum.add((0.5 * pi * rule.weights[i]) * fphi(phi));
    }
    return sum.value();
}

template <class Fn>
QuadResult doubleUntilConverged(const Fn& fphi, double tol, const char* what) {
    QuadResult out;
    Complex prev = gaussOnPhi(fphi, 16);
    out.evaluations = 16;
    for (int order = 32; order <= 2048; order *= 2) {
        const Complex cur = gaussOnPhi(fphi, order);
        out.evaluations += order;
        out.error = std::abs(cur - prev);
        out.value = cur;
        if (out.error <= tol * (1.0 + std::abs(cur))) return out;
        prev = cur;
    }
    std::ostringstream os;
    os << what << ": no convergence at 2048 Gauss nodes; last delta " << out.error;
    throw QuadratureError(os.str());
}

}  // namespace

QuadResult integrateSegment(const std::function<Complex(Complex)>& f, Complex z0, Complex z1,
                            double tol) {
    const Complex span = z1 - z0;
    // s = (1 - cos phi)/2 in [0, 1]; ds = sin(phi)/2 dphi kills endpoint
    // inverse-sqrt singularities of f.
    const auto fphi = [&](double phi) {
        const double s = 0.5 * (1.0 - std::cos(phi));
        const Complex z = z0 + s * span;
        return f(z) * span * (0.5 * std::sin(phi));
    };
    return doubleUntilConverged(fphi, tol, "segment quadrature");
}

QuadResult integrateArc(const std::function<Complex(Complex)>& f, Complex center, double radius,
                        double phi0, double phi1, double tol) {
    const auto fphi = [&](double t) {
        // t in [0, pi] mapped affinely onto [phi0, phi1].
        const double phi = phi0 + (phi1 - phi0) * t / std::numbers::pi;
        const Complex z = center + radius * std::exp(Complex{0.0, phi});
        const Complex dz = Complex{0.0, radius} * std::exp(Complex{0.0, phi});
        return f(z) * dz * ((phi1 - phi0) / std::numbers::pi);
    };
    return doubleUntilConverged(fphi, tol, "arc quadrature");
}

PoissonResult poissonIntegral(const std::function<double(double)>& f, Complex z,
                              std::vector<double> splitPoints, double tol) {
    using boost::math::quadrature::gauss_kronrod;
    const double pi = std::numbers::pi;
    const double x0 = z.real();
    const double y0 = z.imag();
    if (!(y0 > 0.0)) throw QuadratureError("poisson integral: z must be in the upper half plane");

    // theta = atan((x - x0)/y0) maps R onto (-pi/2, pi/2) and absorbs the
    // Poisson kernel exactly.
    std::vector<double> cuts{-0.5 * pi, 0.5 * pi};
    for (double p : splitPoints) {
        const double t = std::atan((p - x0) / y0);
        if (t > -0.5 * pi + 1e-12 && t < 0.5 * pi - 1e-12) cuts.push_back(t);
    }
    std::sort(cuts.begin(), cuts.end());
    // Singularity clusters tighter than the quadrature can resolve are
    // merged into one representative cut.
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-9; }),
               cuts.end());

    const auto integrand = [&](double theta) { return f(x0 + y0 * std::tan(theta)); };
    PoissonResult out;
    KahanSum total;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double err = 0.0;
        const double part = gauss_kronrod<double, 15>::integrate(integrand, cuts[i], cuts[i + 1],
                                                                 15, tol, &err);
        total.add(part);
        out.error += err;
    }
    out.value = total.value() / pi;
    return out;
}

}  // namespace charm
