#pragma once

#include <functional>

#include "charm/util.hpp"

namespace charm {

/// Gauss-Legendre nodes/weights on [-1, 1], computed once per order and
/// cached (orders are powers of two up to 2048).
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gaussLegendre(int order);

struct QuadResult {
    Complex value{0.0, 0.0};
    double error = 0.0;  // |I_2n - I_n| at acceptance
    int evaluations = 0;
};

/// Integral over the straight segment [z0, z1] with the Chebyshev substitution
/// s = (1 - cos phi)/2, which absorbs inverse-square-root endpoint
/// singularities analytically; Gauss-Legendre in phi with node doubling until
/// |I_2n - I_n| <= tol * (1 + |I|). Throws QuadratureError if 2048 nodes are
/// not enough.
QuadResult integrateSegment(const std::function<Complex(Complex)>& f, Complex z0, Complex z1,
                            double tol = 1e-11);

/// Arc integral over z(phi) = center + radius * exp(i phi), phi from phi0 to
/// phi1 (the integrand is assumed analytic near the arc).
QuadResult integrateArc(const std::function<Complex(Complex)>& f, Complex center, double radius,
                        double phi0, double phi1, double tol = 1e-11);

/// (1/pi) * Integral over R of f(x) * Im z / |x - z|^2 dx via the exact
/// compactification x = Re z + Im z tan(theta); the real line is covered with
/// no truncation tail. `splitPoints` lists abscissae of integrable
/// singularities of f (the integration is subdivided there). Uses adaptive
/// Gauss-Kronrod per segment.
struct PoissonResult {
    double value = 0.0;
    double error = 0.0;
};
PoissonResult poissonIntegral(const std::function<double(double)>& f, Complex z,
                              std::vector<double> splitPoints, double tol = 1e-9);

}  // namespace charm
