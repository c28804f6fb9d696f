#pragma once

#include "charm/comb_types.hpp"
#include "charm/quad.hpp"

namespace charm {

/// Schwarz-Christoffel type map for a finite gap system: either the Green map
/// theta_{lambda*} (pole at lambda*, base [0, pi]) or the Martin map (no pole,
/// normalized so that lim Im theta(i eta)/eta = 2 / halfwidth(gap 0), which
/// matches the hand-derived uniformizer normalization in the one-gap case).
class ThetaMap {
public:
    static ThetaMap green(const GapSystem& gaps, const MuSet& mu);
    static ThetaMap martin(const GapSystem& gaps, const MuSet& mu);

    const GapSystem& gapSystem() const { return *gaps_; }
    const MuSet& muSet() const { return mu_; }
    bool isMartin() const { return martin_; }
    double anchor() const { return anchor_; }
    double martinScale() const { return prefactor_; }

    /// theta'(lambda); throws PoleError within 1e-10 of a branch point.
    Complex derivative(Complex lambda) const;

    /// theta'(lambda) * R_j(lambda): the derivative with gap j's square root
    /// factored out (smooth across gap j); used by the residual quadratures.
    Complex derivativeWithGapFactored(std::size_t j, Complex lambda) const;

    /// Path integral of theta' from the anchor (b_0 for the Green map, a_0
    /// for the Martin map) to lambda, for Im lambda >= 0. Real targets are
    /// reached along the real line (boundary values from the upper side),
    /// with a semicircle detour above the Green pole. tail carries the
    /// accumulated quadrature error estimate.
    Evaluated<Complex> evaluate(Complex lambda, double tol = 1e-11) const;

private:
    ThetaMap(const GapSystem& gaps, MuSet mu, bool isMartin);

    const GapSystem* gaps_;
    MuSet mu_;
    bool martin_ = false;
    double prefactor_ = 1.0;  // Martin normalization constant
    double anchor_ = 0.0;
    std::vector<Complex> numeratorConst_;  // R_k(lambda* + i0), principal

    Complex productOverGaps(Complex lambda, std::ptrdiff_t skipGap) const;
};

/// The displayed product for theta'_{lambda*} (Green map).
Complex thetaGreenDerivative(const GapSystem& gaps, const MuSet& mu, Complex lambda);

/// The Martin map built on `mu` with the normalization point equal to the
/// system's lambda*; lambdaStar must lie left of the solved mu in gap 0.
Complex thetaMartin(const GapSystem& gaps, const MuSet& mu, Complex lambda,
                    double* quadError = nullptr);

struct MuSolveOptions {
    double residualTol = 1e-10;
    int maxIterations = 200;
};

/// Critical abscissae of the Green map: one per gap except the distinguished
/// one, fixed by the vanishing of the slit-height integral over each gap.
/// Damped Newton on the coupled system with per-coordinate bisection
/// fallback; throws SearchError with the residual trace on failure.
MuSet solveMuGreen(const GapSystem& gaps, const MuSolveOptions& options = {});

/// Same residual system for the Martin integrand, one mu per gap including
/// the distinguished one.
MuSet solveMuMartin(const GapSystem& gaps, const MuSolveOptions& options = {});

/// Normalized residual vector of the current mu values (diagnostics and
/// oracle cross-checks).
std::vector<double> muResiduals(const GapSystem& gaps, const MuSet& mu);

/// Comb parameters omega_k = Re theta(mu_k), h_k = Im theta(mu_k). For the
/// Green map verifies theta(b0) = 0, theta(a0) = pi within 1e-6.
CombParameters extractComb(const GapSystem& gaps, const MuSet& mu);

struct WidomGapSum {
    double sum = 0.0;                   // sum over all gaps of G(mu_j, lambda*)
    std::vector<double> terms;          // per gap, in sorted gap order
};

/// Condition (A) sum at gap-system level: Green values at the Martin critical
/// points (all gaps; the distinguished gap's term is reported too).
WidomGapSum widomSumGaps(const GapSystem& gaps, const MuSet& muGreen, const MuSet& muMartin);

struct AkhiezerLevinResult {
    double limit = 0.0;
    double samples[3] = {0.0, 0.0, 0.0};  // M(i eta)/eta at eta = 1e2, 1e3, 1e4
    bool inconclusive = false;            // non-monotone samples
};

/// lim M(i eta)/eta by Richardson extrapolation over eta = 1e2, 1e3, 1e4.
AkhiezerLevinResult akhiezerLevinLimit(const GapSystem& gaps, const MuSet& muMartin);

}  // namespace charm
