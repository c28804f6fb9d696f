#pragma once

#include <string>
#include <vector>

#include "charm/green.hpp"
#include "charm/orbit.hpp"

namespace charm {

struct MartinEvaluation {
    Complex m{0.0, 0.0};
    Complex mPrime{0.0, 0.0};
    double imOverIm = 0.0;  // Im m(z)/Im z as the termwise absolute series
    double tailBound = 0.0;
    int shellsUsed = 0;
    bool degraded = false;
};

enum class Verdict { Holds, Fails, Inconclusive };

std::string to_string(Verdict v);

/// Geometric-decay fit on the last increments of a partial-sum sequence:
/// decay ratio < 0.9 -> Holds, > 1.1 -> Fails, otherwise Inconclusive.
/// A finished sequence (no increments, or all-zero ones) holds trivially.
Verdict trendVerdict(const std::vector<double>& increments, double* fittedRatio = nullptr);

struct ConditionReport {
    double conditionA_product = 1.0;  // prod_{k != 0} |g(c_k, zStar)|, Martin criticals
    double conditionA_sum = 0.0;      // sum of G(c_k, zStar)
    double conditionB_sum = 0.0;      // sum Im gamma(i) = sum |gamma'(i)|
    std::vector<double> conditionB_shellSums;  // partial sums per shell
    std::vector<double> conditionA_terms;      // G(c_k) per nonzero semicircle
    // The four equivalent convergence sums over 1/((g^11)^2 + (g^21)^2) etc.,
    // with their per-shell partial sums and individual verdicts.
    double fourSums[4] = {0.0, 0.0, 0.0, 0.0};
    std::vector<double> fourSums_shellSums[4];
    Verdict fourVerdicts[4] = {Verdict::Holds, Verdict::Holds, Verdict::Holds, Verdict::Holds};
    bool fourVerdictsAgree = true;
    Verdict verdictA = Verdict::Holds;
    Verdict verdictB = Verdict::Holds;
    double verdictB_decayRatio = 0.0;
};

struct AdditiveCharacter {
    std::vector<int> generatorIndex;
    std::vector<double> eta;  // eta(gamma_k), real
};

/// Precomputed per-element constants Re gamma(i) and Re 1/gamma(i) used by
/// every Martin series; build once per accumulator and share read-only.
class MartinContext {
public:
    explicit MartinContext(const OrbitAccumulator& acc);

    const OrbitAccumulator& accumulator() const { return *acc_; }
    const std::vector<double>& reGammaI() const { return reGammaI_; }
    const std::vector<double>& reInvGammaI() const { return reInvGammaI_; }
    const std::vector<std::size_t>& shellOffsets() const { return offsets_; }

private:
    const OrbitAccumulator* acc_;
    std::vector<double> reGammaI_, reInvGammaI_;
    std::vector<std::size_t> offsets_;
};

/// m_+(z) = sum (gamma(z) - Re gamma(i)); also reports Im m_+ / Im z as the
/// absolute series sum |gamma'(z)| for cross-checking.
Evaluated<Complex> evalMPlus(const MartinContext& ctx, Complex z, double* imOverIm = nullptr);

/// m_-(z) = -sum (1/gamma(z) - Re 1/gamma(i)).
Evaluated<Complex> evalMMinus(const MartinContext& ctx, Complex z, double* imOverIm = nullptr);

/// The symmetric complex Martin function m = m_+ + m_-, its derivative
/// series m' = sum gamma'(z)(1 + 1/gamma(z)^2), and Im m / Im z.
MartinEvaluation evalM(const MartinContext& ctx, Complex z);
MartinEvaluation evalM(const OrbitAccumulator& acc, Complex z);

/// One zero of m' per boundary semicircle (including index 0), located as the
/// interior maximum of Im m along the arc and polished on the tangential
/// derivative. greenValueAt is left NaN; condition_report fills it.
std::vector<CriticalPoint> findMartinCritical(const MartinContext& ctx);
std::vector<CriticalPoint> findMartinCritical(const OrbitAccumulator& acc);

/// Condition (A) product over the Martin critical points (k != 0) and the
/// condition (b) sum with shell trends and verdicts.
ConditionReport conditionReport(const OrbitAccumulator& acc, Complex zStar);

/// eta(gamma_k) = m(gamma_k(z)) - m(z), checked for z-independence at three
/// base points; throws IdentityViolation when the spread exceeds 1e-6.
AdditiveCharacter etaCharacter(const MartinContext& ctx);

/// The Martin-side certificate
///   f(z) = |B(z)/m'(z)| * sum |gamma'(z)| (1 + 1/|gamma(z)|^2) <= 1
/// with B the Blaschke product over the orbits of all Martin critical points.
Evaluated<double> certificateFMartin(const MartinContext& ctx, Complex z,
                                     const std::vector<CriticalPoint>& points);

}  // namespace charm
