#pragma once

#include <optional>
#include <vector>

#include "charm/martin.hpp"

namespace charm {

/// Nested finitely generated approximations: level n keeps the semicircles in
/// a declared subset, all containing index 0, strictly increasing, topped by
/// the full configuration.
class ApproximationLadder {
public:
    ApproximationLadder(const SemicircleConfig& full, std::vector<std::vector<int>> levels,
                        const TruncationPolicy& policy);

    std::size_t levelCount() const { return accs_.size(); }
    const std::vector<std::vector<int>>& levels() const { return levels_; }
    const OrbitAccumulator& accumulator(std::size_t n) const { return accs_[n]; }
    const SemicircleConfig& config(std::size_t n) const { return accs_[n].config(); }

private:
    std::vector<std::vector<int>> levels_;
    std::vector<OrbitAccumulator> accs_;
};

struct LevelValue {
    std::size_t level = 0;
    double absG = 0.0;
    double absM = 0.0;  // Im m at the probe (the Martin height), 0 if unused
    double tail = 0.0;
};

struct TrackedCritical {
    int semicircleIndex = 0;
    std::vector<std::optional<Complex>> greenLocation;   // per level; empty if arc absent
    std::vector<std::optional<Complex>> martinLocation;  // per level
    std::vector<std::optional<double>> greenValue;       // |g_n(c^(n), zStar)|
    std::vector<std::optional<double>> martinHeight;     // Im m_n(c^(n))
    std::vector<double> greenDeltas;   // |c^(n) - c^(n+1)| where both exist
    std::vector<double> martinDeltas;
};

struct ConvergenceReport {
    std::vector<LevelValue> values;          // per probe evaluation
    std::vector<TrackedCritical> criticals;  // per semicircle of the full config
    std::vector<double> gLevelDeltas;        // ||g_n| - |g_{n+1}|| at the probe
    std::vector<double> mLevelDeltas;
    bool divisorChainMonotone = true;
    bool deltasDecreasing = true;
};

/// Builds one accumulator per level; throws ConfigError on non-nested
/// subsets, subsets missing 0, or a top level different from the full config.
ApproximationLadder buildLadder(const SemicircleConfig& full,
                                const std::vector<std::vector<int>>& levels,
                                const TruncationPolicy& policy);

/// Verifies the divisor chain |g_0(z)| >= |g_1(z)| >= ... >= |g_top(z)| at the
/// probe point, within combined tails; throws IdentityViolation on violation.
ConvergenceReport divisorCheck(const ApproximationLadder& ladder, Complex z, Complex zStar);

/// Tracks the Green and Martin critical points per level on each retained
/// arc, and the level-to-level deltas of g_n and m_n at a fixed probe.
ConvergenceReport criticalTracking(const ApproximationLadder& ladder, Complex zStar,
                                   Complex probe = Complex{0.0, 2.0});

}  // namespace charm
