#pragma once

#include <vector>

#include "charm/util.hpp"

namespace charm {

struct Gap {
    double a = 0.0;
    double b = 0.0;

    double width() const { return b - a; }
    double mid() const { return 0.5 * (a + b); }
    double halfWidth() const { return 0.5 * (b - a); }
    bool contains(double x) const { return x > a && x < b; }
};

/// The set E as the complement of finitely many disjoint open real gaps.
/// Gaps are kept sorted; `indexZero` names the distinguished gap containing
/// lambdaStar.
class GapSystem {
public:
    GapSystem(std::vector<Gap> gaps, double lambdaStar);

    const std::vector<Gap>& gaps() const { return gaps_; }
    std::size_t size() const { return gaps_.size(); }
    std::size_t indexZero() const { return indexZero_; }
    double lambdaStar() const { return lambdaStar_; }
    const Gap& gapZero() const { return gaps_[indexZero_]; }

private:
    std::vector<Gap> gaps_;
    std::size_t indexZero_ = 0;
    double lambdaStar_ = 0.0;
};

/// Critical abscissae, one per gap. For the Green map the distinguished gap
/// carries the pole instead of a critical point and its slot is unused.
struct MuSet {
    enum class Kind { Green, Martin };

    Kind kind = Kind::Martin;
    std::vector<double> values;  // aligned with GapSystem::gaps()

    bool hasGap(std::size_t j, std::size_t indexZero) const {
        return kind == Kind::Martin || j != indexZero;
    }
};

struct CombSlit {
    int gapPosition = 0;  // position in GapSystem::gaps()
    double omega = 0.0;   // Re theta(mu)
    double height = 0.0;  // Im theta(mu)
};

/// Comb parameters (omega_k, h_k) extracted from a solved map. For the Green
/// comb the base interval is [0, pi] and the distinguished gap carries no slit.
struct CombParameters {
    MuSet::Kind kind = MuSet::Kind::Green;
    std::vector<CombSlit> slits;
    double thetaAtB0 = 0.0;  // Green comb: should be 0
    double thetaAtA0 = 0.0;  // Green comb: should be pi
};

}  // namespace charm
