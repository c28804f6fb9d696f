#pragma once

#include <optional>
#include <vector>

#include "charm/util.hpp"

namespace charm {

/// Boundary semicircle of the fundamental region. Index 0 is reserved for the
/// normalized unit semicircle centered at the origin.
struct Semicircle {
    int index = 0;
    double center = 0.0;
    double radius = 1.0;

    double left() const { return center - radius; }
    double right() const { return center + radius; }

    /// Point on the open arc at angle theta in (0, pi).
    Complex arcPoint(double theta) const;
};

/// Inversion in the circle carrying the semicircle: c + r^2 / conj(z - c).
/// Anti-conformal involution fixing the arc.
Complex reflect(const Semicircle& s, Complex z);

struct TruncationPolicy {
    int maxWordLength = 8;
    double targetTail = 1e-9;
    long long hardElementCap = 4'000'000;

    void validate() const;
};

/// A finite family of pairwise disjoint boundary semicircles containing the
/// unit semicircle (index 0).
class SemicircleConfig {
public:
    SemicircleConfig() = default;
    explicit SemicircleConfig(std::vector<Semicircle> semicircles);

    const std::vector<Semicircle>& semicircles() const { return semicircles_; }
    const Semicircle& byIndex(int index) const;
    bool hasIndex(int index) const;

    /// Nonzero indices in listed order; these label the group generators.
    std::vector<int> generatorIndices() const;

    /// Sub-configuration keeping only the named semicircle indices
    /// (the finitely generated approximation of the group).
    SemicircleConfig subset(const std::vector<int>& keepIndices) const;

private:
    std::vector<Semicircle> semicircles_;
};

/// Real unit-determinant Moebius map together with its reduced word in the
/// semicircle generators (signed semicircle indices; empty word = identity).
struct MoebiusMap {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
    std::vector<int> word;

    Complex apply(Complex z) const;
    Complex derivative(Complex z) const;

    double det() const { return a * d - b * c; }
    void normalize();  // rescale to det == 1

    bool isIdentity(double tol = 1e-12) const;

    MoebiusMap inverse() const;

    static MoebiusMap identity() { return {}; }
};

/// Matrix product with word concatenation + free reduction at the junction.
MoebiusMap compose(const MoebiusMap& lhs, const MoebiusMap& rhs);

/// Generator gamma_k = tau_0 . tau_k (composition of the 0-th reflection with
/// the k-th one), already normalized to det 1; word = [k].
MoebiusMap generator(const SemicircleConfig& config, int k);

/// The automorphism gamma -> tau gamma tau (tau = reflection in the unit
/// circle): swaps a<->d and b<->c, negates every letter of the word.
MoebiusMap conjugateByInversion(const MoebiusMap& g);

}  // namespace charm
