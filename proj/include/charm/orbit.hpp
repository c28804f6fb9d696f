#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "charm/moebius.hpp"
#include "charm/util.hpp"

namespace charm {

/// Bare matrix entries of one enumerated group element (det == 1; the
/// derivative formula relies on that rather than on the stored product).
struct Mat2 {
    double a, b, c, d;

    Complex apply(Complex z) const { return (a * z + b) / (c * z + d); }
    /// apply() with the imaginary part replaced by the exact positive
    /// identity Im z / |cz + d|^2 (the division cancels at large entries).
    Complex applyUpper(Complex z) const {
        Complex w = apply(z);
        w.imag(z.imag() / std::norm(c * z + d));
        return w;
    }
    Complex derivative(Complex z) const {
        const Complex den = c * z + d;
        return 1.0 / (den * den);
    }
};

/// a*d - b*c with FMA compensation (Kahan); accurate to a few ulp of the
/// result even under heavy cancellation.
double detAccurate(const Mat2& m);

/// One complete word-length shell of the free group.
struct OrbitShell {
    std::vector<Mat2> mats;
    std::vector<std::uint32_t> parent;  // index into the previous shell
    std::vector<std::int16_t> letter;   // signed generator slot (1-based)
    double blaschkeMassRef = 0.0;       // sum Im g(i) / |i - conj g(i)|^2
    double sumImAtI = 0.0;              // sum Im g(i)  (= sum |g'(i)|)

    std::size_t size() const { return mats.size(); }
};

/// Shell-by-shell enumeration of all reduced words up to a word length, with
/// a declared-safety-factor tail bound from the last shell's Blaschke mass.
class OrbitAccumulator {
public:
    OrbitAccumulator(SemicircleConfig config, TruncationPolicy policy);

    const SemicircleConfig& config() const { return config_; }
    const TruncationPolicy& policy() const { return policy_; }
    const std::vector<OrbitShell>& shells() const { return shells_; }
    const std::vector<int>& generatorLabels() const { return genLabels_; }

    int maxWordLength() const { return static_cast<int>(shells_.size()) - 1; }
    std::size_t elementCount() const { return elementCount_; }
    bool elementCapReached() const { return capReached_; }

    /// Tail bound: (last shell Blaschke mass at the reference point i) times
    /// the declared safety factor; exactly 0 for the trivial group.
    double tailBound() const { return tailBound_; }
    static constexpr double kTailSafetyFactor = 3.0;

    /// Reconstructs the full MoebiusMap (with reduced word) of element
    /// `pos` in shell `length`.
    MoebiusMap element(int length, std::size_t pos) const;

    /// Applies fn to every enumerated matrix, shell by shell; after each
    /// shell calls shellDone(shellLength). Deterministic order.
    template <class Fn, class ShellFn>
    void forEachShell(Fn&& fn, ShellFn&& shellDone) const {
        for (std::size_t L = 0; L < shells_.size(); ++L) {
            for (const Mat2& m : shells_[L].mats) fn(m);
            shellDone(static_cast<int>(L));
        }
    }

private:
    friend OrbitAccumulator enumerateShells(const SemicircleConfig&, const TruncationPolicy&);

    SemicircleConfig config_;
    TruncationPolicy policy_;
    std::vector<int> genLabels_;  // nonzero semicircle indices, listed order
    std::vector<Mat2> genMats_;   // [2 * slot] = generator, [2 * slot + 1] = inverse
    std::vector<OrbitShell> shells_;
    std::size_t elementCount_ = 0;
    bool capReached_ = false;
    double tailBound_ = 0.0;

    void build();
};

/// Breadth-first generation of all reduced words up to policy.maxWordLength.
/// Throws TruncationError (carrying the complete-shell partial result) when
/// the hard element cap stops enumeration before the requested length.
OrbitAccumulator enumerateShells(const SemicircleConfig& config, const TruncationPolicy& policy);

struct TruncationError : std::runtime_error {
    TruncationError(const std::string& msg, std::shared_ptr<const OrbitAccumulator> part)
        : std::runtime_error(msg), partial(std::move(part)) {}
    std::shared_ptr<const OrbitAccumulator> partial;
};

/// Blaschke mass of one shell at (z, zStar): sum over the shell of
/// Im gamma(zStar) / |z - conj gamma(zStar)|^2.
double shellBlaschkeMass(const OrbitShell& shell, Complex z, Complex zStar);

/// Generic truncated orbit sum: value = sum over all enumerated gamma of
/// term(gamma); tail = safety * |last shell increment|.
template <class TermFn>
Evaluated<Complex> shellSum(const OrbitAccumulator& acc, double targetTail, TermFn&& term) {
    KahanComplex total;
    double lastIncrement = 0.0;
    int shellsUsed = 0;
    for (const OrbitShell& shell : acc.shells()) {
        KahanComplex shellPart;
        for (const Mat2& m : shell.mats) shellPart.add(term(m));
        total.add(shellPart.value());
        lastIncrement = std::abs(shellPart.value());
        ++shellsUsed;
    }
    Evaluated<Complex> out;
    out.value = total.value();
    out.shells = shellsUsed;
    out.tail = (shellsUsed > 1) ? OrbitAccumulator::kTailSafetyFactor * lastIncrement : 0.0;
    out.degraded = out.tail > targetTail;
    return out;
}

}  // namespace charm
