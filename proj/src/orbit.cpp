#include "charm/orbit.hpp"

#include <cmath>
#include <sstream>

namespace charm {

namespace {

// Im gamma(zStar) via the exact identity Im zStar / |c zStar + d|^2; the
// naive complex division cancels catastrophically once entries are large.
double massTerm(const Mat2& m, Complex z, Complex zStar) {
    const Complex w = m.applyUpper(zStar);
    const Complex den = z - std::conj(w);
    return w.imag() / std::norm(den);
}

double maxAbsEntry(const Mat2& m) {
    return std::max(std::max(std::abs(m.a), std::abs(m.b)),
                    std::max(std::abs(m.c), std::abs(m.d)));
}

}  // namespace

double detAccurate(const Mat2& m) {
    const double w = m.b * m.c;
    const double e = std::fma(m.b, m.c, -w);
    const double f = std::fma(m.a, m.d, -w);
    return f - e;
}

double shellBlaschkeMass(const OrbitShell& shell, Complex z, Complex zStar) {
    KahanSum mass;
    for (const Mat2& m : shell.mats) mass.add(massTerm(m, z, zStar));
    return mass.value();
}

OrbitAccumulator::OrbitAccumulator(SemicircleConfig config, TruncationPolicy policy)
    : config_(std::move(config)), policy_(policy) {
    policy_.validate();
    genLabels_ = config_.generatorIndices();
    genMats_.reserve(2 * genLabels_.size());
    for (int k : genLabels_) {
        MoebiusMap g = generator(config_, k);
        MoebiusMap gi = g.inverse();
        genMats_.push_back({g.a, g.b, g.c, g.d});
        genMats_.push_back({gi.a, gi.b, gi.c, gi.d});
    }
}

void OrbitAccumulator::build() {
    const Complex refPoint{0.0, 1.0};
    const int nGen = static_cast<int>(genLabels_.size());

    OrbitShell root;
    root.mats.push_back({1.0, 0.0, 0.0, 1.0});
    root.parent.push_back(0);
    root.letter.push_back(0);
    root.blaschkeMassRef = massTerm(root.mats[0], refPoint, refPoint);
    root.sumImAtI = 1.0;
    shells_.push_back(std::move(root));
    elementCount_ = 1;

    for (int L = 1; L <= policy_.maxWordLength && nGen > 0; ++L) {
        const OrbitShell& prev = shells_.back();
        const std::size_t branching = (L == 1) ? 2 * nGen : 2 * nGen - 1;
        const std::size_t projected = prev.size() * branching;
        if (elementCount_ + projected > static_cast<std::size_t>(policy_.hardElementCap)) {
            capReached_ = true;
            break;
        }
        OrbitShell next;
        next.mats.reserve(projected);
        next.parent.reserve(projected);
        next.letter.reserve(projected);
        KahanSum mass, imSum;
        for (std::size_t p = 0; p < prev.size(); ++p) {
            const Mat2& pm = prev.mats[p];
            const std::int16_t lastLetter = prev.letter[p];
            for (int slot = 0; slot < nGen; ++slot) {
                for (int sgn = 0; sgn < 2; ++sgn) {
                    const std::int16_t letter =
                        static_cast<std::int16_t>(sgn == 0 ? slot + 1 : -(slot + 1));
                    if (L > 1 && letter == -lastLetter) continue;  // keep words reduced
                    const Mat2& gm = genMats_[2 * static_cast<std::size_t>(slot) + sgn];
                    Mat2 m{pm.a * gm.a + pm.b * gm.c, pm.a * gm.b + pm.b * gm.d,
                           pm.c * gm.a + pm.d * gm.c, pm.c * gm.b + pm.d * gm.d};
                    // Rescale to det 1 while the determinant is representable
                    // at the entry scale; past that the drift is pure entry
                    // rounding and rescaling would corrupt the element.
                    if (maxAbsEntry(m) < 1e6) {
                        const double s = std::sqrt(detAccurate(m));
                        m.a /= s;
                        m.b /= s;
                        m.c /= s;
                        m.d /= s;
                    }
                    mass.add(massTerm(m, refPoint, refPoint));
                    imSum.add(m.applyUpper(refPoint).imag());
                    next.mats.push_back(m);
                    next.parent.push_back(static_cast<std::uint32_t>(p));
                    next.letter.push_back(letter);
                }
            }
        }
        next.blaschkeMassRef = mass.value();
        next.sumImAtI = imSum.value();
        elementCount_ += next.size();
        shells_.push_back(std::move(next));
    }

    tailBound_ = (shells_.size() > 1 || nGen > 0)
                     ? kTailSafetyFactor * shells_.back().blaschkeMassRef
                     : 0.0;
    if (nGen == 0) tailBound_ = 0.0;  // trivial group: the product is exact
}

MoebiusMap OrbitAccumulator::element(int length, std::size_t pos) const {
    const auto& shell = shells_.at(static_cast<std::size_t>(length));
    const Mat2& m = shell.mats.at(pos);
    MoebiusMap out;
    out.a = m.a;
    out.b = m.b;
    out.c = m.c;
    out.d = m.d;
    out.word.resize(static_cast<std::size_t>(length));
    std::size_t p = pos;
    for (int L = length; L >= 1; --L) {
        const auto& s = shells_[static_cast<std::size_t>(L)];
        const int letter = s.letter[p];
        const int slot = std::abs(letter) - 1;
        out.word[static_cast<std::size_t>(L - 1)] =
            (letter > 0) ? genLabels_[static_cast<std::size_t>(slot)]
                         : -genLabels_[static_cast<std::size_t>(slot)];
        p = s.parent[p];
    }
    return out;
}

OrbitAccumulator enumerateShells(const SemicircleConfig& config, const TruncationPolicy& policy) {
    OrbitAccumulator acc(config, policy);
    acc.build();
    if (acc.elementCapReached()) {
        std::ostringstream os;
        os << "orbit enumeration stopped at word length " << acc.maxWordLength()
           << " of requested " << policy.maxWordLength << ": element cap "
           << policy.hardElementCap << " reached (" << acc.elementCount() << " elements kept)";
        throw TruncationError(os.str(),
                              std::make_shared<const OrbitAccumulator>(std::move(acc)));
    }
    return acc;
}

}  // namespace charm
