#include "charm/moebius.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace charm {

Complex Semicircle::arcPoint(double theta) const {
    return {center + radius * std::cos(theta), radius * std::sin(theta)};
}

Complex reflect(const Semicircle& s, Complex z) {
    const Complex w = z - Complex{s.center, 0.0};
    if (w == Complex{0.0, 0.0}) {
        std::ostringstream os;
        os << "reflect: z coincides with the center of semicircle " << s.index;
        throw PoleError(os.str());
    }
    return Complex{s.center, 0.0} + s.radius * s.radius / std::conj(w);
}

void TruncationPolicy::validate() const {
    if (maxWordLength < 0) throw ConfigError("truncation: max_word_length must be >= 0");
    if (!(targetTail > 0.0)) throw ConfigError("truncation: target_tail must be > 0");
    if (hardElementCap < 1) throw ConfigError("truncation: element_cap must be >= 1");
}

SemicircleConfig::SemicircleConfig(std::vector<Semicircle> semicircles)
    : semicircles_(std::move(semicircles)) {
    bool haveZero = false;
    for (const auto& s : semicircles_) {
        if (!(s.radius > 0.0)) throw ConfigError("semicircle radius must be > 0");
        if (s.index == 0) {
            if (haveZero) throw ConfigError("duplicate semicircle index 0");
            if (s.center != 0.0 || s.radius != 1.0)
                throw ConfigError("semicircle 0 must have center 0 and radius 1");
            haveZero = true;
        }
    }
    if (!haveZero) throw ConfigError("config must contain the unit semicircle with index 0");
    for (std::size_t i = 0; i < semicircles_.size(); ++i) {
        for (std::size_t j = i + 1; j < semicircles_.size(); ++j) {
            const auto& p = semicircles_[i];
            const auto& q = semicircles_[j];
            if (p.index == q.index) {
                std::ostringstream os;
                os << "duplicate semicircle index " << p.index;
                throw ConfigError(os.str());
            }
            // Tangent closures count as an overlap: parabolic degeneration.
            if (std::abs(p.center - q.center) <= p.radius + q.radius) {
                std::ostringstream os;
                os << "semicircles " << p.index << " and " << q.index
                   << " have non-disjoint closed semi-disks";
                throw ConfigError(os.str());
            }
        }
    }
}

const Semicircle& SemicircleConfig::byIndex(int index) const {
    for (const auto& s : semicircles_)
        if (s.index == index) return s;
    std::ostringstream os;
    os << "no semicircle with index " << index;
    throw ConfigError(os.str());
}

bool SemicircleConfig::hasIndex(int index) const {
    return std::any_of(semicircles_.begin(), semicircles_.end(),
                       [index](const Semicircle& s) { return s.index == index; });
}

std::vector<int> SemicircleConfig::generatorIndices() const {
    std::vector<int> out;
    for (const auto& s : semicircles_)
        if (s.index != 0) out.push_back(s.index);
    return out;
}

SemicircleConfig SemicircleConfig::subset(const std::vector<int>& keepIndices) const {
    std::vector<Semicircle> kept;
    for (int k : keepIndices) kept.push_back(byIndex(k));
    return SemicircleConfig(std::move(kept));
}

Complex MoebiusMap::apply(Complex z) const {
    const Complex den = c * z + Complex{d, 0.0};
    if (den == Complex{0.0, 0.0}) throw PoleError("moebius apply: z is the pole of the map");
    return (a * z + Complex{b, 0.0}) / den;
}

Complex MoebiusMap::derivative(Complex z) const {
    const Complex den = c * z + Complex{d, 0.0};
    if (den == Complex{0.0, 0.0}) throw PoleError("moebius derivative: z is the pole of the map");
    return det() / (den * den);
}

void MoebiusMap::normalize() {
    // FMA-compensated determinant; the naive product form cancels badly once
    // entries are large.
    const double w = b * c;
    const double e = std::fma(b, c, -w);
    const double f = std::fma(a, d, -w);
    const double det = f - e;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    if (!(det > 0.0) || scale >= 1e6) return;
    const double s = std::sqrt(det);
    a /= s;
    b /= s;
    c /= s;
    d /= s;
}

bool MoebiusMap::isIdentity(double tol) const {
    const double s = (a < 0.0) ? -1.0 : 1.0;  // +-identity both qualify
    return std::abs(s * a - 1.0) < tol && std::abs(s * b) < tol && std::abs(s * c) < tol &&
           std::abs(s * d - 1.0) < tol;
}

MoebiusMap MoebiusMap::inverse() const {
    MoebiusMap inv;
    inv.a = d;
    inv.b = -b;
    inv.c = -c;
    inv.d = a;
    inv.word.reserve(word.size());
    for (auto it = word.rbegin(); it != word.rend(); ++it) inv.word.push_back(-*it);
    return inv;
}

MoebiusMap compose(const MoebiusMap& lhs, const MoebiusMap& rhs) {
    MoebiusMap out;
    out.a = lhs.a * rhs.a + lhs.b * rhs.c;
    out.b = lhs.a * rhs.b + lhs.b * rhs.d;
    out.c = lhs.c * rhs.a + lhs.d * rhs.c;
    out.d = lhs.c * rhs.b + lhs.d * rhs.d;
    out.normalize();
    out.word = lhs.word;
    std::size_t keep = rhs.word.size();
    std::size_t i = 0;
    while (!out.word.empty() && i < rhs.word.size() && out.word.back() == -rhs.word[i]) {
        out.word.pop_back();
        ++i;
    }
    (void)keep;
    out.word.insert(out.word.end(), rhs.word.begin() + static_cast<std::ptrdiff_t>(i),
                    rhs.word.end());
    return out;
}

MoebiusMap generator(const SemicircleConfig& config, int k) {
    if (k == 0) throw ConfigError("generator: index 0 names the base reflection, not a generator");
    if (!config.hasIndex(k)) {
        std::ostringstream os;
        os << "generator: no semicircle with index " << k;
        throw ConfigError(os.str());
    }
    const Semicircle& s = config.byIndex(k);
    // tau_0(tau_k(z)) = (z - c) / (c z - c^2 + r^2), normalized by 1/r.
    MoebiusMap g;
    g.a = 1.0 / s.radius;
    g.b = -s.center / s.radius;
    g.c = s.center / s.radius;
    g.d = (s.radius * s.radius - s.center * s.center) / s.radius;
    g.word = {k};
    return g;
}

MoebiusMap conjugateByInversion(const MoebiusMap& g) {
    MoebiusMap out;
    out.a = g.d;
    out.b = g.c;
    out.c = g.b;
    out.d = g.a;
    out.word.reserve(g.word.size());
    for (int letter : g.word) out.word.push_back(-letter);
    return out;
}

}  // namespace charm
