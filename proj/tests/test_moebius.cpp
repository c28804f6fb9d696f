#include <doctest.h>

#include <cmath>
#include <complex>

#include "charm/moebius.hpp"

using namespace charm;
using doctest::Approx;

namespace {

SemicircleConfig pairConfig() {
    return SemicircleConfig({{0, 0.0, 1.0}, {1, 3.0, 1.0}});
}

MoebiusMap fromWord(const SemicircleConfig& cfg, const std::vector<int>& word) {
    MoebiusMap g = MoebiusMap::identity();
    for (int letter : word) {
        MoebiusMap step = generator(cfg, std::abs(letter));
        if (letter < 0) step = step.inverse();
        g = compose(g, step);
    }
    return g;
}

}  // namespace

TEST_CASE("reflection in a boundary semicircle") {
    const Semicircle unit{0, 0.0, 1.0};
    const Complex r = reflect(unit, {0.0, 2.0});
    CHECK(r.real() == Approx(0.0).epsilon(1e-15));
    CHECK(r.imag() == Approx(0.5).epsilon(1e-15));

    // Points of the arc are fixed.
    const Semicircle s{1, 3.0, 1.0};
    const Complex onArc = s.arcPoint(1.1);
    const Complex rr = reflect(s, onArc);
    CHECK(std::abs(rr - onArc) < 1e-15);

    const Complex shifted = reflect(s, {3.0, 2.0});
    CHECK(shifted.real() == Approx(3.0));
    CHECK(shifted.imag() == Approx(0.5));

    CHECK_THROWS_AS(reflect(s, {3.0, 0.0}), PoleError);

    // Involution off the arc.
    const Complex z{1.2, 0.7};
    CHECK(std::abs(reflect(s, reflect(s, z)) - z) < 1e-14);
}

TEST_CASE("generator matrices") {
    const auto cfg = pairConfig();
    const MoebiusMap g = generator(cfg, 1);
    CHECK(g.a == Approx(1.0));
    CHECK(g.b == Approx(-3.0));
    CHECK(g.c == Approx(3.0));
    CHECK(g.d == Approx(-8.0));
    CHECK(g.det() == Approx(1.0).epsilon(1e-14));
    CHECK(g.word == std::vector<int>{1});

    const MoebiusMap id = compose(g, g.inverse());
    CHECK(id.word.empty());
    CHECK(id.isIdentity());

    CHECK_THROWS_AS(generator(cfg, 0), ConfigError);
    CHECK_THROWS_AS(generator(cfg, 7), ConfigError);
}

TEST_CASE("moebius action") {
    const MoebiusMap id = MoebiusMap::identity();
    CHECK(std::abs(id.apply({0.3, 1.7}) - Complex{0.3, 1.7}) < 1e-16);
    CHECK(id.derivative({0.3, 1.7}) == Complex{1.0, 0.0});

    MoebiusMap shift;
    shift.b = 1.0;
    CHECK(std::abs(shift.apply({0.0, 1.0}) - Complex{1.0, 1.0}) < 1e-16);
    CHECK(shift.derivative({5.0, 2.0}) == Complex{1.0, 0.0});

    const auto cfg = pairConfig();
    const MoebiusMap g = generator(cfg, 1);
    CHECK(std::abs(g.derivative({0.0, 0.0}) - Complex{1.0 / 64.0, 0.0}) < 1e-16);

    // On the arc of its own semicircle the generator coincides with the
    // inversion in the unit circle (tau_k fixes the arc pointwise).
    const Complex onArc{3.0, 1.0};
    const Complex image = g.apply(onArc);
    CHECK(std::abs(image - 1.0 / std::conj(onArc)) < 1e-15);

    // Upper half plane preserved.
    SampleRng rng(20260810u);
    for (int i = 0; i < 100; ++i) {
        const Complex z = rng.inBox(-6.0, 6.0, 0.05, 4.0);
        CHECK(g.apply(z).imag() > 0.0);
        CHECK(g.inverse().apply(z).imag() > 0.0);
    }

    MoebiusMap pole;
    pole.a = 1.0;
    pole.b = -3.0;
    pole.c = 3.0;
    pole.d = -8.0;
    CHECK_THROWS_AS(pole.apply({8.0 / 3.0, 0.0}), PoleError);
}

TEST_CASE("conjugation by the unit-circle inversion") {
    CHECK(conjugateByInversion(MoebiusMap::identity()).isIdentity());

    const auto cfg = pairConfig();
    const MoebiusMap g = generator(cfg, 1);
    const MoebiusMap gt = conjugateByInversion(g);
    CHECK(gt.a == Approx(-8.0));
    CHECK(gt.b == Approx(3.0));
    CHECK(gt.c == Approx(-3.0));
    CHECK(gt.d == Approx(1.0));
    CHECK(gt.word == std::vector<int>{-1});

    const MoebiusMap back = conjugateByInversion(gt);
    CHECK(back.a == Approx(g.a));
    CHECK(back.b == Approx(g.b));
    CHECK(back.word == g.word);

    // Multiplicative: swap(AB) == swap(A) swap(B).
    const MoebiusMap h = compose(g, g);
    const MoebiusMap lhs = conjugateByInversion(h);
    const MoebiusMap rhs = compose(conjugateByInversion(g), conjugateByInversion(g));
    CHECK(lhs.a == Approx(rhs.a));
    CHECK(lhs.b == Approx(rhs.b));
    CHECK(lhs.c == Approx(rhs.c));
    CHECK(lhs.d == Approx(rhs.d));
}

TEST_CASE("config invariants") {
    CHECK_THROWS_AS(SemicircleConfig({{1, 3.0, 1.0}}), ConfigError);            // no index 0
    CHECK_THROWS_AS(SemicircleConfig({{0, 0.5, 1.0}}), ConfigError);            // bad normalization
    CHECK_THROWS_AS(SemicircleConfig({{0, 0.0, 2.0}}), ConfigError);            // bad normalization
    CHECK_THROWS_AS(SemicircleConfig({{0, 0.0, 1.0}, {1, 2.0, 1.0}}), ConfigError);  // tangent
    CHECK_THROWS_AS(SemicircleConfig({{0, 0.0, 1.0}, {1, 1.5, 1.0}}), ConfigError);  // overlap
    CHECK_THROWS_AS(SemicircleConfig({{0, 0.0, 1.0}, {1, 3.0, 1.0}, {1, 6.0, 1.0}}),
                    ConfigError);  // duplicate index
    CHECK_THROWS_AS(SemicircleConfig({{0, 0.0, 1.0}, {1, 3.0, -1.0}}), ConfigError);

    const SemicircleConfig three({{0, 0.0, 1.0}, {1, 3.0, 1.0}, {2, -3.0, 1.0}});
    CHECK(three.generatorIndices() == std::vector<int>{1, 2});
    const SemicircleConfig sub = three.subset({0, 2});
    CHECK(sub.semicircles().size() == 2);
    CHECK(sub.hasIndex(2));
    CHECK(!sub.hasIndex(1));
}

TEST_CASE("group law on random reduced words") {
    const SemicircleConfig cfg({{0, 0.0, 1.0}, {1, 3.0, 1.0}, {2, -3.0, 1.0}});
    SampleRng rng(17u);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<int> u, v;
        const auto draw = [&](std::vector<int>& w) {
            const int len = static_cast<int>(rng.uniform(0.0, 4.999));
            for (int i = 0; i < len; ++i) {
                int letter;
                do {
                    const int k = rng.uniform01() < 0.5 ? 1 : 2;
                    letter = rng.uniform01() < 0.5 ? k : -k;
                } while (!w.empty() && letter == -w.back());
                w.push_back(letter);
            }
        };
        draw(u);
        draw(v);
        const MoebiusMap gu = fromWord(cfg, u);
        const MoebiusMap gv = fromWord(cfg, v);
        const MoebiusMap prod = compose(gu, gv);
        const MoebiusMap direct = fromWord(cfg, prod.word);
        const double sign = (prod.a * direct.a < 0.0) ? -1.0 : 1.0;
        CHECK(std::abs(prod.a - sign * direct.a) < 1e-9);
        CHECK(std::abs(prod.b - sign * direct.b) < 1e-9);
        CHECK(std::abs(prod.c - sign * direct.c) < 1e-9);
        CHECK(std::abs(prod.d - sign * direct.d) < 1e-9);
        // No adjacent cancelling pair survives reduction.
        for (std::size_t i = 0; i + 1 < prod.word.size(); ++i)
            CHECK(prod.word[i] != -prod.word[i + 1]);
    }
}
