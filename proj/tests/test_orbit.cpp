#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "charm/orbit.hpp"

using namespace charm;

namespace {

const SemicircleConfig kTrivial({{0, 0.0, 1.0}});
const SemicircleConfig kPair({{0, 0.0, 1.0}, {1, 3.0, 1.0}});
const SemicircleConfig kTriple({{0, 0.0, 1.0}, {1, 3.5, 1.0}, {2, -3.5, 1.0}});

}  // namespace

TEST_CASE("shell structure of the free group") {
    const auto trivial = enumerateShells(kTrivial, {3, 1e-9, 1000});
    REQUIRE(trivial.shells().size() == 1);
    CHECK(trivial.shells()[0].size() == 1);
    CHECK(trivial.tailBound() == 0.0);

    const auto one = enumerateShells(kPair, {3, 1e-9, 1000});
    REQUIRE(one.shells().size() == 4);
    CHECK(one.shells()[0].size() == 1);
    CHECK(one.shells()[1].size() == 2);
    CHECK(one.shells()[2].size() == 2);
    CHECK(one.shells()[3].size() == 2);

    const auto two = enumerateShells(kTriple, {2, 1e-9, 1000});
    REQUIRE(two.shells().size() == 3);
    CHECK(two.shells()[0].size() == 1);
    CHECK(two.shells()[1].size() == 4);
    CHECK(two.shells()[2].size() == 12);
}

TEST_CASE("enumerated matrices are unit determinant and preserve the upper half plane") {
    const auto acc = enumerateShells(kTriple, {4, 1e-9, 200000});
    SampleRng rng(99u);
    std::vector<Complex> samples;
    for (int i = 0; i < 100; ++i) samples.push_back(rng.inBox(-5.0, 5.0, 0.1, 3.0));
    acc.forEachShell(
        [&](const Mat2& m) {
            // Entry rounding limits how well det = 1 can be represented once
            // entries are large; the tolerance tracks that floor.
            const double scale = std::max(std::max(std::abs(m.a), std::abs(m.b)),
                                          std::max(std::abs(m.c), std::abs(m.d)));
            const double floor = 8.0 * std::numeric_limits<double>::epsilon() * scale * scale;
            CHECK(std::abs(detAccurate(m) - 1.0) < std::max(1e-10, floor));
            for (const Complex& z : samples) CHECK(m.apply(z).imag() > 0.0);
        },
        [](int) {});
}

TEST_CASE("words are reduced and reconstructible") {
    const auto acc = enumerateShells(kTriple, {4, 1e-9, 200000});
    for (int L = 0; L <= acc.maxWordLength(); ++L) {
        const auto& shell = acc.shells()[static_cast<std::size_t>(L)];
        for (std::size_t p = 0; p < shell.size(); p += 7) {
            const MoebiusMap g = acc.element(L, p);
            REQUIRE(g.word.size() == static_cast<std::size_t>(L));
            for (std::size_t i = 0; i + 1 < g.word.size(); ++i)
                CHECK(g.word[i] != -g.word[i + 1]);
            // Reconstructed word reproduces the stored matrix.
            MoebiusMap rebuilt = MoebiusMap::identity();
            for (int letter : g.word) {
                MoebiusMap step = generator(kTriple, std::abs(letter));
                if (letter < 0) step = step.inverse();
                rebuilt = compose(rebuilt, step);
            }
            CHECK(std::abs(rebuilt.a - g.a) < 1e-9);
            CHECK(std::abs(rebuilt.b - g.b) < 1e-9);
            CHECK(std::abs(rebuilt.c - g.c) < 1e-9);
            CHECK(std::abs(rebuilt.d - g.d) < 1e-9);
        }
    }
}

TEST_CASE("shell Blaschke mass decays") {
    const auto acc = enumerateShells(kTriple, {6, 1e-9, 1000000});
    const auto& shells = acc.shells();
    for (std::size_t L = 2; L + 1 < shells.size(); ++L)
        CHECK(shells[L + 1].blaschkeMassRef < shells[L].blaschkeMassRef);
}

TEST_CASE("tail bound is monotone nonincreasing in the word length") {
    double prev = -1.0;
    for (int L = 2; L <= 6; ++L) {
        const auto acc = enumerateShells(kPair, {L, 1e-9, 1000000});
        if (prev >= 0.0) CHECK(acc.tailBound() <= prev);
        prev = acc.tailBound();
    }
}

TEST_CASE("conjugation by inversion is a bijection on each shell") {
    const auto acc = enumerateShells(kTriple, {3, 1e-9, 100000});
    for (int L = 0; L <= acc.maxWordLength(); ++L) {
        const auto& shell = acc.shells()[static_cast<std::size_t>(L)];
        std::set<std::vector<int>> words, images;
        for (std::size_t p = 0; p < shell.size(); ++p) {
            const MoebiusMap g = acc.element(L, p);
            const MoebiusMap gt = conjugateByInversion(g);
            REQUIRE(gt.word.size() == g.word.size());
            for (std::size_t i = 0; i + 1 < gt.word.size(); ++i)
                CHECK(gt.word[i] != -gt.word[i + 1]);
            words.insert(g.word);
            images.insert(gt.word);
        }
        CHECK(words == images);
    }
}

TEST_CASE("element cap raises a truncation error carrying complete shells") {
    try {
        enumerateShells(kTriple, {10, 1e-9, 100});
        FAIL("expected TruncationError");
    } catch (const TruncationError& err) {
        REQUIRE(err.partial != nullptr);
        CHECK(err.partial->elementCapReached());
        CHECK(err.partial->maxWordLength() == 3);  // 1 + 4 + 12 + 36 = 53 <= 100 < 53 + 108
        CHECK(err.partial->elementCount() == 53);
    }
}

TEST_CASE("policy validation") {
    CHECK_THROWS_AS(enumerateShells(kPair, {-1, 1e-9, 100}), ConfigError);
    CHECK_THROWS_AS(enumerateShells(kPair, {3, 0.0, 100}), ConfigError);
    CHECK_THROWS_AS(enumerateShells(kPair, {3, 1e-9, 0}), ConfigError);
}
