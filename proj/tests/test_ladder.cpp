#include <doctest.h>

#include <cmath>

#include "charm/ladder.hpp"

using namespace charm;

namespace {

// Geometric radii 4^{-k}: the finitely generated approximations converge fast.
SemicircleConfig geometricFamily(int count) {
    std::vector<Semicircle> semis{{0, 0.0, 1.0}};
    for (int k = 1; k <= count; ++k)
        semis.push_back({k, 2.0 + 1.5 * k, std::pow(4.0, -k)});
    return SemicircleConfig(semis);
}

std::vector<std::vector<int>> nestedLevels(int count) {
    std::vector<std::vector<int>> levels;
    std::vector<int> keep{0};
    levels.push_back(keep);
    for (int k = 1; k <= count; ++k) {
        keep.push_back(k);
        levels.push_back(keep);
    }
    return levels;
}

}  // namespace

TEST_CASE("ladder construction validates nesting") {
    const auto cfg = geometricFamily(2);
    const TruncationPolicy policy{5, 1e-9, 200000};

    CHECK_THROWS_AS(buildLadder(cfg, {}, policy), ConfigError);
    CHECK_THROWS_AS(buildLadder(cfg, {{1}, {0, 1, 2}}, policy), ConfigError);        // missing 0
    CHECK_THROWS_AS(buildLadder(cfg, {{0, 1}, {0, 2}, {0, 1, 2}}, policy), ConfigError);  // not nested
    CHECK_THROWS_AS(buildLadder(cfg, {{0}, {0, 1}}, policy), ConfigError);  // top != full

    const auto ladder = buildLadder(cfg, nestedLevels(2), policy);
    CHECK(ladder.levelCount() == 3);
    CHECK(ladder.config(0).semicircles().size() == 1);
    CHECK(ladder.config(2).semicircles().size() == 3);
    // More generators at fixed word length means at least the same shell mass.
    const double m1 = ladder.accumulator(1).shells().back().blaschkeMassRef;
    const double m2 = ladder.accumulator(2).shells().back().blaschkeMassRef;
    CHECK(m2 >= m1);
}

TEST_CASE("divisor chain monotone at sampled points") {
    const auto cfg = geometricFamily(3);
    const auto ladder = buildLadder(cfg, nestedLevels(3), {7, 1e-9, 3000000});
    const Complex zStar{0.0, 2.0};

    SampleRng rng(53u);
    for (int i = 0; i < 20; ++i) {
        const Complex z = rng.inBox(-3.0, 6.0, 0.3, 3.0);
        const auto report = divisorCheck(ladder, z, zStar);
        CHECK(report.divisorChainMonotone);
        for (std::size_t n = 0; n + 1 < report.values.size(); ++n)
            CHECK(report.values[n].absG >=
                  report.values[n + 1].absG - report.values[n].tail - report.values[n + 1].tail -
                      1e-12);
    }

    // Degenerate chain at z = zStar: every level vanishes there.
    const auto degenerate = divisorCheck(ladder, zStar, zStar);
    for (const auto& v : degenerate.values) CHECK(v.absG == 0.0);
}

TEST_CASE("trivial vs one-generator level at a fixed probe") {
    const SemicircleConfig cfg({{0, 0.0, 1.0}, {1, 3.0, 1.0}});
    const auto ladder = buildLadder(cfg, {{0}, {0, 1}}, {10, 1e-9, 1000000});
    const auto report = divisorCheck(ladder, {0.0, 1.0}, {0.0, 2.0});
    CHECK(report.values[0].absG >= report.values[1].absG);
    CHECK(report.values[0].absG == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("critical tracking: locations converge, deltas shrink") {
    const auto cfg = geometricFamily(3);
    const auto ladder = buildLadder(cfg, nestedLevels(3), {7, 1e-9, 3000000});
    const auto report = criticalTracking(ladder, {0.0, 1.0});

    // Arc 1 is retained from level 1 on: three locations, two deltas.
    const TrackedCritical* arc1 = nullptr;
    for (const auto& tc : report.criticals)
        if (tc.semicircleIndex == 1) arc1 = &tc;
    REQUIRE(arc1 != nullptr);
    CHECK(arc1->greenDeltas.size() == 2);
    CHECK(arc1->martinDeltas.size() == 2);
    for (std::size_t i = 0; i + 1 < arc1->greenDeltas.size(); ++i)
        CHECK(arc1->greenDeltas[i + 1] * 2.0 <= arc1->greenDeltas[i]);
    for (std::size_t i = 0; i + 1 < arc1->martinDeltas.size(); ++i)
        CHECK(arc1->martinDeltas[i + 1] * 2.0 <= arc1->martinDeltas[i]);

    // Absent arcs carry no critical data at the early levels.
    const TrackedCritical* arc3 = nullptr;
    for (const auto& tc : report.criticals)
        if (tc.semicircleIndex == 3) arc3 = &tc;
    REQUIRE(arc3 != nullptr);
    CHECK(!arc3->greenLocation[0].has_value());
    CHECK(arc3->greenLocation[3].has_value());

    // Level deltas of g_n and m_n at the probe decrease.
    for (std::size_t i = 0; i + 1 < report.gLevelDeltas.size(); ++i) {
        CHECK(report.gLevelDeltas[i + 1] < report.gLevelDeltas[i]);
        CHECK(report.mLevelDeltas[i + 1] < report.mLevelDeltas[i]);
    }
}

TEST_CASE("top level of the ladder equals a direct computation") {
    const auto cfg = geometricFamily(2);
    const auto ladder = buildLadder(cfg, nestedLevels(2), {6, 1e-9, 3000000});
    const auto direct = enumerateShells(cfg, {6, 1e-9, 3000000});
    const Complex z{0.4, 1.9}, zStar{0.0, 1.0};
    const GreenEvaluation a = evalG(ladder.accumulator(2), z, zStar);
    const GreenEvaluation b = evalG(direct, z, zStar);
    CHECK(a.value == b.value);  // bitwise: same code path, same inputs
    CHECK(a.logAbs == b.logAbs);
}
