#include <doctest.h>

#include <cmath>
#include <complex>

#include "charm/martin.hpp"

using namespace charm;
using doctest::Approx;

namespace {

const SemicircleConfig kTrivial({{0, 0.0, 1.0}});
const SemicircleConfig kPair({{0, 0.0, 1.0}, {1, 3.0, 1.0}});

}  // namespace

TEST_CASE("trivial group: closed forms of m, m', Im m/Im z") {
    const auto acc = enumerateShells(kTrivial, {2, 1e-9, 100});
    const MartinContext ctx(acc);

    SampleRng rng(3u);
    for (int i = 0; i < 15; ++i) {
        const Complex z = rng.inBox(-4.0, 4.0, 0.2, 3.0);
        const MartinEvaluation e = evalM(ctx, z);
        CHECK(std::abs(e.m - (z - 1.0 / z)) < 1e-14);
        CHECK(std::abs(e.mPrime - (1.0 + 1.0 / (z * z))) < 1e-14);
        CHECK(e.imOverIm == Approx(1.0 + 1.0 / std::norm(z)).epsilon(1e-14));
        CHECK(e.tailBound == 0.0);
        CHECK(e.m.imag() > 0.0);
    }

    double imOverIm = 0.0;
    const auto mp = evalMPlus(ctx, {0.7, 1.1}, &imOverIm);
    CHECK(std::abs(mp.value - Complex{0.7, 1.1}) < 1e-15);
    CHECK(imOverIm == Approx(1.0));

    const auto mm = evalMMinus(ctx, {0.7, 1.1}, &imOverIm);
    CHECK(std::abs(mm.value + 1.0 / Complex{0.7, 1.1}) < 1e-15);

    // Real x off the orbit of 0: Im m(x) vanishes exactly.
    const MartinEvaluation real = evalM(ctx, {2.0, 0.0});
    CHECK(real.m.imag() == 0.0);
}

TEST_CASE("trivial group on the unit arc: Im m_- = Im m_+") {
    const auto acc = enumerateShells(kTrivial, {2, 1e-9, 100});
    const MartinContext ctx(acc);
    for (double theta : {0.4, 1.0, 2.3}) {
        const Complex z = std::exp(Complex{0.0, theta});
        const auto plus = evalMPlus(ctx, z);
        const auto minus = evalMMinus(ctx, z);
        CHECK(plus.value.imag() == Approx(std::sin(theta)).epsilon(1e-14));
        CHECK(minus.value.imag() == Approx(std::sin(theta)).epsilon(1e-14));
    }
}

TEST_CASE("one-generator group: the two half-series and the inversion symmetry") {
    const auto acc = enumerateShells(kPair, {10, 1e-9, 1000000});
    const MartinContext ctx(acc);

    const Complex z{0.0, 2.0};
    const auto minus = evalMMinus(ctx, z);
    const auto plusAtInverted = evalMPlus(ctx, 1.0 / std::conj(z));
    CHECK(std::abs(minus.value.imag() - plusAtInverted.value.imag()) <
          minus.tail + plusAtInverted.tail + 1e-10);

    SampleRng rng(41u);
    for (int i = 0; i < 20; ++i) {
        const Complex w = rng.inBox(-2.0, 2.0, 0.4, 3.0);
        const MartinEvaluation a = evalM(ctx, w);
        const MartinEvaluation b = evalM(ctx, 1.0 / std::conj(w));
        CHECK(std::abs(a.m.imag() - b.m.imag()) < a.tailBound + b.tailBound + 1e-9);
        CHECK(a.m.imag() > 0.0);
        // Termwise identity between Im m and the absolute series.
        CHECK(std::abs(a.m.imag() - a.imOverIm * w.imag()) < 1e-9);
    }
}

TEST_CASE("m' matches finite differences of m") {
    const auto acc = enumerateShells(kPair, {10, 1e-9, 1000000});
    const MartinContext ctx(acc);
    SampleRng rng(43u);
    const double h = 1e-5;
    for (int i = 0; i < 20; ++i) {
        const Complex z = rng.inBox(-2.0, 2.0, 0.7, 3.0);
        const Complex fd = (evalM(ctx, z + Complex{h, 0.0}).m - evalM(ctx, z - Complex{h, 0.0}).m) /
                           (2.0 * h);
        const Complex d = evalM(ctx, z).mPrime;
        CHECK(std::abs(d - fd) < 1e-5 * std::abs(d));
    }
}

TEST_CASE("martin critical points sit on the arcs and kill m'") {
    const auto trivialAcc = enumerateShells(kTrivial, {2, 1e-9, 100});
    const auto c0 = findMartinCritical(trivialAcc);
    REQUIRE(c0.size() == 1);
    CHECK(c0[0].semicircleIndex == 0);
    CHECK(std::abs(c0[0].location - Complex{0.0, 1.0}) < 1e-12);

    const auto acc = enumerateShells(kPair, {10, 1e-9, 1000000});
    const MartinContext ctx(acc);
    const auto points = findMartinCritical(ctx);
    REQUIRE(points.size() == 2);
    for (const auto& p : points) {
        CHECK(std::abs(evalM(ctx, p.location).mPrime) < 1e-8);
        const Semicircle& s = acc.config().byIndex(p.semicircleIndex);
        CHECK(std::abs(std::abs(p.location - Complex{s.center, 0.0}) - s.radius) < 1e-10);
    }

    // Symmetric configuration: critical points symmetric under z -> -conj z.
    const SemicircleConfig sym({{0, 0.0, 1.0}, {1, 3.0, 1.0}, {2, -3.0, 1.0}});
    const auto symAcc = enumerateShells(sym, {7, 1e-9, 2000000});
    const auto symPoints = findMartinCritical(symAcc);
    REQUIRE(symPoints.size() == 3);
    CHECK(std::abs(symPoints[1].location - (-std::conj(symPoints[2].location))) < 1e-8);
    CHECK(std::abs(symPoints[0].location - Complex{0.0, 1.0}) < 1e-8);  // axis by symmetry
}

TEST_CASE("condition report: trivial group") {
    const auto acc = enumerateShells(kTrivial, {2, 1e-9, 100});
    const ConditionReport r = conditionReport(acc, {0.0, 1.0});
    CHECK(r.conditionA_product == Approx(1.0));
    CHECK(r.conditionA_sum == Approx(0.0));
    CHECK(r.conditionB_sum == Approx(1.0));
    CHECK(r.verdictA == Verdict::Holds);
    CHECK(r.verdictB == Verdict::Holds);
    for (int q = 0; q < 4; ++q) CHECK(r.fourSums[q] == Approx(1.0));
}

TEST_CASE("condition report: one-generator group") {
    const auto acc = enumerateShells(kPair, {12, 1e-9, 1000000});
    const ConditionReport r = conditionReport(acc, {0.0, 1.0});

    // Partial sums increase and stabilize.
    const auto& partials = r.conditionB_shellSums;
    REQUIRE(partials.size() == 13);
    for (std::size_t i = 0; i + 1 < partials.size(); ++i) {
        CHECK(partials[i] <= partials[i + 1]);
        if (i < 8) CHECK(partials[i] < partials[i + 1]);  // strict until machine saturation
    }
    CHECK(partials.back() - partials[partials.size() - 4] < 1e-10);
    CHECK(r.verdictB == Verdict::Holds);
    CHECK(r.verdictB_decayRatio < 0.9);
    CHECK(r.verdictA == Verdict::Holds);
    CHECK(r.conditionA_product > 0.0);
    CHECK(r.conditionA_product < 1.0);
    CHECK(r.fourVerdictsAgree);
}

TEST_CASE("trend verdict classification") {
    CHECK(trendVerdict({}) == Verdict::Holds);
    CHECK(trendVerdict({1.0}) == Verdict::Holds);
    CHECK(trendVerdict({1.0, 0.1, 0.01, 0.001}) == Verdict::Holds);
    CHECK(trendVerdict({1.0, 1.0, 1.0, 1.0}) == Verdict::Inconclusive);
    CHECK(trendVerdict({1.0, 1.3, 1.7, 2.2}) == Verdict::Fails);
}

TEST_CASE("eta character") {
    const auto trivialAcc = enumerateShells(kTrivial, {2, 1e-9, 100});
    CHECK(etaCharacter(MartinContext(trivialAcc)).eta.empty());

    const auto acc = enumerateShells(kPair, {12, 1e-9, 1000000});
    const MartinContext ctx(acc);
    const AdditiveCharacter eta = etaCharacter(ctx);
    REQUIRE(eta.eta.size() == 1);

    // Additivity on the word g1 g1.
    const MoebiusMap g1 = generator(kPair, 1);
    const MoebiusMap g2 = compose(g1, g1);
    const Complex z{0.3, 1.4};
    const double etaSquare = (evalM(ctx, g2.apply(z)).m - evalM(ctx, z).m).real();
    CHECK(etaSquare == Approx(2.0 * eta.eta[0]).epsilon(1e-6));
}

TEST_CASE("martin certificate: trivial group") {
    const auto acc = enumerateShells(kTrivial, {2, 1e-9, 100});
    const MartinContext ctx(acc);
    const auto points = findMartinCritical(ctx);  // c0 = i

    // Real boundary x in (1, 3): |B(x)| = 1 and m'(x) equals the series.
    for (double x : {1.2, 1.7, 2.5}) {
        const double f = certificateFMartin(ctx, {x, 0.0}, points).value;
        CHECK(f == Approx(1.0).epsilon(1e-12));
    }
    // Interior z = 2i: |B| (1 + 1/|z|^2) / |1 + 1/z^2| = (1/3)(5/4)/(3/4) = 5/9.
    const double f2i = certificateFMartin(ctx, {0.0, 2.0}, points).value;
    CHECK(f2i == Approx(5.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("martin certificate: bounded by one, equality on the real boundary") {
    const auto acc = enumerateShells(kPair, {12, 1e-9, 1000000});
    const MartinContext ctx(acc);
    const auto points = findMartinCritical(ctx);

    for (double x : {1.3, 1.6, 1.9, 4.3, -1.8}) {
        const double f = certificateFMartin(ctx, {x, 0.0}, points).value;
        CHECK(f == Approx(1.0).epsilon(1e-6));
    }
    SampleRng rng(47u);
    for (int i = 0; i < 25; ++i) {
        const Complex z = rng.inBox(-4.0, 4.0, 0.3, 3.5);
        const double f = certificateFMartin(ctx, z, points).value;
        CHECK(f <= 1.0 + 1e-6);
        CHECK(f > 0.0);
    }
}

TEST_CASE("pole proximity is refused") {
    const auto acc = enumerateShells(kPair, {4, 1e-9, 1000});
    const MartinContext ctx(acc);
    // The pole of gamma_1 = [[1,-3],[3,-8]] sits at x = 8/3.
    CHECK_THROWS_AS(evalM(ctx, {8.0 / 3.0, 1e-12}), PoleError);
    // The zero of gamma_1 sits at x = 3.
    CHECK_THROWS_AS(evalM(ctx, {3.0, 1e-12}), PoleError);
}

TEST_CASE("Im m stays positive across the upper half plane") {
    const auto acc = enumerateShells(kPair, {8, 1e-9, 1000000});
    const MartinContext ctx(acc);
    SampleRng rng(83u);
    for (int i = 0; i < 100; ++i) {
        const Complex z = rng.inBox(-6.0, 6.0, 0.05, 5.0);
        CHECK(evalM(ctx, z).m.imag() > 0.0);
    }
}
