#include <doctest.h>

#include <cmath>
#include <numbers>

#include "charm/comb.hpp"

using namespace charm;
using doctest::Approx;

namespace {

// Independent closed form for the one-gap Green function: map the slit
// complement to the right half plane by s = sqrt((lambda - a)/(b - lambda)).
double oneGapGreenClosedForm(const Gap& g, double lambdaStar, Complex lambda) {
    const auto s = [&](Complex w) { return std::sqrt((w - g.a) / (Complex{g.b, 0.0} - w)); };
    const Complex sl = s(lambda);
    const double sStar = std::sqrt((lambdaStar - g.a) / (g.b - lambdaStar));
    return std::log(std::abs((sl + sStar) / (sl - sStar)));
}

GapSystem oneGap() { return GapSystem({{-1.0, 1.0}}, -0.5); }

GapSystem twoSymmetric() { return GapSystem({{-3.0, -1.0}, {1.0, 3.0}}, -2.0); }

}  // namespace

TEST_CASE("gap system validation") {
    CHECK_THROWS_AS(GapSystem({}, 0.0), ConfigError);
    CHECK_THROWS_AS(GapSystem({{1.0, -1.0}}, 0.0), ConfigError);           // a >= b
    CHECK_THROWS_AS(GapSystem({{-1.0, 1.0}, {0.5, 2.0}}, 0.0), ConfigError);  // overlap
    CHECK_THROWS_AS(GapSystem({{-1.0, 1.0}}, 2.0), ConfigError);           // lambda* in E
    CHECK_THROWS_AS(GapSystem({{-1.0, 1.0}}, 1.0), ConfigError);           // on the endpoint

    const GapSystem gs({{1.0, 3.0}, {-3.0, -1.0}}, 2.0);
    CHECK(gs.size() == 2);
    CHECK(gs.gaps()[0].a == -3.0);  // sorted
    CHECK(gs.indexZero() == 1);
    CHECK(gs.gapZero().a == 1.0);
}

TEST_CASE("one-gap Green map matches the closed form") {
    const GapSystem gs = oneGap();
    const MuSet mu = solveMuGreen(gs);
    CHECK(mu.values.size() == 1);  // the distinguished gap carries no unknown
    const ThetaMap theta = ThetaMap::green(gs, mu);

    // Interior grid.
    SampleRng rng(71u);
    for (int i = 0; i < 25; ++i) {
        const Complex lambda = rng.inBox(-4.0, 4.0, 0.05, 3.0);
        const auto ev = theta.evaluate(lambda);
        const double expected = oneGapGreenClosedForm(gs.gaps()[0], gs.lambdaStar(), lambda);
        CHECK(std::abs(ev.value.imag() - expected) < 1e-8 + 10.0 * ev.tail);
        CHECK(ev.value.imag() > 0.0);
    }

    // In-gap boundary values.
    for (double x : {-0.9, -0.7, 0.2, 0.8}) {
        const auto ev = theta.evaluate({x, 0.0});
        const double expected = oneGapGreenClosedForm(gs.gaps()[0], gs.lambdaStar(), {x, 1e-13});
        CHECK(std::abs(ev.value.imag() - expected) < 1e-7);
    }

    // Vanishing on E.
    for (double x : {2.0, 5.0, -2.0, -5.0}) {
        const auto ev = theta.evaluate({x, 0.0});
        CHECK(std::abs(ev.value.imag()) < 1e-8);
    }

    // Normalization: theta(b0) = 0 (anchor) and theta(a0) = pi.
    const CombParameters params = extractComb(gs, mu);
    CHECK(params.slits.empty());
    CHECK(params.thetaAtB0 == 0.0);
    CHECK(params.thetaAtA0 == Approx(std::numbers::pi).epsilon(1e-9));
}

TEST_CASE("green derivative: conjugate symmetry and the pole residue") {
    const GapSystem gs = oneGap();
    const MuSet mu = solveMuGreen(gs);

    for (const Complex lambda : {Complex{0.3, 1.2}, Complex{-2.4, 0.7}}) {
        const Complex up = thetaGreenDerivative(gs, mu, lambda);
        const Complex down = thetaGreenDerivative(gs, mu, std::conj(lambda));
        CHECK(std::abs(down - std::conj(up)) < 1e-12 * std::abs(up));
    }

    // Counterclockwise contour around lambda*: the upper semicircle uses the
    // formula, the lower one its continuation through the gap (sign flip of
    // the gap-0 root). Total winding = 2 pi.
    const ThetaMap theta = ThetaMap::green(gs, mu);
    const auto f = [&](Complex z) { return theta.derivative(z); };
    const auto fNeg = [&](Complex z) { return -theta.derivative(z); };
    const double delta = 0.1;
    const QuadResult upper =
        integrateArc(f, {gs.lambdaStar(), 0.0}, delta, 0.0, std::numbers::pi);
    const QuadResult lower =
        integrateArc(fNeg, {gs.lambdaStar(), 0.0}, delta, std::numbers::pi, 2.0 * std::numbers::pi);
    const Complex contour = upper.value + lower.value;
    CHECK(contour.real() == Approx(2.0 * std::numbers::pi).epsilon(1e-9));
    CHECK(std::abs(contour.imag()) < 1e-9);

    CHECK_THROWS_AS(thetaGreenDerivative(gs, mu, {1.0 + 1e-12, 1e-12}), PoleError);
    CHECK_THROWS_AS(theta.evaluate({gs.lambdaStar(), 0.0}), PoleError);
}

TEST_CASE("one-gap Martin map: mu0 = 0 and M = 2 |Im sqrt(lambda^2 - 1)|") {
    const GapSystem gs = oneGap();
    const MuSet mu = solveMuMartin(gs);
    REQUIRE(mu.values.size() == 1);
    CHECK(mu.values[0] == Approx(0.0).epsilon(1e-10));
    const auto residuals = muResiduals(gs, mu);
    for (double r : residuals) CHECK(std::abs(r) < 1e-10);

    const ThetaMap theta = ThetaMap::martin(gs, mu);
    const auto closedForm = [](Complex lambda) {
        return 2.0 * std::abs((std::sqrt(lambda - 1.0) * std::sqrt(lambda + 1.0)).imag());
    };
    SampleRng rng(73u);
    for (int i = 0; i < 25; ++i) {
        const Complex lambda = rng.inBox(-4.0, 4.0, 0.05, 3.0);
        const auto ev = theta.evaluate(lambda);
        CHECK(std::abs(ev.value.imag() - closedForm(lambda)) < 1e-8 + 10.0 * ev.tail);
    }
    for (double x : {-0.8, -0.3, 0.4, 0.9}) {
        const auto ev = theta.evaluate({x, 0.0});
        CHECK(std::abs(ev.value.imag() - 2.0 * std::sqrt(1.0 - x * x)) < 1e-8);
    }
    for (double x : {2.0, 5.0, -2.0, -5.0}) {
        const auto ev = theta.evaluate({x, 0.0});
        CHECK(std::abs(ev.value.imag()) < 1e-8);
    }
}

TEST_CASE("martin normalization point must lie left of mu0") {
    const GapSystem gs({{-1.0, 1.0}}, 0.5);  // lambda* right of the solved mu0 = 0
    const MuSet mu = solveMuMartin(gs);
    CHECK_THROWS_AS(ThetaMap::martin(gs, mu), ConfigError);
}

TEST_CASE("two symmetric gaps: independent bisection oracle for mu") {
    const GapSystem gs = twoSymmetric();

    const MuSet muG = solveMuGreen(gs);
    for (double r : muResiduals(gs, muG)) CHECK(std::abs(r) < 1e-10);
    CHECK(gs.gaps()[1].contains(muG.values[1]));

    // Independent 1-D bisection on the same realness residual.
    const auto residualOf = [&](double m1) {
        MuSet probe = muG;
        probe.values[1] = m1;
        return muResiduals(gs, probe)[0];
    };
    double lo = 1.0 + 1e-9, hi = 3.0 - 1e-9;
    double flo = residualOf(lo);
    REQUIRE(flo * residualOf(hi) < 0.0);
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = residualOf(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    CHECK(muG.values[1] == Approx(0.5 * (lo + hi)).epsilon(1e-9));

    // Perturbing mu off the solution drives the residual away from zero with
    // a sign change across it.
    CHECK(residualOf(muG.values[1] - 0.05) * residualOf(muG.values[1] + 0.05) < 0.0);

    // Martin criticals are symmetric under negation.
    const MuSet muM = solveMuMartin(gs);
    CHECK(muM.values[0] == Approx(-muM.values[1]).epsilon(1e-9));
    for (double r : muResiduals(gs, muM)) CHECK(std::abs(r) < 1e-10);
}

TEST_CASE("comb extraction and the dual-path slit height") {
    const GapSystem gs = twoSymmetric();
    const MuSet mu = solveMuGreen(gs);
    const CombParameters params = extractComb(gs, mu);
    REQUIRE(params.slits.size() == 1);
    CHECK(params.slits[0].omega > 0.0);
    CHECK(params.slits[0].omega < std::numbers::pi);
    CHECK(params.slits[0].height > 0.0);
    CHECK(params.thetaAtA0 == Approx(std::numbers::pi).epsilon(1e-9));

    // Dual path: approach the critical point vertically; theta'(mu) = 0 so
    // the O(delta) term vanishes.
    const ThetaMap theta = ThetaMap::green(gs, mu);
    const double m1 = mu.values[1];
    const auto above = theta.evaluate({m1, 1e-4});
    CHECK(std::abs(above.value.imag() - params.slits[0].height) < 1e-6);

    // theta'(mu_k) vanishes by the product structure.
    CHECK(std::abs(thetaGreenDerivative(gs, mu, {m1, 0.5 * 1e-30})) < 1e-8);
}

TEST_CASE("path independence of the theta evaluation") {
    const GapSystem gs = twoSymmetric();
    const MuSet mu = solveMuGreen(gs);
    const ThetaMap theta = ThetaMap::green(gs, mu);

    // Reach 1.9 + i 1e-3 directly, and by the real route plus a vertical lift.
    const Complex target{1.9, 1e-3};
    const auto direct = theta.evaluate(target);
    const auto alongReal = theta.evaluate({1.9, 0.0});
    const QuadResult lift = integrateSegment([&](Complex z) { return theta.derivative(z); },
                                             {1.9, 0.0}, target);
    const Complex viaBoundary = alongReal.value + lift.value;
    CHECK(std::abs(direct.value - viaBoundary) < 1e-8);
}

TEST_CASE("widom sum over the gaps") {
    const GapSystem gs = oneGap();
    const MuSet muG = solveMuGreen(gs);
    const MuSet muM = solveMuMartin(gs);
    const WidomGapSum w = widomSumGaps(gs, muG, muM);
    REQUIRE(w.terms.size() == 1);
    // G(0, -1/2) = log(2 + sqrt 3) for the gap (-1, 1).
    CHECK(w.sum == Approx(std::log(2.0 + std::sqrt(3.0))).epsilon(1e-8));
    CHECK(w.sum > 0.0);
}

TEST_CASE("akhiezer-levin limit") {
    const GapSystem gs = oneGap();
    const MuSet mu = solveMuMartin(gs);
    const AkhiezerLevinResult r = akhiezerLevinLimit(gs, mu);
    CHECK(!r.inconclusive);
    CHECK(r.limit == Approx(2.0).epsilon(1e-3));
    CHECK(r.limit >= 0.0);

    // Scaling the gaps by s scales the limit by 1/s.
    const GapSystem scaled({{-2.0, 2.0}}, -1.0);
    const MuSet muScaled = solveMuMartin(scaled);
    const AkhiezerLevinResult rs = akhiezerLevinLimit(scaled, muScaled);
    CHECK(rs.limit == Approx(1.0).epsilon(1e-3));
    CHECK(r.limit / rs.limit == Approx(2.0).epsilon(1e-3));
}

TEST_CASE("reflection symmetry of the two-gap Green map") {
    // Mirroring the system about 0 swaps the roles of the gaps; the Green
    // function obeys G(lambda, lambda*) = G(-lambda, -lambda*). The two maps
    // use different anchors and pole positions, so this crosses the whole
    // pipeline (solver, branch rules, path integration).
    const GapSystem gs({{-3.0, -1.0}, {1.0, 3.0}}, -2.0);
    const GapSystem mirrored({{-3.0, -1.0}, {1.0, 3.0}}, 2.0);
    const ThetaMap theta = ThetaMap::green(gs, solveMuGreen(gs));
    const ThetaMap thetaMirrored = ThetaMap::green(mirrored, solveMuGreen(mirrored));

    SampleRng rng(79u);
    for (int i = 0; i < 12; ++i) {
        const Complex lambda = rng.inBox(-5.0, 5.0, 0.1, 3.0);
        const double g1 = theta.evaluate(lambda).value.imag();
        const double g2 = thetaMirrored.evaluate(Complex{-lambda.real(), lambda.imag()})
                              .value.imag();
        CHECK(g1 == Approx(g2).epsilon(1e-8));
    }
    // Also at the Martin criticals (mirrored under negation).
    const MuSet muM = solveMuMartin(gs);
    const double h1 = theta.evaluate({muM.values[1], 0.0}).value.imag();
    const double h2 = thetaMirrored.evaluate({-muM.values[1], 0.0}).value.imag();
    CHECK(h1 == Approx(h2).epsilon(1e-9));
}
