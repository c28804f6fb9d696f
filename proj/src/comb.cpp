#include "charm/comb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace charm {

namespace {

constexpr double kBranchProximity = 1e-10;

Complex principalGapRoot(const Gap& g, Complex lambda) {
    return std::sqrt(lambda - g.a) * std::sqrt(lambda - g.b);
}

}  // namespace

GapSystem::GapSystem(std::vector<Gap> gaps, double lambdaStar) : lambdaStar_(lambdaStar) {
    if (gaps.empty()) throw ConfigError("gap system: at least one gap required");
    for (const Gap& g : gaps)
        if (!(g.a < g.b)) throw ConfigError("gap system: each gap needs a < b");
    std::sort(gaps.begin(), gaps.end(), [](const Gap& p, const Gap& q) { return p.a < q.a; });
    for (std::size_t i = 0; i + 1 < gaps.size(); ++i)
        if (!(gaps[i].b < gaps[i + 1].a))
            throw ConfigError("gap system: gaps must have disjoint closures");
    gaps_ = std::move(gaps);
    bool found = false;
    for (std::size_t j = 0; j < gaps_.size(); ++j) {
        if (gaps_[j].contains(lambdaStar_)) {
            indexZero_ = j;
            found = true;
            break;
        }
    }
    if (!found)
        throw ConfigError("gap system: lambda_star must lie strictly inside one of the gaps");
}

ThetaMap::ThetaMap(const GapSystem& gaps, MuSet mu, bool isMartin)
    : gaps_(&gaps), mu_(std::move(mu)), martin_(isMartin) {
    if (mu_.values.size() != gaps.size())
        throw ConfigError("theta map: mu set size does not match the gap count");
    const std::size_t j0 = gaps.indexZero();
    for (std::size_t j = 0; j < gaps.size(); ++j) {
        if (!mu_.hasGap(j, j0)) continue;
        if (!gaps.gaps()[j].contains(mu_.values[j]))
            throw ConfigError("theta map: mu must lie strictly inside its gap");
    }
    const Complex lambdaStar{gaps.lambdaStar(), 0.0};
    for (const Gap& g : gaps.gaps()) numeratorConst_.push_back(principalGapRoot(g, lambdaStar));
}

ThetaMap ThetaMap::green(const GapSystem& gaps, const MuSet& mu) {
    if (mu.kind != MuSet::Kind::Green) throw ConfigError("theta map: expected a Green mu set");
    ThetaMap map(gaps, mu, false);
    map.anchor_ = gaps.gapZero().b;
    return map;
}

ThetaMap ThetaMap::martin(const GapSystem& gaps, const MuSet& mu) {
    if (mu.kind != MuSet::Kind::Martin) throw ConfigError("theta map: expected a Martin mu set");
    ThetaMap map(gaps, mu, true);
    map.anchor_ = gaps.gapZero().a;

    const std::size_t j0 = gaps.indexZero();
    if (!(gaps.lambdaStar() < mu.values[j0]))
        throw ConfigError(
            "theta map: the Martin normalization point lambda_star must lie left of the "
            "solved mu in the distinguished gap");

    // Unnormalized slope at i*infinity: theta_1'(lambda) -> i K with
    // K = prod_k R_k(lambda*) / (lambda* - mu_k); scale so that
    // lim M(i eta)/eta = 2 / halfwidth(gap 0).
    Complex K{1.0, 0.0};
    for (std::size_t j = 0; j < gaps.size(); ++j)
        K *= map.numeratorConst_[j] / (gaps.lambdaStar() - mu.values[j]);
    const double a1 = -K.imag();
    if (!(a1 > 0.0)) throw ConfigError("theta map: degenerate Martin normalization");
    map.prefactor_ = (2.0 / gaps.gapZero().halfWidth()) / a1;
    return map;
}

Complex ThetaMap::productOverGaps(Complex lambda, std::ptrdiff_t skipGap) const {
    const GapSystem& gs = *gaps_;
    const double lambdaStar = gs.lambdaStar();
    const std::size_t j0 = gs.indexZero();
    Complex out{1.0, 0.0};
    for (std::size_t j = 0; j < gs.size(); ++j) {
        const Gap& g = gs.gaps()[j];
        out *= numeratorConst_[j];
        if (static_cast<std::ptrdiff_t>(j) != skipGap) out /= principalGapRoot(g, lambda);
        if (mu_.hasGap(j, j0)) out *= (lambda - mu_.values[j]) / (lambdaStar - mu_.values[j]);
    }
    if (martin_)
        out *= Complex{0.0, 1.0} * prefactor_;
    else
        out *= Complex{0.0, 1.0} / (lambdaStar - lambda);
    return out;
}

Complex ThetaMap::derivative(Complex lambda) const {
    for (const Gap& g : gaps_->gaps()) {
        if (std::abs(lambda - Complex{g.a, 0.0}) < kBranchProximity ||
            std::abs(lambda - Complex{g.b, 0.0}) < kBranchProximity) {
            std::ostringstream os;
            os << "theta derivative evaluated within 1e-10 of the branch point of gap [" << g.a
               << ", " << g.b << "]";
            throw PoleError(os.str());
        }
    }
    return productOverGaps(lambda, -1);
}

Complex ThetaMap::derivativeWithGapFactored(std::size_t j, Complex lambda) const {
    return productOverGaps(lambda, static_cast<std::ptrdiff_t>(j));
}

namespace {

// Distance from z to the straight segment [p, q].
double distanceToSegment(Complex z, Complex p, Complex q) {
    const Complex d = q - p;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(z - p);
    double t = ((z - p) * std::conj(d)).real() / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(z - (p + t * d));
}

}  // namespace

Evaluated<Complex> ThetaMap::evaluate(Complex lambda, double tol) const {
    const GapSystem& gs = *gaps_;
    const double lambdaStar = gs.lambdaStar();
    if (!martin_ && std::abs(lambda - Complex{lambdaStar, 0.0}) < 1e-10)
        throw PoleError("theta evaluation at the Green pole lambda*");
    const auto f = [this](Complex z) { return productOverGaps(z, -1); };

    KahanComplex total;
    double err = 0.0;
    int segments = 0;
    const auto addSegment = [&](Complex p, Complex q) {
        const QuadResult r = integrateSegment(f, p, q, tol);
        total.add(r.value);
        err += r.error;
        ++segments;
    };

    if (lambda.imag() > 0.0) {
        // Straight shot when the segment stays clear of the other
        // singularities; otherwise go over the top.
        std::vector<Complex> singular;
        for (const Gap& g : gs.gaps()) {
            singular.push_back({g.a, 0.0});
            singular.push_back({g.b, 0.0});
        }
        if (!martin_) singular.push_back({lambdaStar, 0.0});
        const Complex a{anchor_, 0.0};
        double minDist = std::numeric_limits<double>::infinity();
        for (const Complex& s : singular) {
            if (std::abs(s - a) < 1e-15) continue;  // the anchor itself
            minDist = std::min(minDist, distanceToSegment(s, a, lambda));
        }
        if (minDist >= 0.05 * std::abs(lambda - a)) {
            addSegment(a, lambda);
        } else {
            const double height = std::max(1.0, 0.75 * std::abs(lambda - a));
            const double H = std::max(height, lambda.imag());
            addSegment(a, {anchor_, H});
            addSegment({anchor_, H}, {lambda.real(), H});
            addSegment({lambda.real(), H}, lambda);
        }
        Evaluated<Complex> out;
        out.value = total.value();
        out.tail = err;
        out.shells = segments;
        return out;
    }

    // Real target: walk the real axis, splitting at branch points, with a
    // semicircle detour above the Green pole.
    const double x = lambda.real();
    const bool rightward = x >= anchor_;
    std::vector<double> events;
    for (const Gap& g : gs.gaps()) {
        for (double e : {g.a, g.b}) {
            if (e > std::min(anchor_, x) + 1e-15 && e < std::max(anchor_, x) - 1e-15)
                events.push_back(e);
        }
    }
    const bool poleOnPath = !martin_ && lambdaStar > std::min(anchor_, x) &&
                            lambdaStar < std::max(anchor_, x);
    if (poleOnPath) events.push_back(lambdaStar);
    std::sort(events.begin(), events.end());
    if (!rightward) std::reverse(events.begin(), events.end());

    std::vector<double> stops{anchor_};
    stops.insert(stops.end(), events.begin(), events.end());
    stops.push_back(x);

    for (std::size_t i = 0; i + 1 < stops.size(); ++i) {
        const double p = stops[i];
        const double q = stops[i + 1];
        if (poleOnPath && q == lambdaStar) {
            // Segment up to the detour, then the arc above the pole.
            const double next = stops.at(i + 2);
            const double delta = 0.25 * std::min(std::abs(lambdaStar - p),
                                                 std::abs(next - lambdaStar));
            const double side = rightward ? -delta : delta;
            addSegment({p, 0.0}, {lambdaStar + side, 0.0});
            const QuadResult arc = integrateArc(f, {lambdaStar, 0.0}, delta,
                                                rightward ? std::numbers::pi : 0.0,
                                                rightward ? 0.0 : std::numbers::pi, tol);
            total.add(arc.value);
            err += arc.error;
            ++segments;
            // Continue from the far side of the detour.
            const double resume = lambdaStar - side;
            addSegment({resume, 0.0}, {next, 0.0});
            ++i;  // `next` is consumed
            continue;
        }
        if (p == q) continue;
        addSegment({p, 0.0}, {q, 0.0});
    }

    Evaluated<Complex> out;
    out.value = total.value();
    out.tail = err;
    out.shells = segments;
    return out;
}

Complex thetaGreenDerivative(const GapSystem& gaps, const MuSet& mu, Complex lambda) {
    return ThetaMap::green(gaps, mu).derivative(lambda);
}

Complex thetaMartin(const GapSystem& gaps, const MuSet& mu, Complex lambda, double* quadError) {
    const ThetaMap map = ThetaMap::martin(gaps, mu);
    const auto r = map.evaluate(lambda);
    if (quadError) *quadError = r.tail;
    return r.value;
}

namespace {

struct ResidualSystem {
    const GapSystem& gaps;
    MuSet mu;
    std::vector<std::size_t> active;          // gap positions carrying an unknown
    std::vector<Complex> numeratorConst;      // R_k(lambda* + i0), fixed

    // The slit-height condition for gap j: the gap integral of theta' must be
    // purely real. Global constants (the normalization denominators and the i
    // prefactors) are dropped so the residual stays smooth in mu; the zero
    // set is unchanged. The Chebyshev substitution absorbs R_j analytically.
    double residual(std::size_t j, int order = 64) const {
        const Gap& g = gaps.gaps()[j];
        const std::size_t j0 = gaps.indexZero();
        const double lambdaStar = gaps.lambdaStar();
        const GaussRule& rule = gaussLegendre(order);
        const double pi = std::numbers::pi;
        KahanSum im, absSum;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double phi = 0.5 * pi * (rule.nodes[i] + 1.0);
            const Complex t{g.mid() + g.halfWidth() * std::cos(phi), 0.0};
            Complex H{1.0, 0.0};
            for (std::size_t k = 0; k < gaps.size(); ++k) {
                H *= numeratorConst[k];
                if (k != j) H /= principalGapRoot(gaps.gaps()[k], t);
                if (mu.hasGap(k, j0)) H *= t - mu.values[k];
            }
            if (mu.kind == MuSet::Kind::Green) H /= lambdaStar - t;
            im.add(rule.weights[i] * H.imag());
            absSum.add(rule.weights[i] * std::abs(H));
        }
        const double scale = std::max(absSum.value(), 1e-300);
        return im.value() / scale;
    }

    std::vector<double> residuals(int order = 64) const {
        std::vector<double> out;
        for (std::size_t j : active) out.push_back(residual(j, order));
        return out;
    }

    double maxAbsResidual() const {
        double m = 0.0;
        for (double r : residuals()) m = std::max(m, std::abs(r));
        return m;
    }
};

void solveLinear(std::vector<std::vector<double>>& A, std::vector<double>& b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[pivot][col])) pivot = r;
        std::swap(A[col], A[pivot]);
        std::swap(b[col], b[pivot]);
        if (std::abs(A[col][col]) < 1e-300) throw SearchError("mu solver: singular Jacobian");
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = A[r][col] / A[col][col];
            for (std::size_t c = col; c < n; ++c) A[r][c] -= factor * A[col][c];
            b[r] -= factor * b[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= A[i][i];
}

MuSet solveMu(const GapSystem& gaps, MuSet::Kind kind, const MuSolveOptions& options) {
    ResidualSystem sys{gaps, MuSet{kind, {}}, {}, {}};
    const std::size_t j0 = gaps.indexZero();
    for (const Gap& g : gaps.gaps())
        sys.numeratorConst.push_back(principalGapRoot(g, {gaps.lambdaStar(), 0.0}));
    sys.mu.values.assign(gaps.size(), 0.0);
    for (std::size_t j = 0; j < gaps.size(); ++j) {
        sys.mu.values[j] = gaps.gaps()[j].mid();
        if (sys.mu.hasGap(j, j0)) sys.active.push_back(j);
    }
    // The Martin normalization point must stay left of mu_0 during the solve:
    // seed the distinguished gap with a point right of lambda* when needed.
    if (kind == MuSet::Kind::Martin && !(gaps.lambdaStar() < sys.mu.values[j0]))
        sys.mu.values[j0] = 0.5 * (gaps.lambdaStar() + gaps.gaps()[j0].b);
    if (sys.active.empty()) return sys.mu;

    std::ostringstream trace;
    const auto bisectCoordinate = [&](std::size_t j, double tol) {
        const Gap& g = gaps.gaps()[j];
        const double margin = 1e-12 * g.width();
        double lo = g.a + margin, hi = g.b - margin;
        const double save = sys.mu.values[j];
        sys.mu.values[j] = lo;
        double flo = sys.residual(j);
        sys.mu.values[j] = hi;
        double fhi = sys.residual(j);
        if (flo == 0.0 || fhi == 0.0 || flo * fhi > 0.0) {
            sys.mu.values[j] = save;  // no bracket: leave the coordinate alone
            return;
        }
        for (int it = 0; it < 80 && hi - lo > tol * g.width(); ++it) {
            const double mid = 0.5 * (lo + hi);
            sys.mu.values[j] = mid;
            const double fm = sys.residual(j);
            if (fm == 0.0) return;
            if ((fm > 0.0) == (flo > 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
                fhi = fm;
            }
        }
        sys.mu.values[j] = 0.5 * (lo + hi);
    };

    // Global stage: coordinate bisection sweeps.
    for (int sweep = 0; sweep < 4; ++sweep)
        for (std::size_t j : sys.active) bisectCoordinate(j, 1e-4);

    // Polish: damped Newton with finite-difference Jacobian.
    const std::size_t n = sys.active.size();
    for (int iter = 0; iter < options.maxIterations; ++iter) {
        std::vector<double> r = sys.residuals();
        double rmax = 0.0;
        for (double v : r) rmax = std::max(rmax, std::abs(v));
        trace << "iter " << iter << ": max residual " << rmax << "\n";
        if (rmax < options.residualTol) return sys.mu;

        std::vector<std::vector<double>> J(n, std::vector<double>(n, 0.0));
        for (std::size_t cj = 0; cj < n; ++cj) {
            const std::size_t gap = sys.active[cj];
            const double h = 1e-7 * gaps.gaps()[gap].width();
            const double save = sys.mu.values[gap];
            sys.mu.values[gap] = save + h;
            const std::vector<double> rp = sys.residuals();
            sys.mu.values[gap] = save;
            for (std::size_t ri = 0; ri < n; ++ri) J[ri][cj] = (rp[ri] - r[ri]) / h;
        }
        std::vector<double> step = r;
        solveLinear(J, step);

        double damp = 1.0;
        // Keep every coordinate strictly inside its gap.
        for (std::size_t cj = 0; cj < n; ++cj) {
            const Gap& g = gaps.gaps()[sys.active[cj]];
            const double cur = sys.mu.values[sys.active[cj]];
            const double margin = 1e-9 * g.width();
            double target = cur - damp * step[cj];
            while (damp > 1e-6 && (target <= g.a + margin || target >= g.b - margin)) {
                damp *= 0.5;
                target = cur - damp * step[cj];
            }
        }
        const std::vector<double> saved = sys.mu.values;
        bool improved = false;
        for (int half = 0; half < 8; ++half) {
            for (std::size_t cj = 0; cj < n; ++cj)
                sys.mu.values[sys.active[cj]] = saved[sys.active[cj]] - damp * step[cj];
            if (sys.maxAbsResidual() < rmax) {
                improved = true;
                break;
            }
            damp *= 0.5;
        }
        if (!improved) {
            // Newton stalled: fall back to a tight bisection sweep.
            sys.mu.values = saved;
            for (std::size_t j : sys.active) bisectCoordinate(j, 1e-13);
            if (sys.maxAbsResidual() < options.residualTol) return sys.mu;
        }
    }
    throw SearchError("mu solver: no convergence after " +
                      std::to_string(options.maxIterations) + " iterations\n" + trace.str());
}

}  // namespace

MuSet solveMuGreen(const GapSystem& gaps, const MuSolveOptions& options) {
    return solveMu(gaps, MuSet::Kind::Green, options);
}

MuSet solveMuMartin(const GapSystem& gaps, const MuSolveOptions& options) {
    return solveMu(gaps, MuSet::Kind::Martin, options);
}

std::vector<double> muResiduals(const GapSystem& gaps, const MuSet& mu) {
    ResidualSystem sys{gaps, mu, {}, {}};
    const std::size_t j0 = gaps.indexZero();
    for (const Gap& g : gaps.gaps())
        sys.numeratorConst.push_back(principalGapRoot(g, {gaps.lambdaStar(), 0.0}));
    for (std::size_t j = 0; j < gaps.size(); ++j)
        if (mu.hasGap(j, j0)) sys.active.push_back(j);
    return sys.residuals();
}

CombParameters extractComb(const GapSystem& gaps, const MuSet& mu) {
    const bool isMartin = mu.kind == MuSet::Kind::Martin;
    const ThetaMap map = isMartin ? ThetaMap::martin(gaps, mu) : ThetaMap::green(gaps, mu);
    const std::size_t j0 = gaps.indexZero();

    CombParameters out;
    out.kind = mu.kind;
    for (std::size_t j = 0; j < gaps.size(); ++j) {
        if (!mu.hasGap(j, j0)) continue;
        const auto theta = map.evaluate({mu.values[j], 0.0});
        CombSlit slit;
        slit.gapPosition = static_cast<int>(j);
        slit.omega = theta.value.real();
        slit.height = theta.value.imag();
        out.slits.push_back(slit);
    }

    for (std::size_t i = 0; i < out.slits.size(); ++i) {
        if (!(out.slits[i].height > 0.0))
            throw IdentityViolation("comb extraction: nonpositive slit height");
        for (std::size_t j = i + 1; j < out.slits.size(); ++j)
            if (std::abs(out.slits[i].omega - out.slits[j].omega) < 1e-12)
                throw IdentityViolation("comb extraction: coincident slit abscissae");
    }
    if (!isMartin) {
        for (const CombSlit& s : out.slits)
            if (!(s.omega > 0.0 && s.omega < std::numbers::pi))
                throw IdentityViolation("comb extraction: slit outside the base (0, pi)");
        out.thetaAtB0 = 0.0;  // the anchor
        const auto atA0 = map.evaluate({gaps.gapZero().a, 0.0});
        out.thetaAtA0 = atA0.value.real();
        const double defect = std::abs(atA0.value - Complex{std::numbers::pi, 0.0});
        if (defect > 1e-6) {
            std::ostringstream os;
            os << "green comb normalization failed: theta(a0) = " << atA0.value
               << " differs from pi by " << defect;
            throw IdentityViolation(os.str());
        }
    }
    return out;
}

WidomGapSum widomSumGaps(const GapSystem& gaps, const MuSet& muGreen, const MuSet& muMartin) {
    if (muGreen.kind != MuSet::Kind::Green || muMartin.kind != MuSet::Kind::Martin)
        throw ConfigError("widom gap sum: expected one Green and one Martin mu set");
    const ThetaMap greenMap = ThetaMap::green(gaps, muGreen);
    WidomGapSum out;
    KahanSum sum;
    for (std::size_t j = 0; j < gaps.size(); ++j) {
        const double term = greenMap.evaluate({muMartin.values[j], 0.0}).value.imag();
        out.terms.push_back(term);
        sum.add(term);
    }
    out.sum = sum.value();
    return out;
}

AkhiezerLevinResult akhiezerLevinLimit(const GapSystem& gaps, const MuSet& muMartin) {
    const ThetaMap map = ThetaMap::martin(gaps, muMartin);
    AkhiezerLevinResult out;
    const double etas[3] = {1e2, 1e3, 1e4};
    for (int i = 0; i < 3; ++i)
        out.samples[i] = map.evaluate({0.0, etas[i]}).value.imag() / etas[i];

    const double d01 = out.samples[1] - out.samples[0];
    const double d12 = out.samples[2] - out.samples[1];
    if (d01 * d12 < 0.0) out.inconclusive = true;

    // Lagrange extrapolation to 1/eta = 0.
    double inv[3] = {1e-2, 1e-3, 1e-4};
    double limit = 0.0;
    for (int i = 0; i < 3; ++i) {
        double coeff = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != i) coeff *= -inv[j] / (inv[i] - inv[j]);
        limit += coeff * out.samples[i];
    }
    out.limit = limit;
    return out;
}

}  // namespace charm
