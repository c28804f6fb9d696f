#include "charm/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace charm {

namespace {

std::set<int> asSet(const std::vector<int>& v) { return {v.begin(), v.end()}; }

}  // namespace

ApproximationLadder::ApproximationLadder(const SemicircleConfig& full,
                                         std::vector<std::vector<int>> levels,
                                         const TruncationPolicy& policy)
    : levels_(std::move(levels)) {
    if (levels_.empty()) throw ConfigError("ladder: at least one level required");
    std::set<int> prev;
    for (std::size_t n = 0; n < levels_.size(); ++n) {
        const std::set<int> cur = asSet(levels_[n]);
        if (!cur.count(0)) throw ConfigError("ladder: every level must retain semicircle 0");
        if (n > 0) {
            if (!std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()) ||
                cur.size() <= prev.size()) {
                std::ostringstream os;
                os << "ladder: level " << n << " is not a strict superset of level " << n - 1;
                throw ConfigError(os.str());
            }
        }
        prev = cur;
    }
    std::set<int> all;
    for (const Semicircle& s : full.semicircles()) all.insert(s.index);
    if (prev != all) throw ConfigError("ladder: top level must equal the full configuration");

    accs_.reserve(levels_.size());
    for (const auto& keep : levels_)
        accs_.push_back(enumerateShells(full.subset(keep), policy));
}

ApproximationLadder buildLadder(const SemicircleConfig& full,
                                const std::vector<std::vector<int>>& levels,
                                const TruncationPolicy& policy) {
    return ApproximationLadder(full, levels, policy);
}

ConvergenceReport divisorCheck(const ApproximationLadder& ladder, Complex z, Complex zStar) {
    ConvergenceReport report;
    std::vector<double> logAbs, tails;
    for (std::size_t n = 0; n < ladder.levelCount(); ++n) {
        const GreenEvaluation e = evalG(ladder.accumulator(n), z, zStar);
        LevelValue v;
        v.level = n;
        v.absG = std::exp(e.logAbs);
        v.tail = e.tailBound;
        report.values.push_back(v);
        logAbs.push_back(e.logAbs);
        tails.push_back(e.tailBound);
    }
    for (std::size_t n = 0; n + 1 < logAbs.size(); ++n) {
        const double slack = tails[n] + tails[n + 1] + 1e-12;
        if (std::exp(logAbs[n]) < std::exp(logAbs[n + 1]) - slack) {
            report.divisorChainMonotone = false;
            std::ostringstream os;
            os << "divisor chain violated at z = " << z << ": |g_" << n
               << "| = " << std::exp(logAbs[n]) << " < |g_" << n + 1
               << "| = " << std::exp(logAbs[n + 1]) << " beyond combined tails " << slack;
            throw IdentityViolation(os.str());
        }
    }
    return report;
}

ConvergenceReport criticalTracking(const ApproximationLadder& ladder, Complex zStar,
                                   Complex probe) {
    if (ladder.levelCount() < 2)
        throw ConfigError("critical tracking requires a ladder with at least 2 levels");

    ConvergenceReport report;
    const std::size_t N = ladder.levelCount();
    const auto& fullConfig = ladder.config(N - 1);

    std::vector<std::vector<CriticalPoint>> greens(N), martins(N);
    std::vector<GreenEvaluation> gAtProbe(N);
    std::vector<MartinEvaluation> mAtProbe(N);
    for (std::size_t n = 0; n < N; ++n) {
        const OrbitAccumulator& acc = ladder.accumulator(n);
        const GreenContext gctx(acc, zStar);
        const MartinContext mctx(acc);
        greens[n] = findCriticalPoints(gctx);
        martins[n] = findMartinCritical(mctx);
        for (auto& c : martins[n]) c.greenValueAt = evalM(mctx, c.location).m.imag();
        gAtProbe[n] = evalG(gctx, probe);
        mAtProbe[n] = evalM(mctx, probe);
        LevelValue v;
        v.level = n;
        v.absG = std::exp(gAtProbe[n].logAbs);
        v.absM = mAtProbe[n].m.imag();
        v.tail = gAtProbe[n].tailBound + mAtProbe[n].tailBound;
        report.values.push_back(v);
    }

    for (const Semicircle& s : fullConfig.semicircles()) {
        TrackedCritical tc;
        tc.semicircleIndex = s.index;
        for (std::size_t n = 0; n < N; ++n) {
            const bool present = ladder.config(n).hasIndex(s.index);
            const auto findIn = [&](const std::vector<CriticalPoint>& pts)
                -> std::optional<CriticalPoint> {
                for (const auto& p : pts)
                    if (p.semicircleIndex == s.index) return p;
                return std::nullopt;
            };
            if (present) {
                // B_k^{(n)} = 1 for absent arcs; for retained arcs a lost
                // critical point is an error naming the arc.
                const auto gp = findIn(greens[n]);
                const auto mp = findIn(martins[n]);
                if (s.index != 0 && !gp) {
                    std::ostringstream os;
                    os << "critical point lost on semicircle " << s.index << " at level " << n;
                    throw SearchError(os.str());
                }
                if (gp) {
                    tc.greenLocation.emplace_back(gp->location);
                    tc.greenValue.emplace_back(gp->greenValueAt);
                } else {
                    tc.greenLocation.emplace_back(std::nullopt);
                    tc.greenValue.emplace_back(std::nullopt);
                }
                if (!mp) {
                    std::ostringstream os;
                    os << "martin critical point lost on semicircle " << s.index << " at level "
                       << n;
                    throw SearchError(os.str());
                }
                tc.martinLocation.emplace_back(mp->location);
                tc.martinHeight.emplace_back(mp->greenValueAt);
            } else {
                tc.greenLocation.emplace_back(std::nullopt);
                tc.greenValue.emplace_back(std::nullopt);
                tc.martinLocation.emplace_back(std::nullopt);
                tc.martinHeight.emplace_back(std::nullopt);
            }
        }
        for (std::size_t n = 0; n + 1 < N; ++n) {
            if (tc.greenLocation[n] && tc.greenLocation[n + 1])
                tc.greenDeltas.push_back(std::abs(*tc.greenLocation[n] - *tc.greenLocation[n + 1]));
            if (tc.martinLocation[n] && tc.martinLocation[n + 1])
                tc.martinDeltas.push_back(
                    std::abs(*tc.martinLocation[n] - *tc.martinLocation[n + 1]));
        }
        for (std::size_t i = 0; i + 1 < tc.greenDeltas.size(); ++i)
            if (tc.greenDeltas[i + 1] >= tc.greenDeltas[i]) report.deltasDecreasing = false;
        for (std::size_t i = 0; i + 1 < tc.martinDeltas.size(); ++i)
            if (tc.martinDeltas[i + 1] >= tc.martinDeltas[i]) report.deltasDecreasing = false;
        report.criticals.push_back(std::move(tc));
    }

    for (std::size_t n = 0; n + 1 < N; ++n) {
        report.gLevelDeltas.push_back(
            std::abs(std::exp(gAtProbe[n].logAbs) - std::exp(gAtProbe[n + 1].logAbs)));
        report.mLevelDeltas.push_back(std::abs(mAtProbe[n].m.imag() - mAtProbe[n + 1].m.imag()));
    }
    return report;
}

}  // namespace charm
