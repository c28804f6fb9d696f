// charm-kit: command-line front end for the Fuchsian-group / comb-map toolkit.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "charm/boundary.hpp"
#include "charm/config_io.hpp"
#include "charm/scenario.hpp"
#include "charm/version.hpp"

using namespace charm;
using nlohmann::json;

namespace {

Complex parseComplex(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw ConfigError("expected a complex value as \"re,im\", got \"" + text + "\"");
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
}

std::vector<std::vector<int>> parseLevels(const std::string& text) {
    std::vector<std::vector<int>> levels;
    std::istringstream byLevel(text);
    std::string level;
    while (std::getline(byLevel, level, ';')) {
        std::vector<int> keep;
        std::istringstream byIndex(level);
        std::string idx;
        while (std::getline(byIndex, idx, ',')) keep.push_back(std::stoi(idx));
        levels.push_back(keep);
    }
    return levels;
}

struct XRange {
    double lo = 0.0, hi = 0.0;
    int count = 0;
};

XRange parseXRange(const std::string& text) {
    XRange r;
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw ConfigError("expected --x-range as \"a:b:n\"");
    r.lo = std::stod(text.substr(0, c1));
    r.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    r.count = std::stoi(text.substr(c2 + 1));
    if (r.count < 2) throw ConfigError("--x-range needs n >= 2");
    return r;
}

std::vector<BlaschkeFactor> parseZeros(const std::string& text) {
    std::vector<BlaschkeFactor> factors;
    std::istringstream byFactor(text);
    std::string item;
    while (std::getline(byFactor, item, ';')) factors.push_back({parseComplex(item)});
    return factors;
}

OrbitAccumulator loadAccumulator(const std::string& path) {
    auto [config, policy] = parseSemicircleConfig(readFile(path));
    return enumerateShells(config, policy);
}

void writeOut(const std::string& text, const std::string& outPath) {
    if (outPath.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(outPath, std::ios::binary);
    if (!out) throw ConfigError("cannot write to " + outPath);
    out << text;
}

json complexJson(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json criticalPointsJson(const std::vector<CriticalPoint>& points) {
    json arr = json::array();
    for (const CriticalPoint& p : points) {
        json entry;
        entry["semicircle"] = p.semicircleIndex;
        entry["location"] = complexJson(p.location);
        entry["green_value"] = p.greenValueAt;
        arr.push_back(entry);
    }
    return arr;
}

int exitCodeOf(const std::vector<RunReport>& reports) {
    bool anyFail = false, anyInconclusive = false;
    for (const auto& r : reports)
        for (const auto& c : r.checks) {
            if (c.status == CheckStatus::Fail) anyFail = true;
            if (c.status == CheckStatus::Inconclusive) anyInconclusive = true;
        }
    if (anyFail) return 1;
    if (anyInconclusive) return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"charm-kit: Fuchsian groups, Blaschke/Green and Martin functions, comb maps"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string configPath, gapsPath, scenarioPath, outPath, format = "json";
    std::string zText, zStarText = "0.0,1.0", lambdaText, levelsText, zerosText, xRangeText;
    std::string mapKind = "green";
    double xValue = 0.0;
    bool timings = false, verifyAll = false;

    // ---- green ----
    auto* green = app.add_subcommand("green", "complex Green function of the group");
    auto* greenEval = green->add_subcommand("eval", "evaluate g(z, z*)");
    greenEval->add_option("--config", configPath)->required();
    greenEval->add_option("--z", zText)->required();
    greenEval->add_option("--zstar", zStarText)->required();
    auto* greenCritical = green->add_subcommand("critical", "critical points and Widom product");
    greenCritical->add_option("--config", configPath)->required();
    greenCritical->add_option("--zstar", zStarText)->required();

    // ---- martin ----
    auto* martin = app.add_subcommand("martin", "complex Martin function of the group");
    auto* martinEval = martin->add_subcommand("eval", "evaluate m, m', Im m/Im z");
    martinEval->add_option("--config", configPath)->required();
    martinEval->add_option("--z", zText)->required();
    auto* martinCritical = martin->add_subcommand("critical", "zeros of m' on the arcs");
    martinCritical->add_option("--config", configPath)->required();
    auto* martinConditions = martin->add_subcommand("conditions", "conditions (A) and (b)");
    martinConditions->add_option("--config", configPath)->required();
    martinConditions->add_option("--zstar", zStarText);

    // ---- approx ----
    auto* approx = app.add_subcommand("approx", "finitely generated approximations");
    auto* approxSweep = approx->add_subcommand("sweep", "per-level values and deltas (CSV)");
    approxSweep->add_option("--config", configPath)->required();
    approxSweep->add_option("--levels", levelsText, "e.g. \"0;0,1;0,1,2\"")->required();
    approxSweep->add_option("--z", zText)->required();
    approxSweep->add_option("--zstar", zStarText)->required();

    // ---- boundary ----
    auto* boundary = app.add_subcommand("boundary", "boundary identities and densities");
    auto* bJulia = boundary->add_subcommand("julia", "angular derivative of a finite product");
    bJulia->add_option("--zeros", zerosText, "factors as \"re,im;re,im;...\"")->required();
    bJulia->add_option("--x", xValue)->required();
    auto* bGPrime = boundary->add_subcommand("gprime", "|g'(x, z*)| boundary series");
    bGPrime->add_option("--config", configPath)->required();
    bGPrime->add_option("--zstar", zStarText);
    bGPrime->add_option("--x", xValue);
    bGPrime->add_option("--x-range", xRangeText, "a:b:n sweep (CSV)");
    auto* bMPrime = boundary->add_subcommand("mprime", "m'(x) boundary series");
    bMPrime->add_option("--config", configPath)->required();
    bMPrime->add_option("--x", xValue);
    bMPrime->add_option("--x-range", xRangeText);
    auto* bDensity = boundary->add_subcommand("density", "rho, rho_i, |phi|^2");
    bDensity->add_option("--config", configPath)->required();
    bDensity->add_option("--x", xValue);
    bDensity->add_option("--x-range", xRangeText);
    auto* bLogPoisson = boundary->add_subcommand("logpoisson", "log-subharmonicity estimate");
    bLogPoisson->add_option("--config", configPath)->required();
    bLogPoisson->add_option("--zstar", zStarText);
    bLogPoisson->add_option("--z", zText)->required();

    // ---- comb ----
    auto* comb = app.add_subcommand("comb", "Schwarz-Christoffel comb maps");
    auto* combSolve = comb->add_subcommand("solve", "critical abscissae of both maps");
    combSolve->add_option("--gaps", gapsPath)->required();
    auto* combEval = comb->add_subcommand("eval", "theta(lambda)");
    combEval->add_option("--gaps", gapsPath)->required();
    combEval->add_option("--lambda", lambdaText)->required();
    combEval->add_option("--map", mapKind, "green|martin");
    auto* combParams = comb->add_subcommand("params", "comb parameters (omega_k, h_k)");
    combParams->add_option("--gaps", gapsPath)->required();
    combParams->add_option("--map", mapKind, "green|martin");
    auto* combWidom = comb->add_subcommand("widom", "sum of G over the Martin criticals");
    combWidom->add_option("--gaps", gapsPath)->required();
    auto* combAkhiezer = comb->add_subcommand("akhiezer", "lim M(i eta)/eta");
    combAkhiezer->add_option("--gaps", gapsPath)->required();

    // ---- run / verify ----
    auto* run = app.add_subcommand("run", "run a scenario file");
    run->add_option("--scenario", scenarioPath)->required();
    run->add_option("--format", format, "json|csv");
    run->add_option("--out", outPath);
    run->add_flag("--timings", timings, "emit wall times (non-deterministic)");
    auto* verify = app.add_subcommand("verify", "run the shipped scenario corpus");
    verify->add_flag("--all", verifyAll)->required();
    verify->add_option("--format", format, "json|csv");
    verify->add_option("--out", outPath);
    verify->add_flag("--timings", timings);

    CLI11_PARSE(app, argc, argv);

    try {
        if (greenEval->parsed()) {
            const auto acc = loadAccumulator(configPath);
            const GreenEvaluation e = evalG(acc, parseComplex(zText), parseComplex(zStarText));
            json doc;
            doc["value"] = complexJson(e.value);
            // JSON has no -infinity; an exact zero on the truncated orbit is
            // reported as the string "-inf".
            if (std::isinf(e.logAbs))
                doc["log_abs"] = "-inf";
            else
                doc["log_abs"] = e.logAbs;
            doc["tail_bound"] = e.tailBound;
            doc["shells"] = e.shellsUsed;
            doc["degraded"] = e.degraded;
            writeOut(doc.dump(2) + "\n", outPath);
        } else if (greenCritical->parsed()) {
            const auto acc = loadAccumulator(configPath);
            const auto points = findCriticalPoints(acc, parseComplex(zStarText));
            const WidomProduct w = widomProduct(points);
            json doc;
            doc["critical_points"] = criticalPointsJson(points);
            doc["widom_product"] = w.product;
            doc["widom_sum"] = w.sum;
            writeOut(doc.dump(2) + "\n", outPath);
        } else if (martinEval->parsed()) {
            const auto acc = loadAccumulator(configPath);
            const MartinEvaluation e = evalM(acc, parseComplex(zText));
            json doc;
            doc["m"] = complexJson(e.m);
            doc["m_prime"] = complexJson(e.mPrime);
            doc["im_over_im"] = e.imOverIm;
            doc["tail_bound"] = e.tailBound;
            doc["shells"] = e.shellsUsed;
            doc["degraded"] = e.degraded;
            writeOut(doc.dump(2) + "\n", outPath);
        } else if (martinCritical->parsed()) {
            const auto acc = loadAccumulator(configPath);
            const MartinContext ctx(acc);
            auto points = findMartinCritical(ctx);
            json arr = json::array();
            for (const CriticalPoint& p : points) {
                json entry;
                entry["semicircle"] = p.semicircleIndex;
                entry["location"] = complexJson(p.location);
                entry["martin_height"] = evalM(ctx, p.location).m.imag();
                arr.push_back(entry);
            }
            writeOut(json{{"critical_points", arr}}.dump(2) + "\n", outPath);
        } else if (martinConditions->parsed()) {
            const auto acc = loadAccumulator(configPath);
            const ConditionReport r = conditionReport(acc, parseComplex(zStarText));
            json doc;
            doc["condition_A_product"] = r.conditionA_product;
            doc["condition_A_sum"] = r.conditionA_sum;
            doc["condition_A_terms"] = r.conditionA_terms;
            doc["condition_B_sum"] = r.conditionB_sum;
            doc["condition_B_shell_sums"] = r.conditionB_shellSums;
            doc["verdict_A"] = to_string(r.verdictA);
            doc["verdict_B"] = to_string(r.verdictB);
            for (int q = 0; q < 4; ++q) {
                doc["four_sums"][static_cast<std::size_t>(q)] = r.fourSums[q];
                doc["four_sums_shell_sums"][static_cast<std::size_t>(q)] =
                    r.fourSums_shellSums[q];
                doc["four_verdicts"][static_cast<std::size_t>(q)] =
                    to_string(r.fourVerdicts[q]);
            }
            doc["four_verdicts_agree"] = r.fourVerdictsAgree;
            writeOut(doc.dump(2) + "\n", outPath);
        } else if (approxSweep->parsed()) {
            auto [config, policy] = parseSemicircleConfig(readFile(configPath));
            const auto ladder = buildLadder(config, parseLevels(levelsText), policy);
            const Complex z = parseComplex(zText), zStar = parseComplex(zStarText);
            const auto chain = divisorCheck(ladder, z, zStar);
            const auto tracking = criticalTracking(ladder, zStar, z);
            std::ostringstream os;
            os.precision(17);
            os << "level,abs_g,abs_m,tail,delta_g,delta_m,criticals\n";
            for (std::size_t n = 0; n < ladder.levelCount(); ++n) {
                os << n << "," << chain.values[n].absG << "," << tracking.values[n].absM << ","
                   << chain.values[n].tail << ",";
                if (n + 1 < ladder.levelCount())
                    os << tracking.gLevelDeltas[n] << "," << tracking.mLevelDeltas[n];
                else
                    os << ",";
                os << ",\"";
                bool first = true;
                for (const auto& tc : tracking.criticals) {
                    if (!tc.greenLocation[n]) continue;
                    if (!first) os << ";";
                    os << tc.semicircleIndex << ":" << tc.greenLocation[n]->real() << "+"
                       << tc.greenLocation[n]->imag() << "i";
                    first = false;
                }
                os << "\"\n";
            }
            writeOut(os.str(), outPath);
        } else if (bJulia->parsed()) {
            const auto r = angularDerivative(parseZeros(zerosText), xValue);
            json doc;
            doc["x"] = r.x;
            doc["limit_value"] = complexJson(r.limitValue);
            doc["derivative_abs"] = r.derivativeAbs;
            doc["finite_difference_abs"] = r.finiteDifferenceAbs;
            json samples = json::array();
            for (const auto& [z, w] : r.approachSamples)
                samples.push_back(json{{"z", complexJson(z)}, {"w", complexJson(w)}});
            doc["approach_samples"] = samples;
            writeOut(doc.dump(2) + "\n", outPath);
        } else if (bGPrime->parsed() || bMPrime->parsed() || bDensity->parsed()) {
            const auto acc = loadAccumulator(configPath);
            const Complex zStar = parseComplex(zStarText);
            const auto evalOne = [&](double x) -> json {
                json row;
                row["x"] = x;
                if (bGPrime->parsed()) row["g_prime_abs"] = boundaryGPrime(acc, zStar, x).value;
                if (bMPrime->parsed()) row["m_prime"] = boundaryMPrime(acc, x).value;
                if (bDensity->parsed()) {
                    const DensityTriple d = densityTriple(acc, x);
                    row["rho"] = d.rho;
                    row["rho_i"] = d.rhoI;
                    row["phi_abs_sq"] = d.phiAbsSq;
                }
                return row;
            };
            if (!xRangeText.empty()) {
                const XRange r = parseXRange(xRangeText);
                std::ostringstream os;
                os.precision(17);
                bool header = false;
                for (int i = 0; i < r.count; ++i) {
                    const double x = r.lo + (r.hi - r.lo) * i / (r.count - 1);
                    json row;
                    try {
                        row = evalOne(x);
                    } catch (const PoleError&) {
                        continue;  // sweep across a pole: skip the bad abscissa
                    }
                    if (!header) {
                        bool first = true;
                        for (auto it = row.begin(); it != row.end(); ++it) {
                            os << (first ? "" : ",") << it.key();
                            first = false;
                        }
                        os << "\n";
                        header = true;
                    }
                    bool first = true;
                    for (auto it = row.begin(); it != row.end(); ++it) {
                        os << (first ? "" : ",") << it.value().dump();
                        first = false;
                    }
                    os << "\n";
                }
                writeOut(os.str(), outPath);
            } else {
                writeOut(evalOne(xValue).dump(2) + "\n", outPath);
            }
        } else if (bLogPoisson->parsed()) {
            const auto acc = loadAccumulator(configPath);
            const LogPoissonCheck r =
                logPoissonCheck(acc, parseComplex(zStarText), parseComplex(zText));
            json doc;
            doc["lhs"] = r.lhs;
            doc["rhs"] = r.rhs;
            doc["quad_error"] = r.quadError;
            doc["slack"] = r.lhs - r.rhs;
            writeOut(doc.dump(2) + "\n", outPath);
        } else if (combSolve->parsed()) {
            const GapSystem gs = parseGapSystem(readFile(gapsPath));
            const MuSet muG = solveMuGreen(gs);
            const MuSet muM = solveMuMartin(gs);
            json doc;
            doc["mu_green"] = muG.values;
            doc["mu_martin"] = muM.values;
            doc["residuals_green"] = muResiduals(gs, muG);
            doc["residuals_martin"] = muResiduals(gs, muM);
            doc["index_zero"] = gs.indexZero();
            writeOut(doc.dump(2) + "\n", outPath);
        } else if (combEval->parsed()) {
            const GapSystem gs = parseGapSystem(readFile(gapsPath));
            const bool isMartin = mapKind == "martin";
            const MuSet mu = isMartin ? solveMuMartin(gs) : solveMuGreen(gs);
            const ThetaMap theta =
                isMartin ? ThetaMap::martin(gs, mu) : ThetaMap::green(gs, mu);
            const auto e = theta.evaluate(parseComplex(lambdaText));
            json doc;
            doc["theta"] = complexJson(e.value);
            doc["im_theta"] = e.value.imag();
            doc["quad_error"] = e.tail;
            doc["map"] = mapKind;
            writeOut(doc.dump(2) + "\n", outPath);
        } else if (combParams->parsed()) {
            const GapSystem gs = parseGapSystem(readFile(gapsPath));
            const bool isMartin = mapKind == "martin";
            const MuSet mu = isMartin ? solveMuMartin(gs) : solveMuGreen(gs);
            const CombParameters params = extractComb(gs, mu);
            json doc;
            json slits = json::array();
            for (const CombSlit& s : params.slits)
                slits.push_back(json{{"gap", s.gapPosition}, {"omega", s.omega},
                                     {"height", s.height}});
            doc["slits"] = slits;
            doc["map"] = mapKind;
            if (!isMartin) {
                doc["theta_at_b0"] = params.thetaAtB0;
                doc["theta_at_a0"] = params.thetaAtA0;
            }
            doc["mu"] = mu.values;
            writeOut(doc.dump(2) + "\n", outPath);
        } else if (combWidom->parsed()) {
            const GapSystem gs = parseGapSystem(readFile(gapsPath));
            const WidomGapSum w = widomSumGaps(gs, solveMuGreen(gs), solveMuMartin(gs));
            json doc;
            doc["sum"] = w.sum;
            doc["terms"] = w.terms;
            writeOut(doc.dump(2) + "\n", outPath);
        } else if (combAkhiezer->parsed()) {
            const GapSystem gs = parseGapSystem(readFile(gapsPath));
            const AkhiezerLevinResult r = akhiezerLevinLimit(gs, solveMuMartin(gs));
            json doc;
            doc["limit"] = r.limit;
            doc["samples"] = std::vector<double>{r.samples[0], r.samples[1], r.samples[2]};
            doc["inconclusive"] = r.inconclusive;
            writeOut(doc.dump(2) + "\n", outPath);
        } else if (run->parsed()) {
            const std::string text = readFile(scenarioPath);
            const Scenario scenario = parseScenario(text);
            RunReport report = runScenario(scenario);
            report.inputHash = scenarioInputHash(text);
            writeOut(emitReport(report, format, timings), outPath);
            return exitCodeOf({report});
        } else if (verify->parsed()) {
            std::vector<RunReport> reports;
            std::ostringstream all;
            for (const std::string& name : builtinScenarioNames()) {
                const std::string text = builtinScenarioText(name);
                const Scenario scenario = parseScenario(text);
                RunReport report = runScenario(scenario);
                report.inputHash = scenarioInputHash(text);
                for (const CheckResult& c : report.checks)
                    std::cerr << "[" << to_string(c.status) << "] " << scenario.name
                              << " :: " << c.name << "\n";
                all << emitReport(report, format, timings);
                reports.push_back(std::move(report));
            }
            writeOut(all.str(), outPath);
            return exitCodeOf(reports);
        }
        return 0;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    }
}
