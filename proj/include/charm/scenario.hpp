#pragma once

#include <optional>
#include <string>
#include <vector>

#include "charm/comb.hpp"
#include "charm/ladder.hpp"

namespace charm {

enum class CheckStatus { Pass, Fail, Inconclusive };

std::string to_string(CheckStatus s);

struct Scenario {
    std::string name;
    std::optional<SemicircleConfig> semicircles;
    std::optional<TruncationPolicy> truncation;
    std::optional<GapSystem> gapSystem;
    std::vector<std::vector<int>> levels;  // ladder levels, may be empty
    std::vector<std::string> checks;
    Complex zStar{0.0, 1.0};
    std::uint64_t seed = 0x5eed0001u;
};

/// Parses a scenario JSON document (strict field validation; check names must
/// come from the registry).
Scenario parseScenario(const std::string& jsonText);

struct CheckResult {
    std::string name;
    CheckStatus status = CheckStatus::Pass;
    std::string evidenceJson;  // canonical JSON object with numeric evidence
    double wallMs = 0.0;
};

struct RunReport {
    std::string scenarioName;
    std::string toolVersion;
    std::string inputHash;
    std::vector<CheckResult> checks;
    double wallMsTotal = 0.0;
};

/// Names of all registered checks.
std::vector<std::string> checkRegistry();

/// Executes the requested checks; deterministic given the scenario (sample
/// points come from the scenario seed). Honors CHARM_KIT_THREADS for
/// cross-check parallelism; numeric paths inside each check are sequential.
RunReport runScenario(const Scenario& scenario);

/// Lossless serialization; JSON is canonical (sorted keys), CSV flattens the
/// evidence to name,status,key,value rows. Wall times are emitted only when
/// `withTimings` is set (they are the one nondeterministic field).
std::string emitReport(const RunReport& report, const std::string& format,
                       bool withTimings = false);

/// The shipped scenario corpus (embedded copies of scenarios/*.json).
std::vector<std::string> builtinScenarioNames();
std::string builtinScenarioText(const std::string& name);

/// FNV-1a hash of the canonicalized scenario document.
std::string scenarioInputHash(const std::string& jsonText);

/// Inverse of emitReport for the JSON format (timings are not recovered).
RunReport parseReport(const std::string& jsonText);

}  // namespace charm
