#include "charm/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace charm {

namespace {

using nlohmann::json;

void rejectUnknown(const json& obj, const std::set<std::string>& allowed,
                   const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError("unknown field \"" + it.key() + "\" in " + where);
    }
}

double requireNumber(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("missing field \"" + key + "\" in " + where);
    if (!obj[key].is_number()) throw ConfigError("field \"" + key + "\" in " + where + " must be a number");
    return obj[key].get<double>();
}

json parseTop(const std::string& text) {
    json doc = json::parse(text, nullptr, true, /*ignore_comments=*/false);
    if (!doc.is_object()) throw ConfigError("top-level JSON value must be an object");
    return doc;
}

}  // namespace

std::pair<SemicircleConfig, TruncationPolicy> parseSemicircleConfig(const std::string& jsonText) {
    json doc = parseTop(jsonText);
    rejectUnknown(doc, {"semicircles", "truncation"}, "config");
    if (!doc.contains("semicircles") || !doc["semicircles"].is_array())
        throw ConfigError("config requires a \"semicircles\" array");

    std::vector<Semicircle> semis;
    for (const auto& entry : doc["semicircles"]) {
        if (!entry.is_object()) throw ConfigError("semicircle entries must be objects");
        rejectUnknown(entry, {"index", "center", "radius"}, "semicircle entry");
        Semicircle s;
        s.index = static_cast<int>(requireNumber(entry, "index", "semicircle entry"));
        s.center = requireNumber(entry, "center", "semicircle entry");
        s.radius = requireNumber(entry, "radius", "semicircle entry");
        semis.push_back(s);
    }

    TruncationPolicy policy;
    if (doc.contains("truncation")) {
        const auto& t = doc["truncation"];
        if (!t.is_object()) throw ConfigError("\"truncation\" must be an object");
        rejectUnknown(t, {"max_word_length", "target_tail", "element_cap"}, "truncation");
        if (t.contains("max_word_length"))
            policy.maxWordLength = static_cast<int>(requireNumber(t, "max_word_length", "truncation"));
        if (t.contains("target_tail"))
            policy.targetTail = requireNumber(t, "target_tail", "truncation");
        if (t.contains("element_cap"))
            policy.hardElementCap =
                static_cast<long long>(requireNumber(t, "element_cap", "truncation"));
    }
    policy.validate();
    return {SemicircleConfig(std::move(semis)), policy};
}

GapSystem parseGapSystem(const std::string& jsonText) {
    json doc = parseTop(jsonText);
    rejectUnknown(doc, {"gaps", "lambda_star"}, "gap system");
    if (!doc.contains("gaps") || !doc["gaps"].is_array())
        throw ConfigError("gap system requires a \"gaps\" array");
    std::vector<Gap> gaps;
    for (const auto& entry : doc["gaps"]) {
        if (!entry.is_object()) throw ConfigError("gap entries must be objects");
        rejectUnknown(entry, {"a", "b"}, "gap entry");
        Gap g;
        g.a = requireNumber(entry, "a", "gap entry");
        g.b = requireNumber(entry, "b", "gap entry");
        gaps.push_back(g);
    }
    const double lambdaStar = requireNumber(doc, "lambda_star", "gap system");
    return GapSystem(std::move(gaps), lambdaStar);
}

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace charm
