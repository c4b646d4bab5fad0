#include "frtb/risk_factor.hpp"

#include "frtb/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace frtb {

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

} // namespace

std::string_view to_string(RiskClass rc) {
    switch (rc) {
    case RiskClass::GIRR:
        return "GIRR";
    case RiskClass::EquityDelta:
        return "EquityDelta";
    case RiskClass::FX:
        return "FX";
    case RiskClass::Commodity:
        return "Commodity";
    }
    return "?";
}

RiskClass parse_risk_class(std::string_view text) {
    const std::string t = lower(text);
    if (t == "girr")
        return RiskClass::GIRR;
    if (t == "equitydelta" || t == "equity")
        return RiskClass::EquityDelta;
    if (t == "fx")
        return RiskClass::FX;
    if (t == "commodity")
        return RiskClass::Commodity;
    throw InputError("unknown risk class '" + std::string(text) + "'");
}

std::string_view to_string(CorrelationScenario s) {
    switch (s) {
    case CorrelationScenario::Low:
        return "low";
    case CorrelationScenario::Medium:
        return "medium";
    case CorrelationScenario::High:
        return "high";
    }
    return "?";
}

CorrelationScenario parse_scenario(std::string_view text) {
    const std::string t = lower(text);
    if (t == "low")
        return CorrelationScenario::Low;
    if (t == "medium")
        return CorrelationScenario::Medium;
    if (t == "high")
        return CorrelationScenario::High;
    throw InputError("unknown correlation scenario '" + std::string(text) + "'");
}

std::string describe(const RiskFactorKey& key) {
    std::string out = std::string(to_string(key.risk_class)) + "/" + std::to_string(key.bucket) + "/" + key.name;
    if (key.tenor) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%gY", *key.tenor);
        out += "/";
        out += buf;
    }
    return out;
}

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error([&] {
          std::string msg = "validation failed (" + std::to_string(violations.size()) + " violation";
          msg += violations.size() == 1 ? ")" : "s)";
          for (const auto& v : violations)
              msg += "\n  - " + v;
          return msg;
      }()),
      violations_(std::move(violations)) {}

} // namespace frtb
