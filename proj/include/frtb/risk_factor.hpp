#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace frtb {

enum class RiskClass { GIRR, EquityDelta, FX, Commodity };

inline constexpr RiskClass kAllRiskClasses[] = {RiskClass::GIRR, RiskClass::EquityDelta, RiskClass::FX,
                                                RiskClass::Commodity};

std::string_view to_string(RiskClass rc);
/// Accepts the canonical names ("GIRR", "EquityDelta", "FX", "Commodity"), case-insensitively.
RiskClass parse_risk_class(std::string_view text);

enum class CorrelationScenario { Low, Medium, High };

inline constexpr CorrelationScenario kAllScenarios[] = {CorrelationScenario::Low, CorrelationScenario::Medium,
                                                        CorrelationScenario::High};

std::string_view to_string(CorrelationScenario s);
CorrelationScenario parse_scenario(std::string_view text);

/// Identifies one regulatory risk factor: an issuer (equity), a currency (FX),
/// a commodity, or a (currency, tenor) vertex of a GIRR curve.
struct RiskFactorKey {
    RiskClass risk_class = RiskClass::EquityDelta;
    int bucket = 0;
    std::string name;
    std::optional<double> tenor; // GIRR only

    auto operator<=>(const RiskFactorKey&) const = default;
    bool operator==(const RiskFactorKey&) const = default;
};

std::string describe(const RiskFactorKey& key);

} // namespace frtb
