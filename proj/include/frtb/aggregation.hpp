#pragma once

#include "frtb/rulebook.hpp"
#include "frtb/sensitivities.hpp"

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace frtb {

class WeightedSensitivity {
public:
    WeightedSensitivity(RiskFactorKey key, double sensitivity, double risk_weight)
        : key_(std::move(key)), sensitivity_(sensitivity), risk_weight_(risk_weight), ws_(risk_weight * sensitivity) {}

    const RiskFactorKey& key() const { return key_; }
    double sensitivity() const { return sensitivity_; }
    double risk_weight() const { return risk_weight_; }
    double ws() const { return ws_; }

    bool operator==(const WeightedSensitivity&) const = default;

private:
    RiskFactorKey key_;
    double sensitivity_;
    double risk_weight_;
    double ws_;
};

struct BucketResult {
    RiskClass risk_class = RiskClass::EquityDelta;
    int bucket = 0;
    double k_b = 0.0;
    double s_b_net = 0.0;       // sum of WS_k
    double s_b_effective = 0.0; // S_b used in the cross-bucket sum (clamped when the fallback engaged)
    std::vector<WeightedSensitivity> weighted;

    bool operator==(const BucketResult&) const = default;
};

using IntraCorrelation =
    std::function<double(const RiskFactorKey&, const RiskFactorKey&, CorrelationScenario)>;
using CrossCorrelation = std::function<double(int, int, CorrelationScenario)>;

WeightedSensitivity weight_sensitivity(const SensitivityRecord& rec, const Rulebook& rb);

/// K_b = sqrt(max(0, sum_k WS_k^2 + sum_k sum_{l != k} rho_kl WS_k WS_l)).
BucketResult bucket_risk_position(std::span<const WeightedSensitivity> ws, const IntraCorrelation& rho,
                                  CorrelationScenario scenario);

struct DeltaChargeResult {
    double delta = 0.0;
    bool fallback_engaged = false;
    std::vector<double> s_effective; // one per input bucket, same order
};

/// Delta = sqrt(sum_b K_b^2 + sum_b sum_{c != b} gamma_bc S_b S_c). A negative quantity
/// under the root triggers a recomputation with S_b clamped to [-K_b, K_b].
DeltaChargeResult delta_charge(std::span<const BucketResult> buckets, const CrossCorrelation& gamma,
                               CorrelationScenario scenario);

struct CrossTerm {
    int b = 0;
    int c = 0;
    double gamma = 0.0;

    bool operator==(const CrossTerm&) const = default;
};

struct ClassResult {
    RiskClass risk_class = RiskClass::EquityDelta;
    double charge = 0.0;
    bool fallback_engaged = false;
    std::vector<BucketResult> buckets;
    std::vector<CrossTerm> gammas; // b < c, scenario-adjusted

    bool operator==(const ClassResult&) const = default;
};

/// Charge of one risk class; every record must belong to `rc`.
ClassResult risk_class_delta(RiskClass rc, std::span<const SensitivityRecord> records, const Rulebook& rb,
                             CorrelationScenario scenario);

struct ScenarioTotal {
    CorrelationScenario scenario = CorrelationScenario::Medium;
    std::vector<ClassResult> classes; // classes with at least one record
    double total = 0.0;

    bool operator==(const ScenarioTotal&) const = default;
};

struct EnvelopeResult {
    std::vector<ScenarioTotal> scenarios;
    double capital = 0.0; // max over scenarios
    CorrelationScenario binding = CorrelationScenario::Medium;
};

ScenarioTotal scenario_total(std::span<const SensitivityRecord> records, const Rulebook& rb,
                             CorrelationScenario scenario);

/// Sum of class charges per scenario, maximised over `scenarios` (default: low, medium, high).
EnvelopeResult scenario_envelope(std::span<const SensitivityRecord> records, const Rulebook& rb,
                                 std::span<const CorrelationScenario> scenarios = kAllScenarios);

} // namespace frtb
