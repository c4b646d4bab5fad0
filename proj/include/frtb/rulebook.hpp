#pragma once

#include "frtb/error.hpp"
#include "frtb/risk_factor.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

namespace frtb {

/// Issuer/commodity/currency attributes a position must carry to land in a bucket.
/// Empty strings and an empty sector list mean "any".
struct BucketSelector {
    std::string currency;
    std::string economy;
    std::string size;
    std::vector<std::string> sectors;
    bool residual = false;

    bool operator==(const BucketSelector&) const = default;
};

struct TenorWeight {
    double tenor = 0.0;
    double weight = 0.0;

    bool operator==(const TenorWeight&) const = default;
};

struct Bucket {
    RiskClass risk_class = RiskClass::EquityDelta;
    int id = 0;
    std::string description;
    std::optional<double> risk_weight;     // every class but GIRR
    std::vector<TenorWeight> tenor_weights; // GIRR only
    BucketSelector selector;

    bool operator==(const Bucket&) const = default;
};

struct GirrTenorParams {
    double theta = 0.03;
    double floor = 0.40;

    bool operator==(const GirrTenorParams&) const = default;
};

/// Low/high correlation scenario transforms.
///   high: min(scale * rho, cap)
///   low:  max(scale * rho + shift, floor_scale * rho)
struct ScenarioRules {
    double high_scale = 1.25;
    double high_cap = 1.0;
    double low_scale = 2.0;
    double low_shift = -1.0;
    double low_floor_scale = 0.75;

    bool operator==(const ScenarioRules&) const = default;
};

struct CorrelationTable {
    /// (risk class, bucket) -> correlation between distinct factors in that bucket.
    std::map<std::pair<RiskClass, int>, double> intra;
    /// (risk class, b, c) -> gamma_bc. Holds both orders once loaded.
    std::map<std::tuple<RiskClass, int, int>, double> cross;
    GirrTenorParams girr_tenor_params;

    bool operator==(const CorrelationTable&) const = default;
};

struct Rulebook {
    std::string version;
    std::vector<double> tenor_grid;
    std::vector<Bucket> buckets;
    CorrelationTable correlations;
    ScenarioRules scenario_rules;

    bool operator==(const Rulebook&) const = default;

    const Bucket* find_bucket(RiskClass rc, int id) const;
    const Bucket& bucket(RiskClass rc, int id) const; // throws InputError
    std::vector<const Bucket*> buckets_of(RiskClass rc) const;
    bool on_grid(double tenor) const;
};

/// Every invariant violation, in a stable order. Empty means valid.
std::vector<std::string> validate(const Rulebook& rb);

/// Parse and validate. Throws ParseError (with line/column) or ValidationError.
Rulebook load_rulebook(std::string_view source);
Rulebook load_rulebook_file(const std::string& path);

nlohmann::json to_json(const Rulebook& rb);
std::string serialize(const Rulebook& rb);

double apply_scenario(double base, CorrelationScenario scenario, const ScenarioRules& rules = {});

double girr_tenor_correlation(double tenor_k, double tenor_l, const GirrTenorParams& params);

/// Risk weight of a bucket. `tenor` must be given for GIRR (and on the grid) and omitted otherwise.
double risk_weight(const Rulebook& rb, RiskClass rc, int bucket, std::optional<double> tenor = std::nullopt);

double cross_correlation(const Rulebook& rb, RiskClass rc, int b, int c,
                         CorrelationScenario scenario = CorrelationScenario::Medium);

/// Correlation between two factors of the same bucket. GIRR uses the tenor formula;
/// the other classes use the bucket's tabulated value. Identical factors give 1.
double intra_correlation(const Rulebook& rb, RiskClass rc, int bucket, const RiskFactorKey& k,
                         const RiskFactorKey& l, CorrelationScenario scenario = CorrelationScenario::Medium);

} // namespace frtb
