#include "frtb/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace frtb {

WeightedSensitivity weight_sensitivity(const SensitivityRecord& rec, const Rulebook& rb) {
    const double rw = risk_weight(rb, rec.key.risk_class, rec.key.bucket, rec.key.tenor);
    return {rec.key, rec.value, rw};
}

BucketResult bucket_risk_position(std::span<const WeightedSensitivity> ws, const IntraCorrelation& rho,
                                  CorrelationScenario scenario) {
    BucketResult out;
    if (ws.empty())
        return out;
    out.risk_class = ws.front().key().risk_class;
    out.bucket = ws.front().key().bucket;
    for (const auto& w : ws)
        if (w.key().risk_class != out.risk_class || w.key().bucket != out.bucket)
            throw InputError("bucket_risk_position: " + describe(w.key()) + " is not in " +
                             std::string(to_string(out.risk_class)) + " bucket " + std::to_string(out.bucket));

    double sum_sq = 0.0;
    double cross = 0.0;
    double s_b = 0.0;
    for (std::size_t k = 0; k < ws.size(); ++k) {
        const double wk = ws[k].ws();
        sum_sq += wk * wk;
        s_b += wk;
        for (std::size_t l = 0; l < ws.size(); ++l)
            if (l != k)
                cross += rho(ws[k].key(), ws[l].key(), scenario) * wk * ws[l].ws();
    }
    out.k_b = std::sqrt(std::max(0.0, sum_sq + cross));
    out.s_b_net = s_b;
    out.s_b_effective = s_b;
    out.weighted.assign(ws.begin(), ws.end());
    return out;
}

namespace {

double under_root(std::span<const BucketResult> buckets, const std::vector<double>& s, const CrossCorrelation& gamma,
                  CorrelationScenario scenario) {
    double q = 0.0;
    for (std::size_t b = 0; b < buckets.size(); ++b) {
        q += buckets[b].k_b * buckets[b].k_b;
        for (std::size_t c = 0; c < buckets.size(); ++c)
            if (c != b)
                q += gamma(buckets[b].bucket, buckets[c].bucket, scenario) * s[b] * s[c];
    }
    return q;
}

} // namespace

DeltaChargeResult delta_charge(std::span<const BucketResult> buckets, const CrossCorrelation& gamma,
                               CorrelationScenario scenario) {
    for (std::size_t i = 0; i < buckets.size(); ++i)
        for (std::size_t j = i + 1; j < buckets.size(); ++j)
            if (buckets[i].bucket == buckets[j].bucket)
                throw InputError("delta_charge: bucket " + std::to_string(buckets[i].bucket) + " appears twice");

    DeltaChargeResult out;
    out.s_effective.reserve(buckets.size());
    for (const auto& b : buckets)
        out.s_effective.push_back(b.s_b_net);

    double q = under_root(buckets, out.s_effective, gamma, scenario);
    if (q < 0.0) {
        out.fallback_engaged = true;
        for (std::size_t b = 0; b < buckets.size(); ++b)
            out.s_effective[b] = std::max(std::min(buckets[b].s_b_net, buckets[b].k_b), -buckets[b].k_b);
        q = under_root(buckets, out.s_effective, gamma, scenario);
    }
    out.delta = std::sqrt(std::max(0.0, q));
    return out;
}

ClassResult risk_class_delta(RiskClass rc, std::span<const SensitivityRecord> records, const Rulebook& rb,
                             CorrelationScenario scenario) {
    ClassResult out;
    out.risk_class = rc;
    std::map<int, std::vector<WeightedSensitivity>> by_bucket;
    for (const auto& r : records) {
        if (r.key.risk_class != rc)
            throw InputError("risk_class_delta(" + std::string(to_string(rc)) + "): record " + describe(r.key) +
                             " belongs to another class");
        by_bucket[r.key.bucket].push_back(weight_sensitivity(r, rb));
    }

    const IntraCorrelation rho = [&](const RiskFactorKey& k, const RiskFactorKey& l, CorrelationScenario s) {
        return intra_correlation(rb, rc, k.bucket, k, l, s);
    };
    const CrossCorrelation gamma = [&](int b, int c, CorrelationScenario s) {
        return cross_correlation(rb, rc, b, c, s);
    };

    for (auto& [bucket, ws] : by_bucket)
        out.buckets.push_back(bucket_risk_position(ws, rho, scenario));

    const DeltaChargeResult charge = delta_charge(out.buckets, gamma, scenario);
    out.charge = charge.delta;
    out.fallback_engaged = charge.fallback_engaged;
    for (std::size_t i = 0; i < out.buckets.size(); ++i)
        out.buckets[i].s_b_effective = charge.s_effective[i];
    for (std::size_t i = 0; i < out.buckets.size(); ++i)
        for (std::size_t j = i + 1; j < out.buckets.size(); ++j)
            out.gammas.push_back({out.buckets[i].bucket, out.buckets[j].bucket,
                                  gamma(out.buckets[i].bucket, out.buckets[j].bucket, scenario)});
    return out;
}

ScenarioTotal scenario_total(std::span<const SensitivityRecord> records, const Rulebook& rb,
                             CorrelationScenario scenario) {
    ScenarioTotal out;
    out.scenario = scenario;
    std::map<RiskClass, std::vector<SensitivityRecord>> by_class;
    for (const auto& r : records)
        by_class[r.key.risk_class].push_back(r);
    for (RiskClass rc : kAllRiskClasses) {
        auto it = by_class.find(rc);
        if (it == by_class.end())
            continue;
        out.classes.push_back(risk_class_delta(rc, it->second, rb, scenario));
        out.total += out.classes.back().charge;
    }
    return out;
}

EnvelopeResult scenario_envelope(std::span<const SensitivityRecord> records, const Rulebook& rb,
                                 std::span<const CorrelationScenario> scenarios) {
    EnvelopeResult out;
    bool first = true;
    for (CorrelationScenario s : scenarios) {
        out.scenarios.push_back(scenario_total(records, rb, s));
        const double total = out.scenarios.back().total;
        if (first || total > out.capital) {
            out.capital = total;
            out.binding = s;
            first = false;
        }
    }
    return out;
}

} // namespace frtb
