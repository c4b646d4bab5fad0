#include "frtb/sensitivities.hpp"

#include <cstdio>
#include <map>

namespace frtb {

namespace {

double price_of(const std::map<std::string, double>& prices, const std::string& key, const char* what) {
    auto it = prices.find(key);
    if (it == prices.end())
        throw InputError(std::string("no ") + what + " for '" + key + "'");
    return it->second;
}

} // namespace

SensitivityRecord equity_delta(const CashEquity& instr, const MarketData& md, int bucket) {
    const double eq = price_of(md.equity_prices, instr.issuer_id, "equity price");
    auto revalue = [&](double price) { return instr.shares * price; };
    const double s = (revalue((1.0 + kPriceBump) * eq) - revalue(eq)) / kPriceBump;
    return {{RiskClass::EquityDelta, bucket, instr.issuer_id, std::nullopt}, s};
}

SensitivityRecord fx_delta(const FXPosition& instr, const MarketData& md, int bucket) {
    if (instr.foreign_currency == md.reporting_currency)
        throw InputError("fx position in the reporting currency " + md.reporting_currency + " carries no FX risk");
    const double spot = price_of(md.fx_spots, instr.foreign_currency, "fx spot");
    auto revalue = [&](double x) { return instr.signed_notional * x; };
    const double s = (revalue((1.0 + kPriceBump) * spot) - revalue(spot)) / kPriceBump;
    return {{RiskClass::FX, bucket, instr.foreign_currency, std::nullopt}, s};
}

SensitivityRecord commodity_delta(const CommodityFuture& instr, const MarketData& md, int bucket) {
    const double price = price_of(md.commodity_prices, instr.commodity_id, "commodity price");
    auto revalue = [&](double p) { return instr.quantity * p; };
    const double s = (revalue((1.0 + kPriceBump) * price) - revalue(price)) / kPriceBump;
    return {{RiskClass::Commodity, bucket, instr.commodity_id, std::nullopt}, s};
}

double tenor_hat(const std::vector<double>& grid, std::size_t i, double t) {
    const std::size_t n = grid.size();
    if (t <= grid.front())
        return i == 0 ? 1.0 : 0.0;
    if (t >= grid.back())
        return i + 1 == n ? 1.0 : 0.0;
    if (i > 0 && t > grid[i - 1] && t <= grid[i])
        return (t - grid[i - 1]) / (grid[i] - grid[i - 1]);
    if (i + 1 < n && t >= grid[i] && t < grid[i + 1])
        return (grid[i + 1] - t) / (grid[i + 1] - grid[i]);
    return 0.0;
}

std::vector<SensitivityRecord> girr_deltas(const Bond& instr, const MarketData& md, const std::vector<double>& grid,
                                           int bucket) {
    if (md.zero_curve.empty())
        throw InputError("bond " + instr.name + ": zero curve is empty");
    if (grid.empty())
        throw InputError("bond " + instr.name + ": tenor grid is empty");
    const double base = bond_value(instr, md.zero_curve);
    std::vector<SensitivityRecord> out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double bumped =
            bond_value(instr, md.zero_curve, [&](double t) { return kRateBump * tenor_hat(grid, i, t); });
        const double s = (bumped - base) / kRateBump;
        if (s != 0.0)
            out.push_back({{RiskClass::GIRR, bucket, instr.currency, grid[i]}, s});
    }
    return out;
}

std::vector<SensitivityRecord> instrument_sensitivities(const Instrument& instr, const MarketData& md,
                                                        const IssuerRegistry& registry, const Rulebook& rb,
                                                        Warnings* warnings) {
    const BucketAssignment where = assign_bucket(instr, registry, rb, warnings);
    if (const auto* b = std::get_if<Bond>(&instr)) {
        value(instr, md, warnings); // validates currency/curve and reports extrapolation
        return girr_deltas(*b, md, rb.tenor_grid, where.bucket);
    }
    if (const auto* e = std::get_if<CashEquity>(&instr))
        return {equity_delta(*e, md, where.bucket)};
    if (const auto* f = std::get_if<FXPosition>(&instr))
        return {fx_delta(*f, md, where.bucket)};
    return {commodity_delta(std::get<CommodityFuture>(instr), md, where.bucket)};
}

std::vector<SensitivityRecord> net(std::vector<SensitivityRecord> records) {
    std::map<RiskFactorKey, double> sums;
    for (auto& r : records)
        sums[std::move(r.key)] += r.value;
    std::vector<SensitivityRecord> out;
    out.reserve(sums.size());
    for (auto& [key, v] : sums)
        out.push_back({key, v});
    return out;
}

std::vector<SensitivityRecord> collect_sensitivities(const Portfolio& p, const MarketData& md,
                                                     const IssuerRegistry& registry, const Rulebook& rb,
                                                     Warnings* warnings) {
    std::vector<SensitivityRecord> all;
    for (std::size_t i = 0; i < p.positions.size(); ++i) {
        try {
            auto recs = instrument_sensitivities(p.positions[i], md, registry, rb, warnings);
            all.insert(all.end(), recs.begin(), recs.end());
        } catch (const Error& e) {
            throw InputError("position " + std::to_string(i) + " (" + instrument_label(p.positions[i]) +
                             "): " + e.what());
        }
    }
    return net(std::move(all));
}

void write_sensitivities_csv(std::ostream& out, const std::vector<SensitivityRecord>& records) {
    out << "risk_class,bucket,name,tenor,value\n";
    char buf[64];
    for (const auto& r : records) {
        out << to_string(r.key.risk_class) << ',' << r.key.bucket << ',' << r.key.name << ',';
        if (r.key.tenor) {
            std::snprintf(buf, sizeof buf, "%.17g", *r.key.tenor);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g", r.value);
        out << ',' << buf << '\n';
    }
}

} // namespace frtb
