#pragma once

#include "frtb/portfolio.hpp"
#include "frtb/risk_factor.hpp"
#include "frtb/rulebook.hpp"

#include <ostream>
#include <vector>

namespace frtb {

/// Relative bump applied to equity, FX and commodity prices.
inline constexpr double kPriceBump = 0.01;
/// Absolute bump applied to one zero-curve vertex.
inline constexpr double kRateBump = 0.0001;

struct SensitivityRecord {
    RiskFactorKey key;
    double value = 0.0; // reporting currency per unit relative shift (per unit rate for GIRR)

    bool operator==(const SensitivityRecord&) const = default;
};

/// s = [V(1.01 * EQ) - V(EQ)] / 0.01
SensitivityRecord equity_delta(const CashEquity& instr, const MarketData& md, int bucket);
SensitivityRecord fx_delta(const FXPosition& instr, const MarketData& md, int bucket);
SensitivityRecord commodity_delta(const CommodityFuture& instr, const MarketData& md, int bucket);

/// One record per grid tenor with non-zero exposure. The curve is shifted by 1bp times
/// the linear hat function of the grid vertex (flat beyond the first/last vertex), so
/// cash flows between vertices load onto both neighbours.
std::vector<SensitivityRecord> girr_deltas(const Bond& instr, const MarketData& md, const std::vector<double>& grid,
                                           int bucket);

/// Weight of grid vertex `i` at time `t` under linear interpolation on `grid`.
double tenor_hat(const std::vector<double>& grid, std::size_t i, double t);

/// Sensitivities of a single instrument, keyed to its bucket.
std::vector<SensitivityRecord> instrument_sensitivities(const Instrument& instr, const MarketData& md,
                                                        const IssuerRegistry& registry, const Rulebook& rb,
                                                        Warnings* warnings = nullptr);

/// Sum records sharing a key; output sorted by key.
std::vector<SensitivityRecord> net(std::vector<SensitivityRecord> records);

/// Per-position sensitivities, netted. Errors are rethrown as InputError naming the position index.
std::vector<SensitivityRecord> collect_sensitivities(const Portfolio& p, const MarketData& md,
                                                     const IssuerRegistry& registry, const Rulebook& rb,
                                                     Warnings* warnings = nullptr);

/// `risk_class,bucket,name,tenor,value`
void write_sensitivities_csv(std::ostream& out, const std::vector<SensitivityRecord>& records);

} // namespace frtb
