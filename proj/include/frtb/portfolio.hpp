#pragma once

#include "frtb/error.hpp"
#include "frtb/rulebook.hpp"

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace frtb {

struct Bond {
    std::string name;
    double notional = 0.0;
    double coupon_rate = 0.0; // per year
    double maturity = 0.0;    // years
    int frequency = 2;        // coupons per year: 1, 2 or 4
    std::string currency;

    bool operator==(const Bond&) const = default;
};

struct CashEquity {
    std::string issuer_id;
    double shares = 0.0;

    bool operator==(const CashEquity&) const = default;
};

/// Long `signed_notional` units of `foreign_currency` against the reporting currency.
struct FXPosition {
    std::string foreign_currency;
    double signed_notional = 0.0;

    bool operator==(const FXPosition&) const = default;
};

struct CommodityFuture {
    std::string commodity_id;
    double quantity = 0.0;
    std::string unit;

    bool operator==(const CommodityFuture&) const = default;
};

using Instrument = std::variant<Bond, CashEquity, FXPosition, CommodityFuture>;

RiskClass risk_class_of(const Instrument& instr);
std::string instrument_label(const Instrument& instr);

struct Portfolio {
    std::vector<Instrument> positions;
    std::string as_of;

    bool operator==(const Portfolio&) const = default;
};

struct IssuerInfo {
    std::string issuer_id;
    std::string sector;
    std::string economy; // "advanced" | "emerging"
    std::string size;    // "large" | "small"
};

struct CommodityInfo {
    std::string commodity_id;
    std::string sector;
};

struct IssuerRegistry {
    std::map<std::string, IssuerInfo> issuers;
    std::map<std::string, CommodityInfo> commodities;
};

/// Annually-compounded zero rates, linearly interpolated, flat beyond both ends.
struct ZeroCurve {
    std::vector<double> tenors;
    std::vector<double> rates;

    bool empty() const { return tenors.empty(); }
    double rate(double t) const;
    double last_tenor() const { return tenors.back(); }
};

struct MarketData {
    std::string as_of;
    std::string reporting_currency = "USD";
    std::map<std::string, double> equity_prices;
    std::map<std::string, double> fx_spots; // reporting-currency units per foreign unit
    std::map<std::string, double> commodity_prices;
    ZeroCurve zero_curve;
};

using Warnings = std::vector<std::string>;

/// Additive shift applied to the zero rate at each time (used for curve bumps).
using RateShift = std::function<double(double)>;

/// Portfolio CSV (`type,issuer_or_id,quantity,unit,coupon,maturity,frequency,currency,sign`)
/// or the equivalent JSON document. A first character of '{' selects JSON.
Portfolio load_portfolio(std::string_view source);
Portfolio load_portfolio_file(const std::string& path);
nlohmann::json to_json(const Portfolio& p);

MarketData load_market_data(std::string_view source);
MarketData load_market_data_file(const std::string& path);

IssuerRegistry load_registry(std::string_view source);
IssuerRegistry load_registry_file(const std::string& path);

/// Present value in the reporting currency. Bond cash flows falling beyond the last
/// curve node are discounted at the flat-extrapolated rate and reported in `warnings`.
double value(const Instrument& instr, const MarketData& md, Warnings* warnings = nullptr);

/// Bond present value under `curve` with an optional rate shift.
double bond_value(const Bond& bond, const ZeroCurve& curve, const RateShift& shift = {});

/// Coupon dates in years, counted back from maturity in steps of 1/frequency.
std::vector<double> bond_cash_flow_times(const Bond& bond);

struct BucketAssignment {
    int bucket = 0;
    bool residual = false;

    bool operator==(const BucketAssignment&) const = default;
};

/// Bucket of an instrument's risk factor. Equities match on (sector, economy, size),
/// commodities on sector, bonds and FX positions on currency. Unknown or unmatched
/// issuers go to the class's residual bucket when the rulebook has one (flagged via
/// `residual` and `warnings`), otherwise InputError.
BucketAssignment assign_bucket(const Instrument& instr, const IssuerRegistry& registry, const Rulebook& rb,
                               Warnings* warnings = nullptr);

} // namespace frtb
