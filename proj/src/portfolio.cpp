#include "frtb/portfolio.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

namespace frtb {

using detail::json;
using detail::member;
using detail::number;
using detail::text;

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back(trim(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    out.emplace_back(trim(cell));
    return out;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

const std::vector<std::string> kColumns = {"type",     "issuer_or_id", "quantity", "unit", "coupon",
                                           "maturity", "frequency",    "currency", "sign"};

/// One position as raw text fields, keyed by column name.
using Row = std::map<std::string, std::string>;

std::string field(const Row& row, const std::string& key) {
    auto it = row.find(key);
    return it == row.end() ? std::string() : it->second;
}

double required_number(const Row& row, const std::string& key, const std::string& where) {
    const std::string raw = field(row, key);
    if (raw.empty())
        throw ParseError(where, "missing " + key);
    auto v = parse_double(raw);
    if (!v)
        throw ParseError(where, key + " '" + raw + "' is not a number");
    return *v;
}

double parse_sign(const std::string& raw, const std::string& where) {
    const std::string s = lower(trim(raw));
    if (s.empty() || s == "+" || s == "+1" || s == "1" || s == "long")
        return 1.0;
    if (s == "-" || s == "-1" || s == "short")
        return -1.0;
    throw ParseError(where, "sign '" + raw + "' must be one of +, -, +1, -1, long, short");
}

Instrument build_instrument(const Row& row, const std::string& where) {
    const std::string type = lower(field(row, "type"));
    const std::string id = field(row, "issuer_or_id");
    const double sign = parse_sign(field(row, "sign"), where);
    if (type != "bond" && type != "equity" && type != "fx" && type != "commodity_future" && type != "future")
        throw ParseError(where, "unknown instrument type '" + field(row, "type") + "'");
    if (id.empty())
        throw ParseError(where, "missing issuer_or_id");
    const double qty = sign * required_number(row, "quantity", where);

    if (type == "equity")
        return CashEquity{id, qty};
    if (type == "fx")
        return FXPosition{id, qty};
    if (type == "commodity_future" || type == "future")
        return CommodityFuture{id, qty, field(row, "unit")};

    Bond b;
    b.name = id;
    b.notional = qty;
    b.maturity = required_number(row, "maturity", where);
    if (!(b.maturity > 0.0))
        throw ParseError(where, "bond maturity must be positive");
    b.coupon_rate = field(row, "coupon").empty() ? 0.0 : required_number(row, "coupon", where);
    if (!field(row, "frequency").empty()) {
        const double f = required_number(row, "frequency", where);
        if (f != 1.0 && f != 2.0 && f != 4.0)
            throw ParseError(where, "bond frequency must be 1, 2 or 4");
        b.frequency = static_cast<int>(f);
    }
    b.currency = field(row, "currency");
    if (b.currency.empty())
        throw ParseError(where, "bond currency is required");
    return b;
}

Portfolio load_portfolio_csv(std::string_view source) {
    Portfolio p;
    std::vector<std::string> header;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= source.size()) {
        const std::size_t nl = source.find('\n', pos);
        std::string_view line = source.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        const std::string_view t = trim(line);
        if (t.empty())
            continue;
        if (t.front() == '#') {
            const std::string_view body = trim(t.substr(1));
            if (body.rfind("as_of=", 0) == 0)
                p.as_of = std::string(trim(body.substr(6)));
            continue;
        }
        const std::string where = "row " + std::to_string(line_no);
        auto cells = split_csv(t);
        if (header.empty()) {
            for (auto& c : cells)
                c = lower(c);
            for (const auto& required : {"type", "issuer_or_id", "quantity"})
                if (std::find(cells.begin(), cells.end(), required) == cells.end())
                    throw ParseError(where, std::string("header lacks column '") + required + "'");
            header = std::move(cells);
            continue;
        }
        if (cells.size() > header.size())
            throw ParseError(where, "expected at most " + std::to_string(header.size()) + " fields, got " +
                                        std::to_string(cells.size()));
        Row row;
        for (std::size_t i = 0; i < cells.size(); ++i)
            row[header[i]] = cells[i];
        p.positions.push_back(build_instrument(row, where));
    }
    return p;
}

Portfolio load_portfolio_json(std::string_view source) {
    const json doc = detail::parse_json(source);
    Portfolio p;
    if (auto it = doc.find("as_of"); it != doc.end())
        p.as_of = text(*it, "portfolio.as_of");
    const json& positions = member(doc, "positions", "portfolio");
    if (!positions.is_array())
        throw ParseError("portfolio.positions", "expected an array");
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const std::string where = "positions[" + std::to_string(i) + "]";
        const json& e = positions[i];
        if (!e.is_object())
            throw ParseError(where, "expected an object");
        Row row;
        for (const auto& col : kColumns) {
            auto it = e.find(col);
            if (it == e.end() || it->is_null())
                continue;
            row[col] = it->is_string() ? it->get<std::string>() : it->dump();
        }
        p.positions.push_back(build_instrument(row, where));
    }
    return p;
}

void require_positive_map(const json& doc, const char* key, std::map<std::string, double>& out) {
    auto it = doc.find(key);
    if (it == doc.end())
        return;
    if (!it->is_object())
        throw ParseError(std::string("market.") + key, "expected an object");
    for (const auto& [name, v] : it->items()) {
        const std::string where = std::string("market.") + key + "." + name;
        const double x = number(v, where);
        if (!(x > 0.0))
            throw InputError(where + ": must be positive");
        out[name] = x;
    }
}

} // namespace

RiskClass risk_class_of(const Instrument& instr) {
    struct Visitor {
        RiskClass operator()(const Bond&) const { return RiskClass::GIRR; }
        RiskClass operator()(const CashEquity&) const { return RiskClass::EquityDelta; }
        RiskClass operator()(const FXPosition&) const { return RiskClass::FX; }
        RiskClass operator()(const CommodityFuture&) const { return RiskClass::Commodity; }
    };
    return std::visit(Visitor{}, instr);
}

std::string instrument_label(const Instrument& instr) {
    struct Visitor {
        std::string operator()(const Bond& b) const { return "bond " + b.name; }
        std::string operator()(const CashEquity& e) const { return "equity " + e.issuer_id; }
        std::string operator()(const FXPosition& f) const { return "fx " + f.foreign_currency; }
        std::string operator()(const CommodityFuture& c) const { return "commodity future " + c.commodity_id; }
    };
    return std::visit(Visitor{}, instr);
}

Portfolio load_portfolio(std::string_view source) {
    const std::string_view t = trim(source);
    if (!t.empty() && t.front() == '{')
        return load_portfolio_json(source);
    return load_portfolio_csv(source);
}

Portfolio load_portfolio_file(const std::string& path) {
    return load_portfolio(detail::read_file(path));
}

json to_json(const Portfolio& p) {
    struct Visitor {
        json operator()(const Bond& b) const {
            return {{"type", "bond"},           {"issuer_or_id", b.name}, {"quantity", b.notional},
                    {"coupon", b.coupon_rate},  {"maturity", b.maturity}, {"frequency", b.frequency},
                    {"currency", b.currency}};
        }
        json operator()(const CashEquity& e) const {
            return {{"type", "equity"}, {"issuer_or_id", e.issuer_id}, {"quantity", e.shares}};
        }
        json operator()(const FXPosition& f) const {
            return {{"type", "fx"}, {"issuer_or_id", f.foreign_currency}, {"quantity", f.signed_notional}};
        }
        json operator()(const CommodityFuture& c) const {
            return {{"type", "commodity_future"},
                    {"issuer_or_id", c.commodity_id},
                    {"quantity", c.quantity},
                    {"unit", c.unit}};
        }
    };
    json positions = json::array();
    for (const auto& instr : p.positions)
        positions.push_back(std::visit(Visitor{}, instr));
    return {{"as_of", p.as_of}, {"positions", std::move(positions)}};
}

double ZeroCurve::rate(double t) const {
    if (tenors.empty())
        throw InputError("zero curve is empty");
    if (t <= tenors.front())
        return rates.front();
    if (t >= tenors.back())
        return rates.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(tenors.begin(), tenors.end(), t) - tenors.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - tenors[lo]) / (tenors[hi] - tenors[lo]);
    return rates[lo] + w * (rates[hi] - rates[lo]);
}

MarketData load_market_data(std::string_view source) {
    const json doc = detail::parse_json(source);
    if (!doc.is_object())
        throw ParseError("line 1, column 1", "market data must be an object");
    MarketData md;
    if (auto it = doc.find("as_of"); it != doc.end())
        md.as_of = text(*it, "market.as_of");
    if (auto it = doc.find("reporting_currency"); it != doc.end())
        md.reporting_currency = text(*it, "market.reporting_currency");
    require_positive_map(doc, "equity_prices", md.equity_prices);
    require_positive_map(doc, "fx_spots", md.fx_spots);
    require_positive_map(doc, "commodity_prices", md.commodity_prices);
    if (auto it = doc.find("zero_curve"); it != doc.end()) {
        if (!it->is_array())
            throw ParseError("market.zero_curve", "expected an array of [tenor, rate] pairs");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string where = "market.zero_curve[" + std::to_string(i) + "]";
            const json& node = (*it)[i];
            if (!node.is_array() || node.size() != 2)
                throw ParseError(where, "expected a [tenor, rate] pair");
            const double t = number(node[0], where);
            const double r = number(node[1], where);
            if (!(t > 0.0))
                throw InputError(where + ": tenor must be positive");
            if (!md.zero_curve.tenors.empty() && !(t > md.zero_curve.tenors.back()))
                throw InputError(where + ": curve tenors must be strictly increasing");
            if (!(r > -1.0))
                throw InputError(where + ": zero rate must exceed -100%");
            md.zero_curve.tenors.push_back(t);
            md.zero_curve.rates.push_back(r);
        }
    }
    return md;
}

MarketData load_market_data_file(const std::string& path) {
    return load_market_data(detail::read_file(path));
}

IssuerRegistry load_registry(std::string_view source) {
    const json doc = detail::parse_json(source);
    IssuerRegistry reg;
    if (auto it = doc.find("issuers"); it != doc.end()) {
        if (!it->is_array())
            throw ParseError("registry.issuers", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string where = "issuers[" + std::to_string(i) + "]";
            const json& e = (*it)[i];
            IssuerInfo info{text(member(e, "issuer_id", where), where + ".issuer_id"),
                            text(member(e, "sector", where), where + ".sector"),
                            lower(text(member(e, "economy", where), where + ".economy")),
                            lower(text(member(e, "size", where), where + ".size"))};
            if (info.economy != "advanced" && info.economy != "emerging")
                throw ParseError(where + ".economy", "must be 'advanced' or 'emerging'");
            if (info.size != "large" && info.size != "small")
                throw ParseError(where + ".size", "must be 'large' or 'small'");
            const std::string id = info.issuer_id;
            if (!reg.issuers.emplace(id, std::move(info)).second)
                throw InputError(where + ": duplicate issuer_id '" + id + "'");
        }
    }
    if (auto it = doc.find("commodities"); it != doc.end()) {
        if (!it->is_array())
            throw ParseError("registry.commodities", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string where = "commodities[" + std::to_string(i) + "]";
            const json& e = (*it)[i];
            CommodityInfo info{text(member(e, "commodity_id", where), where + ".commodity_id"),
                               text(member(e, "sector", where), where + ".sector")};
            const std::string id = info.commodity_id;
            if (!reg.commodities.emplace(id, std::move(info)).second)
                throw InputError(where + ": duplicate commodity_id '" + id + "'");
        }
    }
    return reg;
}

IssuerRegistry load_registry_file(const std::string& path) {
    return load_registry(detail::read_file(path));
}

std::vector<double> bond_cash_flow_times(const Bond& bond) {
    const double f = bond.frequency;
    const auto n = static_cast<int>(std::ceil(bond.maturity * f - 1e-9));
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(std::max(n, 0)));
    for (int j = 1; j <= n; ++j)
        times.push_back(bond.maturity - static_cast<double>(n - j) / f);
    return times;
}

double bond_value(const Bond& bond, const ZeroCurve& curve, const RateShift& shift) {
    const auto times = bond_cash_flow_times(bond);
    const double coupon = bond.notional * bond.coupon_rate / bond.frequency;
    double pv = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
        const double t = times[j];
        const double cf = coupon + (j + 1 == times.size() ? bond.notional : 0.0);
        const double r = curve.rate(t) + (shift ? shift(t) : 0.0);
        pv += cf * std::pow(1.0 + r, -t);
    }
    return pv;
}

double value(const Instrument& instr, const MarketData& md, Warnings* warnings) {
    auto price = [](const std::map<std::string, double>& m, const std::string& key, const char* what) {
        auto it = m.find(key);
        if (it == m.end())
            throw InputError(std::string("no ") + what + " for '" + key + "'");
        return it->second;
    };
    struct Visitor {
        const MarketData& md;
        Warnings* warnings;
        decltype(price)& lookup;

        double operator()(const CashEquity& e) const {
            return e.shares * lookup(md.equity_prices, e.issuer_id, "equity price");
        }
        double operator()(const FXPosition& f) const {
            if (f.foreign_currency == md.reporting_currency)
                return f.signed_notional;
            return f.signed_notional * lookup(md.fx_spots, f.foreign_currency, "fx spot");
        }
        double operator()(const CommodityFuture& c) const {
            return c.quantity * lookup(md.commodity_prices, c.commodity_id, "commodity price");
        }
        double operator()(const Bond& b) const {
            if (b.currency != md.reporting_currency)
                throw InputError("bond " + b.name + ": no zero curve for currency " + b.currency);
            if (md.zero_curve.empty())
                throw InputError("bond " + b.name + ": zero curve is empty");
            if (warnings && b.maturity > md.zero_curve.last_tenor()) {
                std::ostringstream ss;
                ss << "bond " << b.name << ": maturity " << b.maturity << "Y beyond last curve node "
                   << md.zero_curve.last_tenor() << "Y; zero rate extrapolated flat";
                warnings->push_back(ss.str());
            }
            return bond_value(b, md.zero_curve);
        }
    };
    return std::visit(Visitor{md, warnings, price}, instr);
}

namespace {

bool selector_matches_issuer(const BucketSelector& sel, const IssuerInfo& info) {
    if (sel.residual)
        return false;
    if (!sel.economy.empty() && lower(sel.economy) != info.economy)
        return false;
    if (!sel.size.empty() && lower(sel.size) != info.size)
        return false;
    if (sel.sectors.empty())
        return true;
    const std::string sector = lower(info.sector);
    return std::any_of(sel.sectors.begin(), sel.sectors.end(), [&](const std::string& s) { return lower(s) == sector; });
}

bool selector_matches_sector(const BucketSelector& sel, const std::string& sector) {
    if (sel.residual)
        return false;
    const std::string s = lower(sector);
    return std::any_of(sel.sectors.begin(), sel.sectors.end(), [&](const std::string& x) { return lower(x) == s; });
}

BucketAssignment by_currency(const Rulebook& rb, RiskClass rc, const std::string& currency) {
    for (const Bucket* b : rb.buckets_of(rc))
        if (b->selector.currency == currency)
            return {b->id, false};
    throw InputError("no " + std::string(to_string(rc)) + " bucket for currency " + currency);
}

BucketAssignment residual_or_throw(const Rulebook& rb, RiskClass rc, const std::string& what, Warnings* warnings) {
    for (const Bucket* b : rb.buckets_of(rc)) {
        if (b->selector.residual) {
            if (warnings)
                warnings->push_back(what + "; assigned to residual " + std::string(to_string(rc)) + " bucket " +
                                    std::to_string(b->id));
            return {b->id, true};
        }
    }
    throw InputError(what + " and the rulebook has no residual " + std::string(to_string(rc)) + " bucket");
}

} // namespace

BucketAssignment assign_bucket(const Instrument& instr, const IssuerRegistry& registry, const Rulebook& rb,
                               Warnings* warnings) {
    if (const auto* b = std::get_if<Bond>(&instr))
        return by_currency(rb, RiskClass::GIRR, b->currency);
    if (const auto* f = std::get_if<FXPosition>(&instr))
        return by_currency(rb, RiskClass::FX, f->foreign_currency);

    if (const auto* e = std::get_if<CashEquity>(&instr)) {
        auto it = registry.issuers.find(e->issuer_id);
        if (it == registry.issuers.end())
            return residual_or_throw(rb, RiskClass::EquityDelta, "issuer '" + e->issuer_id + "' not in registry",
                                     warnings);
        for (const Bucket* b : rb.buckets_of(RiskClass::EquityDelta))
            if (selector_matches_issuer(b->selector, it->second))
                return {b->id, false};
        return residual_or_throw(rb, RiskClass::EquityDelta,
                                 "issuer '" + e->issuer_id + "' (" + it->second.sector + ", " + it->second.economy +
                                     ", " + it->second.size + ") matches no bucket",
                                 warnings);
    }

    const auto& c = std::get<CommodityFuture>(instr);
    auto it = registry.commodities.find(c.commodity_id);
    if (it == registry.commodities.end())
        return residual_or_throw(rb, RiskClass::Commodity, "commodity '" + c.commodity_id + "' not in registry",
                                 warnings);
    for (const Bucket* b : rb.buckets_of(RiskClass::Commodity))
        if (selector_matches_sector(b->selector, it->second.sector))
            return {b->id, false};
    return residual_or_throw(rb, RiskClass::Commodity,
                             "commodity '" + c.commodity_id + "' (" + it->second.sector + ") matches no bucket",
                             warnings);
}

} // namespace frtb
