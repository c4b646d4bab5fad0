#include "support.hpp"

#include <doctest.h>

using namespace frtb;
using test::fixture_market;
using test::fixture_registry;
using test::reference_rulebook;

namespace {

MarketData flat_market(double rate) {
    MarketData md;
    md.as_of = "2024-03-28";
    md.zero_curve.tenors = {0.25, 1, 5, 30};
    md.zero_curve.rates.assign(4, rate);
    return md;
}

template <typename T>
int count_of(const Portfolio& p) {
    int n = 0;
    for (const auto& i : p.positions)
        n += std::holds_alternative<T>(i) ? 1 : 0;
    return n;
}

} // namespace

TEST_CASE("Table 1 fixture loads as eight typed positions") {
    for (const char* file : {"fixtures/table1.csv", "fixtures/table1.json"}) {
        CAPTURE(file);
        const Portfolio p = load_portfolio_file(test::data_path(file));
        CHECK(p.positions.size() == 8);
        CHECK(count_of<Bond>(p) == 2);
        CHECK(count_of<CommodityFuture>(p) == 2);
        CHECK(count_of<CashEquity>(p) == 2);
        CHECK(count_of<FXPosition>(p) == 2);
        CHECK(p.as_of == "2024-03-28");
    }
    // Both encodings describe the same holdings.
    CHECK(load_portfolio_file(test::data_path("fixtures/table1.csv")) ==
          load_portfolio_file(test::data_path("fixtures/table1.json")));
}

TEST_CASE("JPY row is carried long ten million yen") {
    const Portfolio p = load_portfolio_file(test::data_path("fixtures/table1.csv"));
    bool seen = false;
    for (const auto& i : p.positions)
        if (const auto* f = std::get_if<FXPosition>(&i); f && f->foreign_currency == "JPY") {
            CHECK(f->signed_notional == 10'000'000.0);
            seen = true;
        }
    CHECK(seen);
}

TEST_CASE("CSV edge cases") {
    const std::string header = "type,issuer_or_id,quantity,unit,coupon,maturity,frequency,currency,sign\n";
    CHECK(load_portfolio("").positions.empty());
    CHECK(load_portfolio(header).positions.empty());

    try {
        load_portfolio(header + "equity,XOM,10000,shares,,,,,\nequity,T,abc,shares,,,,,\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.location() == "row 3");
        CHECK(std::string(e.what()).find("quantity") != std::string::npos);
    }
    CHECK_THROWS_AS(load_portfolio(header + "swap,X,1,,,,,,\n"), ParseError);
    CHECK_THROWS_AS(load_portfolio(header + "bond,B,100,USD,0.01,5,3,USD,\n"), ParseError);
    CHECK_THROWS_AS(load_portfolio(header + "bond,B,100,USD,0.01,0,2,USD,\n"), ParseError);
    CHECK_THROWS_AS(load_portfolio(header + "equity,XOM,10,shares,,,,,sideways\n"), ParseError);

    const Portfolio p = load_portfolio(header + "equity,XOM,10,shares,,,,,short\nfx,EUR,5,EUR,,,,,-\n");
    CHECK(std::get<CashEquity>(p.positions[0]).shares == -10);
    CHECK(std::get<FXPosition>(p.positions[1]).signed_notional == -5);
}

TEST_CASE("JSON portfolio round-trips through to_json") {
    const Portfolio p = load_portfolio_file(test::data_path("fixtures/table1.csv"));
    CHECK(load_portfolio(to_json(p).dump()) == p);
    CHECK_THROWS_AS(load_portfolio("{\"positions\": [ {\"type\": \"equity\"} ]}"), ParseError);
}

TEST_CASE("value examples") {
    const MarketData& md = fixture_market();
    CHECK(value(CashEquity{"XOM", 10000}, md) == 1'100'000.0);
    CHECK(value(FXPosition{"EUR", 100000}, md) == doctest::Approx(110'000.0).epsilon(1e-15));
    CHECK(value(CommodityFuture{"GOLD", 600, "oz"}, md) == 1'200'000.0);

    const MarketData zero = flat_market(0.0);
    CHECK(value(Bond{"Z", 10000, 0.0, 1.0, 2, "USD"}, zero) == 10000.0);

    CHECK_THROWS_AS(value(CashEquity{"NOPE", 1}, md), InputError);
    CHECK_THROWS_AS(value(Bond{"EURBOND", 100, 0.01, 2, 1, "EUR"}, md), InputError);
}

TEST_CASE("bond beyond the curve is priced flat and flagged") {
    MarketData md = flat_market(0.03);
    Warnings w;
    const double v = value(Bond{"LONG", 100, 0.03, 40, 1, "USD"}, md, &w);
    CHECK(v == doctest::Approx(100.0).epsilon(1e-12));
    REQUIRE(w.size() == 1);
    CHECK(w[0].find("beyond") != std::string::npos);
}

TEST_CASE("bond cash flow schedule") {
    CHECK(bond_cash_flow_times(Bond{"", 1, 0.04, 5, 2, "USD"}).size() == 10);
    const auto odd = bond_cash_flow_times(Bond{"", 1, 0.04, 1.25, 2, "USD"});
    REQUIRE(odd.size() == 3);
    CHECK(odd[0] == doctest::Approx(0.25));
    CHECK(odd[2] == doctest::Approx(1.25));
}

TEST_CASE("linearity of value in quantity") {
    const MarketData& md = fixture_market();
    test::Rng rng(21);
    for (int i = 0; i < 200; ++i) {
        const double q = rng.uniform(-1e6, 1e6);
        const double lambda = rng.uniform(-10, 10);
        for (const auto& [a, b] : std::vector<std::pair<Instrument, Instrument>>{
                 {CashEquity{"AAPL", q}, CashEquity{"AAPL", lambda * q}},
                 {FXPosition{"GBP", q}, FXPosition{"GBP", lambda * q}},
                 {CommodityFuture{"WTI", q, "bbl"}, CommodityFuture{"WTI", lambda * q, "bbl"}}}) {
            CHECK(test::rel_err(value(b, md), lambda * value(a, md)) <= 1e-12);
        }
    }
}

TEST_CASE("bond at a flat rate equal to its coupon prices near par") {
    // Annual coupons discounted annually price at par exactly. Sub-annual coupons with annual
    // compounding stay within 0.1% while coupon and maturity are modest.
    test::Rng rng(5);
    for (int i = 0; i < 300; ++i) {
        const double coupon = rng.uniform(0.0, 0.12);
        const double maturity = rng.integer(1, 30);
        const MarketData md = flat_market(coupon);
        CHECK(test::rel_err(value(Bond{"", 100, coupon, maturity, 1, "USD"}, md), 100.0) <= 1e-12);
    }
    for (int i = 0; i < 300; ++i) {
        const double coupon = rng.uniform(0.0, 0.02);
        const double maturity = rng.integer(1, 5);
        const int freq = rng.coin() ? 2 : 4;
        const MarketData md = flat_market(coupon);
        CHECK(test::rel_err(value(Bond{"", 100, coupon, maturity, freq, "USD"}, md), 100.0) <= 1e-3);
    }
}

TEST_CASE("zero curve interpolation") {
    ZeroCurve c{{1, 2, 5}, {0.01, 0.02, 0.05}};
    CHECK(c.rate(0.5) == 0.01);
    CHECK(c.rate(1.5) == doctest::Approx(0.015));
    CHECK(c.rate(3.5) == doctest::Approx(0.035));
    CHECK(c.rate(10) == 0.05);
}

TEST_CASE("market data invariants") {
    CHECK_THROWS_AS(load_market_data(R"({"as_of":"x","reporting_currency":"USD","equity_prices":{"A":-1},
        "fx_spots":{},"commodity_prices":{},"zero_curve":[[1,0.01]]})"),
                    InputError);
    CHECK_THROWS_AS(load_market_data(R"({"as_of":"x","reporting_currency":"USD","equity_prices":{},
        "fx_spots":{"EUR":0},"commodity_prices":{},"zero_curve":[[1,0.01]]})"),
                    InputError);
    CHECK_THROWS_AS(load_market_data(R"({"as_of":"x","reporting_currency":"USD","equity_prices":{},
        "fx_spots":{},"commodity_prices":{},"zero_curve":[[2,0.01],[1,0.01]]})"),
                    InputError);
}

TEST_CASE("assign_bucket examples") {
    const Rulebook& rb = reference_rulebook();
    const IssuerRegistry& reg = fixture_registry();
    CHECK(assign_bucket(CashEquity{"XOM", 1}, reg, rb).bucket == 7);
    CHECK(assign_bucket(CashEquity{"T", 1}, reg, rb).bucket == 6);
    CHECK(assign_bucket(FXPosition{"EUR", 1}, reg, rb).bucket == 1);
    CHECK(assign_bucket(Bond{"B", 1, 0, 1, 1, "USD"}, reg, rb).bucket == 1);
    CHECK(assign_bucket(CommodityFuture{"GOLD", 1, "oz"}, reg, rb).bucket == 7);
    CHECK(assign_bucket(CommodityFuture{"WTI", 1, "bbl"}, reg, rb).bucket == 2);

    Warnings w;
    const auto acme = assign_bucket(CashEquity{"ACME", 1}, reg, rb, &w);
    CHECK(acme.bucket == 11);
    CHECK(acme.residual);
    REQUIRE(w.size() == 1);
    CHECK(w[0].find("ACME") != std::string::npos);

    CHECK_THROWS_AS(assign_bucket(FXPosition{"XAU", 1}, reg, rb), InputError);
}

TEST_CASE("assign_bucket without a residual bucket rejects unknown issuers") {
    Rulebook rb = reference_rulebook();
    std::erase_if(rb.buckets, [](const Bucket& b) { return b.risk_class == RiskClass::EquityDelta && b.selector.residual; });
    CHECK_THROWS_AS(assign_bucket(CashEquity{"ACME", 1}, fixture_registry(), rb), InputError);
}

TEST_CASE("assign_bucket is a pure function of its inputs") {
    const Rulebook& rb = reference_rulebook();
    const IssuerRegistry& reg = fixture_registry();
    for (const auto& [id, _] : reg.issuers) {
        const auto a = assign_bucket(CashEquity{id, 1}, reg, rb);
        CHECK(assign_bucket(CashEquity{id, 1}, reg, rb) == a);
        CHECK(assign_bucket(CashEquity{id, -5000}, reg, rb) == a);
    }
}
