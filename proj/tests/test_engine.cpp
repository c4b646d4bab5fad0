#include "support.hpp"

#include <doctest.h>

using namespace frtb;
using test::fixture_market;
using test::fixture_registry;
using test::reference_rulebook;

namespace {

const double kEquityOracle = std::sqrt(440'000.0 * 440'000.0 + 59'500.0 * 59'500.0 + 2 * 0.15 * 440'000.0 * 59'500.0);

Portfolio table1() {
    return load_portfolio_file(test::data_path("fixtures/table1.csv"));
}

const ClassResult* class_of(const ScenarioTotal& st, RiskClass rc) {
    for (const auto& c : st.classes)
        if (c.risk_class == rc)
            return &c;
    return nullptr;
}

} // namespace

TEST_CASE("Table 1 equity subset under the medium scenario") {
    const Portfolio p = load_portfolio_file(test::data_path("fixtures/table1_equity.csv"));
    ComputeOptions opts;
    opts.scenario = CorrelationScenario::Medium;
    const CapitalReport r = compute_capital(p, fixture_market(), fixture_registry(), reference_rulebook(), opts);
    CHECK(test::rel_err(r.total_capital, kEquityOracle) <= 1e-9);
    REQUIRE(r.scenarios.size() == 1);
    const ClassResult* eq = class_of(r.scenarios[0], RiskClass::EquityDelta);
    REQUIRE(eq != nullptr);
    CHECK(test::rel_err(eq->charge, kEquityOracle) <= 1e-9);
    CHECK(r.binding_scenario == CorrelationScenario::Medium);
    CHECK(r.warnings.empty());
    CHECK(r.rulebook_version == reference_rulebook().version);
    CHECK(r.as_of == "2024-03-28");
}

TEST_CASE("empty portfolio gives zero capital") {
    const CapitalReport r = compute_capital(Portfolio{}, fixture_market(), fixture_registry(), reference_rulebook());
    CHECK(r.total_capital == 0.0);
    CHECK(r.sensitivities.empty());
    for (const auto& st : r.scenarios)
        CHECK(st.classes.empty());
}

TEST_CASE("full Table 1: total is the max over scenarios of the class sum") {
    const Rulebook& rb = reference_rulebook();
    const CapitalReport r = compute_capital(table1(), fixture_market(), fixture_registry(), rb);
    REQUIRE(r.scenarios.size() == 3);
    double best = 0.0;
    for (const auto& st : r.scenarios) {
        CHECK(st.classes.size() == 4);
        double sum = 0.0;
        for (RiskClass rc : kAllRiskClasses) {
            const ClassResult* c = class_of(st, rc);
            REQUIRE(c != nullptr);
            // Each class charge agrees with an independent per-class evaluation.
            std::vector<SensitivityRecord> recs;
            for (const auto& s : r.sensitivities)
                if (s.key.risk_class == rc)
                    recs.push_back(s);
            CHECK(c->charge == risk_class_delta(rc, recs, rb, st.scenario).charge);
            CHECK(c->charge >= 0.0);
            sum += c->charge;
        }
        CHECK(test::rel_err(st.total, sum) <= 1e-15);
        best = std::max(best, st.total);
    }
    CHECK(r.total_capital == best);
    CHECK(r.find_scenario(r.binding_scenario)->total == r.total_capital);
}

TEST_CASE("class filter matches the unfiltered class charge") {
    const Portfolio p = table1();
    for (auto s : kAllScenarios) {
        ComputeOptions all;
        all.scenario = s;
        const CapitalReport full = compute_capital(p, fixture_market(), fixture_registry(), reference_rulebook(), all);
        for (RiskClass rc : kAllRiskClasses) {
            ComputeOptions one = all;
            one.classes = {rc};
            const CapitalReport filtered =
                compute_capital(p, fixture_market(), fixture_registry(), reference_rulebook(), one);
            CHECK(filtered.total_capital == class_of(full.scenarios[0], rc)->charge);
        }
    }
}

TEST_CASE("adding same-sign exposure within one bucket never lowers capital") {
    test::Rng rng(41);
    Portfolio p = table1();
    double prev = compute_capital(p, fixture_market(), fixture_registry(), reference_rulebook()).total_capital;
    for (int i = 0; i < 30; ++i) {
        p.positions.push_back(CashEquity{"XOM", rng.uniform(0, 5000)});
        const double now = compute_capital(p, fixture_market(), fixture_registry(), reference_rulebook()).total_capital;
        CHECK(now >= prev);
        prev = now;
    }
}

TEST_CASE("errors are collected per position with their stage") {
    Portfolio p = table1();
    p.positions.push_back(FXPosition{"XAU", 1});          // no FX bucket
    p.positions.push_back(CashEquity{"NOPRICE", 10});     // residual bucket but no price
    p.positions.push_back(Bond{"EB", 100, 0.01, 2, 1, "EUR"}); // bucket exists, no curve
    try {
        compute_capital(p, fixture_market(), fixture_registry(), reference_rulebook());
        FAIL("expected a PipelineError");
    } catch (const PipelineError& e) {
        REQUIRE(e.errors().size() == 3);
        CHECK(e.errors()[0].stage == PipelineStage::Classification);
        CHECK(e.errors()[0].position == 8);
        CHECK(e.errors()[1].stage == PipelineStage::Valuation);
        CHECK(e.errors()[1].position == 9);
        CHECK(e.errors()[2].stage == PipelineStage::Valuation);
        CHECK(e.errors()[2].position == 10);
    }
}

TEST_CASE("residual assignment shows up as a warning") {
    Portfolio p;
    p.positions = {CashEquity{"ACME", 100}};
    const CapitalReport r = compute_capital(p, fixture_market(), fixture_registry(), reference_rulebook());
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].rfind("position 0: ", 0) == 0);
    CHECK(r.sensitivities.at(0).key.bucket == 11);
}

TEST_CASE("report renderings") {
    const CapitalReport r = compute_capital(table1(), fixture_market(), fixture_registry(), reference_rulebook());

    SUBCASE("json round-trips") {
        const std::string text = render_report(r, ReportFormat::Json);
        const CapitalReport back = report_from_json(nlohmann::json::parse(text));
        CHECK(back == r);
        CHECK(render_report(back, ReportFormat::Json) == text);
    }
    SUBCASE("csv has one row per class and bucket of the binding scenario") {
        const std::string text = render_report(r, ReportFormat::Csv);
        std::size_t rows = 0;
        for (const auto& c : r.find_scenario(r.binding_scenario)->classes)
            rows += c.buckets.size();
        std::size_t lines = 0;
        for (char ch : text)
            lines += ch == '\n' ? 1 : 0;
        CHECK(lines == rows + 1);
        CHECK(text.rfind("scenario,risk_class,bucket,k_b,s_b_net,s_b_effective,class_charge\n", 0) == 0);
    }
    SUBCASE("table shows the total") {
        const std::string text = render_report(r, ReportFormat::Table);
        CHECK(text.find("Total capital requirement") != std::string::npos);
        CHECK(text.find("Warnings") == std::string::npos);
    }
    SUBCASE("warnings are carried verbatim") {
        CapitalReport w = r;
        w.warnings = {"position 3: something odd"};
        CHECK(render_report(w, ReportFormat::Table).find("position 3: something odd") != std::string::npos);
        CHECK(render_report(w, ReportFormat::Csv).find("# warning: position 3: something odd") != std::string::npos);
        CHECK(report_from_json(to_json(w)).warnings == w.warnings);
    }
    SUBCASE("unknown format") {
        CHECK_THROWS_AS(parse_report_format("xml"), InputError);
    }
}

TEST_CASE("report parsing rejects inconsistent weighted sensitivities") {
    const CapitalReport r = compute_capital(table1(), fixture_market(), fixture_registry(), reference_rulebook());
    nlohmann::json j = to_json(r);
    j["scenarios"][0]["classes"][0]["buckets"][0]["weighted_sensitivities"][0]["ws"] = 12345.0;
    CHECK_THROWS(report_from_json(j));
}

TEST_CASE("identical inputs give byte-identical reports") {
    const auto run = [] {
        return render_report(compute_capital(table1(), fixture_market(), fixture_registry(), reference_rulebook()),
                             ReportFormat::Json);
    };
    CHECK(run() == run());
}
