#include "support.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace frtb;
using frtb::test::reference_rulebook;
using nlohmann::json;

namespace {

json reference_doc() {
    std::ifstream in(test::data_path("rulebook/d352_reference.json"));
    return json::parse(in);
}

std::vector<std::string> violations_of(const json& doc) {
    try {
        load_rulebook(doc.dump());
    } catch (const ValidationError& e) {
        return e.violations();
    }
    return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
    for (const auto& s : v)
        if (s.find(needle) != std::string::npos)
            return true;
    return false;
}

json& bucket_entry(json& doc, const std::string& rc, int id) {
    for (auto& b : doc["buckets"])
        if (b["risk_class"] == rc && b["id"] == id)
            return b;
    throw std::runtime_error("fixture bucket missing");
}

} // namespace

TEST_CASE("reference rulebook loads and answers the case-study lookups") {
    const Rulebook& rb = reference_rulebook();
    CHECK(rb.version.find("d352") != std::string::npos);
    CHECK(risk_weight(rb, RiskClass::EquityDelta, 7) == 0.40);
    CHECK(risk_weight(rb, RiskClass::EquityDelta, 6) == 0.35);
    CHECK(cross_correlation(rb, RiskClass::EquityDelta, 6, 7, CorrelationScenario::Medium) == 0.15);
    CHECK(cross_correlation(rb, RiskClass::EquityDelta, 7, 6, CorrelationScenario::Medium) == 0.15);
    CHECK(cross_correlation(rb, RiskClass::EquityDelta, 6, 7, CorrelationScenario::High) == doctest::Approx(0.1875).epsilon(1e-15));
    CHECK(risk_weight(rb, RiskClass::GIRR, 1, 5.0) == 0.015);
    CHECK(risk_weight(rb, RiskClass::GIRR, 1, 0.25) == 0.024);
    CHECK(validate(rb).empty());
}

TEST_CASE("risk_weight rejects unknown buckets and misplaced tenors") {
    const Rulebook& rb = reference_rulebook();
    CHECK_THROWS_AS(risk_weight(rb, RiskClass::EquityDelta, 99), InputError);
    CHECK_THROWS_AS(risk_weight(rb, RiskClass::GIRR, 1), InputError);
    CHECK_THROWS_AS(risk_weight(rb, RiskClass::GIRR, 1, 4.0), InputError);
    CHECK_THROWS_AS(risk_weight(rb, RiskClass::EquityDelta, 7, 5.0), InputError);
}

TEST_CASE("cross_correlation errors") {
    const Rulebook& rb = reference_rulebook();
    CHECK_THROWS_AS(cross_correlation(rb, RiskClass::EquityDelta, 7, 7, CorrelationScenario::Medium), InputError);
    CHECK_THROWS_AS(cross_correlation(rb, RiskClass::EquityDelta, 7, 42, CorrelationScenario::Medium), InputError);
}

TEST_CASE("intra_correlation") {
    const Rulebook& rb = reference_rulebook();
    const RiskFactorKey xom{RiskClass::EquityDelta, 7, "XOM", {}};
    const RiskFactorKey other{RiskClass::EquityDelta, 7, "CVX", {}};
    CHECK(intra_correlation(rb, RiskClass::EquityDelta, 7, xom, xom, CorrelationScenario::Medium) == 1.0);
    const double rho = rb.correlations.intra.at({RiskClass::EquityDelta, 7});
    CHECK(rho == 0.25);
    CHECK(intra_correlation(rb, RiskClass::EquityDelta, 7, xom, other, CorrelationScenario::Medium) == rho);
    CHECK(intra_correlation(rb, RiskClass::EquityDelta, 7, xom, other, CorrelationScenario::Low) ==
          std::max(2 * rho - 1, 0.75 * rho));

    const RiskFactorKey in6{RiskClass::EquityDelta, 6, "T", {}};
    CHECK_THROWS_AS(intra_correlation(rb, RiskClass::EquityDelta, 7, xom, in6, CorrelationScenario::Medium), InputError);

    const RiskFactorKey g2{RiskClass::GIRR, 1, "USD", 2.0};
    const RiskFactorKey g10{RiskClass::GIRR, 1, "USD", 10.0};
    CHECK(intra_correlation(rb, RiskClass::GIRR, 1, g2, g10, CorrelationScenario::Medium) ==
          girr_tenor_correlation(2.0, 10.0, rb.correlations.girr_tenor_params));
}

TEST_CASE("girr_tenor_correlation examples and properties") {
    const GirrTenorParams p{0.03, 0.40};
    CHECK(girr_tenor_correlation(5, 5, p) == 1.0);
    CHECK(girr_tenor_correlation(0.25, 30, p) == 0.40);
    CHECK(girr_tenor_correlation(2, 10, p) == doctest::Approx(std::exp(-0.03 * 8 / 2)).epsilon(1e-15));
    CHECK_THROWS_AS(girr_tenor_correlation(0, 1, p), InputError);
    CHECK_THROWS_AS(girr_tenor_correlation(1, -1, p), InputError);

    const auto& grid = reference_rulebook().tenor_grid;
    for (double a : grid) {
        for (double b : grid) {
            const double r = girr_tenor_correlation(a, b, p);
            CHECK(r == girr_tenor_correlation(b, a, p));
            CHECK(r >= p.floor);
            CHECK(r <= 1.0);
            CHECK((r == 1.0) == (a == b));
        }
    }
    // Non-increasing in the gap for a fixed shorter tenor.
    test::Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        const double m = rng.uniform(0.1, 20);
        const double g1 = rng.uniform(0, 30);
        const double g2 = g1 + rng.uniform(0, 30);
        CHECK(girr_tenor_correlation(m, m + g1, p) >= girr_tenor_correlation(m, m + g2, p));
    }
}

TEST_CASE("apply_scenario examples and range property") {
    CHECK(apply_scenario(0.15, CorrelationScenario::Medium) == 0.15);
    CHECK(apply_scenario(0.9, CorrelationScenario::High) == 1.0);
    CHECK(apply_scenario(0.15, CorrelationScenario::Low) == doctest::Approx(0.1125).epsilon(1e-15));
    CHECK(apply_scenario(0.15, CorrelationScenario::High) == doctest::Approx(0.1875).epsilon(1e-15));

    test::Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const double x = rng.uniform(-1, 1);
        CHECK(apply_scenario(x, CorrelationScenario::Medium) == x);
        for (auto s : kAllScenarios) {
            const double y = apply_scenario(x, s);
            CHECK(y >= -1.0);
            CHECK(y <= 1.0);
        }
    }
    for (double edge : {-1.0, 0.0, 1.0})
        for (auto s : kAllScenarios) {
            CHECK(apply_scenario(edge, s) >= -1.0);
            CHECK(apply_scenario(edge, s) <= 1.0);
        }
}

TEST_CASE("cross correlations are symmetric under every scenario") {
    const Rulebook& rb = reference_rulebook();
    for (const auto& [key, gamma] : rb.correlations.cross) {
        const auto& [rc, b, c] = key;
        for (auto s : kAllScenarios)
            CHECK(cross_correlation(rb, rc, b, c, s) == cross_correlation(rb, rc, c, b, s));
    }
}

TEST_CASE("serialize round-trips") {
    const Rulebook& rb = reference_rulebook();
    const Rulebook again = load_rulebook(serialize(rb));
    CHECK(again == rb);
    CHECK(serialize(again) == serialize(rb));
}

TEST_CASE("validation violations") {
    SUBCASE("asymmetric cross correlation") {
        json doc = reference_doc();
        doc["cross_correlations"].push_back({{"risk_class", "EquityDelta"}, {"b", 6}, {"c", 7}, {"gamma", 0.15}});
        doc["cross_correlations"].push_back({{"risk_class", "EquityDelta"}, {"b", 7}, {"c", 6}, {"gamma", 0.2}});
        // The reference lists (6, 7) already; drop it so only the conflicting pair remains.
        auto& cc = doc["cross_correlations"];
        for (std::size_t i = 0; i < cc.size(); ++i)
            if (cc[i]["risk_class"] == "EquityDelta" && cc[i]["b"] == 6 && cc[i]["c"] == 7) {
                cc.erase(i);
                break;
            }
        CHECK(any_contains(violations_of(doc), "asymmetric"));
    }
    SUBCASE("risk weight above one") {
        json doc = reference_doc();
        bucket_entry(doc, "EquityDelta", 7)["risk_weight"] = 1.3;
        CHECK(any_contains(violations_of(doc), "outside [0, 1]"));
    }
    SUBCASE("duplicate bucket id") {
        json doc = reference_doc();
        doc["buckets"].push_back(bucket_entry(doc, "EquityDelta", 7));
        CHECK(any_contains(violations_of(doc), "duplicate bucket id"));
    }
    SUBCASE("missing GIRR tenor weight") {
        json doc = reference_doc();
        bucket_entry(doc, "GIRR", 1)["risk_weights_by_tenor"].erase(3);
        CHECK(any_contains(violations_of(doc), "missing risk weight for tenor 2"));
    }
    SUBCASE("correlation out of range") {
        json doc = reference_doc();
        doc["intra_correlations"][0]["rho"] = 1.5;
        CHECK(any_contains(violations_of(doc), "outside [-1, 1]"));
    }
    SUBCASE("grid not increasing") {
        json doc = reference_doc();
        doc["tenor_grid"][2] = 0.1;
        CHECK(!violations_of(doc).empty());
    }
    SUBCASE("girr floor outside (0, 1)") {
        json doc = reference_doc();
        doc["girr_tenor_params"]["floor"] = 1.0;
        CHECK(any_contains(violations_of(doc), "floor"));
    }
    SUBCASE("every violation is reported, not just the first") {
        json doc = reference_doc();
        bucket_entry(doc, "EquityDelta", 7)["risk_weight"] = 1.3;
        bucket_entry(doc, "EquityDelta", 6)["risk_weight"] = -0.1;
        CHECK(violations_of(doc).size() >= 2);
    }
}

TEST_CASE("parse errors carry a location") {
    try {
        load_rulebook("{\n  \"version\": \"x\",\n  \"tenor_grid\": [1, 2,\n}");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.location().find("line") != std::string::npos);
    }
    CHECK_THROWS_AS(load_rulebook("[]"), ParseError);
    CHECK_THROWS_AS(load_rulebook(R"({"version": "x"})"), ParseError);
}
