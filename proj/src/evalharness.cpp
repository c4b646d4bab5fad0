#include "frtb/evalharness.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace frtb {

using detail::json;
using detail::member;
using detail::number;
using detail::text;

namespace {

constexpr double kFractionLo = 0.0;
constexpr double kFractionHi = 1.5;

json answer_json(const CaseAnswer& a) {
    json j = json::object();
    if (a.bucket)
        j["bucket"] = *a.bucket;
    if (a.risk_weight)
        j["risk_weight"] = *a.risk_weight;
    if (a.correlation)
        j["correlation"] = *a.correlation;
    if (a.mcr_value)
        j["mcr_value"] = *a.mcr_value;
    return j;
}

CaseAnswer answer_from(const json& j, const std::string& where) {
    if (!j.is_object())
        throw ParseError(where, "expected an object");
    CaseAnswer a;
    auto fraction = [&](const char* key) -> std::optional<double> {
        auto it = j.find(key);
        if (it == j.end() || it->is_null())
            return std::nullopt;
        const double v = number(*it, where + "." + key);
        if (v < kFractionLo || v > kFractionHi)
            throw ParseError(where + "." + key, "fraction " + it->dump() + " outside the sanity band [0, 1.5]");
        return v;
    };
    if (auto it = j.find("bucket"); it != j.end() && !it->is_null())
        a.bucket = detail::integer(*it, where + ".bucket");
    a.risk_weight = fraction("risk_weight");
    a.correlation = fraction("correlation");
    if (auto it = j.find("mcr_value"); it != j.end() && !it->is_null())
        a.mcr_value = number(*it, where + ".mcr_value");
    return a;
}

AxisScore finish(AxisScore s) {
    s.accuracy = s.total == 0 ? 0.0 : 100.0 * s.correct / s.total;
    return s;
}

/// Draws from a 64-bit Mersenne Twister directly so case sets are identical across
/// standard library implementations.
class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    /// Multiple of `step` in [lo, hi].
    double stepped(double lo, double hi, double step) {
        const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
        return lo + step * static_cast<double>(below(n));
    }
    template <typename T>
    std::pair<T, T> two_distinct(const std::vector<T>& pool) {
        const std::size_t i = below(pool.size());
        std::size_t j = below(pool.size() - 1);
        if (j >= i)
            ++j;
        return {pool[i], pool[j]};
    }

private:
    std::mt19937_64 rng_;
};

template <typename Pred>
std::vector<std::string> keys_where(const std::map<std::string, double>& m, Pred pred) {
    std::vector<std::string> out;
    for (const auto& [k, v] : m)
        if (pred(k))
            out.push_back(k);
    return out;
}

double correlation_between(const Rulebook& rb, RiskClass rc, const RiskFactorKey& a, const RiskFactorKey& b) {
    if (a.bucket == b.bucket)
        return intra_correlation(rb, rc, a.bucket, a, b, CorrelationScenario::Medium);
    return cross_correlation(rb, rc, a.bucket, b.bucket, CorrelationScenario::Medium);
}

std::string case_id(int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "case-%03d", i + 1);
    return buf;
}

} // namespace

ScoreReport score_extraction(const CandidateExtraction& cand, const std::map<std::string, CaseAnswer>& reference,
                             const ScoreTolerances& tol) {
    for (const auto& [id, _] : cand.answers)
        if (!reference.count(id))
            throw InputError("candidate answers unknown case id '" + id + "'");

    ScoreReport out;
    out.source = cand.source;
    out.n_cases = static_cast<int>(reference.size());
    static const CaseAnswer kNone{};

    for (const auto& [id, ref] : reference) {
        auto it = cand.answers.find(id);
        const CaseAnswer& got = it == cand.answers.end() ? kNone : it->second;
        CaseVerdict v;
        v.id = id;
        if (ref.bucket)
            v.bucket = got.bucket && *got.bucket == *ref.bucket;
        if (ref.risk_weight)
            v.risk_weight = got.risk_weight && std::abs(*got.risk_weight - *ref.risk_weight) <= tol.weight_tol;
        if (ref.correlation)
            v.correlation = got.correlation && std::abs(*got.correlation - *ref.correlation) <= tol.corr_tol;
        if (ref.mcr_value)
            v.mcr = got.mcr_value && std::abs(*got.mcr_value - *ref.mcr_value) <= tol.mcr_rel_tol * std::abs(*ref.mcr_value);

        auto tally = [](AxisScore& s, const std::optional<bool>& ok) {
            if (!ok)
                return;
            ++s.total;
            if (*ok)
                ++s.correct;
        };
        tally(out.buckets, v.bucket);
        tally(out.weights, v.risk_weight);
        tally(out.correlations, v.correlation);
        tally(out.mcr, v.mcr);
        out.verdicts.push_back(std::move(v));
    }
    out.buckets = finish(out.buckets);
    out.weights = finish(out.weights);
    out.correlations = finish(out.correlations);
    out.mcr = finish(out.mcr);
    return out;
}

std::map<std::string, CaseAnswer> reference_answers(const CaseSet& cases) {
    std::map<std::string, CaseAnswer> out;
    for (const auto& c : cases.cases)
        out[c.id] = c.reference;
    return out;
}

CandidateExtraction reference_as_candidate(const CaseSet& cases) {
    return {"reference", reference_answers(cases)};
}

CaseSet generate_cases(std::uint64_t seed, int n, const Rulebook& rb, const MarketData& md,
                       const IssuerRegistry& registry) {
    if (n < 1)
        throw InputError("generate_cases: n must be at least 1");

    const auto equities = keys_where(md.equity_prices, [&](const std::string& k) { return registry.issuers.count(k) > 0; });
    const auto commodities =
        keys_where(md.commodity_prices, [&](const std::string& k) { return registry.commodities.count(k) > 0; });
    const auto currencies = keys_where(md.fx_spots, [&](const std::string& k) {
        const auto fx = rb.buckets_of(RiskClass::FX);
        return k != md.reporting_currency &&
               std::any_of(fx.begin(), fx.end(), [&](const Bucket* b) { return b->selector.currency == k; });
    });
    std::vector<double> maturities;
    for (double t : rb.tenor_grid)
        if (t >= 1.0 && !md.zero_curve.empty() && t <= md.zero_curve.last_tenor())
            maturities.push_back(t);

    if (equities.size() < 2 || commodities.size() < 2 || currencies.size() < 2 || maturities.size() < 2)
        throw InputError("generate_cases: market data and registry must offer at least two names per risk class");

    CaseSet out;
    out.seed = seed;
    out.rulebook_version = rb.version;
    Draw draw(seed);
    const IssuerRegistry& reg = registry;

    for (int i = 0; i < n; ++i) {
        EvalCase c;
        c.id = case_id(i);
        c.risk_class = kAllRiskClasses[static_cast<std::size_t>(i) % 4];
        c.portfolio.as_of = md.as_of;
        auto sign = [&] { return draw.unit() < 0.8 ? 1.0 : -1.0; };

        switch (c.risk_class) {
        case RiskClass::GIRR: {
            auto [t1, t2] = draw.two_distinct(maturities);
            for (double t : {t1, t2}) {
                Bond b;
                b.name = "BOND-" + std::to_string(static_cast<int>(t)) + "Y";
                b.notional = sign() * draw.stepped(10000, 1000000, 10000);
                b.coupon_rate = draw.stepped(0.0, 0.06, 0.0025);
                b.maturity = t;
                b.frequency = draw.unit() < 0.5 ? 1 : 2;
                b.currency = md.reporting_currency;
                c.portfolio.positions.push_back(b);
            }
            break;
        }
        case RiskClass::EquityDelta: {
            auto [a, b] = draw.two_distinct(equities);
            for (const auto& name : {a, b})
                c.portfolio.positions.push_back(CashEquity{name, sign() * draw.stepped(100, 20000, 100)});
            break;
        }
        case RiskClass::FX: {
            auto [a, b] = draw.two_distinct(currencies);
            for (const auto& ccy : {a, b})
                c.portfolio.positions.push_back(FXPosition{ccy, sign() * draw.stepped(10000, 1000000, 10000)});
            break;
        }
        case RiskClass::Commodity: {
            auto [a, b] = draw.two_distinct(commodities);
            for (const auto& name : {a, b})
                c.portfolio.positions.push_back(CommodityFuture{name, sign() * draw.stepped(10, 5000, 10), "units"});
            break;
        }
        }

        // Reference answers straight from the rulebook and the engine.
        const Instrument& first = c.portfolio.positions[0];
        const Instrument& second = c.portfolio.positions[1];
        const int b1 = assign_bucket(first, reg, rb).bucket;
        const int b2 = assign_bucket(second, reg, rb).bucket;
        c.reference.bucket = b1;
        if (c.risk_class == RiskClass::GIRR) {
            const double t1 = std::get<Bond>(first).maturity;
            const double t2 = std::get<Bond>(second).maturity;
            c.reference.risk_weight = risk_weight(rb, RiskClass::GIRR, b1, t1);
            c.reference.correlation =
                apply_scenario(girr_tenor_correlation(t1, t2, rb.correlations.girr_tenor_params),
                               CorrelationScenario::Medium, rb.scenario_rules);
        } else {
            auto name_of = [](const Instrument& in) {
                if (const auto* e = std::get_if<CashEquity>(&in))
                    return e->issuer_id;
                if (const auto* f = std::get_if<FXPosition>(&in))
                    return f->foreign_currency;
                return std::get<CommodityFuture>(in).commodity_id;
            };
            c.reference.risk_weight = risk_weight(rb, c.risk_class, b1);
            c.reference.correlation = correlation_between(rb, c.risk_class, {c.risk_class, b1, name_of(first), {}},
                                                          {c.risk_class, b2, name_of(second), {}});
        }
        c.reference.mcr_value = compute_capital(c.portfolio, md, reg, rb).total_capital;
        out.cases.push_back(std::move(c));
    }
    return out;
}

json to_json(const CaseSet& cs) {
    json cases = json::array();
    for (const auto& c : cs.cases)
        cases.push_back({{"id", c.id},
                         {"risk_class", to_string(c.risk_class)},
                         {"portfolio", to_json(c.portfolio)},
                         {"answers", answer_json(c.reference)}});
    return {{"schema", "frtb-case-set/1"},
            {"seed", cs.seed},
            {"rulebook_version", cs.rulebook_version},
            {"cases", std::move(cases)}};
}

CaseSet load_case_set(std::string_view source) {
    const json doc = detail::parse_json(source);
    CaseSet cs;
    const json& seed = member(doc, "seed", "cases");
    if (!seed.is_number_unsigned() && !seed.is_number_integer())
        throw ParseError("cases.seed", "expected an integer");
    cs.seed = seed.get<std::uint64_t>();
    cs.rulebook_version = text(member(doc, "rulebook_version", "cases"), "cases.rulebook_version");
    const json& arr = member(doc, "cases", "cases");
    if (!arr.is_array())
        throw ParseError("cases.cases", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string where = "cases[" + std::to_string(i) + "]";
        EvalCase c;
        c.id = text(member(arr[i], "id", where), where + ".id");
        try {
            c.risk_class = parse_risk_class(text(member(arr[i], "risk_class", where), where + ".risk_class"));
        } catch (const InputError& e) {
            throw ParseError(where + ".risk_class", e.what());
        }
        c.portfolio = load_portfolio(member(arr[i], "portfolio", where).dump());
        c.reference = answer_from(member(arr[i], "answers", where), where + ".answers");
        if (std::any_of(cs.cases.begin(), cs.cases.end(), [&](const EvalCase& o) { return o.id == c.id; }))
            throw ParseError(where + ".id", "duplicate case id '" + c.id + "'");
        cs.cases.push_back(std::move(c));
    }
    return cs;
}

json to_json(const CandidateExtraction& cand) {
    json answers = json::object();
    for (const auto& [id, a] : cand.answers)
        answers[id] = answer_json(a);
    return {{"source", cand.source}, {"answers", std::move(answers)}};
}

CandidateExtraction load_candidate(std::string_view source) {
    const json doc = detail::parse_json(source);
    CandidateExtraction cand;
    if (auto it = doc.find("source"); it != doc.end())
        cand.source = text(*it, "candidate.source");
    const json& answers = member(doc, "answers", "candidate");
    if (!answers.is_object())
        throw ParseError("candidate.answers", "expected an object keyed by case id");
    for (const auto& [id, a] : answers.items())
        cand.answers[id] = answer_from(a, "answers." + id);
    return cand;
}

json to_json(const ScoreReport& r) {
    auto axis = [](const AxisScore& s) {
        return json{{"correct", s.correct}, {"total", s.total}, {"accuracy", s.accuracy}};
    };
    auto flag = [](const std::optional<bool>& b) { return b ? json(*b) : json(nullptr); };
    json verdicts = json::array();
    for (const auto& v : r.verdicts)
        verdicts.push_back({{"id", v.id},
                            {"bucket", flag(v.bucket)},
                            {"risk_weight", flag(v.risk_weight)},
                            {"correlation", flag(v.correlation)},
                            {"mcr", flag(v.mcr)}});
    return {{"source", r.source},
            {"n_cases", r.n_cases},
            {"accuracy_buckets", axis(r.buckets)},
            {"accuracy_weights", axis(r.weights)},
            {"accuracy_correlations", axis(r.correlations)},
            {"accuracy_mcr", axis(r.mcr)},
            {"verdicts", std::move(verdicts)}};
}

std::string render_score_table(const ScoreReport& r) {
    auto pct = [](const AxisScore& s) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f", s.accuracy);
        return std::string(buf);
    };
    const std::string source = r.source.empty() ? "candidate" : r.source;
    const std::vector<std::string> head = {"Source", "Buckets (%)", "Risk Weights (%)", "Correlation (%)", "MCR (%)"};
    const std::vector<std::string> row = {source, pct(r.buckets), pct(r.weights), pct(r.correlations), pct(r.mcr)};
    std::vector<std::size_t> w(head.size());
    for (std::size_t i = 0; i < head.size(); ++i)
        w[i] = std::max(head[i].size(), row[i].size());
    std::string rule = "+";
    for (auto x : w)
        rule += std::string(x + 2, '-') + "+";
    auto line = [&](const std::vector<std::string>& cells) {
        std::string s = "|";
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const std::string pad(w[i] - cells[i].size(), ' ');
            s += " " + (i == 0 ? cells[i] + pad : pad + cells[i]) + " |";
        }
        return s;
    };
    std::ostringstream out;
    out << rule << "\n" << line(head) << "\n" << rule << "\n" << line(row) << "\n" << rule << "\n";
    out << "cases: " << r.n_cases << "\n";
    return out.str();
}

PromptSpec load_prompt_spec(std::string_view source) {
    const json doc = detail::parse_json(source);
    PromptSpec p;
    p.role = text(member(doc, "role", "prompt"), "prompt.role");
    p.input = text(member(doc, "input", "prompt"), "prompt.input");
    p.goal = text(member(doc, "goal", "prompt"), "prompt.goal");
    p.method = text(member(doc, "method", "prompt"), "prompt.method");
    p.significance = text(member(doc, "significance", "prompt"), "prompt.significance");
    return p;
}

std::string render_prompt(const PromptSpec& spec) {
    const std::pair<const char*, const std::string*> sections[] = {{"Role", &spec.role},
                                                                  {"Input", &spec.input},
                                                                  {"Goal", &spec.goal},
                                                                  {"Method", &spec.method},
                                                                  {"Significance", &spec.significance}};
    for (const auto& [label, body] : sections) {
        if (std::all_of(body->begin(), body->end(), [](unsigned char c) { return std::isspace(c); })) {
            std::string field(label);
            field[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(field[0])));
            throw InputError("prompt field '" + field + "' is empty");
        }
    }
    std::string out;
    for (const auto& [label, body] : sections) {
        if (!out.empty())
            out += "\n";
        out += "## ";
        out += label;
        out += "\n";
        out += *body;
        if (body->back() != '\n')
            out += "\n";
    }
    return out;
}

} // namespace frtb
