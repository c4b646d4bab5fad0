#include "frtb/engine.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace frtb {

using detail::json;

const ScenarioTotal* CapitalReport::find_scenario(CorrelationScenario s) const {
    for (const auto& st : scenarios)
        if (st.scenario == s)
            return &st;
    return nullptr;
}

std::string_view to_string(PipelineStage stage) {
    switch (stage) {
    case PipelineStage::Classification:
        return "classification";
    case PipelineStage::Valuation:
        return "valuation";
    case PipelineStage::Sensitivity:
        return "sensitivity";
    case PipelineStage::Aggregation:
        return "aggregation";
    }
    return "?";
}

PipelineError::PipelineError(std::vector<StageError> errors)
    : Error([&] {
          std::string msg = std::to_string(errors.size()) + " pipeline error(s)";
          for (const auto& e : errors) {
              msg += "\n  [" + std::string(to_string(e.stage)) + "]";
              if (e.position)
                  msg += " position " + std::to_string(*e.position) + ":";
              msg += " " + e.message;
          }
          return msg;
      }()),
      errors_(std::move(errors)) {}

CapitalReport compute_capital(const Portfolio& p, const MarketData& md, const IssuerRegistry& registry,
                              const Rulebook& rb, const ComputeOptions& opts) {
    CapitalReport report;
    report.as_of = p.as_of.empty() ? md.as_of : p.as_of;
    report.rulebook_version = rb.version;

    std::vector<StageError> errors;
    std::vector<SensitivityRecord> records;

    for (std::size_t i = 0; i < p.positions.size(); ++i) {
        const Instrument& instr = p.positions[i];
        if (!opts.classes.empty() && !opts.classes.count(risk_class_of(instr)))
            continue;
        Warnings local;
        PipelineStage stage = PipelineStage::Classification;
        try {
            const BucketAssignment where = assign_bucket(instr, registry, rb, &local);
            stage = PipelineStage::Valuation;
            value(instr, md, &local);
            stage = PipelineStage::Sensitivity;
            std::vector<SensitivityRecord> recs;
            if (const auto* b = std::get_if<Bond>(&instr))
                recs = girr_deltas(*b, md, rb.tenor_grid, where.bucket);
            else if (const auto* e = std::get_if<CashEquity>(&instr))
                recs = {equity_delta(*e, md, where.bucket)};
            else if (const auto* f = std::get_if<FXPosition>(&instr))
                recs = {fx_delta(*f, md, where.bucket)};
            else
                recs = {commodity_delta(std::get<CommodityFuture>(instr), md, where.bucket)};
            records.insert(records.end(), recs.begin(), recs.end());
            for (auto& w : local)
                report.warnings.push_back("position " + std::to_string(i) + ": " + w);
        } catch (const Error& e) {
            errors.push_back({stage, i, instrument_label(instr) + ": " + e.what()});
        }
    }
    if (!errors.empty())
        throw PipelineError(std::move(errors));

    report.sensitivities = net(std::move(records));

    std::vector<CorrelationScenario> scenarios;
    if (opts.scenario)
        scenarios.push_back(*opts.scenario);
    else
        scenarios.assign(std::begin(kAllScenarios), std::end(kAllScenarios));

    EnvelopeResult env;
    try {
        env = scenario_envelope(report.sensitivities, rb, scenarios);
    } catch (const Error& e) {
        throw PipelineError({{PipelineStage::Aggregation, std::nullopt, e.what()}});
    }
    report.scenarios = std::move(env.scenarios);
    report.total_capital = env.capital;
    report.binding_scenario = env.binding;

    for (const auto& st : report.scenarios)
        for (const auto& cr : st.classes)
            if (cr.fallback_engaged)
                report.warnings.push_back(std::string(to_string(cr.risk_class)) + " (" +
                                          std::string(to_string(st.scenario)) +
                                          "): negative quantity under the root; S_b clamped to [-K_b, K_b]");
    return report;
}

ReportFormat parse_report_format(std::string_view text) {
    if (text == "json")
        return ReportFormat::Json;
    if (text == "csv")
        return ReportFormat::Csv;
    if (text == "table")
        return ReportFormat::Table;
    throw InputError("unknown report format '" + std::string(text) + "' (expected json, csv or table)");
}

namespace {

json key_json(const RiskFactorKey& k) {
    json j = {{"risk_class", to_string(k.risk_class)}, {"bucket", k.bucket}, {"name", k.name}};
    j["tenor"] = k.tenor ? json(*k.tenor) : json(nullptr);
    return j;
}

RiskFactorKey key_from(const json& j) {
    RiskFactorKey k;
    k.risk_class = parse_risk_class(j.at("risk_class").get<std::string>());
    k.bucket = j.at("bucket").get<int>();
    k.name = j.at("name").get<std::string>();
    if (!j.at("tenor").is_null())
        k.tenor = j.at("tenor").get<double>();
    return k;
}

json bucket_json(const BucketResult& b) {
    json ws = json::array();
    for (const auto& w : b.weighted)
        ws.push_back({{"key", key_json(w.key())},
                      {"sensitivity", w.sensitivity()},
                      {"risk_weight", w.risk_weight()},
                      {"ws", w.ws()}});
    return {{"bucket", b.bucket},
            {"k_b", b.k_b},
            {"s_b_net", b.s_b_net},
            {"s_b_effective", b.s_b_effective},
            {"weighted_sensitivities", std::move(ws)}};
}

std::string money(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    // Thousands separators.
    const auto dot = s.find('.');
    const std::size_t start = (s[0] == '-') ? 1 : 0;
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(dot) - 3; i > static_cast<std::ptrdiff_t>(start); i -= 3)
        s.insert(static_cast<std::size_t>(i), ",");
    return s;
}

std::string full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct TableWriter {
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;

    std::string str() const {
        std::vector<std::size_t> width(headers.size());
        for (std::size_t i = 0; i < headers.size(); ++i)
            width[i] = headers[i].size();
        for (const auto& r : rows)
            for (std::size_t i = 0; i < r.size(); ++i)
                width[i] = std::max(width[i], r[i].size());
        std::string rule = "+";
        for (auto w : width)
            rule += std::string(w + 2, '-') + "+";
        rule += "\n";
        auto line = [&](const std::vector<std::string>& cells, bool left_first) {
            std::string s = "|";
            for (std::size_t i = 0; i < cells.size(); ++i) {
                const std::string pad(width[i] - cells[i].size(), ' ');
                s += " " + ((i == 0 && left_first) ? cells[i] + pad : pad + cells[i]) + " |";
            }
            return s + "\n";
        };
        std::string out = rule + line(headers, true) + rule;
        for (const auto& r : rows)
            out += line(r, true);
        return out + rule;
    }
};

} // namespace

json to_json(const CapitalReport& r) {
    json scenarios = json::array();
    for (const auto& st : r.scenarios) {
        json classes = json::array();
        for (const auto& cr : st.classes) {
            json buckets = json::array();
            for (const auto& b : cr.buckets)
                buckets.push_back(bucket_json(b));
            json gammas = json::array();
            for (const auto& g : cr.gammas)
                gammas.push_back({{"b", g.b}, {"c", g.c}, {"gamma", g.gamma}});
            classes.push_back({{"risk_class", to_string(cr.risk_class)},
                               {"charge", cr.charge},
                               {"fallback_engaged", cr.fallback_engaged},
                               {"buckets", std::move(buckets)},
                               {"gammas", std::move(gammas)}});
        }
        scenarios.push_back({{"scenario", to_string(st.scenario)}, {"total", st.total}, {"classes", std::move(classes)}});
    }
    json sens = json::array();
    for (const auto& s : r.sensitivities)
        sens.push_back({{"key", key_json(s.key)}, {"value", s.value}});
    return {{"schema", r.schema},
            {"as_of", r.as_of},
            {"rulebook_version", r.rulebook_version},
            {"scenarios", std::move(scenarios)},
            {"binding_scenario", to_string(r.binding_scenario)},
            {"sensitivities", std::move(sens)},
            {"total_capital", r.total_capital},
            {"warnings", r.warnings}};
}

CapitalReport report_from_json(const json& j) {
    try {
        CapitalReport r;
        r.schema = j.at("schema").get<std::string>();
        if (r.schema != kReportSchema)
            throw InputError("unsupported report schema '" + r.schema + "'");
        r.as_of = j.at("as_of").get<std::string>();
        r.rulebook_version = j.at("rulebook_version").get<std::string>();
        for (const auto& js : j.at("scenarios")) {
            ScenarioTotal st;
            st.scenario = parse_scenario(js.at("scenario").get<std::string>());
            st.total = js.at("total").get<double>();
            for (const auto& jc : js.at("classes")) {
                ClassResult cr;
                cr.risk_class = parse_risk_class(jc.at("risk_class").get<std::string>());
                cr.charge = jc.at("charge").get<double>();
                cr.fallback_engaged = jc.at("fallback_engaged").get<bool>();
                for (const auto& jb : jc.at("buckets")) {
                    BucketResult b;
                    b.risk_class = cr.risk_class;
                    b.bucket = jb.at("bucket").get<int>();
                    b.k_b = jb.at("k_b").get<double>();
                    b.s_b_net = jb.at("s_b_net").get<double>();
                    b.s_b_effective = jb.at("s_b_effective").get<double>();
                    for (const auto& jw : jb.at("weighted_sensitivities")) {
                        WeightedSensitivity w(key_from(jw.at("key")), jw.at("sensitivity").get<double>(),
                                              jw.at("risk_weight").get<double>());
                        if (w.ws() != jw.at("ws").get<double>())
                            throw InputError("weighted sensitivity of " + describe(w.key()) +
                                             " does not equal risk_weight * sensitivity");
                        b.weighted.push_back(std::move(w));
                    }
                    cr.buckets.push_back(std::move(b));
                }
                for (const auto& jg : jc.at("gammas"))
                    cr.gammas.push_back({jg.at("b").get<int>(), jg.at("c").get<int>(), jg.at("gamma").get<double>()});
                st.classes.push_back(std::move(cr));
            }
            r.scenarios.push_back(std::move(st));
        }
        r.binding_scenario = parse_scenario(j.at("binding_scenario").get<std::string>());
        for (const auto& js : j.at("sensitivities"))
            r.sensitivities.push_back({key_from(js.at("key")), js.at("value").get<double>()});
        r.total_capital = j.at("total_capital").get<double>();
        r.warnings = j.at("warnings").get<std::vector<std::string>>();
        return r;
    } catch (const json::exception& e) {
        throw ParseError("report", e.what());
    }
}

std::string render_report(const CapitalReport& r, ReportFormat format) {
    switch (format) {
    case ReportFormat::Json:
        return to_json(r).dump(2) + "\n";

    case ReportFormat::Csv: {
        std::ostringstream out;
        for (const auto& w : r.warnings)
            out << "# warning: " << w << "\n";
        out << "scenario,risk_class,bucket,k_b,s_b_net,s_b_effective,class_charge\n";
        if (const ScenarioTotal* st = r.find_scenario(r.binding_scenario))
            for (const auto& cr : st->classes)
                for (const auto& b : cr.buckets)
                    out << to_string(st->scenario) << ',' << to_string(cr.risk_class) << ',' << b.bucket << ','
                        << full(b.k_b) << ',' << full(b.s_b_net) << ',' << full(b.s_b_effective) << ','
                        << full(cr.charge) << "\n";
        return out.str();
    }

    case ReportFormat::Table: {
        std::ostringstream out;
        out << "Capital report";
        if (!r.as_of.empty())
            out << " as of " << r.as_of;
        out << "\nRulebook: " << r.rulebook_version << "\n\n";

        TableWriter sens{{"Risk Factor", "Sensitivity"}, {}};
        for (const auto& s : r.sensitivities)
            sens.rows.push_back({describe(s.key), money(s.value)});
        out << "Net sensitivities\n" << sens.str() << "\n";

        for (const auto& st : r.scenarios) {
            TableWriter t{{"Risk Class", "Bucket", "K_b", "S_b", "S_b (used)", "Class Charge"}, {}};
            for (const auto& cr : st.classes)
                for (const auto& b : cr.buckets)
                    t.rows.push_back({std::string(to_string(cr.risk_class)), std::to_string(b.bucket), money(b.k_b),
                                      money(b.s_b_net), money(b.s_b_effective), money(cr.charge)});
            out << "Scenario " << to_string(st.scenario) << " (total " << money(st.total) << ")\n" << t.str() << "\n";
        }
        out << "Total capital requirement: " << money(r.total_capital) << " (binding scenario "
            << to_string(r.binding_scenario) << ")\n";
        if (!r.warnings.empty()) {
            out << "\nWarnings:\n";
            for (const auto& w : r.warnings)
                out << "  " << w << "\n";
        }
        return out.str();
    }
    }
    throw InputError("unknown report format");
}

} // namespace frtb
