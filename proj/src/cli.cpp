#include "frtb/cli.hpp"

#include "frtb/engine.hpp"
#include "frtb/evalharness.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

namespace frtb::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public Error {
public:
    using Error::Error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Prefix parse failures with the file they came from.
template <typename F>
auto load(const std::string& path, F&& parse) {
    const std::string body = slurp(path);
    try {
        return parse(body);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.location(), std::string(e.what()).substr(e.location().size() + 2));
    }
}

/// FRTB_OUTPUT_DIR, when set, anchors relative --output paths.
fs::path resolve_output(const std::string& path) {
    fs::path p(path);
    if (p.is_relative())
        if (const char* dir = std::getenv("FRTB_OUTPUT_DIR"); dir && *dir)
            p = fs::path(dir) / p;
    return p;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty()) {
        out << content;
        return;
    }
    const fs::path p = resolve_output(path);
    std::ofstream f(p, std::ios::binary);
    if (!f)
        throw InputError("cannot write '" + p.string() + "'");
    f << content;
    if (!f)
        throw InputError("write failed for '" + p.string() + "'");
}

struct Inputs {
    std::string rulebook;
    std::string portfolio;
    std::string market;
    std::string registry;
};

/// Registry path defaults to registry.json beside the market file.
IssuerRegistry load_registry_for(const Inputs& in) {
    std::string path = in.registry;
    if (path.empty()) {
        const fs::path sibling = fs::path(in.market).parent_path() / "registry.json";
        if (!fs::exists(sibling))
            throw UsageError("--registry is required (no registry.json next to the market file)");
        path = sibling.string();
    }
    return load(path, [](const std::string& s) { return load_registry(s); });
}

std::set<RiskClass> parse_classes(const std::string& list) {
    std::set<RiskClass> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        try {
            out.insert(parse_risk_class(item));
        } catch (const InputError&) {
            throw UsageError("--classes: unknown risk class '" + item + "'");
        }
    }
    return out;
}

void report_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
    for (const auto& w : warnings)
        err << "warning: " << w << "\n";
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"FRTB sensitivities-based-method delta capital engine", "frtb"};
    app.require_subcommand(1);

    Inputs in;
    std::string scenario = "envelope";
    std::string classes;
    std::string format;
    std::string output;
    std::string candidate_path;
    std::string cases_path;
    std::string candidate_out;
    std::string prompt_path;
    std::uint64_t seed = 7;
    int n = 40;
    ScoreTolerances tol;

    const auto scenarios = CLI::IsMember({"low", "medium", "high", "envelope"});
    const auto formats = CLI::IsMember({"json", "csv", "table"});

    auto* compute = app.add_subcommand("compute", "Capital report for a portfolio");
    compute->add_option("--rulebook", in.rulebook, "Rulebook JSON")->required();
    compute->add_option("--portfolio", in.portfolio, "Portfolio CSV or JSON")->required();
    compute->add_option("--market", in.market, "Market data JSON")->required();
    compute->add_option("--registry", in.registry, "Issuer/commodity registry JSON (default: beside --market)");
    compute->add_option("--scenario", scenario, "low|medium|high|envelope")->check(scenarios)->capture_default_str();
    compute->add_option("--classes", classes, "Comma-separated risk classes (default: all)");
    compute->add_option("--format", format, "json|csv|table (default: table on stdout, json with --output)")
        ->check(formats);
    compute->add_option("--output", output, "Write the report to this file");

    auto* validate_rb = app.add_subcommand("validate-rulebook", "Check a rulebook against its invariants");
    validate_rb->add_option("--rulebook", in.rulebook, "Rulebook JSON")->required();

    auto* score = app.add_subcommand("score", "Score a candidate extraction against a case set");
    score->add_option("--candidate", candidate_path, "Candidate answers JSON")->required();
    score->add_option("--cases", cases_path, "Case set JSON from gen-cases")->required();
    score->add_option("--weight-tol", tol.weight_tol, "Absolute risk weight tolerance")->capture_default_str();
    score->add_option("--corr-tol", tol.corr_tol, "Absolute correlation tolerance")->capture_default_str();
    score->add_option("--mcr-rel-tol", tol.mcr_rel_tol, "Relative capital tolerance")->capture_default_str();
    score->add_option("--format", format, "json|table (default: table on stdout, json with --output)")
        ->check(CLI::IsMember({"json", "table"}));
    score->add_option("--output", output, "Write the score report to this file");

    auto* gen = app.add_subcommand("gen-cases", "Generate a seeded case set with reference answers");
    gen->add_option("--rulebook", in.rulebook, "Rulebook JSON")->required();
    gen->add_option("--market", in.market, "Market data JSON")->required();
    gen->add_option("--registry", in.registry, "Issuer/commodity registry JSON (default: beside --market)");
    gen->add_option("--seed", seed, "Generator seed")->capture_default_str();
    gen->add_option("--n", n, "Number of cases")->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--output", output, "Write the case set to this file");
    gen->add_option("--candidate-out", candidate_out, "Also write the reference answers as a candidate file");

    auto* prompt = app.add_subcommand("render-prompt", "Render a five-section extraction prompt");
    prompt->add_option("--spec", prompt_path, "Prompt spec JSON")->required();
    prompt->add_option("--output", output, "Write the prompt to this file");

    auto* dump = app.add_subcommand("dump-sensitivities", "Netted sensitivities as CSV");
    dump->add_option("--rulebook", in.rulebook, "Rulebook JSON")->required();
    dump->add_option("--portfolio", in.portfolio, "Portfolio CSV or JSON")->required();
    dump->add_option("--market", in.market, "Market data JSON")->required();
    dump->add_option("--registry", in.registry, "Issuer/commodity registry JSON (default: beside --market)");
    dump->add_option("--output", output, "Write the CSV to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    auto rulebook = [&] { return load(in.rulebook, [](const std::string& s) { return load_rulebook(s); }); };
    auto market = [&] { return load(in.market, [](const std::string& s) { return load_market_data(s); }); };
    auto portfolio = [&] { return load(in.portfolio, [](const std::string& s) { return load_portfolio(s); }); };

    try {
        if (*compute) {
            const Rulebook rb = rulebook();
            const MarketData md = market();
            const IssuerRegistry reg = load_registry_for(in);
            const Portfolio p = portfolio();
            ComputeOptions opts;
            if (scenario != "envelope")
                opts.scenario = parse_scenario(scenario);
            opts.classes = parse_classes(classes);
            const CapitalReport report = compute_capital(p, md, reg, rb, opts);
            report_warnings(report.warnings, err);
            const std::string fmt = !format.empty() ? format : (output.empty() ? "table" : "json");
            emit(output, render_report(report, parse_report_format(fmt)), out);
        } else if (*validate_rb) {
            const Rulebook rb = rulebook();
            out << "ok: " << rb.version << " (" << rb.buckets.size() << " buckets)\n";
        } else if (*score) {
            const CaseSet cs = load(cases_path, [](const std::string& s) { return load_case_set(s); });
            const CandidateExtraction cand =
                load(candidate_path, [](const std::string& s) { return load_candidate(s); });
            const ScoreReport r = score_extraction(cand, reference_answers(cs), tol);
            const std::string fmt = !format.empty() ? format : (output.empty() ? "table" : "json");
            emit(output, fmt == "json" ? to_json(r).dump(2) + "\n" : render_score_table(r), out);
        } else if (*gen) {
            const Rulebook rb = rulebook();
            const MarketData md = market();
            const IssuerRegistry reg = load_registry_for(in);
            const CaseSet cs = generate_cases(seed, n, rb, md, reg);
            emit(output, to_json(cs).dump(2) + "\n", out);
            if (!candidate_out.empty())
                emit(candidate_out, to_json(reference_as_candidate(cs)).dump(2) + "\n", out);
        } else if (*prompt) {
            const PromptSpec spec = load(prompt_path, [](const std::string& s) { return load_prompt_spec(s); });
            emit(output, render_prompt(spec), out);
        } else if (*dump) {
            const Rulebook rb = rulebook();
            const MarketData md = market();
            const IssuerRegistry reg = load_registry_for(in);
            const Portfolio p = portfolio();
            Warnings warnings;
            const auto records = collect_sensitivities(p, md, reg, rb, &warnings);
            report_warnings(warnings, err);
            std::ostringstream csv;
            write_sensitivities_csv(csv, records);
            emit(output, csv.str(), out);
        }
    } catch (const ValidationError& e) {
        err << "rulebook validation failed:\n";
        for (const auto& v : e.violations())
            err << "  " << v << "\n";
        return kRulebookInvalid;
    } catch (const PipelineError& e) {
        err << "error: " << e.errors().size() << " position(s) failed\n";
        for (const auto& se : e.errors()) {
            err << "  [" << to_string(se.stage) << "]";
            if (se.position)
                err << " position " << *se.position;
            err << ": " << se.message << "\n";
        }
        return kInputError;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kInputError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kOk;
}

} // namespace frtb::cli
