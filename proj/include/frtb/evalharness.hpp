#pragma once

#include "frtb/engine.hpp"
#include "frtb/portfolio.hpp"
#include "frtb/rulebook.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace frtb {

/// Answers for one case. Any field may be absent.
struct CaseAnswer {
    std::optional<int> bucket;
    std::optional<double> risk_weight;
    std::optional<double> correlation;
    std::optional<double> mcr_value;

    bool operator==(const CaseAnswer&) const = default;
};

struct CandidateExtraction {
    std::string source;
    std::map<std::string, CaseAnswer> answers; // case id -> answer

    bool operator==(const CandidateExtraction&) const = default;
};

/// A generated holding pair. The reference answer refers to the first position:
/// its bucket and risk weight (GIRR: at the bond's maturity vertex), the correlation
/// between the two positions' risk factors, and the capital of the whole case.
struct EvalCase {
    std::string id;
    RiskClass risk_class = RiskClass::EquityDelta;
    Portfolio portfolio;
    CaseAnswer reference;

    bool operator==(const EvalCase&) const = default;
};

struct CaseSet {
    std::uint64_t seed = 0;
    std::string rulebook_version;
    std::vector<EvalCase> cases;

    bool operator==(const CaseSet&) const = default;
};

struct ScoreTolerances {
    double weight_tol = 0.005;
    double corr_tol = 0.005;
    double mcr_rel_tol = 0.01;
};

/// nullopt: the reference has no answer on that axis for this case.
struct CaseVerdict {
    std::string id;
    std::optional<bool> bucket;
    std::optional<bool> risk_weight;
    std::optional<bool> correlation;
    std::optional<bool> mcr;
};

struct AxisScore {
    int correct = 0;
    int total = 0;
    double accuracy = 0.0; // percent
};

struct ScoreReport {
    std::string source;
    int n_cases = 0;
    AxisScore buckets;
    AxisScore weights;
    AxisScore correlations;
    AxisScore mcr;
    std::vector<CaseVerdict> verdicts;
};

/// Each axis scores 100 * correct / (cases with a reference answer on that axis).
/// Missing candidate answers count as wrong. Candidate ids must all be reference ids.
ScoreReport score_extraction(const CandidateExtraction& cand, const std::map<std::string, CaseAnswer>& reference,
                             const ScoreTolerances& tol = {});

std::map<std::string, CaseAnswer> reference_answers(const CaseSet& cases);
CandidateExtraction reference_as_candidate(const CaseSet& cases);

/// Cases cycle through GIRR, EquityDelta, FX, Commodity so every class appears once n >= 4.
/// Positions draw only on names present in both `md` and `registry`.
CaseSet generate_cases(std::uint64_t seed, int n, const Rulebook& rb, const MarketData& md,
                       const IssuerRegistry& registry);

nlohmann::json to_json(const CaseSet& cs);
CaseSet load_case_set(std::string_view source);

nlohmann::json to_json(const CandidateExtraction& cand);
CandidateExtraction load_candidate(std::string_view source);

nlohmann::json to_json(const ScoreReport& r);
std::string render_score_table(const ScoreReport& r);

struct PromptSpec {
    std::string role;
    std::string input;
    std::string goal;
    std::string method;
    std::string significance;
};

PromptSpec load_prompt_spec(std::string_view source);

/// Five labelled sections: Role, Input, Goal, Method, Significance.
/// Throws InputError naming the first empty field.
std::string render_prompt(const PromptSpec& spec);

} // namespace frtb
