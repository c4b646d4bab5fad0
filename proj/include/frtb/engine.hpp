#pragma once

#include "frtb/aggregation.hpp"
#include "frtb/portfolio.hpp"
#include "frtb/rulebook.hpp"
#include "frtb/sensitivities.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace frtb {

inline constexpr std::string_view kReportSchema = "frtb-capital-report/1";

struct CapitalReport {
    std::string schema = std::string(kReportSchema);
    std::string as_of;
    std::string rulebook_version;
    std::vector<ScenarioTotal> scenarios;
    CorrelationScenario binding_scenario = CorrelationScenario::Medium;
    std::vector<SensitivityRecord> sensitivities;
    double total_capital = 0.0;
    std::vector<std::string> warnings;

    bool operator==(const CapitalReport&) const = default;

    const ScenarioTotal* find_scenario(CorrelationScenario s) const;
};

struct ComputeOptions {
    /// Unset: evaluate low, medium and high and keep the largest total.
    std::optional<CorrelationScenario> scenario;
    /// Empty: all risk classes.
    std::set<RiskClass> classes;
};

enum class PipelineStage { Classification, Valuation, Sensitivity, Aggregation };

std::string_view to_string(PipelineStage stage);

struct StageError {
    PipelineStage stage = PipelineStage::Classification;
    std::optional<std::size_t> position; // index into Portfolio::positions
    std::string message;
};

/// All per-position failures of one run.
class PipelineError : public Error {
public:
    explicit PipelineError(std::vector<StageError> errors);

    const std::vector<StageError>& errors() const { return errors_; }

private:
    std::vector<StageError> errors_;
};

/// Classification -> sensitivities -> aggregation -> capital. Errors are collected per
/// position and thrown together as a PipelineError.
CapitalReport compute_capital(const Portfolio& p, const MarketData& md, const IssuerRegistry& registry,
                              const Rulebook& rb, const ComputeOptions& opts = {});

enum class ReportFormat { Json, Csv, Table };

ReportFormat parse_report_format(std::string_view text);

nlohmann::json to_json(const CapitalReport& r);
CapitalReport report_from_json(const nlohmann::json& j);

/// Json: lossless (report_from_json inverts it). Csv: one row per (class, bucket) of the
/// binding scenario. Table: fixed-width text for terminals.
std::string render_report(const CapitalReport& r, ReportFormat format);

} // namespace frtb
