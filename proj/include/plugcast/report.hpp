#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "plugcast/artifact.hpp"
#include "plugcast/eval.hpp"
#include "plugcast/features.hpp"
#include "plugcast/series.hpp"

namespace plugcast {

struct SplitMetrics {
    std::string model;
    Split split = Split::train;
    MetricSet metrics;

    bool operator==(const SplitMetrics&) const = default;
};

struct ModelResiduals {
    std::string model;
    ResidualStats test_stats;
    std::vector<GroupStats> test_by_day;  // residual five-number summary per dow

    bool operator==(const ModelResiduals&) const = default;
};

struct EvaluationReport {
    std::vector<std::string> models;
    std::vector<SplitMetrics> metrics;  // model-major, then train/validation/test
    std::vector<ModelResiduals> residuals;
    // Series-level analysis of the unmasked steps.
    std::vector<GroupedDistribution> grouped;  // dow, month, hour
    std::vector<DayCorrelation> lag_correlation;

    [[nodiscard]] const MetricSet& at(const std::string& model, Split split) const;
    bool operator==(const EvaluationReport&) const = default;
};

// Evaluates every model on every split of an already split matrix and adds
// the series' grouped distributions and day-before correlation table.
// `floor_predictions` rounds predictions down to whole vehicles before
// scoring. Throws Errc::artifact_mismatch if a model's lags differ from the
// matrix's.
[[nodiscard]] EvaluationReport build_report(std::span<const ModelArtifact> models, const FeatureMatrix& matrix,
                                            const PluginSeries& series, bool floor_predictions = false);

[[nodiscard]] nlohmann::json to_json(const EvaluationReport& report);
[[nodiscard]] EvaluationReport report_from_json(const nlohmann::json& doc);

void write_metrics_csv(std::ostream& out, const EvaluationReport& report);
void write_residual_stats_csv(std::ostream& out, const EvaluationReport& report);
void write_residual_by_day_csv(std::ostream& out, const EvaluationReport& report);
void write_grouped_csv(std::ostream& out, const GroupedDistribution& dist);
void write_lag_correlation_csv(std::ostream& out, std::span<const DayCorrelation> table);

}  // namespace plugcast
