#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "plugcast/features.hpp"
#include "plugcast/ingest.hpp"
#include "plugcast/mlp.hpp"
#include "plugcast/series.hpp"
#include "plugcast/synth.hpp"

namespace plugcast {

/// Everything a pipeline run needs. All randomness comes from the named seeds.
struct RunConfig {
    std::filesystem::path output_dir = "out";
    std::filesystem::path events_csv;  // empty -> <output_dir>/events.csv
    std::optional<std::filesystem::path> exogenous_csv;
    ColumnMapping columns;
    std::int64_t max_duration_minutes = kOneWeekMinutes;
    ExclusionConfig exclusions;
    std::optional<TimeWindow> window;  // empty -> whole days spanning the event starts
    std::vector<int> lags{48, 144, 336};
    std::vector<std::string> models{"persistence", "glm", "nn-v1", "nn-v2", "nn-v3"};
    SplitRatios ratios;
    bool glm_intercept = false;
    TrainConfig train;  // seed field unused; see train_seeds
    std::uint64_t split_seed = 7;
    std::map<std::string, std::uint64_t> train_seeds;
    SynthConfig synth;
    std::size_t adf_max_lag = 20;
    bool plot = false;
    bool floor_predictions = false;

    [[nodiscard]] std::filesystem::path events_path() const;
    [[nodiscard]] std::uint64_t train_seed(const std::string& model) const;
};

// Reads a RunConfig from the JSON config document, then applies command-line
// overrides (keys: out, seed, plot, epochs, floor). A master `seed` replaces
// every individual seed with one derived from it. Throws Errc::config with
// the offending key on any invalid value.
[[nodiscard]] RunConfig parse_run_config(const nlohmann::json& doc,
                                         const nlohmann::json& overrides = nlohmann::json::object());

[[nodiscard]] const std::vector<std::string>& known_models();

/// Subcommands: synth, build, analyze, train, evaluate, report.
void run_command(std::string_view command, const RunConfig& config);

void cmd_synth(const RunConfig& config);
void cmd_build(const RunConfig& config);
void cmd_analyze(const RunConfig& config);
void cmd_train(const RunConfig& config);
void cmd_evaluate(const RunConfig& config);
void cmd_report(const RunConfig& config);

/// 64-bit FNV-1a over the bytes of `text`, as 16 hex digits.
[[nodiscard]] std::string fnv1a_hex(std::string_view text);

}  // namespace plugcast
