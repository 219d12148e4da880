#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "plugcast/features.hpp"
#include "plugcast/glm.hpp"
#include "plugcast/mlp.hpp"
#include "plugcast/persistence.hpp"
#include "plugcast/series.hpp"

namespace plugcast {

inline constexpr int kArtifactVersion = 1;

struct ModelArtifact {
    std::string name;  // "persistence", "glm", "nn-v1", ...
    FeatureSpec spec;
    std::variant<PersistenceModel, GlmModel, MlpModel> model;
    std::uint64_t seed = 0;
    std::optional<TrainConfig> train_config;

    bool operator==(const ModelArtifact&) const = default;
};

[[nodiscard]] ModelArtifact make_persistence_artifact(const FeatureSpec& spec);
[[nodiscard]] ModelArtifact make_glm_artifact(GlmModel model, const FeatureSpec& spec);
[[nodiscard]] ModelArtifact make_mlp_artifact(MlpModel model, const TrainConfig& config);

[[nodiscard]] double predict(const ModelArtifact& artifact, const FeatureRow& row);

// Versioned JSON document. Weights are stored as row-major arrays next to
// their declared shape; doubles are written with 17 significant digits so a
// round trip is bit-exact.
[[nodiscard]] nlohmann::json to_json(const ModelArtifact& artifact);
/// Throws Errc::artifact_mismatch on an unknown format/version or bad shapes.
[[nodiscard]] ModelArtifact artifact_from_json(const nlohmann::json& doc);

[[nodiscard]] nlohmann::json to_json(const FeatureSpec& spec);
[[nodiscard]] FeatureSpec feature_spec_from_json(const nlohmann::json& doc);
[[nodiscard]] nlohmann::json to_json(const TrainConfig& config);
[[nodiscard]] TrainConfig train_config_from_json(const nlohmann::json& doc);

}  // namespace plugcast
