#include "plugcast/artifact.hpp"

#include "plugcast/error.hpp"

namespace plugcast {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "plugcast-model";

MlpVariant variant_from_name(const std::string& name) {
    if (name == "nn-v1") return MlpVariant::v1;
    if (name == "nn-v2") return MlpVariant::v2;
    if (name == "nn-v3") return MlpVariant::v3;
    fail(Errc::artifact_mismatch, "unknown network variant '" + name + "'");
}

json layer_to_json(const DenseLayer& layer) {
    json w = json::array();
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
        for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) w.push_back(layer.weight(r, c));
    json b = json::array();
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) b.push_back(layer.bias(r));
    return {{"shape", {layer.weight.rows(), layer.weight.cols()}}, {"weight", w}, {"bias", b}};
}

DenseLayer layer_from_json(const json& j) {
    const auto rows = j.at("shape").at(0).get<Eigen::Index>();
    const auto cols = j.at("shape").at(1).get<Eigen::Index>();
    const auto& w = j.at("weight");
    const auto& b = j.at("bias");
    if (rows <= 0 || cols <= 0 || static_cast<Eigen::Index>(w.size()) != rows * cols ||
        static_cast<Eigen::Index>(b.size()) != rows)
        fail(Errc::artifact_mismatch, "layer arrays do not match their declared shape");
    DenseLayer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) layer.weight(r, c) = w[k++].get<double>();
    for (Eigen::Index r = 0; r < rows; ++r) layer.bias(r) = b[static_cast<std::size_t>(r)].get<double>();
    return layer;
}

}  // namespace

json to_json(const FeatureSpec& spec) {
    return {{"lags", spec.lags},
            {"dow_onehot", spec.use_dow_onehot},
            {"month_onehot", spec.use_month_onehot},
            {"hour_onehot", spec.use_hour_onehot}};
}

FeatureSpec feature_spec_from_json(const json& doc) {
    FeatureSpec spec;
    spec.lags = doc.at("lags").get<std::vector<int>>();
    spec.use_dow_onehot = doc.value("dow_onehot", true);
    spec.use_month_onehot = doc.value("month_onehot", false);
    spec.use_hour_onehot = doc.value("hour_onehot", false);
    spec.validate();
    return spec;
}

json to_json(const TrainConfig& c) {
    return {{"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"dropout_rate", c.dropout_rate},
            {"learning_rate", c.adam.step_size},
            {"beta1", c.adam.beta1},
            {"beta2", c.adam.beta2},
            {"epsilon", c.adam.epsilon},
            {"seed", c.seed},
            {"keep_best", c.keep_best}};
}

TrainConfig train_config_from_json(const json& doc) {
    TrainConfig c;
    c.epochs = doc.value("epochs", c.epochs);
    c.batch_size = doc.value("batch_size", c.batch_size);
    c.dropout_rate = doc.value("dropout_rate", c.dropout_rate);
    c.adam.step_size = doc.value("learning_rate", c.adam.step_size);
    c.adam.beta1 = doc.value("beta1", c.adam.beta1);
    c.adam.beta2 = doc.value("beta2", c.adam.beta2);
    c.adam.epsilon = doc.value("epsilon", c.adam.epsilon);
    c.seed = doc.value("seed", c.seed);
    c.keep_best = doc.value("keep_best", c.keep_best);
    c.validate();
    return c;
}

ModelArtifact make_persistence_artifact(const FeatureSpec& spec) {
    ModelArtifact a;
    a.name = "persistence";
    a.spec = spec;
    a.model = PersistenceModel{};
    return a;
}

ModelArtifact make_glm_artifact(GlmModel model, const FeatureSpec& spec) {
    ModelArtifact a;
    a.name = "glm";
    a.spec = spec;
    a.model = std::move(model);
    return a;
}

ModelArtifact make_mlp_artifact(MlpModel model, const TrainConfig& config) {
    ModelArtifact a;
    a.name = variant_name(model.variant);
    a.spec = model.spec;
    a.seed = model.seed;
    a.train_config = config;
    a.model = std::move(model);
    return a;
}

double predict(const ModelArtifact& artifact, const FeatureRow& row) {
    struct Visitor {
        const ModelArtifact& a;
        const FeatureRow& row;
        double operator()(const PersistenceModel&) const { return persistence_predict(a.spec, row); }
        double operator()(const GlmModel& m) const { return glm_predict(m, row); }
        double operator()(const MlpModel& m) const { return mlp_predict(m, row); }
    };
    return std::visit(Visitor{artifact, row}, artifact.model);
}

json to_json(const ModelArtifact& a) {
    json doc = {{"format", kFormat}, {"version", kArtifactVersion}, {"name", a.name}, {"feature_spec", to_json(a.spec)},
                {"seed", a.seed}};
    if (a.train_config) doc["train_config"] = to_json(*a.train_config);
    if (std::holds_alternative<PersistenceModel>(a.model)) {
        doc["kind"] = "persistence";
    } else if (const auto* glm = std::get_if<GlmModel>(&a.model)) {
        doc["kind"] = "glm";
        json coef = json::array();
        for (const auto& row : glm->coefficients) coef.push_back(row);
        doc["glm"] = {{"lags", glm->lags}, {"coefficients", coef}, {"intercept", glm->intercept},
                      {"intercepts", glm->intercepts}};
    } else {
        const auto& mlp = std::get<MlpModel>(a.model);
        doc["kind"] = "mlp";
        json layers = json::array();
        for (const auto& l : mlp.net.layers) layers.push_back(layer_to_json(l));
        doc["mlp"] = {{"variant", variant_name(mlp.variant)},
                      {"activation", "relu"},
                      {"scaler", {{"mean", mlp.scaler.mean}, {"stddev", mlp.scaler.stddev}}},
                      {"layers", layers}};
    }
    return doc;
}

ModelArtifact artifact_from_json(const json& doc) {
    try {
        if (doc.value("format", "") != kFormat) fail(Errc::artifact_mismatch, "not a plugcast model artifact");
        if (doc.value("version", 0) != kArtifactVersion)
            fail(Errc::artifact_mismatch, "unsupported artifact version " + doc.value("version", json()).dump());
        ModelArtifact a;
        a.name = doc.at("name").get<std::string>();
        a.spec = feature_spec_from_json(doc.at("feature_spec"));
        a.seed = doc.value("seed", std::uint64_t{0});
        if (doc.contains("train_config")) a.train_config = train_config_from_json(doc.at("train_config"));
        const auto kind = doc.at("kind").get<std::string>();
        if (kind == "persistence") {
            a.model = PersistenceModel{};
        } else if (kind == "glm") {
            const auto& g = doc.at("glm");
            GlmModel m;
            m.lags = g.at("lags").get<std::vector<int>>();
            const auto& coef = g.at("coefficients");
            if (coef.size() != 7) fail(Errc::artifact_mismatch, "GLM needs 7 coefficient rows");
            for (std::size_t d = 0; d < 7; ++d) {
                m.coefficients[d] = coef[d].get<std::vector<double>>();
                if (m.coefficients[d].size() != m.lags.size())
                    fail(Errc::artifact_mismatch, "GLM coefficient row length differs from lag count");
            }
            m.intercept = g.value("intercept", false);
            if (g.contains("intercepts")) m.intercepts = g.at("intercepts").get<std::array<double, 7>>();
            a.model = std::move(m);
        } else if (kind == "mlp") {
            const auto& j = doc.at("mlp");
            MlpModel m;
            m.variant = variant_from_name(j.at("variant").get<std::string>());
            m.spec = a.spec;
            m.seed = a.seed;
            m.scaler.mean = j.at("scaler").at("mean").get<std::vector<double>>();
            m.scaler.stddev = j.at("scaler").at("stddev").get<std::vector<double>>();
            for (const auto& l : j.at("layers")) m.net.layers.push_back(layer_from_json(l));
            if (m.net.layers.empty() || static_cast<std::size_t>(m.net.input_width()) != m.spec.input_width() ||
                m.scaler.mean.size() != m.spec.lags.size() || m.scaler.stddev.size() != m.spec.lags.size())
                fail(Errc::artifact_mismatch, "network shape does not match its feature spec");
            for (std::size_t l = 1; l < m.net.layers.size(); ++l)
                if (m.net.layers[l].weight.cols() != m.net.layers[l - 1].weight.rows())
                    fail(Errc::artifact_mismatch, "consecutive layer shapes do not chain");
            if (m.net.layers.back().weight.rows() != 1) fail(Errc::artifact_mismatch, "network output must be scalar");
            a.model = std::move(m);
        } else {
            fail(Errc::artifact_mismatch, "unknown model kind '" + kind + "'");
        }
        return a;
    } catch (const json::exception& e) {
        fail(Errc::artifact_mismatch, std::string("invalid model artifact: ") + e.what());
    }
}

}  // namespace plugcast
