#include "plugcast/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "plugcast/adf.hpp"
#include "plugcast/artifact.hpp"
#include "plugcast/csv.hpp"
#include "plugcast/error.hpp"
#include "plugcast/eval.hpp"
#include "plugcast/glm.hpp"
#include "plugcast/report.hpp"

namespace plugcast {

using nlohmann::json;
namespace fs = std::filesystem;
namespace chr = std::chrono;

namespace {

constexpr std::uint64_t kSynthSalt = 1;
constexpr std::uint64_t kSplitSalt = 2;
constexpr std::uint64_t kTrainSalt = 100;

const json& section(const json& doc, const char* key) {
    static const json empty = json::object();
    if (!doc.contains(key)) return empty;
    const json& s = doc.at(key);
    if (!s.is_object()) fail(Errc::config, std::string("config section '") + key + "' must be an object");
    return s;
}

Date config_date(const json& j, const std::string& key) {
    Date d;
    if (!j.is_string() || !parse_date(j.get<std::string>(), "YYYY-MM-DD", d))
        fail(Errc::config, key + " must be a YYYY-MM-DD date");
    return d;
}

std::optional<MlpVariant> variant_of(const std::string& name) {
    if (name == "nn-v1") return MlpVariant::v1;
    if (name == "nn-v2") return MlpVariant::v2;
    if (name == "nn-v3") return MlpVariant::v3;
    return std::nullopt;
}

std::ifstream open_input(const fs::path& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io, std::string("cannot open ") + what + " '" + path.string() + "'");
    return in;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::io, "cannot write '" + path.string() + "'");
    body(out);
    out.flush();
    if (!out) fail(Errc::io, "failed while writing '" + path.string() + "'");
}

void write_json(const fs::path& path, const json& doc) {
    write_file(path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

PluginSeries load_series(const RunConfig& cfg) {
    const fs::path path = cfg.output_dir / "series.csv";
    auto in = open_input(path, "series (run `build` first)");
    try {
        return read_series_csv(in);
    } catch (const Error& e) {
        fail(e.code(), path.string() + ": " + e.what());
    }
}

FeatureMatrix split_matrix(const RunConfig& cfg, const PluginSeries& series) {
    FeatureSpec spec;
    spec.lags = cfg.lags;
    spec.use_dow_onehot = spec.use_month_onehot = spec.use_hour_onehot = true;
    try {
        return split_rows(build_matrix(series, spec), cfg.ratios, cfg.split_seed);
    } catch (const Error& e) {
        if (e.code() != Errc::insufficient_history && e.code() != Errc::too_few_rows) throw;
        const auto days = (spec.max_lag() + 47) / 48 + 1;
        fail(e.code(), std::string(e.what()) + ". Remedy: build a series covering more than " +
                           std::to_string(days) + " days of unmasked data, shorten features.lags, or relax the "
                           "exclusions (drop_first_days, drop_last_days, holidays)");
    }
}

fs::path model_path(const RunConfig& cfg, const std::string& name) {
    return cfg.output_dir / "models" / (name + ".json");
}

}  // namespace

fs::path RunConfig::events_path() const { return events_csv.empty() ? output_dir / "events.csv" : events_csv; }

std::uint64_t RunConfig::train_seed(const std::string& model) const {
    if (auto it = train_seeds.find(model); it != train_seeds.end()) return it->second;
    const auto& names = known_models();
    const auto pos = std::find(names.begin(), names.end(), model) - names.begin();
    return 100 + static_cast<std::uint64_t>(pos);
}

const std::vector<std::string>& known_models() {
    static const std::vector<std::string> names{"persistence", "glm", "nn-v1", "nn-v2", "nn-v3"};
    return names;
}

RunConfig parse_run_config(const json& doc, const json& overrides) {
    if (!doc.is_object()) fail(Errc::config, "config must be a JSON object");
    if (!overrides.is_object()) fail(Errc::config, "overrides must be a JSON object");
    RunConfig cfg;
    try {
        const json& paths = section(doc, "paths");
        cfg.output_dir = paths.value("output_dir", cfg.output_dir.string());
        cfg.events_csv = paths.value("events_csv", std::string());
        if (paths.contains("exogenous_csv") && !paths.at("exogenous_csv").is_null())
            cfg.exogenous_csv = paths.at("exogenous_csv").get<std::string>();

        const json& cols = section(doc, "columns");
        auto col = [&](const char* key, std::string& field) { field = cols.value(key, field); };
        col("event_id", cfg.columns.event_id);
        col("charge_point_id", cfg.columns.charge_point_id);
        col("connector", cfg.columns.connector);
        col("start_date", cfg.columns.start_date);
        col("start_time", cfg.columns.start_time);
        col("end_date", cfg.columns.end_date);
        col("end_time", cfg.columns.end_time);
        col("energy", cfg.columns.energy);
        col("organization", cfg.columns.organization);
        col("date_format", cfg.columns.date_format);
        for (const char* token : {"YYYY", "MM", "DD"})
            if (cfg.columns.date_format.find(token) == std::string::npos)
                fail(Errc::config, std::string("columns.date_format lacks ") + token);

        const json& ingest = section(doc, "ingest");
        cfg.max_duration_minutes = ingest.value("max_duration_minutes", cfg.max_duration_minutes);
        if (cfg.max_duration_minutes < 0) fail(Errc::config, "ingest.max_duration_minutes must be >= 0");

        const json& window = section(doc, "window");
        if (window.contains("start") != window.contains("end"))
            fail(Errc::config, "window needs both start and end");
        if (window.contains("start")) {
            TimeWindow w{Timestamp{config_date(window.at("start"), "window.start")},
                         Timestamp{config_date(window.at("end"), "window.end")}};
            if (w.end <= w.begin) fail(Errc::config, "window.end must be after window.start");
            cfg.window = w;
        }

        const json& excl = section(doc, "exclusions");
        const int drop_first = excl.value("drop_first_days", 7);
        const int drop_last = excl.value("drop_last_days", 14);
        if (drop_first < 0 || drop_last < 0) fail(Errc::config, "exclusion day counts must be >= 0");
        cfg.exclusions.drop_first = chr::minutes{std::int64_t{drop_first} * kMinutesPerDay};
        cfg.exclusions.drop_last = chr::minutes{std::int64_t{drop_last} * kMinutesPerDay};
        if (excl.contains("holidays"))
            for (const auto& h : excl.at("holidays")) cfg.exclusions.holiday_dates.insert(config_date(h, "holidays"));

        const json& features = section(doc, "features");
        if (features.contains("lags")) cfg.lags = features.at("lags").get<std::vector<int>>();
        FeatureSpec probe;
        probe.lags = cfg.lags;
        probe.validate();

        if (doc.contains("models")) cfg.models = doc.at("models").get<std::vector<std::string>>();
        if (cfg.models.empty()) fail(Errc::config, "models list is empty");
        for (const auto& m : cfg.models)
            if (std::find(known_models().begin(), known_models().end(), m) == known_models().end())
                fail(Errc::config, "unknown model '" + m + "' (expected persistence, glm, nn-v1, nn-v2 or nn-v3)");
        if (std::find(cfg.models.begin(), cfg.models.end(), "persistence") != cfg.models.end())
            for (int lag : {48, 144, 336})
                if (std::find(cfg.lags.begin(), cfg.lags.end(), lag) == cfg.lags.end())
                    fail(Errc::config, "the persistence model needs lags 48, 144 and 336");

        const json& split = section(doc, "split");
        cfg.ratios.train = split.value("train", cfg.ratios.train);
        cfg.ratios.validation = split.value("validation", cfg.ratios.validation);
        cfg.ratios.test = split.value("test", cfg.ratios.test);
        if (cfg.ratios.train < 0 || cfg.ratios.validation < 0 || cfg.ratios.test < 0 ||
            std::abs(cfg.ratios.train + cfg.ratios.validation + cfg.ratios.test - 1.0) > 1e-9)
            fail(Errc::config, "split ratios must be non-negative and sum to 1");

        cfg.glm_intercept = section(doc, "glm").value("intercept", false);

        const json& train = section(doc, "train");
        cfg.train = train_config_from_json(train);
        if (train.contains("seeds"))
            for (const auto& [name, seed] : train.at("seeds").items()) cfg.train_seeds[name] = seed.get<std::uint64_t>();

        cfg.synth = doc.contains("synth") ? synth_config_from_json(section(doc, "synth")) : default_config();
        cfg.adf_max_lag = section(doc, "analyze").value("adf_max_lag", cfg.adf_max_lag);
        const json& evaluate = section(doc, "evaluate");
        cfg.plot = evaluate.value("plot", false);
        cfg.floor_predictions = evaluate.value("floor_predictions", false);

        // A master seed fills every seed not given explicitly; --seed replaces all of them.
        auto apply_master = [&](std::uint64_t master, bool force) {
            if (force || !section(doc, "synth").contains("seed")) cfg.synth.seed = derive_seed(master, kSynthSalt);
            if (force || !split.contains("seed")) cfg.split_seed = derive_seed(master, kSplitSalt);
            for (std::size_t i = 0; i < known_models().size(); ++i) {
                const auto& name = known_models()[i];
                if (force || !cfg.train_seeds.contains(name))
                    cfg.train_seeds[name] = derive_seed(master, kTrainSalt + i);
            }
        };
        cfg.split_seed = split.value("seed", cfg.split_seed);
        if (doc.contains("seed")) apply_master(doc.at("seed").get<std::uint64_t>(), false);

        if (overrides.contains("out")) cfg.output_dir = overrides.at("out").get<std::string>();
        if (overrides.contains("seed")) apply_master(overrides.at("seed").get<std::uint64_t>(), true);
        if (overrides.contains("plot")) cfg.plot = overrides.at("plot").get<bool>();
        if (overrides.contains("floor")) cfg.floor_predictions = overrides.at("floor").get<bool>();
        if (overrides.contains("epochs")) {
            cfg.train.epochs = overrides.at("epochs").get<int>();
            cfg.train.validate();
        }
    } catch (const json::exception& e) {
        fail(Errc::config, std::string("invalid config value: ") + e.what());
    }
    if (cfg.output_dir.empty()) fail(Errc::config, "paths.output_dir is empty");
    return cfg;
}

void cmd_synth(const RunConfig& cfg) {
    const auto events = generate_events(cfg.synth);
    const json synth_doc = to_json(cfg.synth);
    write_file(cfg.events_path(), [&](std::ostream& out) { write_events_csv(out, events); });
    write_json(cfg.output_dir / "synth_provenance.json",
               {{"config", synth_doc},
                {"config_hash", fnv1a_hex(synth_doc.dump())},
                {"seed", cfg.synth.seed},
                {"events", events.size()}});
    std::clog << "synth: wrote " << events.size() << " events to " << cfg.events_path().string() << '\n';
}

void cmd_build(const RunConfig& cfg) {
    const fs::path events_path = cfg.events_path();
    auto in = open_input(events_path, "events CSV");
    ParsedEvents parsed;
    try {
        parsed = ingest(in, cfg.columns, cfg.max_duration_minutes);
    } catch (const Error& e) {
        fail(e.code(), events_path.string() + ": " + e.what());
    }

    TimeWindow window;
    if (cfg.window) {
        window = *cfg.window;
    } else {
        if (parsed.events.empty())
            fail(Errc::empty_input, events_path.string() + ": no usable events and no window configured");
        Timestamp first = parsed.events.front().start, last = first;
        for (const auto& ev : parsed.events) {
            first = std::min(first, ev.start);
            last = std::max(last, ev.start);
        }
        window = {Timestamp{date_of(first)}, Timestamp{date_of(last) + chr::days{1}}};
    }

    const PluginSeries minutely = aggregate(parsed.events, window);
    const PluginSeries series = apply_exclusions(resample_halfhour_min(minutely), cfg.exclusions);
    write_file(cfg.output_dir / "series.csv", [&](std::ostream& out) { write_series_csv(out, series); });
    const auto& r = parsed.report;
    write_json(cfg.output_dir / "ingest_report.json",
               {{"accepted", r.accepted},
                {"rejected_overlong", r.rejected_overlong},
                {"connector_defaulted", r.connector_defaulted},
                {"malformed", r.malformed},
                {"total_rows", r.total()},
                {"window", {{"start", format_iso(window.begin)}, {"end", format_iso(window.end)}}},
                {"steps", series.size()},
                {"unmasked_steps", series.unmasked_count()}});
    std::clog << "build: " << r.accepted << " events accepted, " << r.rejected_overlong << " over-long, "
              << r.malformed << " malformed; " << series.size() << " half-hour steps\n";
}

void cmd_analyze(const RunConfig& cfg) {
    const PluginSeries series = load_series(cfg);
    std::optional<ExogenousSeries> exo;
    if (cfg.exogenous_csv && fs::exists(*cfg.exogenous_csv)) {
        auto in = open_input(*cfg.exogenous_csv, "exogenous CSV");
        try {
            exo = read_exogenous_csv(in);
        } catch (const Error& e) {
            fail(e.code(), cfg.exogenous_csv->string() + ": " + e.what());
        }
    } else if (cfg.exogenous_csv) {
        std::clog << "analyze: exogenous file " << cfg.exogenous_csv->string() << " not found, section omitted\n";
    }

    // Everything is computed before the first file is written.
    std::vector<GroupedDistribution> grouped;
    for (GroupKey key : {GroupKey::day_of_week, GroupKey::month, GroupKey::hour})
        grouped.push_back(grouped_distribution(series, key));
    const auto table = lag_correlation_by_day(series);
    const AdfResult adf = adf_test(series, cfg.adf_max_lag);
    std::optional<CorrelationPair> exo_corr;
    if (exo) exo_corr = exogenous_correlation(series, *exo);

    json analysis = json::object();
    analysis["adf"] = {{"statistic", adf.statistic},
                       {"lag_order", adf.lag_order},
                       {"nobs", adf.nobs},
                       {"critical_values",
                        {{"1%", adf.critical_values.pct1}, {"5%", adf.critical_values.pct5},
                         {"10%", adf.critical_values.pct10}}},
                       {"stationary_at_5pct", adf.stationary_at_5pct}};
    for (const auto& dist : grouped)
        write_file(cfg.output_dir / (std::string("grouped_") + group_key_name(dist.key) + ".csv"),
                   [&](std::ostream& out) { write_grouped_csv(out, dist); });
    write_file(cfg.output_dir / "lag_correlation.csv",
               [&](std::ostream& out) { write_lag_correlation_csv(out, table); });
    if (exo_corr) {
        const CorrelationPair& c = *exo_corr;
        write_file(cfg.output_dir / "exogenous_correlation.csv", [&](std::ostream& out) {
            out << "pearson,spearman,n\n" << format_number(c.pearson) << ',' << format_number(c.spearman) << ','
                << c.n << '\n';
        });
        analysis["exogenous"] = {{"pearson", c.pearson}, {"spearman", c.spearman}, {"n", c.n}};
    }
    write_json(cfg.output_dir / "adf.json", analysis["adf"]);
    write_json(cfg.output_dir / "analysis.json", analysis);
    std::clog << "analyze: ADF statistic " << adf.statistic << " (lag " << adf.lag_order << "), "
              << (adf.stationary_at_5pct ? "stationary" : "not stationary") << " at 5%\n";
}

void cmd_train(const RunConfig& cfg) {
    const PluginSeries series = load_series(cfg);
    const FeatureMatrix matrix = split_matrix(cfg, series);
    write_file(cfg.output_dir / "features.csv", [&](std::ostream& out) { write_matrix_csv(out, matrix); });

    FeatureSpec base;
    base.lags = cfg.lags;
    for (const auto& name : cfg.models) {
        ModelArtifact artifact;
        if (name == "persistence") {
            artifact = make_persistence_artifact(base);
        } else if (name == "glm") {
            artifact = make_glm_artifact(glm_fit(matrix, cfg.glm_intercept), base);
        } else {
            const MlpVariant variant = *variant_of(name);
            TrainConfig tc = cfg.train;
            tc.seed = cfg.train_seed(name);
            TrainResult trained;
            try {
                trained = mlp_train(mlp_init(variant, tc.seed, cfg.lags), matrix, tc);
            } catch (const Error& e) {
                fail(e.code(), "training " + name + ": " + e.what());
            }
            write_file(cfg.output_dir / "models" / (name + "_history.csv"), [&](std::ostream& out) {
                out << "epoch,train_loss,validation_loss\n";
                for (std::size_t i = 0; i < trained.history.train_loss.size(); ++i)
                    out << i + 1 << ',' << format_number(trained.history.train_loss[i]) << ','
                        << format_number(trained.history.validation_loss[i]) << '\n';
            });
            std::clog << "train: " << name << " best epoch " << trained.history.best_epoch + 1 << " of "
                      << tc.epochs << '\n';
            artifact = make_mlp_artifact(std::move(trained.model), tc);
        }
        write_json(model_path(cfg, name), to_json(artifact));
    }
}

void cmd_evaluate(const RunConfig& cfg) {
    const PluginSeries series = load_series(cfg);
    std::vector<ModelArtifact> models;
    for (const auto& name : cfg.models) {
        const fs::path path = model_path(cfg, name);
        std::ifstream in(path);
        if (!in) fail(Errc::missing_artifact, "missing model artifact '" + path.string() + "' (run `train` first)");
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::exception& e) {
            fail(Errc::artifact_mismatch, path.string() + ": " + e.what());
        }
        models.push_back(artifact_from_json(doc));
    }
    const FeatureMatrix matrix = split_matrix(cfg, series);
    const EvaluationReport report = build_report(models, matrix, series, cfg.floor_predictions);

    write_file(cfg.output_dir / "metrics.csv", [&](std::ostream& out) { write_metrics_csv(out, report); });
    write_file(cfg.output_dir / "residual_stats.csv",
               [&](std::ostream& out) { write_residual_stats_csv(out, report); });
    write_file(cfg.output_dir / "residual_by_day.csv",
               [&](std::ostream& out) { write_residual_by_day_csv(out, report); });
    for (const auto& g : report.grouped)
        write_file(cfg.output_dir / (std::string("grouped_") + group_key_name(g.key) + ".csv"),
                   [&](std::ostream& out) { write_grouped_csv(out, g); });
    write_json(cfg.output_dir / "report.json", to_json(report));

    if (cfg.plot) {
        const fs::path dir = cfg.output_dir / "plots";
        for (const auto& g : report.grouped)
            write_file(dir / (std::string("plugin_by_") + group_key_name(g.key) + ".csv"),
                       [&](std::ostream& out) { write_grouped_csv(out, g); });
        write_file(dir / "test_residuals_by_day.csv",
                   [&](std::ostream& out) { write_residual_by_day_csv(out, report); });
        write_file(dir / "aggregate_plugin.csv", [&](std::ostream& out) { write_series_csv(out, series); });
    }
    for (const auto& m : report.metrics)
        if (m.split == Split::test)
            std::clog << "evaluate: " << m.model << " test RMSE " << m.metrics.rmse << ", MAE " << m.metrics.mae
                      << '\n';
}

void cmd_report(const RunConfig& cfg) {
    cmd_analyze(cfg);
    cmd_evaluate(cfg);
}

void run_command(std::string_view command, const RunConfig& cfg) {
    if (command == "synth") return cmd_synth(cfg);
    if (command == "build") return cmd_build(cfg);
    if (command == "analyze") return cmd_analyze(cfg);
    if (command == "train") return cmd_train(cfg);
    if (command == "evaluate") return cmd_evaluate(cfg);
    if (command == "report") return cmd_report(cfg);
    fail(Errc::config, "unknown subcommand '" + std::string(command) + "'");
}

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace plugcast
