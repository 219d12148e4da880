#include "plugcast/report.hpp"

#include <array>

#include "plugcast/csv.hpp"
#include "plugcast/error.hpp"

namespace plugcast {

using nlohmann::json;

namespace {

constexpr std::array<Split, 3> kSplits{Split::train, Split::validation, Split::test};

Split split_from_name(const std::string& s) {
    for (Split sp : kSplits)
        if (s == split_name(sp)) return sp;
    fail(Errc::malformed, "unknown split '" + s + "'");
}

double forecast(const ModelArtifact& model, const FeatureRow& row, const PluginSeries& series) {
    if (std::holds_alternative<PersistenceModel>(model.model)) return persistence_predict(series, row.step);
    return predict(model, row);
}

json five_to_json(const FiveNumber& f) {
    return {{"min", f.min}, {"q1", f.q1}, {"median", f.median}, {"q3", f.q3}, {"max", f.max}, {"n", f.n}};
}

FiveNumber five_from_json(const json& j) {
    return {j.at("min").get<double>(), j.at("q1").get<double>(),     j.at("median").get<double>(),
            j.at("q3").get<double>(),  j.at("max").get<double>(),    j.at("n").get<std::size_t>()};
}

}  // namespace

const MetricSet& EvaluationReport::at(const std::string& model, Split split) const {
    for (const auto& m : metrics)
        if (m.model == model && m.split == split) return m.metrics;
    fail(Errc::missing_artifact, "no metrics for model '" + model + "' on split " + split_name(split));
}

EvaluationReport build_report(std::span<const ModelArtifact> models, const FeatureMatrix& matrix,
                              const PluginSeries& series, bool floor_predictions) {
    if (matrix.split.size() != matrix.size()) fail(Errc::config, "evaluation needs a split feature matrix");
    EvaluationReport report;
    for (const auto& model : models) {
        const bool persistence = std::holds_alternative<PersistenceModel>(model.model);
        if (!persistence && model.spec.lags != matrix.spec.lags)
            fail(Errc::artifact_mismatch, "model '" + model.name + "' was trained on different lags than the matrix");
        report.models.push_back(model.name);

        std::array<std::vector<double>, 4> pred, actual;
        std::array<std::vector<int>, 4> dows;
        for (std::size_t i = 0; i < matrix.size(); ++i) {
            const auto& row = matrix.rows[i];
            double p = forecast(model, row, series);
            if (floor_predictions) p = std::floor(p);
            const auto s = static_cast<std::size_t>(matrix.split[i]);
            pred[s].push_back(p);
            actual[s].push_back(row.target);
            dows[s].push_back(row.dow);
        }
        for (Split sp : kSplits) {
            const auto s = static_cast<std::size_t>(sp);
            if (pred[s].empty()) continue;
            report.metrics.push_back({model.name, sp, metrics(pred[s], actual[s])});
        }
        const auto t = static_cast<std::size_t>(Split::test);
        if (!pred[t].empty()) {
            ModelResiduals mr;
            mr.model = model.name;
            const auto r = residuals(pred[t], actual[t]);
            mr.test_stats = residual_stats(r);
            std::array<std::vector<double>, 7> by_day;
            for (std::size_t i = 0; i < r.size(); ++i) by_day[static_cast<std::size_t>(dows[t][i])].push_back(r[i]);
            for (int d = 0; d < 7; ++d)
                if (!by_day[static_cast<std::size_t>(d)].empty())
                    mr.test_by_day.push_back({d, five_number(std::move(by_day[static_cast<std::size_t>(d)]))});
            report.residuals.push_back(std::move(mr));
        }
    }
    for (GroupKey key : {GroupKey::day_of_week, GroupKey::month, GroupKey::hour})
        report.grouped.push_back(grouped_distribution(series, key));
    report.lag_correlation = lag_correlation_by_day(series);
    return report;
}

json to_json(const EvaluationReport& report) {
    json metrics = json::array();
    for (const auto& m : report.metrics) {
        metrics.push_back({{"model", m.model},
                           {"split", split_name(m.split)},
                           {"rmse", m.metrics.rmse},
                           {"mape_pct", m.metrics.mape_pct ? json(*m.metrics.mape_pct) : json(nullptr)},
                           {"mae", m.metrics.mae},
                           {"n", m.metrics.n},
                           {"n_skipped_zero_actual", m.metrics.n_skipped_zero_actual}});
    }
    json residuals = json::array();
    for (const auto& r : report.residuals) {
        json by_day = json::array();
        for (const auto& g : r.test_by_day) {
            json e = five_to_json(g.stats);
            e["dow"] = g.group;
            by_day.push_back(e);
        }
        residuals.push_back({{"model", r.model},
                             {"mean", r.test_stats.mean},
                             {"median", r.test_stats.median},
                             {"std_dev", r.test_stats.std_dev},
                             {"range", r.test_stats.range},
                             {"iqr", r.test_stats.iqr},
                             {"by_day", by_day}});
    }
    json grouped = json::object();
    for (const auto& g : report.grouped) {
        json groups = json::array();
        for (const auto& e : g.groups) {
            json j = five_to_json(e.stats);
            j["group"] = e.group;
            groups.push_back(j);
        }
        grouped[group_key_name(g.key)] = groups;
    }
    json lagcorr = json::array();
    for (const auto& d : report.lag_correlation) {
        lagcorr.push_back({{"dow", d.dow},
                           {"pairs", d.pairs},
                           {"pearson", d.pearson ? json(*d.pearson) : json(nullptr)},
                           {"spearman", d.spearman ? json(*d.spearman) : json(nullptr)}});
    }
    return {{"format", "plugcast-report"},
            {"version", 1},
            {"models", report.models},
            {"metrics", metrics},
            {"test_residuals", residuals},
            {"grouped", grouped},
            {"lag_correlation", lagcorr}};
}

EvaluationReport report_from_json(const json& doc) {
    try {
        EvaluationReport report;
        report.models = doc.at("models").get<std::vector<std::string>>();
        for (const auto& m : doc.at("metrics")) {
            SplitMetrics sm;
            sm.model = m.at("model").get<std::string>();
            sm.split = split_from_name(m.at("split").get<std::string>());
            sm.metrics.rmse = m.at("rmse").get<double>();
            if (!m.at("mape_pct").is_null()) sm.metrics.mape_pct = m.at("mape_pct").get<double>();
            sm.metrics.mae = m.at("mae").get<double>();
            sm.metrics.n = m.at("n").get<std::size_t>();
            sm.metrics.n_skipped_zero_actual = m.at("n_skipped_zero_actual").get<std::size_t>();
            report.metrics.push_back(std::move(sm));
        }
        for (const auto& r : doc.at("test_residuals")) {
            ModelResiduals mr;
            mr.model = r.at("model").get<std::string>();
            mr.test_stats = {r.at("mean").get<double>(), r.at("median").get<double>(), r.at("std_dev").get<double>(),
                             r.at("range").get<double>(), r.at("iqr").get<double>()};
            for (const auto& g : r.at("by_day")) mr.test_by_day.push_back({g.at("dow").get<int>(), five_from_json(g)});
            report.residuals.push_back(std::move(mr));
        }
        if (doc.contains("grouped")) {
            for (GroupKey key : {GroupKey::day_of_week, GroupKey::month, GroupKey::hour}) {
                const char* name = group_key_name(key);
                if (!doc.at("grouped").contains(name)) continue;
                GroupedDistribution g;
                g.key = key;
                for (const auto& e : doc.at("grouped").at(name)) g.groups.push_back({e.at("group").get<int>(), five_from_json(e)});
                report.grouped.push_back(std::move(g));
            }
        }
        if (doc.contains("lag_correlation")) {
            for (const auto& e : doc.at("lag_correlation")) {
                DayCorrelation d;
                d.dow = e.at("dow").get<int>();
                d.pairs = e.at("pairs").get<std::size_t>();
                if (!e.at("pearson").is_null()) d.pearson = e.at("pearson").get<double>();
                if (!e.at("spearman").is_null()) d.spearman = e.at("spearman").get<double>();
                report.lag_correlation.push_back(d);
            }
        }
        return report;
    } catch (const json::exception& e) {
        fail(Errc::malformed, std::string("invalid report document: ") + e.what());
    }
}

void write_metrics_csv(std::ostream& out, const EvaluationReport& report) {
    out << "model,split,rmse,mape_pct,mae,n,n_skipped_zero_actual\n";
    for (const auto& m : report.metrics) {
        out << csv_escape(m.model) << ',' << split_name(m.split) << ',' << format_number(m.metrics.rmse) << ','
            << (m.metrics.mape_pct ? format_number(*m.metrics.mape_pct) : std::string()) << ','
            << format_number(m.metrics.mae) << ',' << m.metrics.n << ',' << m.metrics.n_skipped_zero_actual << '\n';
    }
}

void write_residual_stats_csv(std::ostream& out, const EvaluationReport& report) {
    out << "model,mean,median,std_dev,range,iqr\n";
    for (const auto& r : report.residuals) {
        const auto& s = r.test_stats;
        out << csv_escape(r.model) << ',' << format_number(s.mean) << ',' << format_number(s.median) << ','
            << format_number(s.std_dev) << ',' << format_number(s.range) << ',' << format_number(s.iqr) << '\n';
    }
}

void write_residual_by_day_csv(std::ostream& out, const EvaluationReport& report) {
    out << "model,dow,min,q1,median,q3,max,n\n";
    for (const auto& r : report.residuals)
        for (const auto& g : r.test_by_day)
            out << csv_escape(r.model) << ',' << g.group << ',' << format_number(g.stats.min) << ','
                << format_number(g.stats.q1) << ',' << format_number(g.stats.median) << ','
                << format_number(g.stats.q3) << ',' << format_number(g.stats.max) << ',' << g.stats.n << '\n';
}

void write_grouped_csv(std::ostream& out, const GroupedDistribution& dist) {
    out << group_key_name(dist.key) << ",min,q1,median,q3,max,n\n";
    for (const auto& g : dist.groups)
        out << g.group << ',' << format_number(g.stats.min) << ',' << format_number(g.stats.q1) << ','
            << format_number(g.stats.median) << ',' << format_number(g.stats.q3) << ','
            << format_number(g.stats.max) << ',' << g.stats.n << '\n';
}

}  // namespace plugcast

namespace plugcast {

void write_lag_correlation_csv(std::ostream& out, std::span<const DayCorrelation> table) {
    static const char* names[7] = {"Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"};
    out << "day,pearson,spearman,pairs\n";
    for (const auto& d : table)
        out << names[d.dow] << ',' << (d.pearson ? format_number(*d.pearson) : std::string()) << ','
            << (d.spearman ? format_number(*d.spearman) : std::string()) << ',' << d.pairs << '\n';
}

}  // namespace plugcast
