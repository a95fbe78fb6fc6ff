#include "off/experiments.hpp"

#include "off/error.hpp"
#include "off/json_io.hpp"
#include "off/metrics.hpp"
#include "off/parallel.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace off::experiments {

using nlohmann::json;

std::string to_string(Kind k)
{
    switch (k) {
    case Kind::penalization: return "penalization";
    case Kind::cost_of_fairness: return "cost_of_fairness";
    case Kind::multi_optional: return "multi_optional";
    case Kind::synthetic_convergence: return "synthetic_convergence";
    }
    return "unknown";
}

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::Config, what); }

Kind parse_kind(const std::string& s)
{
    for (Kind k : {Kind::penalization, Kind::cost_of_fairness, Kind::multi_optional, Kind::synthetic_convergence}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    config_error("unknown experiment kind '" + s + "'");
}

std::string number(double v)
{
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), ptr);
}

const std::vector<std::string>& default_models(Kind k)
{
    static const std::vector<std::string> penalization{"imputed", "base", "off_multi"};
    static const std::vector<std::string> cost{"base", "csp", "off_multi", "imputed"};
    static const std::vector<std::string> multi{"multi", "off_lr", "base", "imputed"};
    static const std::vector<std::string> convergence{"off_lr", "multi", "imputed"};
    switch (k) {
    case Kind::penalization: return penalization;
    case Kind::cost_of_fairness: return cost;
    case Kind::multi_optional: return multi;
    case Kind::synthetic_convergence: return convergence;
    }
    return penalization;
}

std::vector<std::string> models_for(const ExperimentConfig& cfg)
{
    const auto& allowed = default_models(cfg.kind);
    if (cfg.models.empty()) {
        return allowed;
    }
    for (const auto& m : cfg.models) {
        if (std::find(allowed.begin(), allowed.end(), m) == allowed.end()) {
            config_error("model '" + m + "' is not available in experiment " + to_string(cfg.kind));
        }
    }
    return cfg.models;
}

bool wants(const std::vector<std::string>& models, const std::string& name)
{
    return std::find(models.begin(), models.end(), name) != models.end();
}

// ---------------------------------------------------------------------------
// Data preparation

LabeledDataset sample_source(const ExperimentConfig& cfg, std::uint64_t seed, Index rows)
{
    const auto& src = cfg.data;
    switch (src.type) {
    case DataSource::Type::paper_synthetic:
    case DataSource::Type::family:
        return synthetic::sample_family(src.family, rows, seed, {src.full_availability});
    case DataSource::Type::counterexample:
        return synthetic::sample_counterexample({src.alpha}, rows, seed);
    case DataSource::Type::csv:
        break;
    }
    config_error("csv sources are loaded, not sampled");
}

LabeledDataset apply_injection(const LabeledDataset& ds, const std::vector<InjectionConfig>& injection,
                               std::uint64_t seed)
{
    if (injection.empty()) {
        return ds;
    }
    InjectionSpec spec;
    for (const auto& inj : injection) {
        FeatureInjection f;
        f.feature = inj.feature;
        f.slope = inj.slope ? *inj.slope : standardized_slope(ds, inj.feature, inj.sign);
        f.center = inj.center;
        spec.features.push_back(std::move(f));
    }
    return inject_availability(ds, spec, parallel::mix_seed(seed, 101));
}

FitFn logistic_fit_fn(const FitConfig& cfg)
{
    return [cfg](const Matrix& X, const Vector& y) -> ScoreFn {
        auto params = fit_logistic(X, y, cfg).params;
        return [params](const Matrix& Xt) { return predict_proba(params, Xt); };
    };
}

struct Prepared {
    LabeledDataset train;
    LabeledDataset test;
    std::vector<ReportRow> notes;
};

Prepared prepare(const ExperimentConfig& cfg, const LabeledDataset* loaded, std::uint64_t seed)
{
    LabeledDataset ds = loaded != nullptr ? *loaded : sample_source(cfg, seed, cfg.data.rows);
    std::vector<ReportRow> notes;
    if (cfg.selection.enabled) {
        const auto& sel = cfg.selection;
        const Index test_rows = test_size_for(ds.rows(), cfg.split_fraction);
        int r = select_optional_count(ds.rows() - test_rows, sel.min_samples);
        std::vector<std::string> candidates = sel.candidates.empty() ? ds.schema().base_names : sel.candidates;
        r = std::min<int>(r, static_cast<int>(candidates.size()));
        if (sel.max_r) {
            r = std::min(r, *sel.max_r);
        }
        std::vector<std::string> chosen;
        for (const auto& name : rank_features_by_drop(ds, logistic_fit_fn(cfg.fit), parallel::mix_seed(seed, 303))) {
            if (static_cast<int>(chosen.size()) == r) {
                break;
            }
            if (std::find(candidates.begin(), candidates.end(), name) != candidates.end()) {
                chosen.push_back(name);
            }
        }
        ds = promote_to_optional(ds, chosen);
        std::vector<InjectionConfig> injection;
        for (const auto& name : chosen) {
            auto it = sel.signs.find(name);
            injection.push_back({name, std::nullopt, it == sel.signs.end() ? 1 : it->second, std::nullopt});
        }
        ds = apply_injection(ds, injection, seed);
        notes.push_back({seed, 0, "data", "selected_r", static_cast<double>(r)});
    }
    ds = apply_injection(ds, cfg.injection, seed);
    auto [train, test] = split_train_test(ds, cfg.split_fraction, parallel::mix_seed(seed, 202));
    for (auto& note : notes) {
        note.sample_size = train.rows();
    }
    return {std::move(train), std::move(test), std::move(notes)};
}

std::optional<LabeledDataset> load_if_csv(const ExperimentConfig& cfg)
{
    if (cfg.data.type != DataSource::Type::csv) {
        return std::nullopt;
    }
    return load_csv(cfg.data.path, cfg.data.schema, cfg.data.csv);
}

// Runs fn for each seed (in parallel) and concatenates rows in seed order.
template <class Fn>
std::vector<ReportRow> for_each_seed(const ExperimentConfig& cfg, Fn&& fn)
{
    const auto count = static_cast<std::int64_t>(cfg.seeds.size());
    std::vector<std::vector<ReportRow>> per_seed(cfg.seeds.size());
    std::vector<std::exception_ptr> failures(cfg.seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t k = 0; k < count; ++k) {
        try {
            per_seed[static_cast<std::size_t>(k)] = fn(cfg.seeds[static_cast<std::size_t>(k)]);
        } catch (...) {
            failures[static_cast<std::size_t>(k)] = std::current_exception();
        }
    }
    for (const auto& failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    std::vector<ReportRow> rows;
    for (auto& part : per_seed) {
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

void check_common(const ExperimentConfig& cfg)
{
    if (cfg.seeds.empty()) {
        config_error("seeds must be nonempty");
    }
    cfg.fit.validate();
}

ExperimentResult make_result(const ExperimentConfig& cfg, std::vector<ReportRow> rows)
{
    ExperimentResult result;
    result.kind = cfg.kind;
    result.config_hash = config_hash(cfg.source);
    result.rows = std::move(rows);
    return result;
}

bool both_classes(const Vector& y)
{
    const double s = y.sum();
    return s > 0.0 && s < static_cast<double>(y.size());
}

} // namespace

// ---------------------------------------------------------------------------
// Config

ExperimentConfig ExperimentConfig::from_json(const json& j, const std::filesystem::path& base_dir)
{
    try {
        ExperimentConfig cfg;
        cfg.source = j;
        cfg.kind = parse_kind(j.at("experiment").get<std::string>());

        const auto& data = j.at("data");
        const auto type = data.at("source").get<std::string>();
        if (type == "csv") {
            cfg.data.type = DataSource::Type::csv;
            std::filesystem::path p = data.at("path").get<std::string>();
            cfg.data.path = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
            cfg.data.schema = data.at("schema").get<Schema>();
            cfg.data.csv.na_token = data.value("na_token", std::string("N/A"));
            if (data.contains("positive_label")) {
                cfg.data.csv.positive_label = data.at("positive_label").get<std::string>();
            }
        } else if (type == "paper_synthetic" || type == "family") {
            cfg.data.type = type == "family" ? DataSource::Type::family : DataSource::Type::paper_synthetic;
            cfg.data.family =
                type == "family" ? data.at("family").get<synthetic::FamilyParams>() : synthetic::paper_synthetic();
            if (type == "paper_synthetic" && data.contains("eta")) {
                cfg.data.family.eta = data.at("eta").get<double>();
            }
            cfg.data.full_availability = data.value("full_availability", false);
            cfg.data.rows = data.value("rows", Index{10000});
        } else if (type == "counterexample") {
            cfg.data.type = DataSource::Type::counterexample;
            cfg.data.alpha = data.value("alpha", 0.5);
            cfg.data.rows = data.value("rows", Index{10000});
            synthetic::CounterexampleParams{cfg.data.alpha}.validate();
        } else {
            config_error("unknown data source '" + type + "'");
        }
        if (cfg.data.rows < 2) {
            config_error("data.rows must be at least 2");
        }

        if (j.contains("injection")) {
            for (const auto& item : j.at("injection")) {
                InjectionConfig inj;
                inj.feature = item.at("feature").get<std::string>();
                if (item.contains("slope")) {
                    inj.slope = item.at("slope").get<double>();
                }
                inj.sign = item.value("sign", 1);
                if (inj.sign != 1 && inj.sign != -1) {
                    config_error("injection sign must be +1 or -1");
                }
                if (item.contains("center")) {
                    inj.center = item.at("center").get<double>();
                }
                cfg.injection.push_back(std::move(inj));
            }
        }
        if (j.contains("selection")) {
            const auto& s = j.at("selection");
            cfg.selection.enabled = s.value("enabled", true);
            cfg.selection.min_samples = s.value("min_samples", Index{150});
            cfg.selection.candidates = s.value("candidates", std::vector<std::string>{});
            cfg.selection.signs = s.value("signs", std::map<std::string, int>{});
            if (s.contains("max_r")) {
                cfg.selection.max_r = s.at("max_r").get<int>();
            }
            if (cfg.selection.enabled && cfg.data.type != DataSource::Type::csv) {
                config_error("feature selection needs a csv source");
            }
        }
        cfg.models = j.value("models", std::vector<std::string>{});
        if (j.contains("seeds")) {
            cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        }
        cfg.split_fraction = j.value("split_fraction", 0.8);
        if (j.contains("fit")) {
            cfg.fit = j.at("fit").get<FitConfig>();
        }
        const auto submodel = j.value("submodel", std::string("logistic"));
        if (submodel == "logistic") {
            cfg.submodel = SubmodelKind::logistic;
        } else if (submodel == "group_mean") {
            cfg.submodel = SubmodelKind::group_mean;
        } else {
            config_error("submodel must be 'logistic' or 'group_mean'");
        }
        cfg.add_indicator = j.value("add_indicator", true);
        cfg.unfavorable_label = j.value("unfavorable_label", 0);
        if (cfg.unfavorable_label != 0 && cfg.unfavorable_label != 1) {
            config_error("unfavorable_label must be 0 or 1");
        }
        cfg.report_auc = j.value("report_auc", true);
        if (j.contains("grid")) {
            cfg.grid = j.at("grid").get<std::vector<Index>>();
        }
        cfg.test_rows = j.value("test_rows", Index{20000});
        if (j.contains("output_dir")) {
            std::filesystem::path p = j.at("output_dir").get<std::string>();
            cfg.output_dir = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
        }
        if (cfg.seeds.empty()) {
            config_error("seeds must be nonempty");
        }
        if (!(cfg.split_fraction > 0.0 && cfg.split_fraction < 1.0)) {
            config_error("split_fraction must lie in (0, 1)");
        }
        models_for(cfg);
        return cfg;
    } catch (const json::exception& e) {
        config_error(e.what());
    } catch (const Error& e) {
        if (e.is_config_error()) {
            throw;
        }
        config_error(e.what());
    }
}

// ---------------------------------------------------------------------------
// Experiments

ExperimentResult run_penalization(const ExperimentConfig& cfg)
{
    check_common(cfg);
    const auto models = models_for(cfg);
    const auto loaded = load_if_csv(cfg);
    const SubmodelSpec spec{cfg.submodel, cfg.fit};
    auto rows = for_each_seed(cfg, [&](std::uint64_t seed) {
        auto prepared = prepare(cfg, loaded ? &*loaded : nullptr, seed);
        const auto& train = prepared.train;
        const auto& test = prepared.test;
        const Index N = train.rows();
        std::vector<ReportRow> out = prepared.notes;
        const Vector base_scores = fit_base(train, {SubmodelKind::logistic, cfg.fit}).predict(test);
        std::optional<metrics::PenalizationGap> reference;
        if (wants(models, "imputed")) {
            const auto gap = metrics::non_penalization_gap(
                fit_imputed(train, cfg.fit, cfg.add_indicator).predict(test), base_scores, test, cfg.unfavorable_label);
            out.push_back({seed, N, "imputed", "avg_unfavorable_a0", gap.avg_imputed});
            out.push_back({seed, N, "imputed", "change", gap.change});
            reference = gap;
        }
        if (wants(models, "base")) {
            const auto gap = metrics::non_penalization_gap(base_scores, base_scores, test, cfg.unfavorable_label);
            out.push_back({seed, N, "base", "avg_unfavorable_a0", gap.avg_base});
            if (!reference) {
                reference = gap;
            }
        }
        if (wants(models, "off_multi")) {
            const auto gap = metrics::non_penalization_gap(fit_multi(train, spec).predict(test), base_scores, test,
                                                           cfg.unfavorable_label);
            out.push_back({seed, N, "off_multi", "avg_unfavorable_a0", gap.avg_imputed});
            out.push_back({seed, N, "off_multi", "change", gap.change});
            reference = reference ? reference : gap;
        }
        if (reference) {
            out.push_back({seed, N, "data", "rows_a0", static_cast<double>(reference->rows)});
        }
        return out;
    });
    return make_result(cfg, std::move(rows));
}

ExperimentResult run_cost_of_fairness(const ExperimentConfig& cfg)
{
    check_common(cfg);
    const auto models = models_for(cfg);
    const auto loaded = load_if_csv(cfg);
    const SubmodelSpec spec{cfg.submodel, cfg.fit};
    auto rows = for_each_seed(cfg, [&](std::uint64_t seed) {
        auto prepared = prepare(cfg, loaded ? &*loaded : nullptr, seed);
        const auto& train = prepared.train;
        const auto& test = prepared.test;
        if (train.r() != 1) {
            throw Error(ErrorCode::Config, "cost_of_fairness needs exactly one optional feature");
        }
        const Index N = train.rows();
        std::vector<ReportRow> out = prepared.notes;
        auto report = [&](const std::string& name, const Vector& scores, int fits) {
            out.push_back({seed, N, name, "misclassification", metrics::misclassification(scores, test.labels())});
            if (cfg.report_auc && both_classes(test.labels())) {
                out.push_back({seed, N, name, "one_minus_auc", 1.0 - metrics::auc(scores, test.labels())});
            }
            out.push_back({seed, N, name, "mse", metrics::mse(scores, test.labels())});
            out.push_back({seed, N, name, "fits", static_cast<double>(fits)});
        };
        for (const auto& name : models) {
            if (name == "base") {
                report(name, fit_base(train, spec).predict(test), 1);
            } else if (name == "csp") {
                report(name, fit_csp(train, spec).predict(test), 2);
            } else if (name == "off_multi") {
                const auto m = fit_multi(train, spec);
                report(name, m.predict(test), m.fit_count());
            } else if (name == "imputed") {
                report(name, fit_imputed(train, cfg.fit, cfg.add_indicator).predict(test), 1);
            }
        }
        return out;
    });
    return make_result(cfg, std::move(rows));
}

ExperimentResult run_multi_optional(const ExperimentConfig& cfg)
{
    check_common(cfg);
    const auto models = models_for(cfg);
    const auto loaded = load_if_csv(cfg);
    const SubmodelSpec spec{SubmodelKind::logistic, cfg.fit};
    auto rows = for_each_seed(cfg, [&](std::uint64_t seed) {
        auto prepared = prepare(cfg, loaded ? &*loaded : nullptr, seed);
        const auto& train = prepared.train;
        const auto& test = prepared.test;
        if (train.r() < 1) {
            throw Error(ErrorCode::Config, "multi_optional needs at least one optional feature");
        }
        const Index N = train.rows();
        std::vector<ReportRow> out = prepared.notes;
        const auto multi = fit_multi(train, spec);
        const Vector reference = multi.predict(test);
        auto report = [&](const std::string& name, const Vector& scores, int fits) {
            out.push_back({seed, N, name, "off_gap", metrics::off_gap(scores, reference)});
            out.push_back({seed, N, name, "misclassification", metrics::misclassification(scores, test.labels())});
            out.push_back({seed, N, name, "fits", static_cast<double>(fits)});
        };
        for (const auto& name : models) {
            if (name == "multi") {
                report(name, reference, multi.fit_count());
            } else if (name == "off_lr") {
                const auto m = fit_off_lr(train, cfg.fit);
                report(name, m.predict(test), m.fit_count);
            } else if (name == "base") {
                report(name, fit_base(train, spec).predict(test), 1);
            } else if (name == "imputed") {
                report(name, fit_imputed(train, cfg.fit, cfg.add_indicator).predict(test), 1);
            }
        }
        return out;
    });
    return make_result(cfg, std::move(rows));
}

ExperimentResult run_synthetic_convergence(const ExperimentConfig& cfg)
{
    check_common(cfg);
    if (cfg.data.type != DataSource::Type::paper_synthetic && cfg.data.type != DataSource::Type::family) {
        config_error("synthetic_convergence needs a paper_synthetic or family source");
    }
    if (cfg.grid.empty() || cfg.test_rows < 1) {
        config_error("synthetic_convergence needs a nonempty grid and test_rows >= 1");
    }
    const auto models = models_for(cfg);
    const auto& family = cfg.data.family;
    const SubmodelSpec spec{SubmodelKind::logistic, cfg.fit};
    auto rows = for_each_seed(cfg, [&](std::uint64_t seed) {
        std::vector<ReportRow> out;
        const auto test = synthetic::sample_family(family, cfg.test_rows, parallel::mix_seed(seed, 0xC0FFEE));
        const Vector oracle = synthetic::oracle_posterior(family, test);
        for (Index N : cfg.grid) {
            const auto train =
                synthetic::sample_family(family, N, parallel::mix_seed(seed, static_cast<std::uint64_t>(N)));
            for (const auto& name : models) {
                Vector scores;
                if (name == "off_lr") {
                    scores = fit_off_lr(train, cfg.fit).predict(test);
                } else if (name == "multi") {
                    scores = fit_multi(train, spec).predict(test);
                } else {
                    scores = fit_imputed(train, cfg.fit, cfg.add_indicator).predict(test);
                }
                out.push_back({seed, N, name, "off_gap", metrics::off_gap(scores, oracle)});
            }
        }
        return out;
    });
    return make_result(cfg, std::move(rows));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg)
{
    switch (cfg.kind) {
    case Kind::penalization: return run_penalization(cfg);
    case Kind::cost_of_fairness: return run_cost_of_fairness(cfg);
    case Kind::multi_optional: return run_multi_optional(cfg);
    case Kind::synthetic_convergence: return run_synthetic_convergence(cfg);
    }
    config_error("unknown experiment");
}

// ---------------------------------------------------------------------------
// Reports

std::string ExperimentResult::csv() const
{
    std::ostringstream out;
    out << "experiment,seed,sample_size,model,metric,value\n";
    for (const auto& row : rows) {
        out << to_string(kind) << ',' << row.seed << ',' << row.sample_size << ',' << row.model << ',' << row.metric
            << ',' << number(row.value) << '\n';
    }
    return out.str();
}

namespace {

struct Aggregate {
    Index sample_size = 0;
    std::string model;
    std::string metric;
    double mean = 0.0;
    double std = 0.0;
    Index n = 0;
};

bool is_rate(const std::string& metric) { return metric != "fits" && metric != "rows_a0" && metric != "selected_r"; }

// Groups keep the order of first appearance.
std::vector<Aggregate> aggregate(const std::vector<ReportRow>& rows)
{
    std::vector<std::tuple<Index, std::string, std::string>> order;
    std::map<std::tuple<Index, std::string, std::string>, std::vector<double>> values;
    for (const auto& row : rows) {
        // Sample size of a seed's training split can vary by one row; the
        // convergence grid is the only place where it is a real coordinate.
        auto key = std::make_tuple(row.sample_size, row.model, row.metric);
        auto [it, inserted] = values.try_emplace(key);
        if (inserted) {
            order.push_back(key);
        }
        it->second.push_back(row.value);
    }
    std::vector<Aggregate> out;
    for (const auto& key : order) {
        auto& v = values[key];
        Aggregate a;
        std::tie(a.sample_size, a.model, a.metric) = key;
        a.n = static_cast<Index>(v.size());
        a.mean = parallel::pairwise_sum(v) / static_cast<double>(v.size());
        if (v.size() > 1) {
            std::vector<double> sq;
            for (double x : v) {
                sq.push_back((x - a.mean) * (x - a.mean));
            }
            a.std = std::sqrt(parallel::pairwise_sum(sq) / static_cast<double>(v.size() - 1));
        }
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<ReportRow> collapse_sample_size(const ExperimentResult& r)
{
    if (r.kind == Kind::synthetic_convergence) {
        return r.rows;
    }
    auto rows = r.rows;
    for (auto& row : rows) {
        row.sample_size = 0;
    }
    return rows;
}

} // namespace

json ExperimentResult::summary() const
{
    std::vector<std::uint64_t> seeds;
    for (const auto& row : rows) {
        if (std::find(seeds.begin(), seeds.end(), row.seed) == seeds.end()) {
            seeds.push_back(row.seed);
        }
    }
    json results = json::array();
    for (const auto& a : aggregate(collapse_sample_size(*this))) {
        json item{{"model", a.model}, {"metric", a.metric}, {"mean", a.mean}, {"std", a.std}, {"n", a.n}};
        if (kind == Kind::synthetic_convergence) {
            item["sample_size"] = a.sample_size;
        }
        if (is_rate(a.metric)) {
            item["display"] = metrics::format_percent(a.mean) + " +- " + metrics::format_percent(a.std);
        }
        results.push_back(std::move(item));
    }
    return json{{"experiment", to_string(kind)},
                {"config_hash", config_hash},
                {"version", OFF_VERSION},
                {"seeds", seeds},
                {"results", results}};
}

std::string ExperimentResult::plot_csv() const
{
    std::ostringstream out;
    out << "sample_size,model,metric,mean,std,n\n";
    for (const auto& a : aggregate(collapse_sample_size(*this))) {
        out << a.sample_size << ',' << a.model << ',' << a.metric << ',' << number(a.mean) << ',' << number(a.std)
            << ',' << a.n << '\n';
    }
    return out.str();
}

void write_reports(const ExperimentResult& result, const std::filesystem::path& dir, bool emit_plot_data)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::Io, "cannot create '" + dir.string() + "': " + ec.message());
    }
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) {
            throw Error(ErrorCode::Io, "cannot write '" + (dir / name).string() + "'");
        }
        out << content;
    };
    write("report.csv", result.csv());
    write("summary.json", result.summary().dump(2) + "\n");
    if (emit_plot_data) {
        write("plot.csv", result.plot_csv());
    }
}

std::string config_hash(const json& j)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::array<char, 17> buf{};
    std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(h));
    return buf.data();
}

} // namespace off::experiments
