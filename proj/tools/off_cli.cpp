// off: command line front end for the optional feature fairness toolkit.
//
//   off experiment --config cfg.json [--seed-override 1,2] [--out dir] [--emit-plot-data]
//   off inject  --data in.csv --schema s.json --feature z --sign -1 --seed 3 --out out.csv
//   off fit     --data train.csv --schema s.json --model off_lr --out model.json
//   off eval    --model model.json --data test.csv [--reference ref.json]
//   off sample  --preset paper_synthetic --rows 1000 --seed 1 --out data.csv
//
// Exit codes: 0 success, 2 bad configuration or arguments, 3 data or model error.

#include "off/error.hpp"
#include "off/experiments.hpp"
#include "off/json_io.hpp"
#include "off/metrics.hpp"
#include "off/parallel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

namespace {

using nlohmann::json;
using namespace off;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Config, "cannot open '" + path.string() + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Config, path.string() + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
    }
    out << text;
}

Schema read_schema(const std::filesystem::path& path)
{
    try {
        return read_json(path).get<Schema>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Config, path.string() + ": " + e.what());
    }
}

struct DataArgs {
    std::string data;
    std::string schema;
    std::string na_token = "N/A";
    std::string positive_label;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--data", data, "CSV file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--schema", schema, "JSON {\"base\": [...], \"optional\": [...], \"label\": ...}")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--na-token", na_token, "marker for withheld values");
        cmd->add_option("--positive-label", positive_label, "label value mapped to 1");
    }

    LabeledDataset load() const
    {
        CsvOptions opts;
        opts.na_token = na_token;
        if (!positive_label.empty()) {
            opts.positive_label = positive_label;
        }
        return load_csv(data, read_schema(schema), opts);
    }
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Optional feature fairness: fit, evaluate and run experiments"};
    app.set_version_flag("--version", std::string(OFF_VERSION));
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "thread cap (overrides OFF_THREADS)");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a configured experiment and write reports");
    std::string config_path;
    std::vector<std::uint64_t> seed_override;
    std::string out_dir;
    bool emit_plot = false;
    exp->add_option("--config", config_path, "experiment JSON")->required()->check(CLI::ExistingFile);
    exp->add_option("--seed-override", seed_override, "replace the configured seeds")->delimiter(',');
    exp->add_option("--out", out_dir, "report directory (default: config output_dir)");
    exp->add_flag("--emit-plot-data", emit_plot, "also write aggregated plot.csv");

    // inject
    auto* inj = app.add_subcommand("inject", "withhold optional values at random");
    DataArgs inj_data;
    inj_data.attach(inj);
    std::string inj_feature, inj_out = "-";
    std::optional<double> inj_slope, inj_center;
    int inj_sign = 1;
    std::uint64_t inj_seed = 1;
    inj->add_option("--feature", inj_feature, "optional feature to corrupt")->required();
    auto* slope_opt = inj->add_option("--slope", inj_slope, "p(missing) = sigmoid(slope (z - center))");
    inj->add_option("--sign", inj_sign, "use slope = sign / std(feature)")
        ->check(CLI::IsMember({-1, 1}))
        ->excludes(slope_opt);
    inj->add_option("--center", inj_center, "default: mean of the feature");
    inj->add_option("--seed", inj_seed);
    inj->add_option("--out", inj_out, "output CSV ('-' for stdout)");

    // fit
    auto* fit = app.add_subcommand("fit", "fit a model and save it as JSON");
    DataArgs fit_data;
    fit_data.attach(fit);
    std::string model_kind = "off_lr", submodel = "logistic", fit_out = "-";
    bool indicator = false;
    double alpha = 1.0;
    FitConfig fit_cfg;
    fit->add_option("--model", model_kind)
        ->check(CLI::IsMember({"multi", "off_lr", "nb_off", "csp", "base", "imputed"}));
    fit->add_option("--submodel", submodel, "for multi/csp/base")->check(CLI::IsMember({"logistic", "group_mean"}));
    fit->add_flag("--indicator", indicator, "imputed model: add availability indicators");
    fit->add_option("--alpha", alpha, "naive Bayes Laplace smoothing");
    fit->add_option("--l2", fit_cfg.l2_penalty);
    fit->add_option("--max-iters", fit_cfg.max_iters);
    fit->add_option("--grad-tol", fit_cfg.grad_tol);
    fit->add_option("--out", fit_out, "model JSON ('-' for stdout)");

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate a saved model on a CSV");
    std::string eval_model, eval_reference, eval_data, eval_na = "N/A", eval_positive;
    ev->add_option("--model", eval_model)->required()->check(CLI::ExistingFile);
    ev->add_option("--data", eval_data)->required()->check(CLI::ExistingFile);
    ev->add_option("--reference", eval_reference, "model to measure the OFF gap against")
        ->check(CLI::ExistingFile);
    ev->add_option("--na-token", eval_na);
    ev->add_option("--positive-label", eval_positive);

    // sample
    auto* smp = app.add_subcommand("sample", "draw a synthetic dataset");
    std::string preset = "paper_synthetic", family_path, sample_out = "-";
    Index rows = 1000;
    std::uint64_t sample_seed = 1;
    double ce_alpha = 0.5;
    smp->add_option("--preset", preset)->check(CLI::IsMember({"paper_synthetic", "counterexample"}));
    smp->add_option("--family", family_path, "family parameters JSON (overrides --preset)")
        ->check(CLI::ExistingFile);
    smp->add_option("--rows", rows)->check(CLI::PositiveNumber);
    smp->add_option("--seed", sample_seed);
    smp->add_option("--alpha", ce_alpha, "counterexample availability rate");
    smp->add_option("--out", sample_out, "output CSV ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    parallel::set_max_threads(threads > 0 ? threads : parallel::threads_from_env());

    try {
        if (*exp) {
            const std::filesystem::path cfg_path = config_path;
            auto cfg = experiments::ExperimentConfig::from_json(read_json(cfg_path), cfg_path.parent_path());
            if (!seed_override.empty()) {
                cfg.seeds = seed_override;
                cfg.source["seeds"] = seed_override;
            }
            const auto result = experiments::run_experiment(cfg);
            const std::filesystem::path dir = out_dir.empty() ? cfg.output_dir : std::filesystem::path(out_dir);
            experiments::write_reports(result, dir, emit_plot);
            std::cerr << "wrote " << (dir / "report.csv").string() << " (" << result.rows.size() << " rows)\n";
        } else if (*inj) {
            const auto ds = inj_data.load();
            FeatureInjection f;
            f.feature = inj_feature;
            f.slope = inj_slope ? *inj_slope : standardized_slope(ds, inj_feature, inj_sign);
            f.center = inj_center;
            const auto out = inject_availability(ds, {{f}}, inj_seed);
            if (inj_out == "-") {
                write_csv(out, std::cout, inj_data.na_token);
            } else {
                save_csv(out, inj_out, inj_data.na_token);
            }
        } else if (*fit) {
            fit_cfg.validate();
            const auto ds = fit_data.load();
            const SubmodelSpec spec{submodel == "logistic" ? SubmodelKind::logistic : SubmodelKind::group_mean,
                                    fit_cfg};
            AnyModel model = [&]() -> AnyModel {
                if (model_kind == "multi") {
                    return fit_multi(ds, spec);
                }
                if (model_kind == "off_lr") {
                    return fit_off_lr(ds, fit_cfg);
                }
                if (model_kind == "nb_off") {
                    return fit_nb_off(ds, alpha);
                }
                if (model_kind == "csp") {
                    return fit_csp(ds, spec);
                }
                if (model_kind == "base") {
                    return fit_base(ds, spec);
                }
                return fit_imputed(ds, fit_cfg, indicator);
            }();
            write_text(fit_out, model_to_json(model).dump(2) + "\n");
        } else if (*ev) {
            const auto model_json = read_json(eval_model);
            const auto model = model_from_json(model_json);
            CsvOptions opts;
            opts.na_token = eval_na;
            if (!eval_positive.empty()) {
                opts.positive_label = eval_positive;
            }
            const auto ds = load_csv(eval_data, model_json.at("schema").get<Schema>(), opts);
            const Vector scores = predict_any(model, ds);
            metrics::EvalReport report;
            report.add("misclassification", metrics::misclassification(scores, ds.labels()), ds.rows());
            report.add("mse", metrics::mse(scores, ds.labels()), ds.rows());
            try {
                report.add("auc", metrics::auc(scores, ds.labels()), ds.rows());
            } catch (const Error& e) {
                if (e.code() != ErrorCode::SingleClass) {
                    throw;
                }
            }
            if (!eval_reference.empty()) {
                const auto reference = model_from_json(read_json(eval_reference));
                report.add("off_gap", metrics::off_gap(scores, predict_any(reference, ds)), ds.rows());
            }
            json j = report;
            j["fits"] = fit_count_of(model);
            std::cout << j.dump(2) << "\n";
        } else if (*smp) {
            LabeledDataset ds;
            if (!family_path.empty()) {
                ds = synthetic::sample_family(read_json(family_path).get<synthetic::FamilyParams>(), rows, sample_seed);
            } else if (preset == "counterexample") {
                ds = synthetic::sample_counterexample({ce_alpha}, rows, sample_seed);
            } else {
                ds = synthetic::sample_family(synthetic::paper_synthetic(), rows, sample_seed);
            }
            if (sample_out == "-") {
                write_csv(ds, std::cout);
            } else {
                save_csv(ds, sample_out);
            }
        }
    } catch (const Error& e) {
        std::cerr << "off: " << e.what() << "\n";
        return e.is_config_error() ? kExitConfig : kExitData;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "off: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "off: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
