#ifndef OFF_EXPERIMENTS_HPP
#define OFF_EXPERIMENTS_HPP

#include "off/dataset.hpp"
#include "off/glm.hpp"
#include "off/models.hpp"
#include "off/synthetic.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace off::experiments {

enum class Kind { penalization, cost_of_fairness, multi_optional, synthetic_convergence };

std::string to_string(Kind k);

struct DataSource {
    enum class Type { csv, paper_synthetic, family, counterexample };
    Type type = Type::paper_synthetic;

    // csv
    std::filesystem::path path;
    Schema schema;
    CsvOptions csv;

    // paper_synthetic / family
    synthetic::FamilyParams family;
    bool full_availability = false;
    Index rows = 10000;

    // counterexample
    double alpha = 0.5;
};

// One optional feature to corrupt. Either an explicit slope, or a sign that is
// scaled by 1/std of the feature in the sampled data.
struct InjectionConfig {
    std::string feature;
    std::optional<double> slope;
    int sign = 1;
    std::optional<double> center;
};

// Picks the r most discriminative candidates (base columns of a CSV source)
// with r from select_optional_count on the train split, then injects them.
struct FeatureSelection {
    bool enabled = false;
    Index min_samples = 150;
    std::vector<std::string> candidates;   // empty: every base column
    std::map<std::string, int> signs;      // default +1
    std::optional<int> max_r;
};

struct ExperimentConfig {
    Kind kind = Kind::penalization;
    DataSource data;
    std::vector<InjectionConfig> injection;
    FeatureSelection selection;
    std::vector<std::string> models;       // empty: the experiment's default set
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    double split_fraction = 0.8;
    FitConfig fit;
    SubmodelKind submodel = SubmodelKind::logistic;
    bool add_indicator = true;
    int unfavorable_label = 0;
    bool report_auc = true;
    std::vector<Index> grid{1000, 10000, 100000};
    Index test_rows = 20000;
    std::filesystem::path output_dir = "off_report";
    nlohmann::json source;                 // config as read, for the report hash

    static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
};

// One line of the long-format report.
struct ReportRow {
    std::uint64_t seed = 0;
    Index sample_size = 0;   // training rows
    std::string model;
    std::string metric;
    double value = 0.0;
};

struct ExperimentResult {
    Kind kind = Kind::penalization;
    std::string config_hash;
    std::vector<ReportRow> rows;

    std::string csv() const;
    // Per (sample size, model, metric): mean, sample std and seed count.
    nlohmann::json summary() const;
    // Aggregated rows, one per (sample size, model, metric).
    std::string plot_csv() const;
};

ExperimentResult run_penalization(const ExperimentConfig& cfg);
ExperimentResult run_cost_of_fairness(const ExperimentConfig& cfg);
ExperimentResult run_multi_optional(const ExperimentConfig& cfg);
ExperimentResult run_synthetic_convergence(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Writes report.csv and summary.json (and plot.csv when asked) into dir.
void write_reports(const ExperimentResult& result, const std::filesystem::path& dir, bool emit_plot_data);

// FNV-1a over the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

} // namespace off::experiments

#endif // OFF_EXPERIMENTS_HPP
