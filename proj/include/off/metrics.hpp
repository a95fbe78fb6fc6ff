#ifndef OFF_METRICS_HPP
#define OFF_METRICS_HPP

#include "off/dataset.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>

namespace off::metrics {

// Any model: dataset in, one probability per row out.
using Predictor = std::function<Vector(const LabeledDataset&)>;

template <class Model>
Predictor predictor_of(const Model& model)
{
    return [&model](const LabeledDataset& ds) { return model.predict(ds); };
}

// Mean absolute difference between two predictors over the rows of ds.
double off_gap(const Vector& f, const Vector& reference);
double off_gap(const Predictor& f, const Predictor& reference, const LabeledDataset& ds);

// Fraction of rows where (score >= threshold) != label; ties classify positive.
double misclassification(const Vector& scores, const Vector& labels, double threshold = 0.5);
double misclassification(const Predictor& f, const LabeledDataset& ds, double threshold = 0.5);

// Mann-Whitney AUC with midranks for ties.
double auc(const Vector& scores, const Vector& labels);

double mse(const Vector& scores, const Vector& labels);
double mse(const Predictor& f, const LabeledDataset& ds);

// Mean of the unfavorable-class probability over rows with no optional feature
// available. change = avg_base - avg_imputed; negative means the imputed model
// scores non-disclosers worse than their base features justify.
struct PenalizationGap {
    double avg_imputed = 0.0;
    double avg_base = 0.0;
    double change = 0.0;
    Index rows = 0;
};

PenalizationGap non_penalization_gap(const Vector& f_imputed, const Vector& f_base, const LabeledDataset& ds,
                                     int unfavorable_label = 0);

struct MetricValue {
    double value = 0.0;
    Index count = 0;
    std::optional<double> std_error;
};

struct EvalReport {
    std::map<std::string, MetricValue> metrics;

    void add(const std::string& name, double value, Index count, std::optional<double> std_error = std::nullopt);
    const MetricValue& at(const std::string& name) const;
};

// Values x100, two decimals.
std::string format_percent(double fraction);

} // namespace off::metrics

#endif // OFF_METRICS_HPP
