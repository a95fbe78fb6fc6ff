#include "off/metrics.hpp"

#include "off/error.hpp"
#include "off/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

namespace off::metrics {

namespace {

void check_pair(const Vector& a, const Vector& b)
{
    if (a.size() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch, "vectors differ in length");
    }
    if (a.size() == 0) {
        throw Error(ErrorCode::EmptyDataset, "metric over zero rows");
    }
}

double mean_of(std::vector<double>& terms)
{
    return parallel::pairwise_sum(terms) / static_cast<double>(terms.size());
}

} // namespace

double off_gap(const Vector& f, const Vector& reference)
{
    check_pair(f, reference);
    std::vector<double> terms(static_cast<std::size_t>(f.size()));
    for (Index j = 0; j < f.size(); ++j) {
        terms[static_cast<std::size_t>(j)] = std::abs(f(j) - reference(j));
    }
    return mean_of(terms);
}

double off_gap(const Predictor& f, const Predictor& reference, const LabeledDataset& ds)
{
    if (ds.rows() == 0) {
        throw Error(ErrorCode::EmptyDataset, "off_gap over zero rows");
    }
    return off_gap(f(ds), reference(ds));
}

double misclassification(const Vector& scores, const Vector& labels, double threshold)
{
    check_pair(scores, labels);
    Index wrong = 0;
    for (Index j = 0; j < scores.size(); ++j) {
        const double predicted = scores(j) >= threshold ? 1.0 : 0.0;
        wrong += predicted != labels(j) ? 1 : 0;
    }
    return static_cast<double>(wrong) / static_cast<double>(scores.size());
}

double misclassification(const Predictor& f, const LabeledDataset& ds, double threshold)
{
    if (ds.rows() == 0) {
        throw Error(ErrorCode::EmptyDataset, "misclassification over zero rows");
    }
    return misclassification(f(ds), ds.labels(), threshold);
}

double auc(const Vector& scores, const Vector& labels)
{
    check_pair(scores, labels);
    const auto N = static_cast<std::size_t>(scores.size());
    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores(static_cast<Index>(a)) < scores(static_cast<Index>(b)); });
    double positive_rank_sum = 0.0;
    double positives = 0.0;
    std::size_t k = 0;
    while (k < N) {
        std::size_t end = k + 1;
        while (end < N && scores(static_cast<Index>(order[end])) == scores(static_cast<Index>(order[k]))) {
            ++end;
        }
        // ranks k+1 .. end share their average
        const double midrank = 0.5 * static_cast<double>(k + 1 + end);
        for (std::size_t m = k; m < end; ++m) {
            if (labels(static_cast<Index>(order[m])) != 0.0) {
                positive_rank_sum += midrank;
                positives += 1.0;
            }
        }
        k = end;
    }
    const double negatives = static_cast<double>(N) - positives;
    if (positives == 0.0 || negatives == 0.0) {
        throw Error(ErrorCode::SingleClass, "AUC needs both classes");
    }
    const double u = positive_rank_sum - positives * (positives + 1.0) / 2.0;
    return u / (positives * negatives);
}

double mse(const Vector& scores, const Vector& labels)
{
    check_pair(scores, labels);
    std::vector<double> terms(static_cast<std::size_t>(scores.size()));
    for (Index j = 0; j < scores.size(); ++j) {
        const double d = scores(j) - labels(j);
        terms[static_cast<std::size_t>(j)] = d * d;
    }
    return mean_of(terms);
}

double mse(const Predictor& f, const LabeledDataset& ds)
{
    if (ds.rows() == 0) {
        throw Error(ErrorCode::EmptyDataset, "mse over zero rows");
    }
    return mse(f(ds), ds.labels());
}

PenalizationGap non_penalization_gap(const Vector& f_imputed, const Vector& f_base, const LabeledDataset& ds,
                                     int unfavorable_label)
{
    if (f_imputed.size() != ds.rows() || f_base.size() != ds.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "prediction length differs from dataset rows");
    }
    auto unfavorable = [&](double p) { return unfavorable_label == 1 ? p : 1.0 - p; };
    std::vector<double> imputed;
    std::vector<double> base;
    for (Index j = 0; j < ds.rows(); ++j) {
        if (ds.subset(j) == SubsetKey(0U)) {
            imputed.push_back(unfavorable(f_imputed(j)));
            base.push_back(unfavorable(f_base(j)));
        }
    }
    if (imputed.empty()) {
        throw Error(ErrorCode::NoMissingRows, "no rows without optional features");
    }
    PenalizationGap gap;
    gap.rows = static_cast<Index>(imputed.size());
    gap.avg_imputed = mean_of(imputed);
    gap.avg_base = mean_of(base);
    gap.change = gap.avg_base - gap.avg_imputed;
    return gap;
}

void EvalReport::add(const std::string& name, double value, Index count, std::optional<double> std_error)
{
    if (!std::isfinite(value)) {
        throw Error(ErrorCode::InvalidArgument, "metric '" + name + "' is not finite");
    }
    metrics[name] = MetricValue{value, count, std_error};
}

const MetricValue& EvalReport::at(const std::string& name) const
{
    auto it = metrics.find(name);
    if (it == metrics.end()) {
        throw Error(ErrorCode::InvalidArgument, "no metric '" + name + "'");
    }
    return it->second;
}

std::string format_percent(double fraction)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
    return buf;
}

} // namespace off::metrics
