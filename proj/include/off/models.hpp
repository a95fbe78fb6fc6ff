#ifndef OFF_MODELS_HPP
#define OFF_MODELS_HPP

#include "off/dataset.hpp"
#include "off/glm.hpp"

#include <functional>
#include <map>
#include <span>
#include <variant>
#include <vector>

namespace off {

// Empirical conditional mean of y keyed by the exact input vector. Inputs never
// seen during fitting resolve to the mean over all fitted rows.
class GroupMeanModel {
public:
    static GroupMeanModel fit(const Matrix& X, const Vector& y, const Vector& weights);

    double predict(const Eigen::Ref<const Vector>& x) const;
    Index dim() const noexcept { return dim_; }
    double overall_mean() const noexcept { return overall_; }

    struct Group {
        double weight = 0.0;
        double positive = 0.0;
    };
    const std::map<std::vector<double>, Group>& groups() const noexcept { return groups_; }

    static GroupMeanModel from_groups(Index dim, std::map<std::vector<double>, Group> groups);

private:
    Index dim_ = 0;
    double overall_ = 0.5;
    std::map<std::vector<double>, Group> groups_;
};

using Submodel = std::variant<LogisticParams, GroupMeanModel>;

double predict_submodel(const Submodel& m, const Eigen::Ref<const Vector>& x);
Index submodel_dim(const Submodel& m);

enum class SubmodelKind { logistic, group_mean };

struct SubmodelSpec {
    SubmodelKind kind = SubmodelKind::logistic;
    FitConfig fit;
};

// Fits one submodel on (X, y, weights). Throws Error(InsufficientSubset) when the
// rows cannot support the model: no positive weight for group means; fewer than
// two rows or one class (or a singular unpenalized Hessian) for logistic.
Submodel fit_submodel(const SubmodelSpec& spec, const Matrix& X, const Vector& y, const Vector& weights);

// [b | z_i for i in key], row-wise. Values outside key are never read.
Matrix subset_design(const LabeledDataset& ds, std::span<const Index> rows, SubsetKey key);
Vector subset_input(const Eigen::Ref<const Vector>& b, const Eigen::Ref<const Vector>& z, SubsetKey key);

// ---------------------------------------------------------------------------
// Multi model: one submodel per availability subset, dispatched on I(a).

class MultiModel {
public:
    struct Entry {
        SubsetKey source;   // subset whose fit serves this key (== key unless fallback)
        Submodel model;
    };

    MultiModel(Schema schema, SubmodelKind kind, std::map<SubsetKey, Entry> entries, int fit_count);

    double predict(const Eigen::Ref<const Vector>& b, SubsetKey available, const Eigen::Ref<const Vector>& z) const;
    Vector predict(const LabeledDataset& ds) const;

    const Schema& schema() const noexcept { return schema_; }
    SubmodelKind kind() const noexcept { return kind_; }
    const std::map<SubsetKey, Entry>& entries() const noexcept { return entries_; }
    const Entry& entry(SubsetKey key) const;
    // Keys served by a smaller subset's fit, mapped to that subset.
    std::map<SubsetKey, SubsetKey> fallbacks() const;
    int fit_count() const noexcept { return fit_count_; }

private:
    Schema schema_;
    SubmodelKind kind_;
    std::map<SubsetKey, Entry> entries_;
    int fit_count_ = 0;
};

// For every I of the 2^r subsets, fits on rows whose available set contains I
// using [base | z_I]. Subsets that cannot be fitted fall back to the largest
// fittable proper subset (ties: keep the lowest feature indices). The subset
// fits run in parallel.
MultiModel fit_multi(const LabeledDataset& ds, const SubmodelSpec& spec = {});

// ---------------------------------------------------------------------------
// OFF-LR: base logistic model plus additive per-feature terms.

struct OffLrModel {
    Schema schema;
    Vector w;        // n
    double t = 0.0;
    Matrix omega;    // r x n, row i is omega_i
    Vector beta;     // r
    Vector s;        // r
    int fit_count = 0;

    Index n() const noexcept { return w.size(); }
    Index r() const noexcept { return beta.size(); }
    Index scalar_count() const noexcept { return w.size() + 1 + omega.size() + beta.size() + s.size(); }

    double log_odds(const Eigen::Ref<const Vector>& b, SubsetKey available, const Eigen::Ref<const Vector>& z) const;
    double predict(const Eigen::Ref<const Vector>& b, SubsetKey available, const Eigen::Ref<const Vector>& z) const;
    Vector predict(const LabeledDataset& ds) const;

    // The implied logistic model over [b | z_I].
    LogisticParams subset_params(SubsetKey key) const;
};

// Recombines a base fit and r single-feature fits (weights over [b | z_k]) into
// OFF-LR parameters: omega_k = w({k}) - w, beta_k = beta({k}), s_k = s({k}) - t.
OffLrModel combine_off_lr(Schema schema, const LogisticParams& base, std::span<const LogisticParams> single);

// r + 1 fits: base features on all rows, then [base | z_k] on rows with z_k present.
OffLrModel fit_off_lr(const LabeledDataset& ds, const FitConfig& cfg = {});

// ---------------------------------------------------------------------------
// Naive Bayes with independent per-feature availability, binary features.

struct NbOffModel {
    Schema schema;
    double prior_log_odds = 0.0;
    Matrix base_log_ratio;      // n x 2, column v: log p(b_i=v|1)/p(b_i=v|0)
    Matrix optional_log_ratio;  // r x 2, column v: log p(z_i=v,A_i=1|1)/p(z_i=v,A_i=1|0)

    Index ratio_count() const noexcept { return base_log_ratio.size() + optional_log_ratio.size(); }

    double predict(const Eigen::Ref<const Vector>& b, SubsetKey available, const Eigen::Ref<const Vector>& z) const;
    Vector predict(const LabeledDataset& ds) const;
};

// Laplace-smoothed (alpha per cell) weighted frequency estimates. The optional
// feature has three cells per class: (z=0, A=1), (z=1, A=1), (A=0).
NbOffModel fit_nb_off(const LabeledDataset& ds, double laplace_alpha = 1.0);

// ---------------------------------------------------------------------------
// Baselines.

// Conditional statistical parity model for one optional feature: both parts are
// fitted on providers only; non-providers get E[Y | b, A=1].
struct CspModel {
    Schema schema;
    Submodel provider_base;  // inputs: b
    Submodel provider_full;  // inputs: [b | z]

    double predict(const Eigen::Ref<const Vector>& b, SubsetKey available, const Eigen::Ref<const Vector>& z) const;
    Vector predict(const LabeledDataset& ds) const;
};

CspModel fit_csp(const LabeledDataset& ds, const SubmodelSpec& spec = {});

struct BaseModel {
    Schema schema;
    Submodel model;  // inputs: b

    Vector predict(const LabeledDataset& ds) const;
};

BaseModel fit_base(const LabeledDataset& ds, const SubmodelSpec& spec = {});

// Unfair baseline on zero-imputed data, optionally with availability indicators.
struct ImputedModel {
    Schema schema;
    LogisticParams params;
    bool add_indicator = false;

    Vector predict(const LabeledDataset& ds) const;
};

ImputedModel fit_imputed(const LabeledDataset& ds, const FitConfig& cfg, bool add_indicator);

// ---------------------------------------------------------------------------
// Exact conditional expectations on finite distributions.

struct Atom {
    std::vector<int> b;
    std::vector<int> a;   // availability bits, length r
    std::vector<int> z;   // entries with a_i = 0 are ignored
    int y = 0;
    double weight = 0.0;
};

struct FiniteDistribution {
    Index n = 0;
    Index r = 0;
    std::vector<Atom> atoms;

    // Shapes, nonnegative weights summing to 1 (within 1e-9), binary y and a.
    void validate() const;
    // One weighted row per atom; z is N/A where a_i = 0.
    LabeledDataset to_dataset() const;
};

// E[Y | B=b, A_I = 1, Z_I = z_I] with I = I(a), marginalizing the availability
// and values of features outside I.
double brute_force_off(const FiniteDistribution& dist, std::span<const int> b, std::span<const int> a,
                       std::span<const int> z);
// E[Y | B=b].
double brute_force_base(const FiniteDistribution& dist, std::span<const int> b);
// Probability mass of the event conditioned on by brute_force_off.
double off_event_mass(const FiniteDistribution& dist, std::span<const int> b, std::span<const int> a,
                      std::span<const int> z);

namespace reference {

MultiModel fit_multi_serial(const LabeledDataset& ds, const SubmodelSpec& spec = {});
OffLrModel fit_off_lr_serial(const LabeledDataset& ds, const FitConfig& cfg = {});

} // namespace reference

} // namespace off

#endif // OFF_MODELS_HPP
