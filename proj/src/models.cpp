#include "off/models.hpp"

#include "off/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <optional>

namespace off {

// ---------------------------------------------------------------------------
// Submodels

GroupMeanModel GroupMeanModel::fit(const Matrix& X, const Vector& y, const Vector& weights)
{
    std::map<std::vector<double>, Group> groups;
    for (Index j = 0; j < X.rows(); ++j) {
        const double w = weights.size() == 0 ? 1.0 : weights(j);
        if (w <= 0.0) {
            continue;
        }
        std::vector<double> key(static_cast<std::size_t>(X.cols()));
        for (Index i = 0; i < X.cols(); ++i) {
            key[static_cast<std::size_t>(i)] = X(j, i);
        }
        auto& g = groups[key];
        g.weight += w;
        g.positive += w * y(j);
    }
    return from_groups(X.cols(), std::move(groups));
}

GroupMeanModel GroupMeanModel::from_groups(Index dim, std::map<std::vector<double>, Group> groups)
{
    GroupMeanModel m;
    m.dim_ = dim;
    double total = 0.0;
    double positive = 0.0;
    for (const auto& [key, g] : groups) {
        if (static_cast<Index>(key.size()) != dim) {
            throw Error(ErrorCode::DimensionMismatch, "group key length differs from model dimension");
        }
        total += g.weight;
        positive += g.positive;
    }
    if (!(total > 0.0)) {
        throw Error(ErrorCode::InsufficientSubset, "group mean model needs positive total weight");
    }
    m.overall_ = positive / total;
    m.groups_ = std::move(groups);
    return m;
}

double GroupMeanModel::predict(const Eigen::Ref<const Vector>& x) const
{
    if (x.size() != dim_) {
        throw Error(ErrorCode::DimensionMismatch, "group mean model expects " + std::to_string(dim_) + " inputs");
    }
    std::vector<double> key(x.data(), x.data() + x.size());
    auto it = groups_.find(key);
    if (it == groups_.end() || !(it->second.weight > 0.0)) {
        return overall_;
    }
    return it->second.positive / it->second.weight;
}

double predict_submodel(const Submodel& m, const Eigen::Ref<const Vector>& x)
{
    return std::visit(
        [&](const auto& model) -> double {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, LogisticParams>) {
                return predict_row(model, x);
            } else {
                return model.predict(x);
            }
        },
        m);
}

Index submodel_dim(const Submodel& m)
{
    return std::visit([](const auto& model) { return model.dim(); }, m);
}

Submodel fit_submodel(const SubmodelSpec& spec, const Matrix& X, const Vector& y, const Vector& weights)
{
    if (spec.kind == SubmodelKind::group_mean) {
        return GroupMeanModel::fit(X, y, weights);
    }
    try {
        return fit_logistic(X, y, spec.fit, weights).params;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::DegenerateLabels || e.code() == ErrorCode::Singular) {
            throw Error(ErrorCode::InsufficientSubset, e.what());
        }
        throw;
    }
}

Matrix subset_design(const LabeledDataset& ds, std::span<const Index> rows, SubsetKey key)
{
    const auto features = key.indices();
    const Index n = ds.n();
    Matrix X(static_cast<Index>(rows.size()), n + static_cast<Index>(features.size()));
    for (Index k = 0; k < X.rows(); ++k) {
        const Index j = rows[static_cast<std::size_t>(k)];
        X.row(k).head(n) = ds.base().row(j);
        for (std::size_t f = 0; f < features.size(); ++f) {
            X(k, n + static_cast<Index>(f)) = ds.optional_values()(j, features[f]);
        }
    }
    return X;
}

Vector subset_input(const Eigen::Ref<const Vector>& b, const Eigen::Ref<const Vector>& z, SubsetKey key)
{
    const auto features = key.indices();
    Vector x(b.size() + static_cast<Index>(features.size()));
    x.head(b.size()) = b;
    for (std::size_t f = 0; f < features.size(); ++f) {
        if (features[f] >= z.size()) {
            throw Error(ErrorCode::DimensionMismatch, "optional vector shorter than availability key");
        }
        x(b.size() + static_cast<Index>(f)) = z(features[f]);
    }
    return x;
}

namespace {

Vector gather(const Vector& v, std::span<const Index> rows)
{
    Vector out(static_cast<Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out(static_cast<Index>(k)) = v(rows[k]);
    }
    return out;
}

void check_row_shapes(const Schema& schema, const Eigen::Ref<const Vector>& b, SubsetKey available,
                      const Eigen::Ref<const Vector>& z)
{
    if (b.size() != schema.n() || z.size() != schema.r()) {
        throw Error(ErrorCode::DimensionMismatch, "input does not match schema (n=" + std::to_string(schema.n()) +
                                                      ", r=" + std::to_string(schema.r()) + ")");
    }
    if (schema.r() < 32 && (available.bits() >> schema.r()) != 0) {
        throw Error(ErrorCode::DimensionMismatch, "availability key names features beyond r");
    }
}

void check_schema(const Schema& expected, const LabeledDataset& ds)
{
    if (ds.n() != expected.n() || ds.r() != expected.r()) {
        throw Error(ErrorCode::DimensionMismatch, "dataset shape does not match the model's schema");
    }
}

template <class RowFn>
Vector predict_rows(const LabeledDataset& ds, RowFn&& row_fn)
{
    Vector out(ds.rows());
    for (Index j = 0; j < ds.rows(); ++j) {
        out(j) = row_fn(ds.base().row(j).transpose(), ds.subset(j), ds.optional_values().row(j).transpose());
    }
    return out;
}

enum class Schedule { parallel, serial };

MultiModel fit_multi_impl(const LabeledDataset& ds, const SubmodelSpec& spec, Schedule schedule)
{
    const Index r = ds.r();
    if (r > 20) {
        throw Error(ErrorCode::InvalidArgument, "multi model with r > 20 would need more than 2^20 fits");
    }
    const std::int64_t count = std::int64_t{1} << r;
    const Vector weights = ds.weights();
    std::vector<std::optional<Submodel>> fitted(static_cast<std::size_t>(count));
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(count));

    auto fit_one = [&](std::int64_t bits) {
        const SubsetKey key(static_cast<std::uint32_t>(bits));
        const auto rows = ds.rows_containing(key);
        try {
            fitted[static_cast<std::size_t>(bits)] =
                fit_submodel(spec, subset_design(ds, rows, key), gather(ds.labels(), rows), gather(weights, rows));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::InsufficientSubset) {
                failures[static_cast<std::size_t>(bits)] = std::current_exception();
            }
        } catch (...) {
            failures[static_cast<std::size_t>(bits)] = std::current_exception();
        }
    };

    if (schedule == Schedule::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t bits = 0; bits < count; ++bits) {
            fit_one(bits);
        }
    } else {
        for (std::int64_t bits = 0; bits < count; ++bits) {
            fit_one(bits);
        }
    }
    for (const auto& failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    if (!fitted[0]) {
        throw Error(ErrorCode::InsufficientSubset,
                    "base-feature submodel cannot be fitted (" + std::to_string(ds.rows()) + " rows)");
    }

    int fit_count = 0;
    std::map<SubsetKey, MultiModel::Entry> entries;
    for (std::int64_t bits = 0; bits < count; ++bits) {
        const SubsetKey key(static_cast<std::uint32_t>(bits));
        if (fitted[static_cast<std::size_t>(bits)]) {
            ++fit_count;
            entries.emplace(key, MultiModel::Entry{key, *fitted[static_cast<std::size_t>(bits)]});
            continue;
        }
        // Largest fitted proper subset; ties go to the smallest bit pattern.
        std::optional<SubsetKey> best;
        for (std::int64_t sub = 0; sub < count; ++sub) {
            const SubsetKey cand(static_cast<std::uint32_t>(sub));
            if (cand == key || !cand.is_subset_of(key) || !fitted[static_cast<std::size_t>(sub)]) {
                continue;
            }
            if (!best || cand.size() > best->size()) {
                best = cand;
            }
        }
        entries.emplace(key, MultiModel::Entry{*best, *fitted[best->bits()]});
    }
    return MultiModel(ds.schema(), spec.kind, std::move(entries), fit_count);
}

LogisticParams fit_params(const Matrix& X, const Vector& y, const Vector& w, const FitConfig& cfg, Schedule schedule)
{
    if (schedule == Schedule::serial) {
        return reference::fit_logistic_serial(X, y, cfg, w).params;
    }
    return fit_logistic(X, y, cfg, w).params;
}

OffLrModel fit_off_lr_impl(const LabeledDataset& ds, const FitConfig& cfg, Schedule schedule)
{
    const Index r = ds.r();
    const Vector weights = ds.weights();
    std::vector<LogisticParams> single(static_cast<std::size_t>(r));
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(r + 1));
    LogisticParams base;

    auto fit_one = [&](Index task) {
        try {
            if (task == 0) {
                base = fit_params(ds.base(), ds.labels(), weights, cfg, schedule);
                return;
            }
            const Index k = task - 1;
            const SubsetKey key(1U << k);
            const auto rows = ds.rows_containing(key);
            try {
                single[static_cast<std::size_t>(k)] = fit_params(subset_design(ds, rows, key),
                                                                 gather(ds.labels(), rows), gather(weights, rows),
                                                                 cfg, schedule);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::DegenerateLabels || e.code() == ErrorCode::Singular) {
                    throw Error(ErrorCode::InsufficientSubset, "optional feature '" + ds.schema().optional_names[k] +
                                                                   "' (" + std::to_string(rows.size()) +
                                                                   " rows): " + e.what());
                }
                throw;
            }
        } catch (...) {
            failures[static_cast<std::size_t>(task)] = std::current_exception();
        }
    };

    if (schedule == Schedule::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (Index task = 0; task <= r; ++task) {
            fit_one(task);
        }
    } else {
        for (Index task = 0; task <= r; ++task) {
            fit_one(task);
        }
    }
    for (const auto& failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    OffLrModel model = combine_off_lr(ds.schema(), base, single);
    model.fit_count = static_cast<int>(r + 1);
    return model;
}

} // namespace

// ---------------------------------------------------------------------------
// Multi model

MultiModel::MultiModel(Schema schema, SubmodelKind kind, std::map<SubsetKey, Entry> entries, int fit_count)
    : schema_(std::move(schema))
    , kind_(kind)
    , entries_(std::move(entries))
    , fit_count_(fit_count)
{
    const auto expected = std::size_t{1} << schema_.r();
    if (entries_.size() != expected) {
        throw Error(ErrorCode::InvalidArgument, "multi model needs exactly 2^r submodels");
    }
    for (const auto& [key, entry] : entries_) {
        if (!entry.source.is_subset_of(key) || submodel_dim(entry.model) != schema_.n() + entry.source.size()) {
            throw Error(ErrorCode::DimensionMismatch, "submodel for " + key.to_bitstring(schema_.r()) +
                                                          " has inconsistent inputs");
        }
    }
}

const MultiModel::Entry& MultiModel::entry(SubsetKey key) const
{
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw Error(ErrorCode::UnknownSubset, key.to_bitstring(schema_.r()));
    }
    return it->second;
}

std::map<SubsetKey, SubsetKey> MultiModel::fallbacks() const
{
    std::map<SubsetKey, SubsetKey> out;
    for (const auto& [key, entry] : entries_) {
        if (entry.source != key) {
            out.emplace(key, entry.source);
        }
    }
    return out;
}

double MultiModel::predict(const Eigen::Ref<const Vector>& b, SubsetKey available,
                           const Eigen::Ref<const Vector>& z) const
{
    check_row_shapes(schema_, b, available, z);
    const Entry& e = entry(available);
    return predict_submodel(e.model, subset_input(b, z, e.source));
}

Vector MultiModel::predict(const LabeledDataset& ds) const
{
    check_schema(schema_, ds);
    return predict_rows(ds, [&](const auto& b, SubsetKey key, const auto& z) { return predict(b, key, z); });
}

MultiModel fit_multi(const LabeledDataset& ds, const SubmodelSpec& spec)
{
    return fit_multi_impl(ds, spec, Schedule::parallel);
}

MultiModel reference::fit_multi_serial(const LabeledDataset& ds, const SubmodelSpec& spec)
{
    return fit_multi_impl(ds, spec, Schedule::serial);
}

// ---------------------------------------------------------------------------
// OFF-LR

double OffLrModel::log_odds(const Eigen::Ref<const Vector>& b, SubsetKey available,
                            const Eigen::Ref<const Vector>& z) const
{
    check_row_shapes(schema, b, available, z);
    double eta = w.dot(b) + t;
    for (Index i = 0; i < r(); ++i) {
        if (available.contains(i)) {
            eta += omega.row(i).dot(b) + beta(i) * z(i) + s(i);
        }
    }
    return eta;
}

double OffLrModel::predict(const Eigen::Ref<const Vector>& b, SubsetKey available,
                           const Eigen::Ref<const Vector>& z) const
{
    return sigmoid(log_odds(b, available, z));
}

Vector OffLrModel::predict(const LabeledDataset& ds) const
{
    check_schema(schema, ds);
    return predict_rows(ds, [&](const auto& b, SubsetKey key, const auto& z) { return predict(b, key, z); });
}

LogisticParams OffLrModel::subset_params(SubsetKey key) const
{
    const auto features = key.indices();
    LogisticParams p{Vector(n() + static_cast<Index>(features.size())), t};
    p.weights.head(n()) = w;
    for (std::size_t f = 0; f < features.size(); ++f) {
        const Index i = features[f];
        p.weights.head(n()) += omega.row(i).transpose();
        p.weights(n() + static_cast<Index>(f)) = beta(i);
        p.intercept += s(i);
    }
    return p;
}

OffLrModel combine_off_lr(Schema schema, const LogisticParams& base, std::span<const LogisticParams> single)
{
    const Index n = base.dim();
    const auto r = static_cast<Index>(single.size());
    if (schema.n() != n || schema.r() != r) {
        throw Error(ErrorCode::DimensionMismatch, "fits do not match schema");
    }
    OffLrModel m;
    m.schema = std::move(schema);
    m.w = base.weights;
    m.t = base.intercept;
    m.omega.resize(r, n);
    m.beta.resize(r);
    m.s.resize(r);
    for (Index k = 0; k < r; ++k) {
        const auto& fit = single[static_cast<std::size_t>(k)];
        if (fit.dim() != n + 1) {
            throw Error(ErrorCode::DimensionMismatch, "single-feature fit must have n + 1 weights");
        }
        m.omega.row(k) = (fit.weights.head(n) - base.weights).transpose();
        m.beta(k) = fit.weights(n);
        m.s(k) = fit.intercept - base.intercept;
    }
    return m;
}

OffLrModel fit_off_lr(const LabeledDataset& ds, const FitConfig& cfg)
{
    return fit_off_lr_impl(ds, cfg, Schedule::parallel);
}

OffLrModel reference::fit_off_lr_serial(const LabeledDataset& ds, const FitConfig& cfg)
{
    return fit_off_lr_impl(ds, cfg, Schedule::serial);
}

// ---------------------------------------------------------------------------
// Naive Bayes

namespace {

double log_ratio(double num_count, double num_total, double den_count, double den_total)
{
    if (num_count == 0.0 && den_count == 0.0) {
        return 0.0; // event never observed in either class
    }
    return std::log(num_count / num_total) - std::log(den_count / den_total);
}

void require_binary(double v, const std::string& column)
{
    if (v != 0.0 && v != 1.0) {
        throw Error(ErrorCode::NonBinaryFeature, column);
    }
}

} // namespace

NbOffModel fit_nb_off(const LabeledDataset& ds, double laplace_alpha)
{
    if (!(laplace_alpha >= 0.0) || !std::isfinite(laplace_alpha)) {
        throw Error(ErrorCode::InvalidArgument, "laplace_alpha must be finite and >= 0");
    }
    const Index n = ds.n();
    const Index r = ds.r();
    const Vector w = ds.weights();
    std::array<double, 2> mass{0.0, 0.0};
    Matrix base_counts = Matrix::Zero(n, 4);  // column 2*y + v
    Matrix opt_counts = Matrix::Zero(r, 4);   // available cells only
    for (Index j = 0; j < ds.rows(); ++j) {
        const int y = ds.labels()(j) != 0.0 ? 1 : 0;
        mass[static_cast<std::size_t>(y)] += w(j);
        for (Index i = 0; i < n; ++i) {
            const double v = ds.base()(j, i);
            require_binary(v, ds.schema().base_names[static_cast<std::size_t>(i)]);
            base_counts(i, 2 * y + static_cast<Index>(v)) += w(j);
        }
        for (Index i = 0; i < r; ++i) {
            if (!ds.available(j, i)) {
                continue;
            }
            const double v = ds.optional_values()(j, i);
            require_binary(v, ds.schema().optional_names[static_cast<std::size_t>(i)]);
            opt_counts(i, 2 * y + static_cast<Index>(v)) += w(j);
        }
    }
    if (!(mass[0] > 0.0) || !(mass[1] > 0.0)) {
        throw Error(ErrorCode::DegenerateLabels, "naive Bayes needs both classes");
    }
    const double a = laplace_alpha;
    NbOffModel m;
    m.schema = ds.schema();
    m.prior_log_odds = std::log(mass[1] + a) - std::log(mass[0] + a);
    m.base_log_ratio.resize(n, 2);
    m.optional_log_ratio.resize(r, 2);
    for (Index i = 0; i < n; ++i) {
        for (Index v = 0; v < 2; ++v) {
            m.base_log_ratio(i, v) =
                log_ratio(base_counts(i, 2 + v) + a, mass[1] + 2 * a, base_counts(i, v) + a, mass[0] + 2 * a);
        }
    }
    for (Index i = 0; i < r; ++i) {
        for (Index v = 0; v < 2; ++v) {
            m.optional_log_ratio(i, v) =
                log_ratio(opt_counts(i, 2 + v) + a, mass[1] + 3 * a, opt_counts(i, v) + a, mass[0] + 3 * a);
        }
    }
    return m;
}

double NbOffModel::predict(const Eigen::Ref<const Vector>& b, SubsetKey available,
                           const Eigen::Ref<const Vector>& z) const
{
    check_row_shapes(schema, b, available, z);
    double eta = prior_log_odds;
    for (Index i = 0; i < b.size(); ++i) {
        require_binary(b(i), schema.base_names[static_cast<std::size_t>(i)]);
        eta += base_log_ratio(i, static_cast<Index>(b(i)));
    }
    for (Index i = 0; i < z.size(); ++i) {
        if (available.contains(i)) {
            require_binary(z(i), schema.optional_names[static_cast<std::size_t>(i)]);
            eta += optional_log_ratio(i, static_cast<Index>(z(i)));
        }
    }
    return sigmoid(eta);
}

Vector NbOffModel::predict(const LabeledDataset& ds) const
{
    check_schema(schema, ds);
    return predict_rows(ds, [&](const auto& b, SubsetKey key, const auto& z) { return predict(b, key, z); });
}

// ---------------------------------------------------------------------------
// Baselines

CspModel fit_csp(const LabeledDataset& ds, const SubmodelSpec& spec)
{
    if (ds.r() != 1) {
        throw Error(ErrorCode::InvalidArgument, "CSP model is defined for exactly one optional feature");
    }
    const auto providers = ds.rows_containing(SubsetKey(1U));
    if (providers.empty()) {
        throw Error(ErrorCode::InsufficientSubset, "no rows provide the optional feature");
    }
    const Vector y = gather(ds.labels(), providers);
    const Vector w = gather(ds.weights(), providers);
    return CspModel{ds.schema(), fit_submodel(spec, subset_design(ds, providers, SubsetKey(0U)), y, w),
                    fit_submodel(spec, subset_design(ds, providers, SubsetKey(1U)), y, w)};
}

double CspModel::predict(const Eigen::Ref<const Vector>& b, SubsetKey available,
                         const Eigen::Ref<const Vector>& z) const
{
    check_row_shapes(schema, b, available, z);
    if (available.contains(0)) {
        return predict_submodel(provider_full, subset_input(b, z, available));
    }
    return predict_submodel(provider_base, b);
}

Vector CspModel::predict(const LabeledDataset& ds) const
{
    check_schema(schema, ds);
    return predict_rows(ds, [&](const auto& b, SubsetKey key, const auto& z) { return predict(b, key, z); });
}

BaseModel fit_base(const LabeledDataset& ds, const SubmodelSpec& spec)
{
    if (spec.kind == SubmodelKind::logistic) {
        return BaseModel{ds.schema(), fit_logistic(drop_optional(ds), ds.labels(), spec.fit, ds.weights()).params};
    }
    return BaseModel{ds.schema(), GroupMeanModel::fit(drop_optional(ds), ds.labels(), ds.weights())};
}

Vector BaseModel::predict(const LabeledDataset& ds) const
{
    check_schema(schema, ds);
    if (const auto* p = std::get_if<LogisticParams>(&model)) {
        return predict_proba(*p, ds.base());
    }
    Vector out(ds.rows());
    for (Index j = 0; j < ds.rows(); ++j) {
        out(j) = predict_submodel(model, ds.base().row(j).transpose());
    }
    return out;
}

ImputedModel fit_imputed(const LabeledDataset& ds, const FitConfig& cfg, bool add_indicator)
{
    return ImputedModel{ds.schema(), fit_logistic(impute_zero(ds, add_indicator), ds.labels(), cfg, ds.weights()).params,
                        add_indicator};
}

Vector ImputedModel::predict(const LabeledDataset& ds) const
{
    check_schema(schema, ds);
    return predict_proba(params, impute_zero(ds, add_indicator));
}

// ---------------------------------------------------------------------------
// Finite distributions

void FiniteDistribution::validate() const
{
    double total = 0.0;
    for (const auto& atom : atoms) {
        if (static_cast<Index>(atom.b.size()) != n || static_cast<Index>(atom.a.size()) != r ||
            static_cast<Index>(atom.z.size()) != r) {
            throw Error(ErrorCode::DimensionMismatch, "atom shape does not match (n, r)");
        }
        if ((atom.y != 0 && atom.y != 1) || !(atom.weight >= 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "atoms need y in {0,1} and nonnegative weight");
        }
        for (int bit : atom.a) {
            if (bit != 0 && bit != 1) {
                throw Error(ErrorCode::InvalidArgument, "availability bits must be 0/1");
            }
        }
        total += atom.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument, "atom weights must sum to 1");
    }
}

LabeledDataset FiniteDistribution::to_dataset() const
{
    validate();
    Schema schema;
    for (Index i = 0; i < n; ++i) {
        schema.base_names.push_back("b" + std::to_string(i + 1));
    }
    for (Index i = 0; i < r; ++i) {
        schema.optional_names.push_back("z" + std::to_string(i + 1));
    }
    schema.label_name = "y";
    const auto N = static_cast<Index>(atoms.size());
    Matrix base(N, n);
    Matrix opt(N, r);
    MaskMatrix mask(N, r);
    Vector labels(N);
    Vector weights(N);
    for (Index j = 0; j < N; ++j) {
        const auto& atom = atoms[static_cast<std::size_t>(j)];
        for (Index i = 0; i < n; ++i) {
            base(j, i) = atom.b[static_cast<std::size_t>(i)];
        }
        for (Index i = 0; i < r; ++i) {
            const bool present = atom.a[static_cast<std::size_t>(i)] != 0;
            mask(j, i) = present ? 1 : 0;
            opt(j, i) = present ? atom.z[static_cast<std::size_t>(i)] : kNotAvailable;
        }
        labels(j) = atom.y;
        weights(j) = atom.weight;
    }
    return LabeledDataset(std::move(schema), std::move(base), std::move(opt), std::move(mask), std::move(labels),
                          std::move(weights));
}

namespace {

bool matches_off_event(const Atom& atom, std::span<const int> b, std::span<const int> a, std::span<const int> z)
{
    if (!std::equal(b.begin(), b.end(), atom.b.begin(), atom.b.end())) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != 0 && (atom.a[i] == 0 || atom.z[i] != z[i])) {
            return false;
        }
    }
    return true;
}

void check_query(const FiniteDistribution& dist, std::span<const int> b, std::span<const int> a,
                 std::span<const int> z)
{
    if (static_cast<Index>(b.size()) != dist.n || static_cast<Index>(a.size()) != dist.r ||
        static_cast<Index>(z.size()) != dist.r) {
        throw Error(ErrorCode::DimensionMismatch, "query shape does not match distribution");
    }
}

} // namespace

double off_event_mass(const FiniteDistribution& dist, std::span<const int> b, std::span<const int> a,
                      std::span<const int> z)
{
    check_query(dist, b, a, z);
    double mass = 0.0;
    for (const auto& atom : dist.atoms) {
        if (matches_off_event(atom, b, a, z)) {
            mass += atom.weight;
        }
    }
    return mass;
}

double brute_force_off(const FiniteDistribution& dist, std::span<const int> b, std::span<const int> a,
                       std::span<const int> z)
{
    check_query(dist, b, a, z);
    double mass = 0.0;
    double positive = 0.0;
    for (const auto& atom : dist.atoms) {
        if (matches_off_event(atom, b, a, z)) {
            mass += atom.weight;
            positive += atom.weight * atom.y;
        }
    }
    if (!(mass > 0.0)) {
        throw Error(ErrorCode::ZeroMassEvent, "conditioning event has zero probability");
    }
    return positive / mass;
}

double brute_force_base(const FiniteDistribution& dist, std::span<const int> b)
{
    const std::vector<int> none(static_cast<std::size_t>(dist.r), 0);
    return brute_force_off(dist, b, none, none);
}

} // namespace off
