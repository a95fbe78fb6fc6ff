#include "off/dataset.hpp"

#include "off/error.hpp"
#include "off/glm.hpp"
#include "off/parallel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace off {

void Schema::validate() const
{
    std::set<std::string> seen;
    auto check = [&](const std::string& name) {
        if (name.empty()) {
            throw Error(ErrorCode::InvalidArgument, "empty column name in schema");
        }
        if (!seen.insert(name).second) {
            throw Error(ErrorCode::InvalidArgument, "duplicate column name '" + name + "'");
        }
    };
    for (const auto& name : base_names) {
        check(name);
    }
    for (const auto& name : optional_names) {
        check(name);
    }
    if (!label_name.empty()) {
        check(label_name);
    }
    if (base_names.empty() && optional_names.empty()) {
        throw Error(ErrorCode::InvalidArgument, "schema needs at least one feature");
    }
    if (r() > SubsetKey::kMaxFeatures) {
        throw Error(ErrorCode::InvalidArgument, "too many optional features");
    }
}

SubsetKey SubsetKey::from_mask_row(const MaskMatrix& mask, Index row)
{
    std::uint32_t bits = 0;
    for (Index i = 0; i < mask.cols(); ++i) {
        if (mask(row, i) != 0) {
            bits |= 1U << i;
        }
    }
    return SubsetKey(bits);
}

SubsetKey SubsetKey::from_bitstring(std::string_view bits)
{
    if (bits.size() > static_cast<std::size_t>(kMaxFeatures)) {
        throw Error(ErrorCode::InvalidArgument, "subset bitstring too long");
    }
    std::uint32_t out = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            out |= 1U << i;
        } else if (bits[i] != '0') {
            throw Error(ErrorCode::InvalidArgument, "subset bitstring must contain only 0/1");
        }
    }
    return SubsetKey(out);
}

int SubsetKey::size() const noexcept { return std::popcount(bits_); }

std::vector<Index> SubsetKey::indices() const
{
    std::vector<Index> out;
    for (Index i = 0; i < kMaxFeatures; ++i) {
        if (contains(i)) {
            out.push_back(i);
        }
    }
    return out;
}

std::string SubsetKey::to_bitstring(Index r) const
{
    std::string s(static_cast<std::size_t>(r), '0');
    for (Index i = 0; i < r; ++i) {
        if (contains(i)) {
            s[static_cast<std::size_t>(i)] = '1';
        }
    }
    return s;
}

LabeledDataset::LabeledDataset(Schema schema, Matrix base, Matrix optional_values, MaskMatrix mask, Vector labels,
                               Vector weights)
    : schema_(std::move(schema))
    , base_(std::move(base))
    , optional_(std::move(optional_values))
    , mask_(std::move(mask))
    , labels_(std::move(labels))
    , weights_(std::move(weights))
{
    schema_.validate();
    const Index N = labels_.size();
    if (base_.rows() != N || optional_.rows() != N || mask_.rows() != N) {
        throw Error(ErrorCode::DimensionMismatch, "row counts of base, optional, mask and labels differ");
    }
    if (base_.cols() != schema_.n() || optional_.cols() != schema_.r() || mask_.cols() != schema_.r()) {
        throw Error(ErrorCode::DimensionMismatch, "column counts disagree with schema");
    }
    if (weights_.size() != 0 && weights_.size() != N) {
        throw Error(ErrorCode::DimensionMismatch, "weight vector length differs from row count");
    }
    for (Index j = 0; j < N; ++j) {
        if (labels_(j) != 0.0 && labels_(j) != 1.0) {
            throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1 (row " + std::to_string(j) + ")");
        }
        for (Index i = 0; i < base_.cols(); ++i) {
            if (!std::isfinite(base_(j, i))) {
                throw Error(ErrorCode::NaInBaseFeature,
                            "row " + std::to_string(j) + " column '" + schema_.base_names[i] + "'");
            }
        }
        for (Index i = 0; i < optional_.cols(); ++i) {
            if (mask_(j, i) > 1) {
                throw Error(ErrorCode::InvalidArgument, "mask entries must be 0 or 1");
            }
            if (mask_(j, i) == 0) {
                optional_(j, i) = kNotAvailable;
            } else if (!std::isfinite(optional_(j, i))) {
                throw Error(ErrorCode::InvalidArgument, "available optional value is not finite (row " +
                                                            std::to_string(j) + ")");
            }
        }
        if (weights_.size() != 0 && !(weights_(j) >= 0.0 && std::isfinite(weights_(j)))) {
            throw Error(ErrorCode::InvalidArgument, "weights must be finite and nonnegative");
        }
    }
}

Vector LabeledDataset::weights() const
{
    if (weighted()) {
        return weights_;
    }
    return Vector::Ones(rows());
}

LabeledDataset LabeledDataset::select_rows(std::span<const Index> rows) const
{
    const Index m = static_cast<Index>(rows.size());
    Matrix base(m, n());
    Matrix opt(m, r());
    MaskMatrix mask(m, r());
    Vector labels(m);
    Vector weights(weighted() ? m : 0);
    for (Index k = 0; k < m; ++k) {
        const Index j = rows[static_cast<std::size_t>(k)];
        base.row(k) = base_.row(j);
        opt.row(k) = optional_.row(j);
        mask.row(k) = mask_.row(j);
        labels(k) = labels_(j);
        if (weighted()) {
            weights(k) = weights_(j);
        }
    }
    return LabeledDataset(schema_, std::move(base), std::move(opt), std::move(mask), std::move(labels),
                          std::move(weights));
}

std::vector<Index> LabeledDataset::rows_containing(SubsetKey key) const
{
    std::vector<Index> out;
    for (Index j = 0; j < rows(); ++j) {
        if (key.is_subset_of(subset(j))) {
            out.push_back(j);
        }
    }
    return out;
}

std::vector<Index> LabeledDataset::rows_with_pattern(SubsetKey key) const
{
    std::vector<Index> out;
    for (Index j = 0; j < rows(); ++j) {
        if (subset(j) == key) {
            out.push_back(j);
        }
    }
    return out;
}

Index LabeledDataset::optional_index(std::string_view name) const
{
    const auto& names = schema_.optional_names;
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw Error(ErrorCode::MissingColumn, std::string(name));
    }
    return static_cast<Index>(it - names.begin());
}

Index LabeledDataset::base_index(std::string_view name) const
{
    const auto& names = schema_.base_names;
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw Error(ErrorCode::MissingColumn, std::string(name));
    }
    return static_cast<Index>(it - names.begin());
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string trim(std::string_view s)
{
    auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    auto last = s.find_last_not_of(" \t\r");
    std::string out(s.substr(first, last - first + 1));
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
        out = out.substr(1, out.size() - 2);
    }
    return out;
}

std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string current;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
            current.push_back(c);
        } else if (c == ',' && !quoted) {
            cells.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    cells.push_back(trim(current));
    return cells;
}

std::optional<double> parse_number(const std::string& cell)
{
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (first != last && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::string format_number(double v)
{
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), ptr);
}

} // namespace

LabeledDataset load_csv(const std::filesystem::path& path, const Schema& schema, const CsvOptions& options)
{
    schema.validate();
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::Io, "empty CSV file '" + path.string() + "'");
    }
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
        line = line.substr(3); // UTF-8 BOM
    }
    const auto header = split_line(line);
    auto column_of = [&](const std::string& name) -> std::size_t {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw Error(ErrorCode::MissingColumn, name);
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    std::vector<std::size_t> base_cols;
    std::vector<std::size_t> opt_cols;
    for (const auto& name : schema.base_names) {
        base_cols.push_back(column_of(name));
    }
    for (const auto& name : schema.optional_names) {
        opt_cols.push_back(column_of(name));
    }
    const std::size_t label_col = column_of(schema.label_name);

    std::vector<std::vector<double>> base_rows;
    std::vector<std::vector<double>> opt_rows;
    std::vector<std::vector<std::uint8_t>> mask_rows;
    std::vector<std::string> raw_labels;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        ++row;
        const auto cells = split_line(line);
        if (cells.size() != header.size()) {
            throw Error(ErrorCode::NonNumericCell,
                        "row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(header.size()));
        }
        std::vector<double> b;
        for (std::size_t k = 0; k < base_cols.size(); ++k) {
            const auto& cell = cells[base_cols[k]];
            if (cell == options.na_token) {
                throw Error(ErrorCode::NaInBaseFeature,
                            "row " + std::to_string(row) + " column '" + schema.base_names[k] + "'");
            }
            auto v = parse_number(cell);
            if (!v) {
                throw Error(ErrorCode::NonNumericCell,
                            "row " + std::to_string(row) + " column '" + schema.base_names[k] + "': '" + cell + "'");
            }
            b.push_back(*v);
        }
        std::vector<double> z;
        std::vector<std::uint8_t> a;
        for (std::size_t k = 0; k < opt_cols.size(); ++k) {
            const auto& cell = cells[opt_cols[k]];
            if (cell == options.na_token) {
                z.push_back(kNotAvailable);
                a.push_back(0);
                continue;
            }
            auto v = parse_number(cell);
            if (!v) {
                throw Error(ErrorCode::NonNumericCell, "row " + std::to_string(row) + " column '" +
                                                           schema.optional_names[k] + "': '" + cell + "'");
            }
            z.push_back(*v);
            a.push_back(1);
        }
        base_rows.push_back(std::move(b));
        opt_rows.push_back(std::move(z));
        mask_rows.push_back(std::move(a));
        raw_labels.push_back(cells[label_col]);
    }

    // Labels: numeric 0/1 pass through; otherwise exactly two distinct values.
    std::set<std::string> distinct(raw_labels.begin(), raw_labels.end());
    if (distinct.size() > 2 || distinct.empty()) {
        throw Error(ErrorCode::DegenerateLabels, "label column must contain exactly two distinct values, found " +
                                                     std::to_string(distinct.size()));
    }
    std::string positive;
    bool numeric01 = std::all_of(distinct.begin(), distinct.end(), [](const std::string& s) {
        auto v = parse_number(s);
        return v && (*v == 0.0 || *v == 1.0);
    });
    if (options.positive_label) {
        positive = *options.positive_label;
        if (!distinct.contains(positive)) {
            throw Error(ErrorCode::DegenerateLabels, "positive label '" + positive + "' does not occur");
        }
    } else if (!numeric01) {
        positive = *distinct.rbegin();
    }

    const Index N = static_cast<Index>(raw_labels.size());
    Matrix base(N, schema.n());
    Matrix opt(N, schema.r());
    MaskMatrix mask(N, schema.r());
    Vector labels(N);
    for (Index j = 0; j < N; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        for (Index i = 0; i < schema.n(); ++i) {
            base(j, i) = base_rows[uj][static_cast<std::size_t>(i)];
        }
        for (Index i = 0; i < schema.r(); ++i) {
            opt(j, i) = opt_rows[uj][static_cast<std::size_t>(i)];
            mask(j, i) = mask_rows[uj][static_cast<std::size_t>(i)];
        }
        if (positive.empty()) {
            labels(j) = *parse_number(raw_labels[uj]);
        } else {
            labels(j) = raw_labels[uj] == positive ? 1.0 : 0.0;
        }
    }
    return LabeledDataset(schema, std::move(base), std::move(opt), std::move(mask), std::move(labels));
}

void save_csv(const LabeledDataset& ds, const std::filesystem::path& path, std::string_view na_token)
{
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
    }
    write_csv(ds, out, na_token);
}

void write_csv(const LabeledDataset& ds, std::ostream& out, std::string_view na_token)
{
    const auto& s = ds.schema();
    bool first = true;
    auto sep = [&] {
        if (!first) {
            out << ',';
        }
        first = false;
    };
    for (const auto& name : s.base_names) {
        sep();
        out << name;
    }
    for (const auto& name : s.optional_names) {
        sep();
        out << name;
    }
    sep();
    out << s.label_name << '\n';
    for (Index j = 0; j < ds.rows(); ++j) {
        first = true;
        for (Index i = 0; i < ds.n(); ++i) {
            sep();
            out << format_number(ds.base()(j, i));
        }
        for (Index i = 0; i < ds.r(); ++i) {
            sep();
            if (ds.available(j, i)) {
                out << format_number(ds.optional_values()(j, i));
            } else {
                out << na_token;
            }
        }
        sep();
        out << (ds.labels()(j) != 0.0 ? 1 : 0) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Transformations

namespace {

double available_mean(const LabeledDataset& ds, Index feature)
{
    std::vector<double> values;
    for (Index j = 0; j < ds.rows(); ++j) {
        if (ds.available(j, feature)) {
            values.push_back(ds.optional_values()(j, feature));
        }
    }
    if (values.empty()) {
        throw Error(ErrorCode::EmptyDataset, "feature '" + ds.schema().optional_names[feature] + "' has no values");
    }
    return parallel::pairwise_sum(values) / static_cast<double>(values.size());
}

} // namespace

LabeledDataset inject_availability(const LabeledDataset& ds, const InjectionSpec& spec, std::uint64_t seed)
{
    Matrix opt = ds.optional_values();
    MaskMatrix mask = ds.mask();
    for (const auto& target : spec.features) {
        const Index i = ds.optional_index(target.feature);
        if (!std::isfinite(target.slope) || (target.center && !std::isfinite(*target.center))) {
            throw Error(ErrorCode::InvalidArgument, "injection slope/center must be finite");
        }
        for (Index j = 0; j < ds.rows(); ++j) {
            if (!ds.available(j, i)) {
                throw Error(ErrorCode::AlreadyMissing, target.feature);
            }
        }
        const double center = target.center ? *target.center : available_mean(ds, i);
        // One stream per optional column so that adding a target does not shift others.
        std::mt19937_64 rng(parallel::mix_seed(seed, static_cast<std::uint64_t>(i)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (Index j = 0; j < ds.rows(); ++j) {
            const double p_missing = sigmoid(target.slope * (ds.optional_values()(j, i) - center));
            if (unit(rng) < p_missing) {
                mask(j, i) = 0;
                opt(j, i) = kNotAvailable;
            }
        }
    }
    return LabeledDataset(ds.schema(), ds.base(), std::move(opt), std::move(mask), ds.labels(),
                          ds.weighted() ? ds.weights() : Vector{});
}

double standardized_slope(const LabeledDataset& ds, std::string_view optional_feature, int sign)
{
    const Index i = ds.optional_index(optional_feature);
    const double mean = available_mean(ds, i);
    std::vector<double> sq;
    for (Index j = 0; j < ds.rows(); ++j) {
        if (ds.available(j, i)) {
            const double d = ds.optional_values()(j, i) - mean;
            sq.push_back(d * d);
        }
    }
    if (sq.size() < 2) {
        throw Error(ErrorCode::EmptyDataset, "need two values to estimate a standard deviation");
    }
    const double sd = std::sqrt(parallel::pairwise_sum(sq) / static_cast<double>(sq.size() - 1));
    if (!(sd > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "feature '" + std::string(optional_feature) + "' is constant");
    }
    return (sign < 0 ? -1.0 : 1.0) / sd;
}

Matrix impute_zero(const LabeledDataset& ds, bool add_indicator)
{
    const Index n = ds.n();
    const Index r = ds.r();
    Matrix X(ds.rows(), n + r + (add_indicator ? r : 0));
    X.leftCols(n) = ds.base();
    for (Index j = 0; j < ds.rows(); ++j) {
        for (Index i = 0; i < r; ++i) {
            const bool present = ds.available(j, i);
            X(j, n + i) = present ? ds.optional_values()(j, i) : 0.0;
            if (add_indicator) {
                X(j, n + r + i) = present ? 1.0 : 0.0;
            }
        }
    }
    return X;
}

Matrix drop_optional(const LabeledDataset& ds) { return ds.base(); }

int select_optional_count(Index train_rows, Index min_samples)
{
    if (min_samples < 1 || train_rows < min_samples) {
        throw Error(ErrorCode::InvalidArgument, "select_optional_count needs train_rows >= min_samples >= 1");
    }
    int r = 0;
    // floor(train / 2^k) >= min  <=>  train / 2^k >= min for integer min
    while (r < SubsetKey::kMaxFeatures && (train_rows >> (r + 1)) >= min_samples) {
        ++r;
    }
    return r;
}

Index test_size_for(Index rows, double fraction)
{
    const double exact = (1.0 - fraction) * static_cast<double>(rows);
    return static_cast<Index>(std::floor(exact + 1e-9 * std::max(1.0, exact)));
}

std::pair<LabeledDataset, LabeledDataset> split_train_test(const LabeledDataset& ds, double fraction,
                                                           std::uint64_t seed)
{
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "split fraction must lie in (0, 1)");
    }
    const Index N = ds.rows();
    const Index test_size = test_size_for(N, fraction);
    const Index train_size = N - test_size;
    if (test_size <= 0 || train_size <= 0) {
        throw Error(ErrorCode::EmptySplit, "split of " + std::to_string(N) + " rows at fraction " +
                                               std::to_string(fraction) + " leaves an empty part");
    }
    std::vector<Index> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Index> train(order.begin(), order.begin() + train_size);
    std::vector<Index> test(order.begin() + train_size, order.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {ds.select_rows(train), ds.select_rows(test)};
}

namespace {

double accuracy(const Vector& scores, const Vector& y)
{
    Index hits = 0;
    for (Index j = 0; j < y.size(); ++j) {
        const double predicted = scores(j) >= 0.5 ? 1.0 : 0.0;
        hits += predicted == y(j) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(y.size());
}

void require_both_classes(const Vector& y, const char* part)
{
    const double s = y.sum();
    if (s == 0.0 || s == static_cast<double>(y.size())) {
        throw Error(ErrorCode::DegenerateLabels, std::string(part) + " split contains a single class");
    }
}

Matrix without_column(const Matrix& X, Index col)
{
    Matrix out(X.rows(), X.cols() - 1);
    out.leftCols(col) = X.leftCols(col);
    out.rightCols(X.cols() - col - 1) = X.rightCols(X.cols() - col - 1);
    return out;
}

} // namespace

std::vector<std::string> rank_features_by_drop(const LabeledDataset& ds, const FitFn& fit, std::uint64_t seed)
{
    std::vector<std::string> names = ds.schema().base_names;
    names.insert(names.end(), ds.schema().optional_names.begin(), ds.schema().optional_names.end());
    if (names.size() <= 1) {
        return names;
    }
    auto [train, test] = split_train_test(ds, 0.8, seed);
    require_both_classes(train.labels(), "train");
    require_both_classes(test.labels(), "test");
    const Matrix Xtr = impute_zero(train, false);
    const Matrix Xte = impute_zero(test, false);
    const double full = accuracy(fit(Xtr, train.labels())(Xte), test.labels());

    std::vector<std::pair<double, std::size_t>> scores;
    for (std::size_t c = 0; c < names.size(); ++c) {
        const auto col = static_cast<Index>(c);
        const double reduced =
            accuracy(fit(without_column(Xtr, col), train.labels())(without_column(Xte, col)), test.labels());
        scores.emplace_back(full - reduced, c);
    }
    std::stable_sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::string> out;
    for (const auto& [score, c] : scores) {
        out.push_back(names[c]);
    }
    return out;
}

LabeledDataset promote_to_optional(const LabeledDataset& ds, std::span<const std::string> names)
{
    Schema schema = ds.schema();
    std::vector<Index> moved;
    for (const auto& name : names) {
        moved.push_back(ds.base_index(name));
    }
    std::vector<Index> kept;
    schema.base_names.clear();
    for (Index i = 0; i < ds.n(); ++i) {
        if (std::find(moved.begin(), moved.end(), i) == moved.end()) {
            kept.push_back(i);
            schema.base_names.push_back(ds.schema().base_names[static_cast<std::size_t>(i)]);
        }
    }
    for (const auto& name : names) {
        schema.optional_names.push_back(name);
    }
    const Index N = ds.rows();
    const Index r_old = ds.r();
    Matrix base(N, static_cast<Index>(kept.size()));
    Matrix opt(N, r_old + static_cast<Index>(moved.size()));
    MaskMatrix mask(N, opt.cols());
    for (Index k = 0; k < static_cast<Index>(kept.size()); ++k) {
        base.col(k) = ds.base().col(kept[static_cast<std::size_t>(k)]);
    }
    opt.leftCols(r_old) = ds.optional_values();
    mask.leftCols(r_old) = ds.mask();
    for (Index k = 0; k < static_cast<Index>(moved.size()); ++k) {
        opt.col(r_old + k) = ds.base().col(moved[static_cast<std::size_t>(k)]);
        mask.col(r_old + k).setOnes();
    }
    return LabeledDataset(std::move(schema), std::move(base), std::move(opt), std::move(mask), ds.labels(),
                          ds.weighted() ? ds.weights() : Vector{});
}

} // namespace off
