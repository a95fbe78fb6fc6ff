#ifndef OFF_DATASET_HPP
#define OFF_DATASET_HPP

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace off {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using MaskMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Stored in optional cells whose availability bit is 0. Legal values are finite,
// so NaN cannot collide with a real observation.
inline constexpr double kNotAvailable = std::numeric_limits<double>::quiet_NaN();

struct Schema {
    std::vector<std::string> base_names;
    std::vector<std::string> optional_names;
    std::string label_name;

    Index n() const noexcept { return static_cast<Index>(base_names.size()); }
    Index r() const noexcept { return static_cast<Index>(optional_names.size()); }

    // Throws Error(InvalidArgument) on duplicate names or n = r = 0.
    void validate() const;

    bool operator==(const Schema&) const = default;
};

// Index set I(a) of disclosed optional features. Bit i set <=> feature i present.
class SubsetKey {
public:
    static constexpr int kMaxFeatures = 30;

    constexpr SubsetKey() = default;
    constexpr explicit SubsetKey(std::uint32_t bits)
        : bits_(bits)
    {
    }

    static SubsetKey from_mask_row(const MaskMatrix& mask, Index row);
    // "101" = features 1 and 3 present; the string length fixes r.
    static SubsetKey from_bitstring(std::string_view bits);

    constexpr std::uint32_t bits() const noexcept { return bits_; }
    constexpr bool contains(Index i) const noexcept { return (bits_ >> i) & 1U; }
    constexpr bool is_subset_of(SubsetKey other) const noexcept { return (bits_ & ~other.bits_) == 0; }
    int size() const noexcept;
    std::vector<Index> indices() const;
    std::string to_bitstring(Index r) const;

    constexpr auto operator<=>(const SubsetKey&) const = default;

private:
    std::uint32_t bits_ = 0;
};

// Tabular data with an always-present base block, an optional block with an
// availability mask and binary labels. Optional row weights are used for exact
// (enumerated) distributions; an unweighted dataset behaves as weight 1 per row.
class LabeledDataset {
public:
    LabeledDataset() = default;
    LabeledDataset(Schema schema, Matrix base, Matrix optional_values, MaskMatrix mask, Vector labels,
                   Vector weights = {});

    const Schema& schema() const noexcept { return schema_; }
    Index rows() const noexcept { return labels_.size(); }
    Index n() const noexcept { return base_.cols(); }
    Index r() const noexcept { return optional_.cols(); }

    const Matrix& base() const noexcept { return base_; }
    const Matrix& optional_values() const noexcept { return optional_; }
    const MaskMatrix& mask() const noexcept { return mask_; }
    const Vector& labels() const noexcept { return labels_; }

    bool weighted() const noexcept { return weights_.size() != 0; }
    // Explicit weights, or a vector of ones.
    Vector weights() const;

    bool available(Index row, Index feature) const noexcept { return mask_(row, feature) != 0; }
    SubsetKey subset(Index row) const { return SubsetKey::from_mask_row(mask_, row); }

    LabeledDataset select_rows(std::span<const Index> rows) const;
    // Rows whose available set is a superset of key.
    std::vector<Index> rows_containing(SubsetKey key) const;
    // Rows whose available set equals key exactly.
    std::vector<Index> rows_with_pattern(SubsetKey key) const;

    Index optional_index(std::string_view name) const;
    Index base_index(std::string_view name) const;

private:
    Schema schema_;
    Matrix base_;
    Matrix optional_;
    MaskMatrix mask_;
    Vector labels_;
    Vector weights_;
};

struct CsvOptions {
    std::string na_token = "N/A";
    // When labels are not already 0/1, this value maps to 1. Unset: the
    // lexicographically larger of the two label values is the positive class.
    std::optional<std::string> positive_label;
};

LabeledDataset load_csv(const std::filesystem::path& path, const Schema& schema, const CsvOptions& options = {});
void save_csv(const LabeledDataset& ds, const std::filesystem::path& path, std::string_view na_token = "N/A");
void write_csv(const LabeledDataset& ds, std::ostream& out, std::string_view na_token = "N/A");

struct FeatureInjection {
    std::string feature;
    double slope = 0.0;             // lambda_i; sign sets which side tends to be withheld
    std::optional<double> center;   // unset: empirical mean of the feature
};

struct InjectionSpec {
    std::vector<FeatureInjection> features;
};

// p(A=0 | z) = sigmoid(slope * (z - center)), drawn independently per cell.
LabeledDataset inject_availability(const LabeledDataset& ds, const InjectionSpec& spec, std::uint64_t seed);

// Slope of magnitude 1/std(feature) with the given sign, over available cells.
double standardized_slope(const LabeledDataset& ds, std::string_view optional_feature, int sign);

// [base | optional with N/A -> 0 | mask (if add_indicator)]
Matrix impute_zero(const LabeledDataset& ds, bool add_indicator);
Matrix drop_optional(const LabeledDataset& ds);

// Largest r with train_rows / 2^r >= min_samples.
int select_optional_count(Index train_rows, Index min_samples);

// floor((1 - fraction) * N), tolerant of representation error in 1 - fraction.
Index test_size_for(Index rows, double fraction);

// Test part gets floor((1 - fraction) * N) rows, train the rest. Row order within
// each part follows the original order.
std::pair<LabeledDataset, LabeledDataset> split_train_test(const LabeledDataset& ds, double fraction,
                                                           std::uint64_t seed);

using ScoreFn = std::function<Vector(const Matrix&)>;
using FitFn = std::function<ScoreFn(const Matrix& X, const Vector& y)>;

// Features (base then optional, imputed) ordered by held-out accuracy loss when
// the feature is removed; ties keep column order.
std::vector<std::string> rank_features_by_drop(const LabeledDataset& ds, const FitFn& fit, std::uint64_t seed);

// Moves the named base columns into the optional block (fully available),
// appended after existing optional features in the order given.
LabeledDataset promote_to_optional(const LabeledDataset& ds, std::span<const std::string> names);

} // namespace off

#endif // OFF_DATASET_HPP
