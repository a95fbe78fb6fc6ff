#include <doctest.h>

#include "off/dataset.hpp"
#include "off/error.hpp"
#include "off/glm.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace off;

namespace {

const std::filesystem::path kData = OFF_TEST_DATA_DIR;

Schema admissions_schema() { return {{"courses", "gpa"}, {"test_score"}, "admitted"}; }

std::filesystem::path temp_file(const std::string& name, const std::string& content)
{
    auto p = std::filesystem::temp_directory_path() / ("off_test_" + name);
    std::ofstream(p) << content;
    return p;
}

// n base columns, one optional column, all available.
LabeledDataset gaussian_dataset(Index N, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix base(N, 2), opt(N, 1);
    MaskMatrix mask = MaskMatrix::Ones(N, 1);
    Vector y(N);
    for (Index j = 0; j < N; ++j) {
        base(j, 0) = normal(rng);
        base(j, 1) = normal(rng);
        opt(j, 0) = normal(rng);
        y(j) = opt(j, 0) + 0.3 * normal(rng) > 0 ? 1.0 : 0.0;
    }
    return LabeledDataset({{"b1", "b2"}, {"z"}, "y"}, base, opt, mask, y);
}

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST_CASE("subset keys")
{
    auto k = SubsetKey::from_bitstring("101");
    CHECK(k.contains(0));
    CHECK_FALSE(k.contains(1));
    CHECK(k.contains(2));
    CHECK(k.size() == 2);
    CHECK(k.to_bitstring(3) == "101");
    CHECK(SubsetKey::from_bitstring("100").is_subset_of(k));
    CHECK_FALSE(SubsetKey::from_bitstring("010").is_subset_of(k));
    CHECK(k.indices() == std::vector<Index>{0, 2});
    CHECK(code_of([] { SubsetKey::from_bitstring("10x"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("load admissions table")
{
    auto ds = load_csv(kData / "admissions.csv", admissions_schema());
    CHECK(ds.rows() == 5);
    CHECK(ds.n() == 2);
    CHECK(ds.r() == 1);
    std::vector<int> mask;
    for (Index j = 0; j < 5; ++j) {
        mask.push_back(ds.mask()(j, 0));
    }
    CHECK(mask == std::vector<int>{1, 0, 1, 0, 1});
    CHECK(std::isnan(ds.optional_values()(1, 0)));
    CHECK(ds.optional_values()(2, 0) == 92.0);
    // "Yes" > "No"
    CHECK(ds.labels()(0) == 1.0);
    CHECK(ds.labels()(3) == 0.0);

    CsvOptions flipped;
    flipped.positive_label = "No";
    CHECK(load_csv(kData / "admissions.csv", admissions_schema(), flipped).labels()(3) == 1.0);
}

TEST_CASE("csv edge cases")
{
    SUBCASE("no optional columns")
    {
        auto p = temp_file("r0.csv", "a,b,y\n1,2,0\n3,4,1\n5,6,1\n");
        auto ds = load_csv(p, {{"a", "b"}, {}, "y"});
        CHECK(ds.rows() == 3);
        CHECK(ds.mask().cols() == 0);
    }
    SUBCASE("optional column entirely missing")
    {
        auto p = temp_file("allna.csv", "a,z,y\n1,N/A,0\n2,N/A,1\n");
        auto ds = load_csv(p, {{"a"}, {"z"}, "y"});
        CHECK(ds.mask().sum() == 0);
        CHECK(std::isnan(ds.optional_values()(0, 0)));
        CHECK(std::isnan(ds.optional_values()(1, 0)));
    }
    SUBCASE("custom token")
    {
        auto p = temp_file("tok.csv", "a,z,y\n1,?,0\n2,3,1\n");
        CsvOptions opts;
        opts.na_token = "?";
        auto ds = load_csv(p, {{"a"}, {"z"}, "y"}, opts);
        CHECK(ds.mask()(0, 0) == 0);
        CHECK(ds.mask()(1, 0) == 1);
    }
    SUBCASE("errors")
    {
        auto missing = temp_file("miss.csv", "a,y\n1,0\n");
        CHECK(code_of([&] { load_csv(missing, {{"a"}, {"z"}, "y"}); }) == ErrorCode::MissingColumn);
        auto text = temp_file("text.csv", "a,z,y\n1,abc,0\n");
        CHECK(code_of([&] { load_csv(text, {{"a"}, {"z"}, "y"}); }) == ErrorCode::NonNumericCell);
        auto na_base = temp_file("nabase.csv", "a,z,y\nN/A,1,0\n");
        CHECK(code_of([&] { load_csv(na_base, {{"a"}, {"z"}, "y"}); }) == ErrorCode::NaInBaseFeature);
        auto three = temp_file("three.csv", "a,y\n1,x\n2,y\n3,z\n");
        CHECK(code_of([&] { load_csv(three, {{"a"}, {}, "y"}); }) == ErrorCode::DegenerateLabels);
        CHECK(code_of([&] { load_csv("/nonexistent/x.csv", {{"a"}, {}, "y"}); }) == ErrorCode::Io);
    }
}

TEST_CASE("csv round trip")
{
    auto ds = inject_availability(gaussian_dataset(200, 3), {{{"z", 1.0, std::nullopt}}}, 9);
    auto p = std::filesystem::temp_directory_path() / "off_test_roundtrip.csv";
    save_csv(ds, p);
    auto back = load_csv(p, ds.schema());
    CHECK(back.base() == ds.base());
    CHECK(back.mask() == ds.mask());
    CHECK(back.labels() == ds.labels());
    for (Index j = 0; j < ds.rows(); ++j) {
        if (ds.available(j, 0)) {
            CHECK(back.optional_values()(j, 0) == ds.optional_values()(j, 0));
        } else {
            CHECK(std::isnan(back.optional_values()(j, 0)));
        }
    }
}

TEST_CASE("dataset invariants")
{
    Matrix base(2, 1);
    base << 1, 2;
    Matrix opt(2, 1);
    opt << 5, 7;
    MaskMatrix mask(2, 1);
    mask << 1, 0;
    Vector y(2);
    y << 0, 1;
    LabeledDataset ds({{"b"}, {"z"}, "y"}, base, opt, mask, y);
    // masked-out values are replaced by the sentinel
    CHECK(std::isnan(ds.optional_values()(1, 0)));
    CHECK(ds.subset(0) == SubsetKey(1U));
    CHECK(ds.subset(1) == SubsetKey(0U));

    Vector bad(2);
    bad << 0, 2;
    CHECK_THROWS_AS(LabeledDataset({{"b"}, {"z"}, "y"}, base, opt, mask, bad), Error);
    CHECK_THROWS_AS(LabeledDataset({{"b", "b"}, {}, "y"}, Matrix(2, 2), Matrix(2, 0), MaskMatrix(2, 0), y), Error);
}

TEST_CASE("injection probabilities")
{
    const Index N = 20000;
    Matrix base = Matrix::Zero(N, 1);
    MaskMatrix mask = MaskMatrix::Ones(N, 1);
    Vector y = Vector::Zero(N);
    y(0) = 1;
    auto rate_at = [&](double value, double slope, double center) {
        Matrix opt = Matrix::Constant(N, 1, value);
        LabeledDataset ds({{"b"}, {"z"}, "y"}, base, opt, mask, y);
        auto out = inject_availability(ds, {{{"z", slope, center}}}, 17);
        return 1.0 - static_cast<double>(out.mask().cast<int>().sum()) / static_cast<double>(N);
    };
    const double sigma = std::sqrt(0.25 / N);
    CHECK(std::abs(rate_at(2.0, 1.0, 2.0) - 0.5) < 4 * sigma);     // z = center
    CHECK(std::abs(rate_at(9.0, 0.0, 2.0) - 0.5) < 4 * sigma);     // zero slope
    const double s3 = std::sqrt(0.75 * 0.25 / N);
    CHECK(std::abs(rate_at(std::log(3.0), 1.0, 0.0) - 0.75) < 4 * s3);
}

TEST_CASE("injection is monotone and leaves base untouched")
{
    auto ds = gaussian_dataset(5000, 11);
    auto out = inject_availability(ds, {{{"z", 1.5, std::nullopt}}}, 4);
    CHECK(out.base() == ds.base());
    CHECK(drop_optional(out) == drop_optional(ds));
    double above = 0, above_missing = 0, below = 0, below_missing = 0;
    const double center = ds.optional_values().col(0).mean();
    for (Index j = 0; j < ds.rows(); ++j) {
        const bool missing = !out.available(j, 0);
        if (ds.optional_values()(j, 0) > center) {
            above += 1;
            above_missing += missing;
        } else {
            below += 1;
            below_missing += missing;
        }
    }
    const double pa = above_missing / above;
    const double pb = below_missing / below;
    const double se = std::sqrt(pa * (1 - pa) / above + pb * (1 - pb) / below);
    CHECK(pa - pb > 3 * se);

    // same seed, same mask
    CHECK(inject_availability(ds, {{{"z", 1.5, std::nullopt}}}, 4).mask() == out.mask());
    CHECK(code_of([&] { inject_availability(out, {{{"z", 1.0, std::nullopt}}}, 1); }) == ErrorCode::AlreadyMissing);
}

TEST_CASE("standardized slope")
{
    auto ds = gaussian_dataset(4000, 5);
    const double s = standardized_slope(ds, "z", -1);
    CHECK(s < 0);
    CHECK(std::abs(std::abs(s) - 1.0) < 0.06);
}

TEST_CASE("imputation")
{
    auto ds = load_csv(kData / "admissions.csv", admissions_schema());
    Matrix X = impute_zero(ds, true);
    CHECK(X.cols() == 4);
    CHECK(X(1, 2) == 0.0);
    CHECK(X(1, 3) == 0.0);
    CHECK(X(0, 2) == 87.0);
    CHECK(X(0, 3) == 1.0);
    CHECK(X.leftCols(2) == ds.base());
    CHECK(drop_optional(ds).rows() == 5);
    CHECK(drop_optional(ds).cols() == 2);

    auto full = gaussian_dataset(10, 1);
    Matrix plain = impute_zero(full, false);
    CHECK(plain.leftCols(2) == full.base());
    CHECK(plain.col(2) == full.optional_values().col(0));
}

TEST_CASE("optional feature count")
{
    CHECK(select_optional_count(614, 150) == 2);
    CHECK(select_optional_count(5754, 150) == 5);
    CHECK(select_optional_count(150, 150) == 0);
    CHECK(select_optional_count(299, 150) == 0);
    CHECK(select_optional_count(300, 150) == 1);
    for (Index train : {151, 777, 1200, 40000}) {
        const int r = select_optional_count(train, 150);
        CHECK(static_cast<double>(train) / std::ldexp(1.0, r) >= 150);
        CHECK(static_cast<double>(train) / std::ldexp(1.0, r + 1) < 150);
    }
    CHECK(code_of([] { select_optional_count(10, 150); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("train test split")
{
    auto ds = gaussian_dataset(10, 2);
    auto [train, test] = split_train_test(ds, 0.8, 7);
    CHECK(train.rows() == 8);
    CHECK(test.rows() == 2);
    auto [train2, test2] = split_train_test(ds, 0.8, 7);
    CHECK(train2.base() == train.base());
    CHECK(test2.base() == test.base());

    auto five = gaussian_dataset(5, 2);
    auto [a, b] = split_train_test(five, 0.5, 1);
    CHECK(a.rows() == 3);
    CHECK(b.rows() == 2);
    CHECK(code_of([&] { split_train_test(five, 0.9, 1); }) == ErrorCode::EmptySplit);
}

TEST_CASE("feature ranking")
{
    FitFn fit = [](const Matrix& X, const Vector& y) -> ScoreFn {
        auto p = fit_logistic(X, y).params;
        return [p](const Matrix& Xt) { return predict_proba(p, Xt); };
    };
    auto ds = gaussian_dataset(2000, 8);
    auto order = rank_features_by_drop(ds, fit, 1);
    REQUIRE(order.size() == 3);
    CHECK(order.front() == "z");

    LabeledDataset single({{"b"}, {}, "y"}, ds.base().leftCols(1), Matrix(ds.rows(), 0), MaskMatrix(ds.rows(), 0),
                          ds.labels());
    CHECK(rank_features_by_drop(single, fit, 1) == std::vector<std::string>{"b"});

    auto promoted = promote_to_optional(ds, std::vector<std::string>{"b2"});
    CHECK(promoted.schema().base_names == std::vector<std::string>{"b1"});
    CHECK(promoted.schema().optional_names == std::vector<std::string>{"z", "b2"});
    CHECK(promoted.optional_values().col(1) == ds.base().col(1));
    CHECK(promoted.mask().col(1).cast<int>().sum() == ds.rows());
}
