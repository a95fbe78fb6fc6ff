#include "off/synthetic.hpp"

#include "off/error.hpp"
#include "off/glm.hpp"
#include "off/parallel.hpp"

#include <cmath>
#include <random>

namespace off::synthetic {

void FamilyParams::validate() const
{
    const Index n_ = n();
    const Index r_ = r();
    if (n_ < 1 || r_ < 1) {
        throw Error(ErrorCode::InvalidArgument, "family needs n >= 1 and r >= 1");
    }
    if (u.rows() != r_ || u.cols() != n_ || v.rows() != r_ || v.cols() != n_ || tau0.size() != r_ ||
        tau1.size() != r_) {
        throw Error(ErrorCode::DimensionMismatch, "family parameter shapes disagree with (n, r)");
    }
    if (!(eta > 0.0) || !(base_cov_scale > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "family needs eta > 0 and base_cov_scale > 0");
    }
    const bool finite = w.allFinite() && std::isfinite(t) && std::isfinite(eta) && std::isfinite(base_cov_scale) &&
                        u.allFinite() && lambda.allFinite() && v.allFinite() && tau0.allFinite() && tau1.allFinite();
    if (!finite) {
        throw Error(ErrorCode::InvalidArgument, "family parameters must be finite");
    }
}

Schema FamilyParams::schema() const
{
    Schema s;
    for (Index i = 0; i < n(); ++i) {
        s.base_names.push_back("b" + std::to_string(i + 1));
    }
    for (Index i = 0; i < r(); ++i) {
        s.optional_names.push_back("z" + std::to_string(i + 1));
    }
    s.label_name = "y";
    return s;
}

FamilyParams paper_synthetic()
{
    FamilyParams p;
    p.w = Vector{{-1.5, 1.0}};
    p.t = 0.0;
    p.base_cov_scale = 5.0;
    p.u = Matrix{{0.8, 0.4}, {0.0, 0.0}, {0.0, 0.0}};
    p.v = Matrix{{0.0, 1.0}, {0.0, -0.15}, {0.1, 0.2}};
    p.lambda = Vector{{0.7, 1.0, 0.0}};
    p.tau0 = Vector{{-0.25, 0.4, -0.2}};
    p.tau1 = Vector{{0.25, -0.4, 0.2}};
    p.eta = 1.0;
    return p;
}

OracleCoefficients oracle_coefficients(const FamilyParams& p)
{
    p.validate();
    OracleCoefficients c;
    c.w = p.w;
    c.t = p.t;
    const double inv_var = 1.0 / (p.eta * p.eta);
    c.beta = inv_var * (p.tau1 - p.tau0);
    c.gamma = c.beta.asDiagonal() * p.v;
    c.omega = p.u - c.gamma;
    c.theta = 0.5 * inv_var * (p.tau0.array().square() - p.tau1.array().square()).matrix();
    c.s = p.lambda + c.theta;
    return c;
}

OffLrModel oracle_model(const FamilyParams& p)
{
    const auto c = oracle_coefficients(p);
    OffLrModel m;
    m.schema = p.schema();
    m.w = c.w;
    m.t = c.t;
    m.omega = c.omega;
    m.beta = c.beta;
    m.s = c.s;
    return m;
}

double oracle_posterior(const FamilyParams& p, const Eigen::Ref<const Vector>& b, SubsetKey available,
                        const Eigen::Ref<const Vector>& z)
{
    return oracle_model(p).predict(b, available, z);
}

Vector oracle_posterior(const FamilyParams& p, const LabeledDataset& ds)
{
    return oracle_model(p).predict(ds);
}

namespace {

void sample_block(const FamilyParams& p, std::uint64_t seed, Index block, Index begin, Index end,
                  const SampleOptions& options, Matrix& base, Matrix& opt, MaskMatrix& mask, Vector& labels)
{
    std::mt19937_64 rng(parallel::mix_seed(seed, static_cast<std::uint64_t>(block)));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double base_sd = std::sqrt(p.base_cov_scale);
    for (Index j = begin; j < end; ++j) {
        for (Index i = 0; i < p.n(); ++i) {
            base(j, i) = base_sd * normal(rng);
        }
        const auto b = base.row(j).transpose();
        const int y = unit(rng) < sigmoid(p.w.dot(b) + p.t) ? 1 : 0;
        labels(j) = y;
        for (Index i = 0; i < p.r(); ++i) {
            const double s = sigmoid(p.u.row(i).dot(b) + p.lambda(i));
            const double p_available = y == 1 ? s : 1.0 - s;
            const bool present = unit(rng) < p_available || options.full_availability;
            const double noise = normal(rng);
            mask(j, i) = present ? 1 : 0;
            opt(j, i) = present ? p.v.row(i).dot(b) + (y == 1 ? p.tau1(i) : p.tau0(i)) + p.eta * noise : kNotAvailable;
        }
    }
}

LabeledDataset sample_impl(const FamilyParams& p, Index rows, std::uint64_t seed, const SampleOptions& options,
                           bool run_parallel)
{
    p.validate();
    if (rows < 0) {
        throw Error(ErrorCode::InvalidArgument, "row count must be nonnegative");
    }
    Matrix base(rows, p.n());
    Matrix opt(rows, p.r());
    MaskMatrix mask(rows, p.r());
    Vector labels(rows);
    const Index blocks = rows == 0 ? 0 : (rows + kSampleBlockRows - 1) / kSampleBlockRows;
    auto run = [&](Index block) {
        const Index begin = block * kSampleBlockRows;
        const Index end = std::min(rows, begin + kSampleBlockRows);
        sample_block(p, seed, block, begin, end, options, base, opt, mask, labels);
    };
    if (run_parallel) {
#pragma omp parallel for schedule(static)
        for (Index block = 0; block < blocks; ++block) {
            run(block);
        }
    } else {
        for (Index block = 0; block < blocks; ++block) {
            run(block);
        }
    }
    return LabeledDataset(p.schema(), std::move(base), std::move(opt), std::move(mask), std::move(labels));
}

} // namespace

LabeledDataset sample_family(const FamilyParams& p, Index rows, std::uint64_t seed, const SampleOptions& options)
{
    return sample_impl(p, rows, seed, options, true);
}

LabeledDataset reference::sample_family_serial(const FamilyParams& p, Index rows, std::uint64_t seed,
                                               const SampleOptions& options)
{
    return sample_impl(p, rows, seed, options, false);
}

void CounterexampleParams::validate() const
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "counterexample alpha must lie strictly inside (0, 1)");
    }
}

LabeledDataset sample_counterexample(const CounterexampleParams& c, Index rows, std::uint64_t seed)
{
    c.validate();
    Schema schema{{"b1"}, {"z1"}, "y"};
    Matrix base = Matrix::Ones(rows, 1);
    Matrix opt(rows, 1);
    MaskMatrix mask(rows, 1);
    Vector labels(rows);
    std::mt19937_64 rng(parallel::mix_seed(seed, 0));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (Index j = 0; j < rows; ++j) {
        const bool present = unit(rng) < c.alpha;
        const double z = normal(rng);
        mask(j, 0) = present ? 1 : 0;
        opt(j, 0) = present ? z : kNotAvailable;
        labels(j) = present ? 1.0 : 0.0;
    }
    return LabeledDataset(std::move(schema), std::move(base), std::move(opt), std::move(mask), std::move(labels));
}

CounterexampleLosses counterexample_losses(const CounterexampleParams& c)
{
    c.validate();
    return {c.alpha * (1.0 - c.alpha), 1.0 - c.alpha};
}

} // namespace off::synthetic
