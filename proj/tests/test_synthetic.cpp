#include <doctest.h>

#include "off/error.hpp"
#include "off/metrics.hpp"
#include "off/parallel.hpp"
#include "off/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace off;
using namespace off::synthetic;

namespace {

double normal_pdf(double x, double mean, double sd)
{
    const double d = (x - mean) / sd;
    return std::exp(-0.5 * d * d) / (sd * std::sqrt(2 * std::numbers::pi));
}

// Bayes rule with the generative densities, written out directly.
double posterior_by_density(const FamilyParams& p, const Vector& b, SubsetKey key, const Vector& z)
{
    double l1 = sigmoid(p.w.dot(b) + p.t);
    double l0 = 1.0 - l1;
    for (Index i = 0; i < p.r(); ++i) {
        if (!key.contains(i)) {
            continue;
        }
        const double s = sigmoid(p.u.row(i).dot(b) + p.lambda(i));
        const double m = p.v.row(i).dot(b);
        l1 *= s * normal_pdf(z(i), m + p.tau1(i), p.eta);
        l0 *= (1.0 - s) * normal_pdf(z(i), m + p.tau0(i), p.eta);
    }
    return l1 / (l1 + l0);
}

} // namespace

TEST_CASE("closed-form coefficients")
{
    const auto p = paper_synthetic();
    const auto c = oracle_coefficients(p);
    CHECK(c.beta(0) == doctest::Approx(0.5));
    CHECK(c.gamma(0, 0) == doctest::Approx(0.0));
    CHECK(c.gamma(0, 1) == doctest::Approx(0.5));
    CHECK(c.omega(0, 0) == doctest::Approx(0.8));
    CHECK(c.omega(0, 1) == doctest::Approx(-0.1));
    CHECK(c.theta(0) == doctest::Approx(0.0));
    CHECK(c.s(0) == doctest::Approx(0.7));

    auto flat = p;
    flat.tau1 = flat.tau0;
    const auto cf = oracle_coefficients(flat);
    CHECK(cf.beta.isZero());
    CHECK(cf.gamma.isZero());
    CHECK(cf.theta.isZero());
    CHECK(cf.s == flat.lambda);

    auto wide = p;
    wide.eta = 2.0;
    CHECK((oracle_coefficients(wide).beta - c.beta / 4).cwiseAbs().maxCoeff() < 1e-15);

    auto broken = p;
    broken.eta = 0.0;
    CHECK_THROWS_AS(oracle_coefficients(broken), Error);
}

TEST_CASE("oracle posterior")
{
    const auto p = paper_synthetic();
    const Vector b0 = Vector::Zero(2);
    const Vector z0 = Vector::Zero(3);
    CHECK(oracle_posterior(p, b0, SubsetKey(0U), z0) == 0.5);
    CHECK(oracle_posterior(p, b0, SubsetKey(1U), z0) == doctest::Approx(sigmoid(0.7)));
    CHECK(sigmoid(0.7) == doctest::Approx(0.6682).epsilon(1e-4));
    CHECK(oracle_model(p).scalar_count() == 2 * 3 + 2 + 2 * 3 + 1);

    std::mt19937_64 rng(31);
    std::normal_distribution<double> normal(0.0, 2.0);
    for (int k = 0; k < 200; ++k) {
        Vector b(2), z(3);
        b << normal(rng), normal(rng);
        z << normal(rng), normal(rng), normal(rng);
        const SubsetKey key(static_cast<std::uint32_t>(k % 8));
        CHECK(std::abs(oracle_posterior(p, b, key, z) - posterior_by_density(p, b, key, z)) < 1e-12);
    }
}

TEST_CASE("sampler marginals")
{
    const auto p = paper_synthetic();
    const auto ds = sample_family(p, 100000, 2);
    for (Index i = 0; i < 2; ++i) {
        const double mean = ds.base().col(i).mean();
        const double var = (ds.base().col(i).array() - mean).square().mean();
        CHECK(std::abs(mean) < 0.05);
        CHECK(std::abs(var - 5.0) < 0.15);
    }
    // feature 3 has u = 0, lambda = 0: available half the time in either class
    double rate[2] = {0, 0}, count[2] = {0, 0};
    for (Index j = 0; j < ds.rows(); ++j) {
        const auto y = static_cast<int>(ds.labels()(j));
        rate[y] += ds.available(j, 2);
        count[y] += 1;
    }
    for (int y = 0; y < 2; ++y) {
        CHECK(std::abs(rate[y] / count[y] - 0.5) < 4 * std::sqrt(0.25 / count[y]));
    }
    for (Index j = 0; j < 50; ++j) {
        for (Index i = 0; i < 3; ++i) {
            CHECK(ds.available(j, i) == std::isfinite(ds.optional_values()(j, i)));
        }
    }
    auto full = sample_family(p, 1000, 2, {true});
    CHECK(full.mask().cast<int>().sum() == 3000);
    // the availability draw still happens, so base and labels line up
    CHECK(full.base() == sample_family(p, 1000, 2).base());
}

TEST_CASE("sampler determinism")
{
    const auto p = paper_synthetic();
    const Index N = 3 * kSampleBlockRows + 17;
    const auto a = sample_family(p, N, 5);
    const auto b = sample_family(p, N, 5);
    const auto serial = synthetic::reference::sample_family_serial(p, N, 5);
    CHECK(a.base() == b.base());
    CHECK(a.mask() == b.mask());
    CHECK(a.labels() == b.labels());
    CHECK(a.base() == serial.base());
    CHECK(a.mask() == serial.mask());
    CHECK(a.labels() == serial.labels());
    parallel::set_max_threads(1);
    const auto one = sample_family(p, N, 5);
    parallel::set_max_threads(0);
    CHECK(one.base() == a.base());
    CHECK(sample_family(p, N, 6).base() != a.base());
}

TEST_CASE("counterexample")
{
    const auto losses = counterexample_losses({0.5});
    CHECK(losses.base == 0.25);
    CHECK(losses.csp == 0.5);
    const auto near_one = counterexample_losses({0.999999});
    CHECK(near_one.base < 1e-5);
    CHECK(near_one.csp < 1e-5);
    CHECK_THROWS_AS(counterexample_losses({1.0}), Error);

    const Index N = 100000;
    const auto ds = sample_counterexample({0.5}, N, 3);
    const double rate = ds.labels().mean();
    CHECK(std::abs(rate - 0.5) < 3 * std::sqrt(0.25 / N));
    CHECK((ds.base().array() == 1.0).all());
    for (Index j = 0; j < N; ++j) {
        REQUIRE(ds.labels()(j) == static_cast<double>(ds.mask()(j, 0)));
    }

    const auto csp = fit_csp(ds, {SubmodelKind::group_mean, {}});
    const auto base = fit_base(ds, {SubmodelKind::group_mean, {}});
    CHECK(std::abs(metrics::mse(csp.predict(ds), ds.labels()) - 0.5) < 0.01);
    CHECK(std::abs(metrics::mse(base.predict(ds), ds.labels()) - 0.25) < 0.01);
}
