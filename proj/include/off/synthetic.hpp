#ifndef OFF_SYNTHETIC_HPP
#define OFF_SYNTHETIC_HPP

#include "off/dataset.hpp"
#include "off/models.hpp"

#include <cstdint>

namespace off::synthetic {

// Generative family with logistic subset models:
//   b ~ N(0, scale * I)
//   Y | b ~ Bernoulli(sigmoid(w^T b + t))
//   A_i | b, Y=1 ~ Bernoulli(sigmoid(u_i^T b + lambda_i)), A_i | b, Y=0 ~ Bernoulli(1 - sigmoid(...))
//   Z_i | b, y, A_i=1 ~ N(v_i^T b + tau_i(y), eta^2), features independent given (b, y)
struct FamilyParams {
    Vector w;                     // n
    double t = 0.0;
    double base_cov_scale = 1.0;
    Matrix u;                     // r x n
    Vector lambda;                // r
    Matrix v;                     // r x n
    Vector tau0;                  // r
    Vector tau1;                  // r
    double eta = 1.0;

    Index n() const noexcept { return w.size(); }
    Index r() const noexcept { return lambda.size(); }
    void validate() const;
    Schema schema() const;
};

// Two normal base features, three optional features covering every dependency
// the family allows. eta = 1.
FamilyParams paper_synthetic();

struct OracleCoefficients {
    Vector w;
    double t = 0.0;
    Matrix gamma;   // r x n: eta^-2 (tau_i1 - tau_i0) v_i
    Matrix omega;   // r x n: u_i - gamma_i
    Vector beta;    // eta^-2 (tau_i1 - tau_i0)
    Vector theta;   // eta^-2 (tau_i0^2 - tau_i1^2) / 2
    Vector s;       // lambda_i + theta_i
};

OracleCoefficients oracle_coefficients(const FamilyParams& p);

// The same coefficients packaged as an OFF-LR model (no fits performed).
OffLrModel oracle_model(const FamilyParams& p);

// Exact E[Y | b, Z_I = z_I, A_I = 1] for I = available.
double oracle_posterior(const FamilyParams& p, const Eigen::Ref<const Vector>& b, SubsetKey available,
                        const Eigen::Ref<const Vector>& z);
Vector oracle_posterior(const FamilyParams& p, const LabeledDataset& ds);

struct SampleOptions {
    // Draw every optional value (the availability draw still happens so the
    // random stream matches the masked sampler).
    bool full_availability = false;
};

// Rows are generated in fixed blocks, each from its own derived stream; blocks
// run in parallel and the output equals block-by-block sequential generation.
LabeledDataset sample_family(const FamilyParams& p, Index rows, std::uint64_t seed, const SampleOptions& options = {});

inline constexpr Index kSampleBlockRows = 4096;

// Single constant base feature; a ~ Bernoulli(alpha); y = a; z ~ N(0, 1)
// observed only when a = 1.
struct CounterexampleParams {
    double alpha = 0.5;
    void validate() const;
};

LabeledDataset sample_counterexample(const CounterexampleParams& c, Index rows, std::uint64_t seed);

struct CounterexampleLosses {
    double base = 0.0;  // alpha (1 - alpha)
    double csp = 0.0;   // 1 - alpha
};

CounterexampleLosses counterexample_losses(const CounterexampleParams& c);

namespace reference {

LabeledDataset sample_family_serial(const FamilyParams& p, Index rows, std::uint64_t seed,
                                    const SampleOptions& options = {});

} // namespace reference

} // namespace off::synthetic

#endif // OFF_SYNTHETIC_HPP
