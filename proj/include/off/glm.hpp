#ifndef OFF_GLM_HPP
#define OFF_GLM_HPP

#include "off/dataset.hpp"

#include <cstdint>
#include <vector>

namespace off {

// Numerically stable logistic function; saturates monotonically for large |x|.
double sigmoid(double x) noexcept;
double logit(double p);

struct LogisticParams {
    Vector weights;
    double intercept = 0.0;

    Index dim() const noexcept { return weights.size(); }
    static LogisticParams zeros(Index d) { return {Vector::Zero(d), 0.0}; }
};

struct FitConfig {
    double l2_penalty = 1e-6;
    int max_iters = 100;
    double grad_tol = 1e-8;

    void validate() const;
};

struct FitDiagnostics {
    int iterations = 0;
    double gradient_norm = 0.0;
    double objective = 0.0;
    std::vector<double> objective_path;  // value before each accepted step, then the final value
    // False when the gradient criterion was not met (max_iters reached or the
    // line search stalled, typically under perfect separation).
    bool converged = false;
};

struct LogisticFit {
    LogisticParams params;
    FitDiagnostics diagnostics;
};

// Minimizes mean (weighted) negative log-likelihood + l2_penalty * ||weights||^2
// by Newton's method with step halving. The intercept is not penalized.
// Row reductions run over fixed-size blocks in parallel and are combined in
// block order, so the result does not depend on the thread count.
LogisticFit fit_logistic(const Matrix& X, const Vector& y, const FitConfig& cfg = {}, const Vector& weights = {});

// sigmoid(X w + t) row-wise.
Vector predict_proba(const LogisticParams& p, const Matrix& X);
double predict_row(const LogisticParams& p, const Eigen::Ref<const Vector>& x);
// w^T x + t.
double log_odds(const LogisticParams& p, const Eigen::Ref<const Vector>& x);

// Objective and its gradient in the (weights..., intercept) parameterization.
double logistic_objective(const LogisticParams& p, const Matrix& X, const Vector& y, const Vector& weights,
                          double l2_penalty);
Vector logistic_gradient(const LogisticParams& p, const Matrix& X, const Vector& y, const Vector& weights,
                         double l2_penalty);

// Number of successful logistic fits performed by this process.
std::uint64_t primitive_fit_count() noexcept;

namespace reference {

// Same Newton iteration with plain single-pass serial accumulation. Kept as
// the check for the blocked parallel kernel.
LogisticFit fit_logistic_serial(const Matrix& X, const Vector& y, const FitConfig& cfg = {},
                                const Vector& weights = {});

} // namespace reference

} // namespace off

#endif // OFF_GLM_HPP
