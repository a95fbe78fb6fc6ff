#include "off/glm.hpp"

#include "off/error.hpp"
#include "off/parallel.hpp"

#include <Eigen/Cholesky>

#include <atomic>
#include <cmath>
#include <vector>

namespace off {

namespace {

std::atomic<std::uint64_t> g_fit_count{0};

// log(1 + exp(x)) without overflow.
double softplus(double x) noexcept
{
    if (x > 0.0) {
        return x + std::log1p(std::exp(-x));
    }
    return std::log1p(std::exp(x));
}

struct Moments {
    double loss = 0.0;
    Vector grad;   // d + 1, intercept last
    Matrix hess;   // (d + 1) x (d + 1)

    explicit Moments(Index p, bool with_hessian)
        : grad(Vector::Zero(p))
        , hess(with_hessian ? Matrix::Zero(p, p) : Matrix())
    {
    }
};

// Accumulates weighted loss, gradient and (optionally) Hessian over rows [begin, end).
void accumulate_rows(const Matrix& X, const Vector& y, const Vector& w, const Vector& theta, Index begin, Index end,
                     bool with_derivatives, Moments& m)
{
    const Index d = X.cols();
    const Index len = end - begin;
    if (len <= 0) {
        return;
    }
    const auto Xb = X.middleRows(begin, len);
    Vector eta = Vector::Constant(len, theta(d));
    if (d > 0) {
        eta.noalias() += Xb * theta.head(d);
    }
    Vector resid(with_derivatives ? len : 0);
    Vector curv(with_derivatives ? len : 0);
    double loss = 0.0;
    for (Index k = 0; k < len; ++k) {
        const double wk = w(begin + k);
        const double yk = y(begin + k);
        loss += wk * (softplus(eta(k)) - yk * eta(k));
        if (with_derivatives) {
            const double p = sigmoid(eta(k));
            resid(k) = wk * (p - yk);
            curv(k) = wk * p * (1.0 - p);
        }
    }
    m.loss += loss;
    if (!with_derivatives) {
        return;
    }
    if (d > 0) {
        m.grad.head(d).noalias() += Xb.transpose() * resid;
        const Matrix weighted = Xb.array().colwise() * curv.array();
        m.hess.topLeftCorner(d, d).noalias() += Xb.transpose() * weighted;
        const Vector cross = weighted.colwise().sum().transpose();
        m.hess.block(0, d, d, 1) += cross;
        m.hess.block(d, 0, 1, d) += cross.transpose();
    }
    m.grad(d) += resid.sum();
    m.hess(d, d) += curv.sum();
}

enum class Kernel { blocked_parallel, serial };

Moments evaluate(Kernel kernel, const Matrix& X, const Vector& y, const Vector& w, const Vector& theta,
                 bool with_derivatives)
{
    const Index p = X.cols() + 1;
    const Index N = X.rows();
    if (kernel == Kernel::serial) {
        Moments m(p, with_derivatives);
        accumulate_rows(X, y, w, theta, 0, N, with_derivatives, m);
        return m;
    }
    const Index blocks = parallel::block_count(N);
    std::vector<Moments> partial(static_cast<std::size_t>(blocks), Moments(p, with_derivatives));
#pragma omp parallel for schedule(static)
    for (Index b = 0; b < blocks; ++b) {
        const Index begin = b * parallel::kBlockRows;
        const Index end = std::min(N, begin + parallel::kBlockRows);
        accumulate_rows(X, y, w, theta, begin, end, with_derivatives, partial[static_cast<std::size_t>(b)]);
    }
    Moments total(p, with_derivatives);
    for (const auto& part : partial) {
        total.loss += part.loss;
        if (with_derivatives) {
            total.grad += part.grad;
            total.hess += part.hess;
        }
    }
    return total;
}

// Normalizes by total weight and adds the ridge term on the non-intercept block.
void finish(Moments& m, const Vector& theta, double total_weight, double l2, bool with_derivatives)
{
    const Index d = theta.size() - 1;
    m.loss /= total_weight;
    m.loss += l2 * theta.head(d).squaredNorm();
    if (!with_derivatives) {
        return;
    }
    m.grad /= total_weight;
    m.hess /= total_weight;
    m.grad.head(d) += 2.0 * l2 * theta.head(d);
    m.hess.topLeftCorner(d, d).diagonal().array() += 2.0 * l2;
}

Vector resolve_weights(const Vector& weights, Index N)
{
    if (weights.size() == 0) {
        return Vector::Ones(N);
    }
    if (weights.size() != N) {
        throw Error(ErrorCode::DimensionMismatch, "weights length differs from row count");
    }
    return weights;
}

LogisticFit newton(Kernel kernel, const Matrix& X, const Vector& y, const FitConfig& cfg, const Vector& weights_in)
{
    cfg.validate();
    const Index N = X.rows();
    const Index d = X.cols();
    if (y.size() != N) {
        throw Error(ErrorCode::DimensionMismatch, "label count differs from row count");
    }
    const Vector w = resolve_weights(weights_in, N);
    double total = 0.0;
    double positive = 0.0;
    Index support = 0;
    for (Index j = 0; j < N; ++j) {
        if (y(j) != 0.0 && y(j) != 1.0) {
            throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
        }
        if (w(j) > 0.0) {
            ++support;
            total += w(j);
            positive += w(j) * y(j);
        }
    }
    if (support < 2 || positive <= 0.0 || positive >= total) {
        throw Error(ErrorCode::DegenerateLabels, "logistic fit needs at least two rows and both classes");
    }

    Vector theta = Vector::Zero(d + 1);
    theta(d) = logit(positive / total);

    FitDiagnostics diag;
    Moments m = evaluate(kernel, X, y, w, theta, true);
    finish(m, theta, total, cfg.l2_penalty, true);
    for (diag.iterations = 0; diag.iterations < cfg.max_iters; ++diag.iterations) {
        diag.gradient_norm = m.grad.norm();
        if (diag.gradient_norm <= cfg.grad_tol) {
            diag.converged = true;
            break;
        }
        Eigen::LDLT<Matrix> ldlt(m.hess);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
            ldlt.vectorD().minCoeff() <= 1e-14 * std::max(1.0, ldlt.vectorD().maxCoeff())) {
            if (cfg.l2_penalty == 0.0) {
                throw Error(ErrorCode::Singular, "Hessian is not invertible; use a positive l2_penalty");
            }
            break;
        }
        diag.objective_path.push_back(m.loss);
        const Vector step = -ldlt.solve(m.grad);
        const double slope = m.grad.dot(step);
        double scale = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving) {
            const Vector trial = theta + scale * step;
            Moments t = evaluate(kernel, X, y, w, trial, false);
            finish(t, trial, total, cfg.l2_penalty, false);
            if (std::isfinite(t.loss) && t.loss <= m.loss + 1e-4 * scale * slope) {
                theta = trial;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) {
            break;
        }
        m = evaluate(kernel, X, y, w, theta, true);
        finish(m, theta, total, cfg.l2_penalty, true);
    }
    diag.gradient_norm = m.grad.norm();
    diag.objective = m.loss;
    diag.objective_path.push_back(m.loss);
    diag.converged = diag.gradient_norm <= cfg.grad_tol;

    g_fit_count.fetch_add(1, std::memory_order_relaxed);
    return {LogisticParams{theta.head(d), theta(d)}, diag};
}

Vector pack(const LogisticParams& p)
{
    Vector theta(p.dim() + 1);
    theta.head(p.dim()) = p.weights;
    theta(p.dim()) = p.intercept;
    return theta;
}

void check_dim(const LogisticParams& p, Index cols)
{
    if (p.dim() != cols) {
        throw Error(ErrorCode::DimensionMismatch, "model expects " + std::to_string(p.dim()) + " features, got " +
                                                      std::to_string(cols));
    }
}

} // namespace

double sigmoid(double x) noexcept
{
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double p)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "logit needs p in (0, 1)");
    }
    return std::log(p) - std::log1p(-p);
}

void FitConfig::validate() const
{
    if (!(l2_penalty >= 0.0) || !std::isfinite(l2_penalty) || max_iters <= 0 || !(grad_tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "fit config needs l2_penalty >= 0, max_iters > 0, grad_tol > 0");
    }
}

LogisticFit fit_logistic(const Matrix& X, const Vector& y, const FitConfig& cfg, const Vector& weights)
{
    return newton(Kernel::blocked_parallel, X, y, cfg, weights);
}

LogisticFit reference::fit_logistic_serial(const Matrix& X, const Vector& y, const FitConfig& cfg,
                                           const Vector& weights)
{
    return newton(Kernel::serial, X, y, cfg, weights);
}

Vector predict_proba(const LogisticParams& p, const Matrix& X)
{
    check_dim(p, X.cols());
    Vector eta = Vector::Constant(X.rows(), p.intercept);
    if (p.dim() > 0) {
        eta.noalias() += X * p.weights;
    }
    return eta.unaryExpr([](double v) { return sigmoid(v); });
}

double predict_row(const LogisticParams& p, const Eigen::Ref<const Vector>& x) { return sigmoid(log_odds(p, x)); }

double log_odds(const LogisticParams& p, const Eigen::Ref<const Vector>& x)
{
    check_dim(p, x.size());
    return p.weights.dot(x) + p.intercept;
}

double logistic_objective(const LogisticParams& p, const Matrix& X, const Vector& y, const Vector& weights,
                          double l2_penalty)
{
    check_dim(p, X.cols());
    const Vector w = resolve_weights(weights, X.rows());
    const Vector theta = pack(p);
    Moments m = evaluate(Kernel::serial, X, y, w, theta, false);
    finish(m, theta, w.sum(), l2_penalty, false);
    return m.loss;
}

Vector logistic_gradient(const LogisticParams& p, const Matrix& X, const Vector& y, const Vector& weights,
                         double l2_penalty)
{
    check_dim(p, X.cols());
    const Vector w = resolve_weights(weights, X.rows());
    const Vector theta = pack(p);
    Moments m = evaluate(Kernel::serial, X, y, w, theta, true);
    finish(m, theta, w.sum(), l2_penalty, true);
    return m.grad;
}

std::uint64_t primitive_fit_count() noexcept { return g_fit_count.load(std::memory_order_relaxed); }

} // namespace off
