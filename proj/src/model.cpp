#include "barow/model.hpp"

#include <cmath>
#include <stdexcept>

namespace barow {

namespace la = linalg;

void Hyperparams::validate() const {
    if (!(r > 0.0)) throw std::invalid_argument("Hyperparams: r must be positive");
    if (!(sigma0_scale > 0.0))
        throw std::invalid_argument("Hyperparams: sigma0_scale must be positive");
    if (r_scaling == RScaling::Fixed && fixed_k == 0)
        throw std::invalid_argument("Hyperparams: fixed_k must be positive");
}

BeliefState init_belief(std::size_t d, double a) {
    if (d == 0) throw std::invalid_argument("init_belief: dimension must be positive");
    if (!(a > 0.0)) throw std::invalid_argument("init_belief: scale must be positive");
    BeliefState s;
    s.mu.assign(d, 0.0);
    s.sigma = Matrix(d, d);
    for (std::size_t i = 0; i < d; ++i) s.sigma(i, i) = a;
    return s;
}

Vector predict(const BeliefState& state, const Matrix& X) {
    if (X.cols() != state.dim())
        throw std::invalid_argument("predict: feature count does not match model dimension");
    return la::multiply(X, state.mu);
}

void validate_batch(const Batch& batch, std::size_t dim) {
    if (batch.X.rows() != batch.Y.size())
        throw std::invalid_argument("batch: X row count does not match Y length");
    if (batch.size() > 0 && batch.X.cols() != dim)
        throw std::invalid_argument("batch: feature count does not match model dimension");
    for (std::size_t i = 0; i < batch.X.rows(); ++i)
        for (std::size_t j = 0; j < batch.X.cols(); ++j)
            if (!std::isfinite(batch.X(i, j)))
                throw InvalidData("batch: non-finite feature value");
    for (double y : batch.Y)
        if (!std::isfinite(y)) throw InvalidData("batch: non-finite target value");
}

BeliefState barow_update(const BeliefState& state, const Batch& batch, const Hyperparams& hp) {
    hp.validate();
    validate_batch(batch, state.dim());
    const std::size_t k = batch.size();
    if (k == 0) return state;

    const double R = hp.batch_regularizer(k);

    // S = R I + X Sigma X^T, factored once for both the mean and the
    // covariance correction.
    Matrix xs = la::multiply(batch.X, state.sigma);  // K x d
    Matrix s = la::multiply_abt(xs, batch.X);        // K x K
    la::add_scaled_identity(s, R);
    Matrix L = la::cholesky(s);

    Matrix w = la::cholesky_solve(L, xs);  // S^-1 X Sigma, K x d

    BeliefState out;
    out.sigma = state.sigma;
    Matrix corr = la::multiply_atb(xs, w);  // Sigma X^T S^-1 X Sigma
    for (std::size_t i = 0; i < out.sigma.rows(); ++i)
        for (std::size_t j = 0; j < out.sigma.cols(); ++j) out.sigma(i, j) -= corr(i, j);
    la::symmetrize(out.sigma);

    Vector resid = la::multiply(batch.X, state.mu);
    for (std::size_t i = 0; i < k; ++i) resid[i] -= batch.Y[i];
    Vector gain = la::cholesky_solve(L, std::move(resid));  // S^-1 (X mu - Y)
    Vector step = la::multiply_t(xs, gain);                 // Sigma X^T S^-1 (X mu - Y)
    out.mu = state.mu;
    for (std::size_t j = 0; j < out.mu.size(); ++j) out.mu[j] -= step[j];
    return out;
}

BeliefState barow_update_information_form(const BeliefState& state, const Batch& batch,
                                           const Hyperparams& hp) {
    hp.validate();
    validate_batch(batch, state.dim());
    const std::size_t k = batch.size();
    if (k == 0) return state;

    const std::size_t d = state.dim();
    const double R = hp.batch_regularizer(k);

    Matrix L = la::cholesky(state.sigma);
    double lmin = L(0, 0), dmax = state.sigma(0, 0);
    for (std::size_t i = 0; i < d; ++i) {
        lmin = std::min(lmin, L(i, i));
        dmax = std::max(dmax, state.sigma(i, i));
    }
    if (lmin * lmin < 1e-14 * dmax)
        throw NumericalError("information form: covariance is numerically singular");

    // Sigma_t = L (I + L^T G L / R)^-1 L^T with G = X^T X keeps every solve
    // at dimension d and never builds Sigma^-1 explicitly.
    Matrix g = la::multiply_atb(batch.X, batch.X);  // d x d
    Matrix gl = la::multiply(g, L);
    Matrix b = la::multiply_atb(L, gl);  // L^T G L
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) b(i, j) /= R;
    la::add_scaled_identity(b, 1.0);
    Matrix Lb = la::cholesky(b);

    Matrix w = la::cholesky_solve(Lb, la::transpose(L));  // B^-1 L^T
    BeliefState out;
    out.sigma = la::multiply(L, w);
    la::symmetrize(out.sigma);

    // rhs = Sigma^-1 mu + X^T Y / R via triangular solves on L.
    Vector theta = la::solve_lower_t(L, la::solve_lower(L, state.mu));
    Vector xty = la::multiply_t(batch.X, batch.Y);
    for (std::size_t j = 0; j < d; ++j) theta[j] += xty[j] / R;
    out.mu = la::multiply(out.sigma, theta);
    return out;
}

BeliefState barow_step(const BeliefState& state, const Batch& batch, const Hyperparams& hp) {
    if (batch.size() <= state.dim()) return barow_update(state, batch, hp);
    try {
        return barow_update_information_form(state, batch, hp);
    } catch (const NumericalError&) {
        return barow_update(state, batch, hp);
    }
}

BeliefState arow_update(const BeliefState& state, const Vector& x, double y, double r) {
    if (x.size() != state.dim())
        throw std::invalid_argument("arow_update: feature count does not match model dimension");
    Batch single;
    single.X = Matrix(1, x.size());
    for (std::size_t j = 0; j < x.size(); ++j) single.X(0, j) = x[j];
    single.Y = {y};
    Hyperparams hp;
    hp.r = r;
    hp.r_scaling = RScaling::Fixed;
    hp.fixed_k = 1;
    return barow_update(state, single, hp);
}

double kl_gaussian(const Vector& mu1, const Matrix& sigma1, const Vector& mu2,
                   const Matrix& sigma2) {
    const std::size_t d = mu1.size();
    if (mu2.size() != d || sigma1.rows() != d || sigma1.cols() != d || sigma2.rows() != d ||
        sigma2.cols() != d)
        throw std::invalid_argument("kl_gaussian: dimension mismatch");

    Matrix l1, l2;
    try {
        l1 = la::cholesky(sigma1);
        l2 = la::cholesky(sigma2);
    } catch (const NumericalError&) {
        throw std::invalid_argument("kl_gaussian: covariance is not positive definite");
    }

    if (mu1 == mu2 && sigma1 == sigma2) return 0.0;

    const double logdet = la::logdet_from_cholesky(l2) - la::logdet_from_cholesky(l1);

    // tr(Sigma2^-1 Sigma1) without forming the inverse
    Matrix w = la::cholesky_solve(l2, sigma1);
    const double tr = la::trace(w);

    Vector diff(d);
    for (std::size_t i = 0; i < d; ++i) diff[i] = mu2[i] - mu1[i];
    Vector sol = la::cholesky_solve(l2, diff);
    const double quad = la::dot(diff, sol);

    return 0.5 * (logdet + tr + quad - static_cast<double>(d));
}

double cost_general(const BeliefState& prev, const Vector& mu, const Matrix& sigma,
                    const Batch& batch, double lambda1, double lambda2) {
    if (mu.size() != prev.dim() || sigma.rows() != prev.dim() || sigma.cols() != prev.dim())
        throw std::invalid_argument("cost: dimension mismatch");
    const double kl = kl_gaussian(mu, sigma, prev.mu, prev.sigma);

    const std::size_t k = batch.size();
    if (k == 0) return kl;

    double sq = 0.0;   // sum of squared residuals
    double var = 0.0;  // sum of x^T Sigma x
    Vector pred = la::multiply(batch.X, mu);
    for (std::size_t i = 0; i < k; ++i) {
        const double e = batch.Y[i] - pred[i];
        sq += e * e;
    }
    for (std::size_t i = 0; i < k; ++i) {
        double xi_s_xi = 0.0;
        for (std::size_t a = 0; a < sigma.rows(); ++a) {
            double row = 0.0;
            for (std::size_t b = 0; b < sigma.cols(); ++b) row += sigma(a, b) * batch.X(i, b);
            xi_s_xi += batch.X(i, a) * row;
        }
        var += xi_s_xi;
    }
    const double kd = static_cast<double>(k);
    return kl + (lambda1 / kd) * sq + (lambda2 / kd) * var;
}

double cost(const BeliefState& prev, const Vector& mu, const Matrix& sigma, const Batch& batch,
            double R) {
    if (!(R > 0.0)) throw std::invalid_argument("cost: R must be positive");
    const double lam = static_cast<double>(batch.size() == 0 ? 1 : batch.size()) / (2.0 * R);
    return cost_general(prev, mu, sigma, batch, lam, lam);
}

BeliefState reset_covariance(const BeliefState& state, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("reset_covariance: scale must be positive");
    BeliefState out;
    out.mu = state.mu;
    out.sigma = Matrix(state.dim(), state.dim());
    for (std::size_t i = 0; i < state.dim(); ++i) out.sigma(i, i) = a;
    return out;
}

} // namespace barow
