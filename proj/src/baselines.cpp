#include "barow/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace barow::baselines {

void RollingConfig::validate() const {
    if (window_days == 0) throw std::invalid_argument("RollingConfig: window_days must be >= 1");
    if (refit_every == 0) throw std::invalid_argument("RollingConfig: refit_every must be >= 1");
    if (ridge_eps < 0.0) throw std::invalid_argument("RollingConfig: ridge_eps must be >= 0");
}

Matrix reference_solve(Matrix a, Matrix b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.rows() != n)
        throw std::invalid_argument("reference_solve: dimension mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < n; ++i)
            if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
        if (std::abs(a(piv, col)) < 1e-300)
            throw NumericalError("reference_solve: singular matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(col, j), b(piv, j));
        }
        const double inv = 1.0 / a(col, col);
        for (std::size_t i = col + 1; i < n; ++i) {
            const double f = a(i, col) * inv;
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(col, j);
            for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(col, j);
        }
    }
    for (std::size_t col = n; col-- > 0;) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = b(col, j);
            for (std::size_t k = col + 1; k < n; ++k) s -= a(col, k) * b(k, j);
            b(col, j) = s / a(col, col);
        }
    }
    return b;
}

Vector ridge_closed_form(const Matrix& X, const Vector& Y, double lam) {
    if (!(lam > 0.0)) throw std::invalid_argument("ridge_closed_form: lam must be positive");
    if (X.rows() != Y.size())
        throw std::invalid_argument("ridge_closed_form: X rows do not match Y length");
    const std::size_t n = X.rows(), d = X.cols();

    // Normal equations assembled with plain loops; the solve is local
    // pivoted elimination, independent of the model update path.
    Matrix g(d, d);
    Matrix rhs(d, 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < d; ++a) {
            const double xa = X(i, a);
            for (std::size_t b = 0; b < d; ++b) g(a, b) += xa * X(i, b);
            rhs(a, 0) += xa * Y[i];
        }
    }
    for (std::size_t a = 0; a < d; ++a) g(a, a) += lam;
    Matrix w = reference_solve(std::move(g), std::move(rhs));
    Vector out(d);
    for (std::size_t a = 0; a < d; ++a) out[a] = w(a, 0);
    return out;
}

Vector rolling_fit(std::span<const Batch> history, const RollingConfig& cfg) {
    cfg.validate();
    if (history.empty()) throw std::invalid_argument("rolling_fit: empty history");

    const std::size_t use = std::min(history.size(), cfg.window_days);
    const std::span<const Batch> window = history.subspan(history.size() - use);

    std::size_t d = 0;
    std::size_t rows = 0;
    for (const Batch& b : window) {
        rows += b.size();
        if (b.size() > 0) d = b.X.cols();
    }
    if (rows == 0) throw std::invalid_argument("rolling_fit: window holds no rows");

    Matrix g(d, d);
    Vector rhs(d, 0.0);
    for (const Batch& b : window) {
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double* xi = b.X.row(i);
            for (std::size_t a = 0; a < d; ++a) {
                for (std::size_t c = 0; c < d; ++c) g(a, c) += xi[a] * xi[c];
                rhs[a] += xi[a] * b.Y[i];
            }
        }
    }
    for (std::size_t a = 0; a < d; ++a) g(a, a) += cfg.ridge_eps;

    Matrix b(d, 1);
    for (std::size_t a = 0; a < d; ++a) b(a, 0) = rhs[a];
    Matrix w;
    try {
        w = reference_solve(std::move(g), std::move(b));
    } catch (const NumericalError&) {
        throw NumericalError("rolling_fit: rank-deficient window (increase ridge_eps)");
    }
    Vector out(d);
    for (std::size_t a = 0; a < d; ++a) out[a] = w(a, 0);
    return out;
}

BeliefState sequential_arow_day(BeliefState state, const Batch& batch, double r,
                                UpdateOrder order, std::uint64_t shuffle_seed) {
    validate_batch(batch, state.dim());
    std::vector<std::size_t> idx(batch.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (order == UpdateOrder::Shuffled) {
        std::mt19937_64 rng(shuffle_seed);
        std::shuffle(idx.begin(), idx.end(), rng);
    }
    Vector x(batch.X.cols());
    for (std::size_t i : idx) {
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = batch.X(i, j);
        state = arow_update(state, x, batch.Y[i], r);
    }
    return state;
}

} // namespace barow::baselines
