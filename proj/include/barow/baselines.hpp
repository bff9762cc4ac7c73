#pragma once

#include <cstdint>
#include <span>

#include "barow/model.hpp"

namespace barow::baselines {

/// Rolling-regression protocol: refit on the trailing window_days batches,
/// hold the fit static between refits.
struct RollingConfig {
    std::size_t window_days = 252;
    std::size_t refit_every = 1;
    double ridge_eps = 1e-8;  // tiny regularizer guarding collinear windows

    void validate() const;
};

/// Least-squares fit over the trailing window of `history`:
/// minimizes |Y - X w|^2 + ridge_eps |w|^2 across all stacked rows.
/// Throws NumericalError on a rank-deficient design with ridge_eps = 0.
Vector rolling_fit(std::span<const Batch> history, const RollingConfig& cfg);

enum class UpdateOrder { AsGiven, Shuffled };

/// Applies arow_update once per row of the batch, in the given order or a
/// seeded shuffle. Each row's result feeds the next rank-1 solve, so the
/// trajectory and the finite-precision end state depend on the order taken,
/// unlike the single batched solve.
BeliefState sequential_arow_day(BeliefState state, const Batch& batch, double r,
                                UpdateOrder order, std::uint64_t shuffle_seed = 0);

/// (X^T X + lam I)^-1 X^T Y by direct factorization. Reference oracle for
/// the recursive update chain; self-contained, does not call the linalg
/// kernels.
Vector ridge_closed_form(const Matrix& X, const Vector& Y, double lam);

/// Pivoted Gaussian elimination on a dense system A Z = B. Shares no code
/// with the linalg Cholesky path; exists so tests can cross-check it.
Matrix reference_solve(Matrix a, Matrix b);

} // namespace barow::baselines
