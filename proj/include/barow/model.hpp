#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "barow/dates.hpp"
#include "barow/linalg.hpp"

namespace barow {

/// Gaussian belief over a weight vector: mu is the current estimate, sigma
/// the confidence. sigma is kept symmetric and positive semidefinite by
/// every operation that produces a state.
struct BeliefState {
    Vector mu;
    Matrix sigma;

    std::size_t dim() const { return mu.size(); }
};

/// One synchronous cross-section: K feature rows, K targets, one date.
struct Batch {
    Matrix X;  // K x d
    Vector Y;  // K
    Date date;
    std::vector<std::string> symbols;

    std::size_t size() const { return Y.size(); }
};

/// Controls how the batch regularizer R scales with the cross-section size.
/// PerBatch keeps the per-sample weight constant (R = r * K_t); Fixed pins
/// R = r * fixed_k regardless of the batch actually seen.
enum class RScaling { PerBatch, Fixed };

struct Hyperparams {
    double r = 1.0;             // per-sample regularization, r > 0
    double sigma0_scale = 1.0;  // initial covariance is sigma0_scale * I
    RScaling r_scaling = RScaling::PerBatch;
    std::size_t fixed_k = 1;    // reference batch size for RScaling::Fixed

    double batch_regularizer(std::size_t k) const {
        return r * static_cast<double>(r_scaling == RScaling::PerBatch ? k : fixed_k);
    }
    void validate() const;
};

/// Zero mean, a * identity covariance.
BeliefState init_belief(std::size_t d, double a);

/// Mean response X * mu.
Vector predict(const BeliefState& state, const Matrix& X);

/// One batched update in dispersion form:
///   Sigma_t = Sigma - Sigma X^T (R I + X Sigma X^T)^-1 X Sigma
///   mu_t    = mu - Sigma X^T (R I + X Sigma X^T)^-1 (X mu - Y)
/// Factors the K x K system; the input state is untouched. K = 0 is a no-op.
BeliefState barow_update(const BeliefState& state, const Batch& batch, const Hyperparams& hp);

/// The same update through the information parameterization:
///   Sigma_t^-1 = Sigma^-1 + X^T X / R
///   mu_t       = Sigma_t (Sigma^-1 mu + X^T Y / R)
/// Solves d x d systems via the Cholesky factor of Sigma, so it is the
/// cheaper route when K > d. Requires sigma invertible; throws
/// NumericalError when it is numerically singular.
BeliefState barow_update_information_form(const BeliefState& state, const Batch& batch,
                                           const Hyperparams& hp);

/// Production entry point: picks the K x K or d x d route by batch shape
/// (dispersion when K <= d, information otherwise, falling back to
/// dispersion if the covariance factorization fails). Both routes agree to
/// rounding error.
BeliefState barow_step(const BeliefState& state, const Batch& batch, const Hyperparams& hp);

/// Single-instance update: exactly barow_update on the 1-row batch with
/// R = r.
BeliefState arow_update(const BeliefState& state, const Vector& x, double y, double r);

/// The batch objective minimized by the update: KL to the previous belief
/// plus (1/2R)(squared residual + predictive variance). Test/diagnostic
/// code only; the update path never evaluates it.
double cost(const BeliefState& prev, const Vector& mu, const Matrix& sigma, const Batch& batch,
            double R);

/// Generalization with independent loss and confidence weights lambda1,
/// lambda2 (cost(R) is the lambda1 = lambda2 = K/(2R) case). No update
/// formula is provided for the unequal case; this exists for testing the
/// objective itself.
double cost_general(const BeliefState& prev, const Vector& mu, const Matrix& sigma,
                    const Batch& batch, double lambda1, double lambda2);

/// KL divergence between Gaussians N(mu1, sigma1) and N(mu2, sigma2).
double kl_gaussian(const Vector& mu1, const Matrix& sigma1, const Vector& mu2,
                   const Matrix& sigma2);

/// sigma <- a * identity, mu preserved.
BeliefState reset_covariance(const BeliefState& state, double a);

/// Throws InvalidData if the batch holds non-finite values, or
/// std::invalid_argument on dimension mismatch against dim.
void validate_batch(const Batch& batch, std::size_t dim);

} // namespace barow
