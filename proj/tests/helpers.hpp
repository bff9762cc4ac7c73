#pragma once

// Shared test utilities: seeded random fixtures, tolerant comparisons and a
// scratch-directory guard. Doctest-free so the acceptance runner can use it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "barow/linalg.hpp"
#include "barow/model.hpp"

namespace testutil {

using barow::Batch;
using barow::BeliefState;
using barow::Matrix;
using barow::Vector;

inline Vector random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, scale);
    Vector v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                            double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, scale);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = dist(rng);
    return m;
}

/// A^T A + jitter * I for a random square A: symmetric positive definite.
inline Matrix random_spd(std::mt19937_64& rng, std::size_t n, double jitter = 0.5) {
    Matrix a = random_matrix(rng, n, n);
    Matrix s = barow::linalg::multiply_atb(a, a);
    barow::linalg::add_scaled_identity(s, jitter);
    return s;
}

inline Batch random_batch(std::mt19937_64& rng, std::size_t k, std::size_t d,
                          double x_scale = 1.0, double y_scale = 1.0) {
    Batch b;
    b.X = random_matrix(rng, k, d, x_scale);
    b.Y = random_vector(rng, k, y_scale);
    return b;
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        return std::numeric_limits<double>::infinity();
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            m = std::max(m, std::fabs(a(i, j) - b(i, j)));
    return m;
}

/// Largest entry difference across both belief components.
inline double state_diff(const BeliefState& a, const BeliefState& b) {
    return std::max(max_abs_diff(a.mu, b.mu), max_abs_diff(a.sigma, b.sigma));
}

inline double rel_diff(double got, double want) {
    return std::fabs(got - want) / std::max(1.0, std::fabs(want));
}

/// max |a-b| / max(1, |b|) over all entries of both components.
inline double state_rel_diff(const BeliefState& a, const BeliefState& b) {
    double scale = 1.0;
    for (double v : b.mu) scale = std::max(scale, std::fabs(v));
    for (std::size_t i = 0; i < b.sigma.rows(); ++i)
        for (std::size_t j = 0; j < b.sigma.cols(); ++j)
            scale = std::max(scale, std::fabs(b.sigma(i, j)));
    return state_diff(a, b) / scale;
}

/// Batch with the rows of (X, Y) reordered by `perm`.
inline Batch permute_rows(const Batch& b, const std::vector<std::size_t>& perm) {
    Batch out = b;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        out.Y[i] = b.Y[perm[i]];
        for (std::size_t j = 0; j < b.X.cols(); ++j) out.X(i, j) = b.X(perm[i], j);
    }
    return out;
}

inline std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
}

/// Self-deleting scratch directory under the system temp path.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("barow-" + tag + "-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter_++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

/// Central finite differences of the batch objective, taken in mu and in
/// the symmetric coordinates of sigma (diagonal entries, then paired
/// off-diagonal perturbations). Order matches across call sites, so norms
/// at different evaluation points are comparable.
inline std::vector<double> fd_cost_gradient(const BeliefState& prev, const Batch& batch,
                                            double R, const Vector& mu, const Matrix& sigma,
                                            double h = 1e-6) {
    std::vector<double> g;
    const std::size_t d = mu.size();
    for (std::size_t i = 0; i < d; ++i) {
        Vector lo = mu, hi = mu;
        lo[i] -= h;
        hi[i] += h;
        g.push_back((barow::cost(prev, hi, sigma, batch, R) -
                     barow::cost(prev, lo, sigma, batch, R)) /
                    (2.0 * h));
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            Matrix lo = sigma, hi = sigma;
            lo(i, j) -= h;
            hi(i, j) += h;
            if (j != i) {
                lo(j, i) -= h;
                hi(j, i) += h;
            }
            g.push_back((barow::cost(prev, mu, hi, batch, R) -
                         barow::cost(prev, mu, lo, batch, R)) /
                        (2.0 * h));
        }
    }
    return g;
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline bool file_exists(const std::string& path) { return std::filesystem::exists(path); }

} // namespace testutil
