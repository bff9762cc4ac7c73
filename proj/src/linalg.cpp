#include "barow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace barow {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

namespace linalg {

namespace {

void check_dims(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("dimension mismatch in ") + what);
}

// Work threshold below which the OpenMP if-clause keeps kernels serial.
constexpr std::size_t kParallelWork = 16 * 1024;

} // namespace

Matrix multiply(const Matrix& a, const Matrix& b) {
    check_dims(a.cols() == b.rows(), "multiply");
    const std::size_t m = a.rows(), n = b.cols(), k = a.cols();
    Matrix c(m, n);
#pragma omp parallel for schedule(static) if (m * n * k > kParallelWork)
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t l = 0; l < k; ++l) {
            const double v = ai[l];
            const double* bl = b.row(l);
            for (std::size_t j = 0; j < n; ++j) ci[j] += v * bl[j];
        }
    }
    return c;
}

Matrix multiply_abt(const Matrix& a, const Matrix& b) {
    check_dims(a.cols() == b.cols(), "multiply_abt");
    const std::size_t m = a.rows(), n = b.rows(), k = a.cols();
    Matrix c(m, n);
#pragma omp parallel for schedule(static) if (m * n * k > kParallelWork)
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b.row(j);
            double s = 0.0;
            for (std::size_t l = 0; l < k; ++l) s += ai[l] * bj[l];
            ci[j] = s;
        }
    }
    return c;
}

Matrix multiply_atb(const Matrix& a, const Matrix& b) {
    check_dims(a.rows() == b.rows(), "multiply_atb");
    const std::size_t m = a.cols(), n = b.cols(), k = a.rows();
    Matrix c(m, n);
#pragma omp parallel for schedule(static) if (m * n * k > kParallelWork)
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = c.row(i);
        for (std::size_t l = 0; l < k; ++l) {
            const double v = a(l, i);
            const double* bl = b.row(l);
            for (std::size_t j = 0; j < n; ++j) ci[j] += v * bl[j];
        }
    }
    return c;
}

Vector multiply(const Matrix& a, const Vector& v) {
    check_dims(a.cols() == v.size(), "multiply (matvec)");
    const std::size_t m = a.rows(), k = a.cols();
    Vector out(m, 0.0);
#pragma omp parallel for schedule(static) if (m * k > kParallelWork)
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a.row(i);
        double s = 0.0;
        for (std::size_t l = 0; l < k; ++l) s += ai[l] * v[l];
        out[i] = s;
    }
    return out;
}

Vector multiply_t(const Matrix& a, const Vector& v) {
    check_dims(a.rows() == v.size(), "multiply_t (matvec)");
    const std::size_t n = a.cols(), k = a.rows();
    Vector out(n, 0.0);
#pragma omp parallel for schedule(static) if (n * k > kParallelWork)
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < k; ++l) s += a(l, j) * v[l];
        out[j] = s;
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

void symmetrize(Matrix& a) {
    check_dims(a.rows() == a.cols(), "symmetrize");
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = v;
            a(j, i) = v;
        }
}

void add_scaled_identity(Matrix& a, double s) {
    check_dims(a.rows() == a.cols(), "add_scaled_identity");
    for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += s;
}

double trace(const Matrix& a) {
    check_dims(a.rows() == a.cols(), "trace");
    double t = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
    return t;
}

double dot(const Vector& a, const Vector& b) {
    check_dims(a.size() == b.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

Matrix cholesky(const Matrix& a) {
    check_dims(a.rows() == a.cols(), "cholesky");
    const std::size_t n = a.rows();
    Matrix L(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        const double* lj = L.row(j);
        for (std::size_t k = 0; k < j; ++k) d -= lj[k] * lj[k];
        if (!(d > 0.0)) throw NumericalError("cholesky: matrix is not positive definite");
        const double ljj = std::sqrt(d);
        L(j, j) = ljj;
#pragma omp parallel for schedule(static) if ((n - j) * j > kParallelWork)
        for (std::size_t i = j + 1; i < n; ++i) {
            const double* li = L.row(i);
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
            L(i, j) = s / ljj;
        }
    }
    return L;
}

Vector solve_lower(const Matrix& L, Vector b) {
    check_dims(L.rows() == L.cols() && L.rows() == b.size(), "solve_lower");
    const std::size_t n = b.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double* li = L.row(i);
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= li[k] * b[k];
        b[i] = s / li[i];
    }
    return b;
}

Vector solve_lower_t(const Matrix& L, Vector b) {
    check_dims(L.rows() == L.cols() && L.rows() == b.size(), "solve_lower_t");
    const std::size_t n = b.size();
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= L(k, ii) * b[k];
        b[ii] = s / L(ii, ii);
    }
    return b;
}

Vector cholesky_solve(const Matrix& L, Vector b) {
    return solve_lower_t(L, solve_lower(L, std::move(b)));
}

Matrix cholesky_solve(const Matrix& L, Matrix b) {
    check_dims(L.rows() == b.rows(), "cholesky_solve");
    const std::size_t n = b.rows(), m = b.cols();
#pragma omp parallel for schedule(static) if (n * n * m > kParallelWork)
    for (std::size_t j = 0; j < m; ++j) {
        // forward then backward substitution on column j
        for (std::size_t i = 0; i < n; ++i) {
            const double* li = L.row(i);
            double s = b(i, j);
            for (std::size_t k = 0; k < i; ++k) s -= li[k] * b(k, j);
            b(i, j) = s / li[i];
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double s = b(ii, j);
            for (std::size_t k = ii + 1; k < n; ++k) s -= L(k, ii) * b(k, j);
            b(ii, j) = s / L(ii, ii);
        }
    }
    return b;
}

double logdet_from_cholesky(const Matrix& L) {
    double s = 0.0;
    for (std::size_t i = 0; i < L.rows(); ++i) s += std::log(L(i, i));
    return 2.0 * s;
}

std::vector<double> symmetric_eigenvalues(Matrix a) {
    check_dims(a.rows() == a.cols(), "symmetric_eigenvalues");
    const std::size_t n = a.rows();
    if (n == 0) return {};

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
    const double tol = (scale > 0.0 ? scale : 1.0) * 1e-14;

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off = std::max(off, std::abs(a(i, j)));
        if (off < tol) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) < tol * 1e-2) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

namespace serial {

Matrix multiply(const Matrix& a, const Matrix& b) {
    check_dims(a.cols() == b.rows(), "serial::multiply");
    const std::size_t m = a.rows(), n = b.cols(), k = a.cols();
    Matrix c(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t l = 0; l < k; ++l) {
            const double v = ai[l];
            const double* bl = b.row(l);
            for (std::size_t j = 0; j < n; ++j) ci[j] += v * bl[j];
        }
    }
    return c;
}

Matrix multiply_abt(const Matrix& a, const Matrix& b) {
    check_dims(a.cols() == b.cols(), "serial::multiply_abt");
    const std::size_t m = a.rows(), n = b.rows(), k = a.cols();
    Matrix c(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double* ai = a.row(i);
            const double* bj = b.row(j);
            double s = 0.0;
            for (std::size_t l = 0; l < k; ++l) s += ai[l] * bj[l];
            c(i, j) = s;
        }
    return c;
}

Matrix multiply_atb(const Matrix& a, const Matrix& b) {
    check_dims(a.rows() == b.rows(), "serial::multiply_atb");
    const std::size_t m = a.cols(), n = b.cols(), k = a.rows();
    Matrix c(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t l = 0; l < k; ++l) {
            const double v = a(l, i);
            for (std::size_t j = 0; j < n; ++j) c(i, j) += v * b(l, j);
        }
    return c;
}

Vector multiply(const Matrix& a, const Vector& v) {
    check_dims(a.cols() == v.size(), "serial::multiply (matvec)");
    Vector out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t l = 0; l < a.cols(); ++l) s += a(i, l) * v[l];
        out[i] = s;
    }
    return out;
}

Vector multiply_t(const Matrix& a, const Vector& v) {
    check_dims(a.rows() == v.size(), "serial::multiply_t (matvec)");
    Vector out(a.cols(), 0.0);
    for (std::size_t l = 0; l < a.rows(); ++l)
        for (std::size_t j = 0; j < a.cols(); ++j) out[j] += a(l, j) * v[l];
    return out;
}

Matrix cholesky(const Matrix& a) {
    check_dims(a.rows() == a.cols(), "serial::cholesky");
    const std::size_t n = a.rows();
    Matrix L(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (!(d > 0.0)) throw NumericalError("serial::cholesky: matrix is not positive definite");
        L(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / L(j, j);
        }
    }
    return L;
}

} // namespace serial

} // namespace linalg
} // namespace barow
