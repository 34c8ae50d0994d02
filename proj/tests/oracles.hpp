// Independent oracles used only by the test suites. Each one takes a
// different algebraic route from the implementation it checks:
//   - Fréchet cross term via Denman-Beavers iteration on S1*S2 (plain
//     long-double matrices, Gauss-Jordan inverses) instead of the symmetric
//     eigendecomposition route.
//   - chi-square(1) upper tail via the regularized incomplete gamma function
//     instead of erfc.
//   - two-sided binomial tail via exact integer enumeration.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracles {

// ---- dense long-double matrices -------------------------------------------

using Matrix = std::vector<long double>;  // d x d row-major

inline Matrix identity(std::size_t d) {
    Matrix m(d * d, 0.0L);
    for (std::size_t i = 0; i < d; ++i) m[i * d + i] = 1.0L;
    return m;
}

inline Matrix multiply(const Matrix& a, const Matrix& b, std::size_t d) {
    Matrix out(d * d, 0.0L);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            const long double aik = a[i * d + k];
            for (std::size_t j = 0; j < d; ++j) out[i * d + j] += aik * b[k * d + j];
        }
    }
    return out;
}

// Gauss-Jordan with partial pivoting.
inline Matrix invert(Matrix a, std::size_t d) {
    Matrix inv = identity(d);
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < d; ++r) {
            if (std::fabs(static_cast<double>(a[r * d + col])) >
                std::fabs(static_cast<double>(a[pivot * d + col]))) {
                pivot = r;
            }
        }
        if (a[pivot * d + col] == 0.0L) throw std::runtime_error("oracle: singular matrix");
        if (pivot != col) {
            for (std::size_t j = 0; j < d; ++j) {
                std::swap(a[pivot * d + j], a[col * d + j]);
                std::swap(inv[pivot * d + j], inv[col * d + j]);
            }
        }
        const long double p = a[col * d + col];
        for (std::size_t j = 0; j < d; ++j) {
            a[col * d + j] /= p;
            inv[col * d + j] /= p;
        }
        for (std::size_t r = 0; r < d; ++r) {
            if (r == col) continue;
            const long double f = a[r * d + col];
            if (f == 0.0L) continue;
            for (std::size_t j = 0; j < d; ++j) {
                a[r * d + j] -= f * a[col * d + j];
                inv[r * d + j] -= f * inv[col * d + j];
            }
        }
    }
    return inv;
}

// Denman-Beavers square root of a matrix with positive real eigenvalues.
inline Matrix matrix_sqrt_db(const Matrix& a, std::size_t d) {
    Matrix x = a;
    Matrix y = identity(d);
    for (int iter = 0; iter < 100; ++iter) {
        const Matrix xi = invert(x, d);
        const Matrix yi = invert(y, d);
        Matrix xn(d * d), yn(d * d);
        long double delta = 0.0L;
        for (std::size_t i = 0; i < d * d; ++i) {
            xn[i] = 0.5L * (x[i] + yi[i]);
            yn[i] = 0.5L * (y[i] + xi[i]);
            delta = std::max(delta, std::fabs(static_cast<double>(xn[i] - x[i])) + 0.0L);
        }
        x = std::move(xn);
        y = std::move(yn);
        if (delta < 1e-14L) break;
    }
    return x;
}

// ||mu1-mu2||^2 + Tr(S1) + Tr(S2) - 2 Tr(sqrt(S1*S2)) via Denman-Beavers.
inline double frechet_brute_force(const std::vector<double>& mean_a, const std::vector<double>& cov_a,
                                  const std::vector<double>& mean_b, const std::vector<double>& cov_b,
                                  std::size_t d) {
    long double mean_sq = 0.0L;
    for (std::size_t i = 0; i < d; ++i) {
        const long double diff = static_cast<long double>(mean_a[i]) - mean_b[i];
        mean_sq += diff * diff;
    }
    Matrix sa(cov_a.begin(), cov_a.end());
    Matrix sb(cov_b.begin(), cov_b.end());
    const Matrix prod = multiply(sa, sb, d);
    const Matrix root = matrix_sqrt_db(prod, d);
    long double tr = 0.0L;
    for (std::size_t i = 0; i < d; ++i) tr += sa[i * d + i] + sb[i * d + i] - 2.0L * root[i * d + i];
    return static_cast<double>(mean_sq + tr);
}

// ---- chi-square(1) upper tail ----------------------------------------------

// Regularized incomplete gamma P(a,x) by series, Q(a,x) by Lentz continued
// fraction, in long double.
inline long double gamma_p_series(long double a, long double x) {
    long double ap = a, sum = 1.0L / a, del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0L;
        del *= x / ap;
        sum += del;
        if (std::fabs(static_cast<double>(del)) < std::fabs(static_cast<double>(sum)) * 1e-20) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(static_cast<double>(a)));
}

inline long double gamma_q_cf(long double a, long double x) {
    const long double tiny = 1e-300L;
    long double b = x + 1.0L - a, c = 1.0L / tiny, d = 1.0L / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const long double an = -static_cast<long double>(i) * (static_cast<long double>(i) - a);
        b += 2.0L;
        d = an * d + b;
        if (std::fabs(static_cast<double>(d)) < static_cast<double>(tiny)) d = tiny;
        c = b + an / c;
        if (std::fabs(static_cast<double>(c)) < static_cast<double>(tiny)) c = tiny;
        d = 1.0L / d;
        const long double del = d * c;
        h *= del;
        if (std::fabs(static_cast<double>(del - 1.0L)) < 1e-20) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(static_cast<double>(a))) * h;
}

// Survival function of the chi-square distribution with 1 degree of freedom.
inline double chi2_1_sf(double stat) {
    if (stat <= 0.0) return 1.0;
    const long double a = 0.5L;
    const long double x = static_cast<long double>(stat) / 2.0L;
    const long double q = (x < a + 1.0L) ? 1.0L - gamma_p_series(a, x) : gamma_q_cf(a, x);
    return static_cast<double>(q);
}

// ---- exact binomial tail -----------------------------------------------------

// min(1, 2*P(X <= k)) for X ~ Binomial(n, 1/2), exact integer enumeration.
// n must stay small enough for 64-bit binomials (n <= 60).
inline double binomial_two_sided_exact(std::uint64_t k, std::uint64_t n) {
    std::uint64_t tail = 0;
    std::uint64_t coeff = 1;  // C(n, 0)
    for (std::uint64_t i = 0; i <= k; ++i) {
        if (i > 0) coeff = coeff * (n - i + 1) / i;
        tail += coeff;
    }
    const double p = 2.0 * static_cast<double>(tail) / std::ldexp(1.0, static_cast<int>(n));
    return p < 1.0 ? p : 1.0;
}

// ---- deterministic test randomness ----------------------------------------

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Box-Muller from raw uniforms; std::normal_distribution is implementation-
// defined and would break cross-run determinism checks.
inline double gaussian(std::mt19937_64& rng, double sigma) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(u1 > 1e-300 ? u1 : 1e-300));
    return sigma * r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

// Random strictly positive-definite covariance: M^T M / d + eps I.
inline std::vector<double> random_spd(std::size_t d, std::mt19937_64& rng, double eps = 0.05) {
    std::vector<double> m(d * d);
    for (double& v : m) v = 2.0 * uniform01(rng) - 1.0;
    std::vector<double> out(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < d; ++k) s += m[k * d + i] * m[k * d + j];
            out[i * d + j] = s / static_cast<double>(d);
        }
    }
    for (std::size_t i = 0; i < d; ++i) out[i * d + i] += eps;
    return out;
}

}  // namespace oracles
