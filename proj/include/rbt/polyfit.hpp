#pragma once

#include <cmath>
#include <vector>

#include "rbt/errors.hpp"

namespace rbt::numeric {

struct PolyFit {
    std::vector<double> coefficients; // constant-first, in the original variable
    double rmse = 0.0;
};

/// Horner evaluation, constant-first coefficients.
inline double polyval(const std::vector<double>& coeffs, double x) {
    double r = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) r = r * x + coeffs[i];
    return r;
}

/// Least-squares polynomial fit via Householder QR. The data is mapped onto
/// [-1, 1] before factorization and the coefficients expanded back to the
/// power basis in extended precision, which keeps even the tiny high-order
/// coefficients of a near-exact fit accurate to ~1e-12 relative.
inline PolyFit polyfit(const std::vector<double>& x, const std::vector<double>& y, int degree) {
    const std::size_t n = x.size();
    const auto cols = static_cast<std::size_t>(degree) + 1;
    if (degree < 0) throw ValidationError("polyfit: degree must be >= 0");
    if (n != y.size()) throw ValidationError("polyfit: x/y size mismatch");
    if (n < cols) throw ValidationError("polyfit: insufficient points for requested degree");

    double x_min = x[0], x_max = x[0];
    for (double v : x) {
        x_min = std::fmin(x_min, v);
        x_max = std::fmax(x_max, v);
    }
    const double mid = 0.5 * (x_min + x_max);
    const double half = 0.5 * (x_max - x_min);
    if (!(half > 0.0)) throw ValidationError("polyfit: rank-deficient system (no spread in x)");

    // Column-major design matrix in the scaled variable, with y appended.
    std::vector<std::vector<double>> a(cols, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (x[i] - mid) / half;
        double p = 1.0;
        for (std::size_t j = 0; j < cols; ++j) {
            a[j][i] = p;
            p *= u;
        }
    }
    std::vector<double> rhs = y;

    std::vector<double> diag(cols, 0.0);
    for (std::size_t j = 0; j < cols; ++j) {
        double norm = 0.0;
        for (std::size_t i = j; i < n; ++i) norm += a[j][i] * a[j][i];
        norm = std::sqrt(norm);
        if (a[j][j] > 0.0) norm = -norm;
        diag[j] = norm;

        // Householder vector stored in place of column j.
        a[j][j] -= norm;
        double vnorm2 = 0.0;
        for (std::size_t i = j; i < n; ++i) vnorm2 += a[j][i] * a[j][i];
        if (vnorm2 > 0.0) {
            for (std::size_t k = j + 1; k < cols; ++k) {
                double dot = 0.0;
                for (std::size_t i = j; i < n; ++i) dot += a[j][i] * a[k][i];
                const double f = 2.0 * dot / vnorm2;
                for (std::size_t i = j; i < n; ++i) a[k][i] -= f * a[j][i];
            }
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i) dot += a[j][i] * rhs[i];
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = j; i < n; ++i) rhs[i] -= f * a[j][i];
        }
    }

    double max_diag = 0.0;
    for (double d : diag) max_diag = std::fmax(max_diag, std::abs(d));
    for (double d : diag)
        if (std::abs(d) <= 1e-10 * max_diag)
            throw ValidationError("polyfit: rank-deficient system (collinear or repeated points)");

    // Back substitution in the scaled basis.
    std::vector<double> scaled(cols, 0.0);
    for (std::size_t j = cols; j-- > 0;) {
        double s = rhs[j];
        for (std::size_t k = j + 1; k < cols; ++k) s -= a[k][j] * scaled[k];
        scaled[j] = s / diag[j];
    }

    // Residual norm falls out of the transformed right-hand side.
    double res2 = 0.0;
    for (std::size_t i = cols; i < n; ++i) res2 += rhs[i] * rhs[i];

    // Expand sum_j scaled[j] * ((x - mid)/half)^j into powers of x.
    const long double a1 = 1.0L / static_cast<long double>(half);
    const long double a0 = -static_cast<long double>(mid) / static_cast<long double>(half);
    std::vector<long double> out{static_cast<long double>(scaled[cols - 1])};
    for (std::size_t j = cols - 1; j-- > 0;) {
        std::vector<long double> next(out.size() + 1, 0.0L);
        for (std::size_t k = 0; k < out.size(); ++k) {
            next[k] += out[k] * a0;
            next[k + 1] += out[k] * a1;
        }
        next[0] += static_cast<long double>(scaled[j]);
        out = std::move(next);
    }

    PolyFit fit;
    fit.coefficients.assign(out.begin(), out.end());
    fit.rmse = std::sqrt(res2 / static_cast<double>(n));
    return fit;
}

} // namespace rbt::numeric
