#include "gvt/eig.hpp"

#include <algorithm>
#include <cmath>

namespace gvt {

std::vector<double> jacobi_eigenvalues(const Tensor& a, double tol, int max_sweeps) {
    if (a.rank() != 2 || a.dim(0) != a.dim(1)) {
        throw DimensionError("jacobi_eigenvalues: expects a square matrix, got " +
                             shape_str(a.shape()));
    }
    const std::int64_t n = a.dim(0);
    std::vector<double> m = a.to_vector();

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::int64_t p = 0; p < n; ++p) {
            for (std::int64_t q = 0; q < n; ++q) {
                if (p != q) {
                    s += m[p * n + q] * m[p * n + q];
                }
            }
        }
        return std::sqrt(s);
    };

    int sweep = 0;
    while (off_norm() >= tol) {
        if (sweep++ >= max_sweeps) {
            throw NumericError("jacobi_eigenvalues: no convergence after " +
                               std::to_string(max_sweeps) + " sweeps");
        }
        for (std::int64_t p = 0; p < n - 1; ++p) {
            for (std::int64_t q = p + 1; q < n; ++q) {
                const double apq = m[p * n + q];
                if (apq == 0.0) {
                    continue;
                }
                const double app = m[p * n + p];
                const double aqq = m[q * n + q];
                const double theta = 0.5 * (aqq - app) / apq;
                // Smaller-magnitude rotation root for stability.
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::int64_t k = 0; k < n; ++k) {
                    const double akp = m[k * n + p];
                    const double akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for (std::int64_t k = 0; k < n; ++k) {
                    const double apk = m[p * n + k];
                    const double aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }

    std::vector<double> eig(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        eig[static_cast<std::size_t>(i)] = m[i * n + i];
    }
    std::sort(eig.begin(), eig.end());
    return eig;
}

std::vector<double> laplacian_spectrum(const Tensor& r_sym) {
    if (r_sym.rank() != 2 || r_sym.dim(0) != r_sym.dim(1)) {
        throw DimensionError("laplacian_spectrum: expects a square matrix, got " +
                             shape_str(r_sym.shape()));
    }
    const std::int64_t n = r_sym.dim(0);
    const auto v = r_sym.to_vector();
    double asym = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = i + 1; j < n; ++j) {
            asym = std::max(asym, std::abs(v[i * n + j] - v[j * n + i]));
        }
    }
    if (asym > 1e-8) {
        throw ContractError("laplacian_spectrum: input asymmetric by " + std::to_string(asym));
    }

    Tensor lap = Tensor::zeros({n, n}, DType::Float64);
    auto l = lap.data<double>();
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < n; ++j) {
            const double sym = 0.5 * (v[i * n + j] + v[j * n + i]);
            l[i * n + j] = (i == j ? 1.0 : 0.0) - sym;
        }
    }
    return jacobi_eigenvalues(lap);
}

}  // namespace gvt
