#include "gvt/graph.hpp"

#include <cmath>

#include "gvt/ops.hpp"

namespace gvt {

Tensor build_grid_adjacency(const GridSpec& grid, DType dt) {
    if (grid.rows < 1 || grid.cols < 1) {
        throw ConfigError("build_grid_adjacency: rows/cols must be positive");
    }
    const std::int64_t rows = grid.rows, cols = grid.cols, n = grid.tokens();
    Tensor a = Tensor::zeros({n, n}, dt);
    dispatch(dt, [&](auto z) {
        using T = decltype(z);
        auto va = a.data<T>();
        for (std::int64_t r = 0; r < rows; ++r) {
            for (std::int64_t c = 0; c < cols; ++c) {
                const std::int64_t i = r * cols + c;
                for (std::int64_t dr = -1; dr <= 1; ++dr) {
                    for (std::int64_t dc = -1; dc <= 1; ++dc) {
                        if (dr == 0 && dc == 0) {
                            continue;
                        }
                        const std::int64_t rr = r + dr, cc = c + dc;
                        if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) {
                            continue;
                        }
                        va[i * n + rr * cols + cc] = T{1};
                    }
                }
            }
        }
    });
    return a;
}

double cosine_distance(const Tensor& v_i, const Tensor& v_j) {
    if (v_i.rank() != 1 || v_j.rank() != 1 || v_i.numel() != v_j.numel()) {
        throw DimensionError("cosine_distance: expects two equal-length vectors");
    }
    const auto a = v_i.to_vector();
    const auto b = v_j.to_vector();
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    return 1.0 - dot / ((std::sqrt(na) + kNormEps) * (std::sqrt(nb) + kNormEps));
}

Tensor cosine_distance_matrix(const Tensor& v) {
    if (v.rank() != 2) {
        throw DimensionError("cosine_distance_matrix: expects [n x d], got " + shape_str(v.shape()));
    }
    // Normalize rows by (|v| + eps), then D = 1 - N N^T.
    Tensor norms = sqrt(row_sums(mul(v, v)));
    Tensor inv = div(Tensor::ones(norms.shape(), v.dtype()), add_scalar(norms, kNormEps));
    Tensor unit = rows_scaled(v, inv);
    Tensor gram = matmul(unit, transpose(unit));
    return add_scalar(neg(gram), 1.0);
}

Tensor edge_softmax(const Tensor& v, EdgeSign sign) {
    Tensor d = cosine_distance_matrix(v);
    if (sign == EdgeSign::Similarity) {
        d = neg(d);
    }
    return softmax_rows(d);
}

Tensor fuse_adjacency(const Tensor& a_spatial, const Tensor& e) {
    if (a_spatial.shape() != e.shape()) {
        throw DimensionError("fuse_adjacency: shape mismatch " + shape_str(a_spatial.shape()) +
                             " vs " + shape_str(e.shape()));
    }
    if (a_spatial.rank() != 2 || a_spatial.dim(0) != a_spatial.dim(1)) {
        throw DimensionError("fuse_adjacency: expects square matrices");
    }
    Tensor eye = Tensor::eye(a_spatial.dim(0), a_spatial.dtype());
    return mul(add(a_spatial, eye), e);
}

Tensor sym_normalize(const Tensor& a) {
    if (a.rank() != 2 || a.dim(0) != a.dim(1)) {
        throw DimensionError("sym_normalize: expects a square matrix, got " + shape_str(a.shape()));
    }
    Tensor deg = add_scalar(row_sums(abs(a)), kDegreeEps);
    Tensor inv_sqrt = div(Tensor::ones(deg.shape(), a.dtype()), sqrt(deg));
    // Scale rows, then columns (trailing-dimension broadcast).
    return mul(rows_scaled(a, inv_sqrt), inv_sqrt);
}

}  // namespace gvt
