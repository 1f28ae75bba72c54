#pragma once

#include <cstdint>

#include "gvt/tensor.hpp"

namespace gvt {

// Guard added to vector norms before cosine similarity.
inline constexpr double kNormEps = 1e-8;
// Guard added to degrees before D^{-1/2} normalization.
inline constexpr double kDegreeEps = 1e-6;

// Whether edge weights softmax the raw cosine distance (weights dissimilar
// pairs more) or its negation (weights similar pairs more).
enum class EdgeSign { Distance, Similarity };

struct GridSpec {
    std::int64_t rows = 1;
    std::int64_t cols = 1;
    std::int64_t tokens() const { return rows * cols; }
};

// Binary 8-neighbour adjacency of a rows x cols token grid: A[i,j] = 1 iff
// the tokens are distinct and within Chebyshev distance 1. Symmetric, zero
// diagonal. Constant (never requires grad).
Tensor build_grid_adjacency(const GridSpec& grid, DType dt = DType::Float32);

// 1 - <vi, vj> / ((|vi| + eps)(|vj| + eps)), in [0, 2].
double cosine_distance(const Tensor& v_i, const Tensor& v_j);

// Pairwise cosine-distance matrix of the rows of V (differentiable).
Tensor cosine_distance_matrix(const Tensor& v);

// Row-wise softmax over pairwise cosine distances (or their negation).
Tensor edge_softmax(const Tensor& v, EdgeSign sign = EdgeSign::Distance);

// (A_I + I) elementwise-times E.
Tensor fuse_adjacency(const Tensor& a_spatial, const Tensor& e);

// D^{-1/2} A D^{-1/2} with robust degrees d_i = sum_j |A_ij| + eps, so signed
// relation matrices normalize to a spectrum inside [-1, 1].
Tensor sym_normalize(const Tensor& a);

}  // namespace gvt
