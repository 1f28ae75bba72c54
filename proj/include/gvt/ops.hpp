#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gvt/tensor.hpp"

// Differentiable tensor operations. All ops are pure: they allocate a fresh
// output and never mutate operands. Broadcasting in binary ops is restricted
// to scalar <-> tensor and a vector matching the trailing dimension; anything
// else is a DimensionError.

namespace gvt {

// ---- elementwise binary -------------------------------------------------
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

// ---- scalar-constant variants (constant carries no grad) -----------------
Tensor add_scalar(const Tensor& a, double c);
Tensor mul_scalar(const Tensor& a, double c);
inline Tensor neg(const Tensor& a) { return mul_scalar(a, -1.0); }

// ---- elementwise unary ----------------------------------------------------
Tensor sigmoid(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor abs(const Tensor& a);
Tensor sqrt(const Tensor& a);

// ---- matrix ---------------------------------------------------------------
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor batch_matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

// ---- shape ------------------------------------------------------------
Tensor reshape(const Tensor& a, Shape shape);
Tensor slice_cols(const Tensor& a, std::int64_t j0, std::int64_t j1);
Tensor concat_cols(std::span<const Tensor> parts);
// Stacks k same-shape tensors into a [k, ...] tensor.
Tensor stack0(std::span<const Tensor> parts);
// Slice i of the leading dimension, rank reduced by one.
Tensor index0(const Tensor& a, std::int64_t i);

// ---- reductions ---------------------------------------------------------
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
// Sum over the trailing dimension: [..., n] -> [...]; rank-1 input gives [1].
Tensor row_sums(const Tensor& a);
// Largest |a_i| as a scalar tensor; gradient routes to the first attaining
// element.
Tensor max_abs(const Tensor& a);

// ---- structured ----------------------------------------------------------
// Scales row i of a [m x n] matrix by s[i].
Tensor rows_scaled(const Tensor& a, const Tensor& s);
// Places each length-n row of z on the diagonal of an n x n matrix: [h x n]
// -> [h x n x n].
Tensor diag_embed(const Tensor& z);
// out[i,a,b] = z[i,a] * s[i,a,b] * z[i,b]; equals diag(z_i) S_i diag(z_i)
// without materialising the diagonal matrices.
Tensor diag_conjugate(const Tensor& s, const Tensor& z);

// ---- neural-net ----------------------------------------------------------
// Row-wise softmax with max subtraction. Non-finite input is a NumericError.
Tensor softmax_rows(const Tensor& a);
// Mean negative log-likelihood of labels under row-wise softmax(logits).
Tensor softmax_cross_entropy(const Tensor& logits, std::span<const std::int64_t> labels);
// Grouped 2D convolution, NCHW single image: input [Cin,H,W], weight
// [Cout,Cin/groups,K,K], bias [Cout].
Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, std::int64_t stride,
              std::int64_t padding, std::int64_t groups);

}  // namespace gvt
