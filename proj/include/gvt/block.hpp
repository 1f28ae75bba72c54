#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gvt/graph.hpp"
#include "gvt/tensor.hpp"

namespace gvt {

// Two-layer grouped convolutional tokenizer. The kernel is fixed at 5
// (padding 2); the strides set how many tokens an image becomes.
struct EmbedConfig {
    std::int64_t in_channels = 3;
    std::int64_t hidden_channels = 64;
    std::int64_t out_channels = 64;
    std::int64_t groups = 1;
    std::int64_t stride1 = 2;
    std::int64_t stride2 = 2;
    static constexpr std::int64_t kKernel = 5;
    static constexpr std::int64_t kPadding = 2;
};

enum class Talking { None, Shazeer, Gvt };

struct AblationFlags {
    Talking talking = Talking::Gvt;
    bool residual = true;
    EdgeSign edge_sign = EdgeSign::Distance;
    bool pre_norm = false;
};

// Learnable weights of one block for (tokens n, dim d, heads h).
struct BlockParams {
    std::vector<Tensor> wq;  // per head, [d/h x d/h]
    std::vector<Tensor> wk;
    std::vector<Tensor> wv;
    Tensor wh;   // [2d/h x h]
    Tensor wc;   // [h x n]
    Tensor u;    // [h], gate temperature, init 1, clamped >= kMinGateTemp
    Tensor phi;  // [h x h], init near identity
    Tensor wo;   // [d x d]

    std::int64_t heads() const { return static_cast<std::int64_t>(wq.size()); }
};

inline constexpr double kMinGateTemp = 1e-4;

// Projection matrices: uniform(-a, a), a = sqrt(6 / (fan_in + fan_out)).
// phi = I + noise(sigma 0.01) so training starts close to the no-talking
// pipeline; u = 1.
BlockParams make_block_params(std::int64_t tokens, std::int64_t dim, std::int64_t heads, DType dt,
                              std::mt19937_64& rng);

// Intermediate attention tensors, captured on request for diagnostics and
// tests. Fields that a given talking mode never builds stay undefined.
struct AttentionState {
    Tensor a;      // fused adjacency [n x n]
    Tensor s;      // attention per head [h x n x n]
    Tensor f;      // head features [h x n]
    Tensor c;      // bilinear pooled features [h x h]
    Tensor y;      // gate logits [h x n]
    Tensor z;      // gate values [h x n]
    Tensor m;      // gate diagonals [h x n x n]
    Tensor s_hat;  // masked attention [h x n x n]
    Tensor r;      // relation matrices [h x n x n]
};

// ---- block stages ----------------------------------------------------------

// image [c x H x W] -> tokens [n x d] via conv(stride1) -> max(0, .) ->
// conv(stride2), flattened row-major over the output grid.
Tensor conv_token_embed(const Tensor& image, const EmbedConfig& cfg, const Tensor& conv1_w,
                        const Tensor& conv1_b, const Tensor& conv2_w, const Tensor& conv2_b);

struct QkProjection {
    Tensor q;  // [h x n x d/h]
    Tensor k;
};

// Per head i: sym_normalize(A) * tokens[:, i-th slice] * W_{q/k,i}.
QkProjection project_qk(const Tensor& tokens, const Tensor& adjacency, const BlockParams& params);

// softmax(q k^T / sqrt(d/h)) for one head.
Tensor attention_scores(const Tensor& q_i, const Tensor& k_i);

// f_i = [q_i, k_i] column_i(W_h), a length-n vector.
Tensor head_features(const Tensor& q_i, const Tensor& k_i, const Tensor& wh, std::int64_t head);

struct SparseGate {
    Tensor z;  // [h x n], sigmoid(Y / u) entries in (0, 1)
    Tensor m;  // [h x n x n], Z rows placed on diagonals
    Tensor c;  // [h x h]
    Tensor y;  // [h x n]
};

// C = F F^T, Y = C W_c, Z = sigmoid(Y / u), M = diag(Z rows).
SparseGate sparse_gate(const Tensor& f, const Tensor& wc, const Tensor& u);

// S_hat = M S M per head, literal batched matrix products.
Tensor mask_attention(const Tensor& s, const Tensor& m);

// R_i = sum_j phi[i,j] S_hat_j.
Tensor talk_heads(const Tensor& s_hat, const Tensor& phi);

// Symmetrizes R_i, then sym_normalize(R_i) x_i W_vi (+ x_i when residual).
Tensor value_graphconv(const Tensor& x_i, const Tensor& r_i, const Tensor& w_vi, bool residual);

// Full block: adjacency from features + spatial prior, graph-projected q/k,
// per-head attention, the selected talking mode, per-head value graph
// convolution, head concat, output projection.
Tensor block_forward(const Tensor& tokens, const Tensor& prior, const BlockParams& params,
                     const AblationFlags& flags, AttentionState* state = nullptr,
                     Tensor* fused_adjacency = nullptr);

}  // namespace gvt
