#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gvt/tensor.hpp"

namespace gvt {

// Decoupled-weight-decay Adam. Moment buffers are created lazily on the
// first step and must keep matching the parameter list afterwards.
struct AdamWState {
    std::int64_t step = 0;
    double lr = 5e-4;
    double weight_decay = 0.05;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::vector<Tensor> m;
    std::vector<Tensor> v;
};

// One update, in place:
//   p <- p - lr * (m_hat / (sqrt(v_hat) + eps) + weight_decay * p)
// with bias-corrected moments m_hat, v_hat. Decay acts on the weights
// directly, never through the gradient.
void adamw_step(std::span<Tensor> params, std::span<const Tensor> grads, AdamWState& state);

// lr0 * 0.5 * (1 + cos(pi * step / total_steps)).
double cosine_lr(std::int64_t step, std::int64_t total_steps, double lr0);

void zero_grads(std::span<Tensor> params);

}  // namespace gvt
