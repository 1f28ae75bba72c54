#include "gvt/optim.hpp"

#include <cmath>

namespace gvt {

void adamw_step(std::span<Tensor> params, std::span<const Tensor> grads, AdamWState& state) {
    if (params.size() != grads.size()) {
        throw DimensionError("adamw_step: " + std::to_string(params.size()) + " params vs " +
                             std::to_string(grads.size()) + " grads");
    }
    if (state.lr <= 0.0) {
        throw ContractError("adamw_step: lr must be positive");
    }
    if (state.m.empty()) {
        state.m.reserve(params.size());
        state.v.reserve(params.size());
        for (const auto& p : params) {
            state.m.push_back(Tensor::zeros(p.shape(), p.dtype()));
            state.v.push_back(Tensor::zeros(p.shape(), p.dtype()));
        }
    }
    if (state.m.size() != params.size()) {
        throw DimensionError("adamw_step: moment buffers track a different parameter set");
    }

    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = params[i];
        const Tensor& g = grads[i];
        if (p.shape() != g.shape() || p.shape() != state.m[i].shape()) {
            throw DimensionError("adamw_step: shape mismatch at parameter " + std::to_string(i));
        }
        dispatch(p.dtype(), [&](auto z) {
            using T = decltype(z);
            auto vp = p.data<T>();
            auto vg = g.data<T>();
            auto vm = state.m[i].data<T>();
            auto vv = state.v[i].data<T>();
            const T b1 = static_cast<T>(state.beta1);
            const T b2 = static_cast<T>(state.beta2);
            const T lr = static_cast<T>(state.lr);
            const T wd = static_cast<T>(state.weight_decay);
            const T eps = static_cast<T>(state.eps);
            const T c1 = static_cast<T>(bc1);
            const T c2 = static_cast<T>(bc2);
            for (std::size_t j = 0; j < vp.size(); ++j) {
                vm[j] = b1 * vm[j] + (T{1} - b1) * vg[j];
                vv[j] = b2 * vv[j] + (T{1} - b2) * vg[j] * vg[j];
                const T mhat = vm[j] / c1;
                const T vhat = vv[j] / c2;
                vp[j] -= lr * (mhat / (std::sqrt(vhat) + eps) + wd * vp[j]);
            }
        });
    }
}

double cosine_lr(std::int64_t step, std::int64_t total_steps, double lr0) {
    if (total_steps <= 0) {
        throw ContractError("cosine_lr: total_steps must be positive");
    }
    if (step < 0 || step > total_steps) {
        throw ContractError("cosine_lr: step " + std::to_string(step) + " outside [0, " +
                            std::to_string(total_steps) + "]");
    }
    return lr0 * 0.5 * (1.0 + std::cos(M_PI * static_cast<double>(step) / static_cast<double>(total_steps)));
}

void zero_grads(std::span<Tensor> params) {
    for (auto& p : params) {
        p.zero_grad();
    }
}

}  // namespace gvt
