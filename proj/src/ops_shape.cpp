#include <cstring>
#include <numeric>

#include "gvt/ops.hpp"
#include "op_common.hpp"

namespace gvt {

namespace {
using opdetail::attach;
using opdetail::require_same_dtype;
using opdetail::wants_grad;
}  // namespace

Tensor reshape(const Tensor& a, Shape shape) {
    if (shape_numel(shape) != a.numel()) {
        throw DimensionError("reshape: " + shape_str(a.shape()) + " has " + std::to_string(a.numel()) +
                             " elements, target " + shape_str(shape) + " does not match");
    }
    Tensor out = Tensor::zeros(std::move(shape), a.dtype());
    std::memcpy(out.node()->data.raw(), a.node()->data.raw(), a.node()->data.size_bytes());
    if (wants_grad(a)) {
        attach(out, {a}, [a = a](detail::Node& self) mutable {
            dispatch(self.dtype, [&](auto z) {
                using T = decltype(z);
                auto g = self.grad.as<T>(self.numel);
                auto da = a.grad<T>();
                for (std::int64_t i = 0; i < self.numel; ++i) {
                    da[i] += g[i];
                }
            });
        });
    }
    return out;
}

Tensor slice_cols(const Tensor& a, std::int64_t j0, std::int64_t j1) {
    if (a.rank() != 2) {
        throw DimensionError("slice_cols: expects a rank-2 tensor, got " + shape_str(a.shape()));
    }
    const std::int64_t m = a.dim(0), n = a.dim(1);
    if (j0 < 0 || j1 > n || j0 >= j1) {
        throw DimensionError("slice_cols: invalid column range [" + std::to_string(j0) + ", " +
                             std::to_string(j1) + ") for " + shape_str(a.shape()));
    }
    const std::int64_t w = j1 - j0;
    Tensor out = Tensor::zeros({m, w}, a.dtype());
    dispatch(a.dtype(), [&](auto z) {
        using T = decltype(z);
        auto va = a.data<T>();
        auto vo = out.data<T>();
        for (std::int64_t i = 0; i < m; ++i) {
            std::memcpy(vo.data() + i * w, va.data() + i * n + j0, static_cast<std::size_t>(w) * sizeof(T));
        }
    });
    if (wants_grad(a)) {
        attach(out, {a}, [a = a, m, n, j0, w](detail::Node& self) mutable {
            dispatch(self.dtype, [&](auto z) {
                using T = decltype(z);
                auto g = self.grad.as<T>(self.numel);
                auto da = a.grad<T>();
                for (std::int64_t i = 0; i < m; ++i) {
                    for (std::int64_t j = 0; j < w; ++j) {
                        da[i * n + j0 + j] += g[i * w + j];
                    }
                }
            });
        });
    }
    return out;
}

Tensor concat_cols(std::span<const Tensor> parts) {
    if (parts.empty()) {
        throw DimensionError("concat_cols: no operands");
    }
    const std::int64_t m = parts[0].dim(0);
    const DType dt = parts[0].dtype();
    std::int64_t total = 0;
    for (const auto& p : parts) {
        if (p.rank() != 2 || p.dim(0) != m) {
            throw DimensionError("concat_cols: row counts disagree");
        }
        require_same_dtype(parts[0], p, "concat_cols");
        total += p.dim(1);
    }
    Tensor out = Tensor::zeros({m, total}, dt);
    dispatch(dt, [&](auto z) {
        using T = decltype(z);
        auto vo = out.data<T>();
        std::int64_t col = 0;
        for (const auto& p : parts) {
            const std::int64_t w = p.dim(1);
            auto vp = p.data<T>();
            for (std::int64_t i = 0; i < m; ++i) {
                std::memcpy(vo.data() + i * total + col, vp.data() + i * w,
                            static_cast<std::size_t>(w) * sizeof(T));
            }
            col += w;
        }
    });

    bool any = false;
    for (const auto& p : parts) {
        any = any || p.requires_grad();
    }
    if (grad_enabled() && any) {
        std::vector<Tensor> parents(parts.begin(), parts.end());
        attach(out, parents, [parents, m, total](detail::Node& self) mutable {
            dispatch(self.dtype, [&](auto z) {
                using T = decltype(z);
                auto g = self.grad.as<T>(self.numel);
                std::int64_t col = 0;
                for (auto& p : parents) {
                    const std::int64_t w = p.dim(1);
                    if (p.requires_grad()) {
                        auto dp = p.grad<T>();
                        for (std::int64_t i = 0; i < m; ++i) {
                            for (std::int64_t j = 0; j < w; ++j) {
                                dp[i * w + j] += g[i * total + col + j];
                            }
                        }
                    }
                    col += w;
                }
            });
        });
    }
    return out;
}

Tensor stack0(std::span<const Tensor> parts) {
    if (parts.empty()) {
        throw DimensionError("stack0: no operands");
    }
    const Shape& base = parts[0].shape();
    const DType dt = parts[0].dtype();
    for (const auto& p : parts) {
        if (p.shape() != base) {
            throw DimensionError("stack0: shapes disagree, " + shape_str(base) + " vs " +
                                 shape_str(p.shape()));
        }
        require_same_dtype(parts[0], p, "stack0");
    }
    Shape out_shape;
    out_shape.reserve(base.size() + 1);
    out_shape.push_back(static_cast<std::int64_t>(parts.size()));
    out_shape.insert(out_shape.end(), base.begin(), base.end());
    Tensor out = Tensor::zeros(std::move(out_shape), dt);
    const std::int64_t block = parts[0].numel();
    dispatch(dt, [&](auto z) {
        using T = decltype(z);
        auto vo = out.data<T>();
        for (std::size_t s = 0; s < parts.size(); ++s) {
            auto vp = parts[s].data<T>();
            std::memcpy(vo.data() + static_cast<std::int64_t>(s) * block, vp.data(),
                        static_cast<std::size_t>(block) * sizeof(T));
        }
    });

    bool any = false;
    for (const auto& p : parts) {
        any = any || p.requires_grad();
    }
    if (grad_enabled() && any) {
        std::vector<Tensor> parents(parts.begin(), parts.end());
        attach(out, parents, [parents, block](detail::Node& self) mutable {
            dispatch(self.dtype, [&](auto z) {
                using T = decltype(z);
                auto g = self.grad.as<T>(self.numel);
                for (std::size_t s = 0; s < parents.size(); ++s) {
                    if (!parents[s].requires_grad()) {
                        continue;
                    }
                    auto dp = parents[s].grad<T>();
                    const std::int64_t off = static_cast<std::int64_t>(s) * block;
                    for (std::int64_t i = 0; i < block; ++i) {
                        dp[i] += g[off + i];
                    }
                }
            });
        });
    }
    return out;
}

Tensor index0(const Tensor& a, std::int64_t i) {
    if (a.rank() < 2) {
        throw DimensionError("index0: expects rank >= 2, got " + shape_str(a.shape()));
    }
    const std::int64_t k = a.dim(0);
    if (i < 0 || i >= k) {
        throw DimensionError("index0: index " + std::to_string(i) + " out of range for " +
                             shape_str(a.shape()));
    }
    Shape out_shape(a.shape().begin() + 1, a.shape().end());
    Tensor out = Tensor::zeros(out_shape, a.dtype());
    const std::int64_t block = out.numel();
    dispatch(a.dtype(), [&](auto z) {
        using T = decltype(z);
        std::memcpy(out.data<T>().data(), a.data<T>().data() + i * block,
                    static_cast<std::size_t>(block) * sizeof(T));
    });
    if (wants_grad(a)) {
        attach(out, {a}, [a = a, i, block](detail::Node& self) mutable {
            dispatch(self.dtype, [&](auto z) {
                using T = decltype(z);
                auto g = self.grad.as<T>(self.numel);
                auto da = a.grad<T>();
                const std::int64_t off = i * block;
                for (std::int64_t f = 0; f < block; ++f) {
                    da[off + f] += g[f];
                }
            });
        });
    }
    return out;
}

}  // namespace gvt
