#include <algorithm>

#include "gvt/macs.hpp"
#include "gvt/ops.hpp"
#include "op_common.hpp"

namespace gvt {

namespace {

using opdetail::attach;
using opdetail::require_same_dtype;
using opdetail::wants_grad;

constexpr std::int64_t kParallelCutoff = 1 << 15;

// C += A(m x k) * B(k x p). Row-partitioned: each output row is produced by
// exactly one thread with a fixed accumulation order, so results do not
// depend on the thread count.
template <class T>
void mm_nn_acc(const T* a, const T* b, T* c, std::int64_t m, std::int64_t k, std::int64_t p) {
#pragma omp parallel for schedule(static) if (m * k * p > kParallelCutoff)
    for (std::int64_t i = 0; i < m; ++i) {
        T* crow = c + i * p;
        const T* arow = a + i * k;
        for (std::int64_t t = 0; t < k; ++t) {
            const T av = arow[t];
            const T* brow = b + t * p;
            for (std::int64_t j = 0; j < p; ++j) {
                crow[j] += av * brow[j];
            }
        }
    }
}

// C += A(m x k) * B(p x k)^T
template <class T>
void mm_nt_acc(const T* a, const T* b, T* c, std::int64_t m, std::int64_t k, std::int64_t p) {
#pragma omp parallel for schedule(static) if (m * k * p > kParallelCutoff)
    for (std::int64_t i = 0; i < m; ++i) {
        const T* arow = a + i * k;
        T* crow = c + i * p;
        for (std::int64_t j = 0; j < p; ++j) {
            const T* brow = b + j * k;
            T acc{};
            for (std::int64_t t = 0; t < k; ++t) {
                acc += arow[t] * brow[t];
            }
            crow[j] += acc;
        }
    }
}

// C += A(k x m)^T * B(k x p)
template <class T>
void mm_tn_acc(const T* a, const T* b, T* c, std::int64_t m, std::int64_t k, std::int64_t p) {
#pragma omp parallel for schedule(static) if (m * k * p > kParallelCutoff)
    for (std::int64_t i = 0; i < m; ++i) {
        T* crow = c + i * p;
        for (std::int64_t t = 0; t < k; ++t) {
            const T av = a[t * m + i];
            const T* brow = b + t * p;
            for (std::int64_t j = 0; j < p; ++j) {
                crow[j] += av * brow[j];
            }
        }
    }
}

void count_macs(std::int64_t m, std::int64_t k, std::int64_t p) {
    if (macs::counting()) {
        macs::add(static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(k) *
                  static_cast<std::uint64_t>(p));
    }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_same_dtype(a, b, "matmul");
    if (a.rank() != 2 || b.rank() != 2) {
        throw DimensionError("matmul: expects rank-2 operands, got " + shape_str(a.shape()) + " and " +
                             shape_str(b.shape()));
    }
    const std::int64_t m = a.dim(0), k = a.dim(1), p = b.dim(1);
    if (b.dim(0) != k) {
        throw DimensionError("matmul: inner dimensions disagree, " + shape_str(a.shape()) + " vs " +
                             shape_str(b.shape()));
    }
    Tensor out = Tensor::zeros({m, p}, a.dtype());
    count_macs(m, k, p);
    dispatch(a.dtype(), [&](auto z) {
        using T = decltype(z);
        mm_nn_acc(a.data<T>().data(), b.data<T>().data(), out.data<T>().data(), m, k, p);
    });

    if (wants_grad(a, b)) {
        attach(out, {a, b}, [a = a, b = b, m, k, p](detail::Node& self) mutable {
            dispatch(self.dtype, [&](auto z) {
                using T = decltype(z);
                const T* g = self.grad.as<T>(self.numel).data();
                if (a.requires_grad()) {
                    count_macs(m, p, k);
                    mm_nt_acc(g, b.data<T>().data(), a.grad<T>().data(), m, p, k);
                }
                if (b.requires_grad()) {
                    count_macs(k, m, p);
                    mm_tn_acc(a.data<T>().data(), g, b.grad<T>().data(), k, m, p);
                }
            });
        });
    }
    return out;
}

Tensor batch_matmul(const Tensor& a, const Tensor& b) {
    require_same_dtype(a, b, "batch_matmul");
    if (a.rank() != 3 || b.rank() != 3) {
        throw DimensionError("batch_matmul: expects rank-3 operands, got " + shape_str(a.shape()) +
                             " and " + shape_str(b.shape()));
    }
    const std::int64_t h = a.dim(0), m = a.dim(1), k = a.dim(2), p = b.dim(2);
    if (b.dim(0) != h || b.dim(1) != k) {
        throw DimensionError("batch_matmul: batch or inner dimensions disagree, " +
                             shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    }
    Tensor out = Tensor::zeros({h, m, p}, a.dtype());
    count_macs(h * m, k, p);
    dispatch(a.dtype(), [&](auto z) {
        using T = decltype(z);
        const T* pa = a.data<T>().data();
        const T* pb = b.data<T>().data();
        T* po = out.data<T>().data();
        for (std::int64_t s = 0; s < h; ++s) {
            mm_nn_acc(pa + s * m * k, pb + s * k * p, po + s * m * p, m, k, p);
        }
    });

    if (wants_grad(a, b)) {
        attach(out, {a, b}, [a = a, b = b, h, m, k, p](detail::Node& self) mutable {
            dispatch(self.dtype, [&](auto z) {
                using T = decltype(z);
                const T* g = self.grad.as<T>(self.numel).data();
                if (a.requires_grad()) {
                    count_macs(h * m, p, k);
                    T* da = a.grad<T>().data();
                    const T* pb = b.data<T>().data();
                    for (std::int64_t s = 0; s < h; ++s) {
                        mm_nt_acc(g + s * m * p, pb + s * k * p, da + s * m * k, m, p, k);
                    }
                }
                if (b.requires_grad()) {
                    count_macs(h * k, m, p);
                    T* db = b.grad<T>().data();
                    const T* pa = a.data<T>().data();
                    for (std::int64_t s = 0; s < h; ++s) {
                        mm_tn_acc(pa + s * m * k, g + s * m * p, db + s * k * p, k, m, p);
                    }
                }
            });
        });
    }
    return out;
}

Tensor transpose(const Tensor& a) {
    if (a.rank() != 2) {
        throw DimensionError("transpose: expects a rank-2 tensor, got " + shape_str(a.shape()));
    }
    const std::int64_t m = a.dim(0), n = a.dim(1);
    Tensor out = Tensor::zeros({n, m}, a.dtype());
    dispatch(a.dtype(), [&](auto z) {
        using T = decltype(z);
        auto va = a.data<T>();
        auto vo = out.data<T>();
        for (std::int64_t i = 0; i < m; ++i) {
            for (std::int64_t j = 0; j < n; ++j) {
                vo[j * m + i] = va[i * n + j];
            }
        }
    });
    if (wants_grad(a)) {
        attach(out, {a}, [a = a, m, n](detail::Node& self) mutable {
            dispatch(self.dtype, [&](auto z) {
                using T = decltype(z);
                auto g = self.grad.as<T>(self.numel);
                auto da = a.grad<T>();
                for (std::int64_t j = 0; j < n; ++j) {
                    for (std::int64_t i = 0; i < m; ++i) {
                        da[i * n + j] += g[j * m + i];
                    }
                }
            });
        });
    }
    return out;
}

}  // namespace gvt
