#include <cmath>

#include "gvt/ops.hpp"
#include "op_common.hpp"

namespace gvt {

namespace {
using opdetail::attach;
using opdetail::require_same_dtype;
using opdetail::wants_grad;
}  // namespace

Tensor sum(const Tensor& a) {
    Tensor out = Tensor::zeros({1}, a.dtype());
    const std::int64_t n = a.numel();
    dispatch(a.dtype(), [&](auto z) {
        using T = decltype(z);
        auto va = a.data<T>();
        T acc{};
        for (std::int64_t i = 0; i < n; ++i) {
            acc += va[i];
        }
        out.data<T>()[0] = acc;
    });
    if (wants_grad(a)) {
        attach(out, {a}, [a = a, n](detail::Node& self) mutable {
            dispatch(self.dtype, [&](auto z) {
                using T = decltype(z);
                const T g = self.grad.as<T>(1)[0];
                auto da = a.grad<T>();
                for (std::int64_t i = 0; i < n; ++i) {
                    da[i] += g;
                }
            });
        });
    }
    return out;
}

Tensor mean(const Tensor& a) {
    return mul_scalar(sum(a), 1.0 / static_cast<double>(a.numel()));
}

Tensor row_sums(const Tensor& a) {
    if (a.rank() < 2) {
        throw DimensionError("row_sums: expects rank >= 2, got " + shape_str(a.shape()));
    }
    const std::int64_t n = a.shape().back();
    const std::int64_t rows = a.numel() / n;
    Shape out_shape(a.shape().begin(), a.shape().end() - 1);
    Tensor out = Tensor::zeros(out_shape, a.dtype());
    dispatch(a.dtype(), [&](auto z) {
        using T = decltype(z);
        auto va = a.data<T>();
        auto vo = out.data<T>();
        for (std::int64_t r = 0; r < rows; ++r) {
            T acc{};
            for (std::int64_t j = 0; j < n; ++j) {
                acc += va[r * n + j];
            }
            vo[r] = acc;
        }
    });
    if (wants_grad(a)) {
        attach(out, {a}, [a = a, rows, n](detail::Node& self) mutable {
            dispatch(self.dtype, [&](auto z) {
                using T = decltype(z);
                auto g = self.grad.as<T>(self.numel);
                auto da = a.grad<T>();
                for (std::int64_t r = 0; r < rows; ++r) {
                    for (std::int64_t j = 0; j < n; ++j) {
                        da[r * n + j] += g[r];
                    }
                }
            });
        });
    }
    return out;
}

Tensor max_abs(const Tensor& a) {
    Tensor out = Tensor::zeros({1}, a.dtype());
    const std::int64_t n = a.numel();
    std::int64_t arg = 0;
    dispatch(a.dtype(), [&](auto z) {
        using T = decltype(z);
        auto va = a.data<T>();
        T best{};
        for (std::int64_t i = 0; i < n; ++i) {
            const T m = va[i] < T{0} ? -va[i] : va[i];
            if (m > best) {
                best = m;
                arg = i;
            }
        }
        out.data<T>()[0] = best;
    });
    if (wants_grad(a)) {
        attach(out, {a}, [a = a, arg](detail::Node& self) mutable {
            dispatch(self.dtype, [&](auto z) {
                using T = decltype(z);
                const T g = self.grad.as<T>(1)[0];
                const T v = a.data<T>()[arg];
                if (v != T{0}) {
                    a.grad<T>()[arg] += v > T{0} ? g : -g;
                }
            });
        });
    }
    return out;
}

Tensor rows_scaled(const Tensor& a, const Tensor& s) {
    require_same_dtype(a, s, "rows_scaled");
    if (a.rank() != 2 || s.rank() != 1 || s.dim(0) != a.dim(0)) {
        throw DimensionError("rows_scaled: need [m x n] and [m], got " + shape_str(a.shape()) +
                             " and " + shape_str(s.shape()));
    }
    const std::int64_t m = a.dim(0), n = a.dim(1);
    Tensor out = Tensor::zeros({m, n}, a.dtype());
    dispatch(a.dtype(), [&](auto z) {
        using T = decltype(z);
        auto va = a.data<T>();
        auto vs = s.data<T>();
        auto vo = out.data<T>();
        for (std::int64_t i = 0; i < m; ++i) {
            const T si = vs[i];
            for (std::int64_t j = 0; j < n; ++j) {
                vo[i * n + j] = va[i * n + j] * si;
            }
        }
    });
    if (wants_grad(a, s)) {
        attach(out, {a, s}, [a = a, s = s, m, n](detail::Node& self) mutable {
            dispatch(self.dtype, [&](auto z) {
                using T = decltype(z);
                auto g = self.grad.as<T>(self.numel);
                auto va = a.data<T>();
                auto vs = s.data<T>();
                const bool ga = a.requires_grad();
                const bool gs = s.requires_grad();
                auto da = ga ? a.grad<T>() : std::span<T>{};
                auto ds = gs ? s.grad<T>() : std::span<T>{};
                for (std::int64_t i = 0; i < m; ++i) {
                    const T si = vs[i];
                    T acc{};
                    for (std::int64_t j = 0; j < n; ++j) {
                        const T gij = g[i * n + j];
                        if (ga) {
                            da[i * n + j] += gij * si;
                        }
                        acc += gij * va[i * n + j];
                    }
                    if (gs) {
                        ds[i] += acc;
                    }
                }
            });
        });
    }
    return out;
}

Tensor diag_embed(const Tensor& z) {
    if (z.rank() != 2) {
        throw DimensionError("diag_embed: expects [h x n], got " + shape_str(z.shape()));
    }
    const std::int64_t h = z.dim(0), n = z.dim(1);
    Tensor out = Tensor::zeros({h, n, n}, z.dtype());
    dispatch(z.dtype(), [&](auto zz) {
        using T = decltype(zz);
        auto vz = z.data<T>();
        auto vo = out.data<T>();
        for (std::int64_t i = 0; i < h; ++i) {
            for (std::int64_t a = 0; a < n; ++a) {
                vo[(i * n + a) * n + a] = vz[i * n + a];
            }
        }
    });
    if (wants_grad(z)) {
        attach(out, {z}, [z = z, h, n](detail::Node& self) mutable {
            dispatch(self.dtype, [&](auto zz) {
                using T = decltype(zz);
                auto g = self.grad.as<T>(self.numel);
                auto dz = z.grad<T>();
                for (std::int64_t i = 0; i < h; ++i) {
                    for (std::int64_t a = 0; a < n; ++a) {
                        dz[i * n + a] += g[(i * n + a) * n + a];
                    }
                }
            });
        });
    }
    return out;
}

Tensor diag_conjugate(const Tensor& s, const Tensor& z) {
    require_same_dtype(s, z, "diag_conjugate");
    if (s.rank() != 3 || z.rank() != 2 || s.dim(0) != z.dim(0) || s.dim(1) != s.dim(2) ||
        s.dim(1) != z.dim(1)) {
        throw DimensionError("diag_conjugate: need [h x n x n] and [h x n], got " +
                             shape_str(s.shape()) + " and " + shape_str(z.shape()));
    }
    const std::int64_t h = s.dim(0), n = s.dim(1);
    Tensor out = Tensor::zeros({h, n, n}, s.dtype());
    dispatch(s.dtype(), [&](auto zz) {
        using T = decltype(zz);
        auto vs = s.data<T>();
        auto vz = z.data<T>();
        auto vo = out.data<T>();
        for (std::int64_t i = 0; i < h; ++i) {
            for (std::int64_t a = 0; a < n; ++a) {
                const T za = vz[i * n + a];
                for (std::int64_t b = 0; b < n; ++b) {
                    vo[(i * n + a) * n + b] = za * vs[(i * n + a) * n + b] * vz[i * n + b];
                }
            }
        }
    });
    if (wants_grad(s, z)) {
        attach(out, {s, z}, [s = s, z = z, h, n](detail::Node& self) mutable {
            dispatch(self.dtype, [&](auto zz) {
                using T = decltype(zz);
                auto g = self.grad.as<T>(self.numel);
                auto vs = s.data<T>();
                auto vz = z.data<T>();
                const bool gs = s.requires_grad();
                const bool gz = z.requires_grad();
                auto ds = gs ? s.grad<T>() : std::span<T>{};
                auto dz = gz ? z.grad<T>() : std::span<T>{};
                for (std::int64_t i = 0; i < h; ++i) {
                    for (std::int64_t a = 0; a < n; ++a) {
                        const T za = vz[i * n + a];
                        for (std::int64_t b = 0; b < n; ++b) {
                            const std::int64_t f = (i * n + a) * n + b;
                            const T zb = vz[i * n + b];
                            const T gf = g[f];
                            if (gs) {
                                ds[f] += gf * za * zb;
                            }
                            if (gz) {
                                // d/dz[i,a] and d/dz[i,b] of za * S * zb.
                                dz[i * n + a] += gf * vs[f] * zb;
                                dz[i * n + b] += gf * vs[f] * za;
                            }
                        }
                    }
                }
            });
        });
    }
    return out;
}

}  // namespace gvt
