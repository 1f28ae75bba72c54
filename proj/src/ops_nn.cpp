#include <cmath>
#include <vector>

#include "gvt/macs.hpp"
#include "gvt/ops.hpp"
#include "op_common.hpp"

namespace gvt {

namespace {
using opdetail::attach;
using opdetail::require_same_dtype;
using opdetail::wants_grad;
}  // namespace

Tensor softmax_rows(const Tensor& a) {
    if (a.rank() != 2) {
        throw DimensionError("softmax_rows: expects [m x n], got " + shape_str(a.shape()));
    }
    if (!a.all_finite()) {
        throw NumericError("softmax_rows: non-finite input");
    }
    const std::int64_t m = a.dim(0), n = a.dim(1);
    Tensor out = Tensor::zeros({m, n}, a.dtype());
    dispatch(a.dtype(), [&](auto z) {
        using T = decltype(z);
        auto va = a.data<T>();
        auto vo = out.data<T>();
        for (std::int64_t i = 0; i < m; ++i) {
            const T* row = va.data() + i * n;
            T mx = row[0];
            for (std::int64_t j = 1; j < n; ++j) {
                mx = row[j] > mx ? row[j] : mx;
            }
            T s{};
            for (std::int64_t j = 0; j < n; ++j) {
                const T e = std::exp(row[j] - mx);
                vo[i * n + j] = e;
                s += e;
            }
            for (std::int64_t j = 0; j < n; ++j) {
                vo[i * n + j] /= s;
            }
        }
    });
    if (wants_grad(a)) {
        attach(out, {a}, [a = a, m, n](detail::Node& self) mutable {
            dispatch(self.dtype, [&](auto z) {
                using T = decltype(z);
                auto g = self.grad.as<T>(self.numel);
                auto y = self.data.as<T>(self.numel);
                auto da = a.grad<T>();
                for (std::int64_t i = 0; i < m; ++i) {
                    T dot{};
                    for (std::int64_t j = 0; j < n; ++j) {
                        dot += g[i * n + j] * y[i * n + j];
                    }
                    for (std::int64_t j = 0; j < n; ++j) {
                        da[i * n + j] += y[i * n + j] * (g[i * n + j] - dot);
                    }
                }
            });
        });
    }
    return out;
}

Tensor softmax_cross_entropy(const Tensor& logits, std::span<const std::int64_t> labels) {
    if (logits.rank() != 2) {
        throw DimensionError("softmax_cross_entropy: expects [batch x classes], got " +
                             shape_str(logits.shape()));
    }
    const std::int64_t b = logits.dim(0), c = logits.dim(1);
    if (static_cast<std::int64_t>(labels.size()) != b) {
        throw DimensionError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                             " labels for batch " + std::to_string(b));
    }
    for (auto y : labels) {
        if (y < 0 || y >= c) {
            throw ContractError("softmax_cross_entropy: label " + std::to_string(y) +
                                " outside [0, " + std::to_string(c) + ")");
        }
    }
    if (!logits.all_finite()) {
        throw NumericError("softmax_cross_entropy: non-finite logits");
    }

    Tensor out = Tensor::zeros({1}, logits.dtype());
    // Probabilities are kept for the backward pass.
    Tensor probs = Tensor::zeros({b, c}, logits.dtype());
    dispatch(logits.dtype(), [&](auto z) {
        using T = decltype(z);
        auto vx = logits.data<T>();
        auto vp = probs.data<T>();
        T loss{};
        for (std::int64_t i = 0; i < b; ++i) {
            const T* row = vx.data() + i * c;
            T mx = row[0];
            for (std::int64_t j = 1; j < c; ++j) {
                mx = row[j] > mx ? row[j] : mx;
            }
            T s{};
            for (std::int64_t j = 0; j < c; ++j) {
                const T e = std::exp(row[j] - mx);
                vp[i * c + j] = e;
                s += e;
            }
            for (std::int64_t j = 0; j < c; ++j) {
                vp[i * c + j] /= s;
            }
            loss += std::log(s) + mx - row[labels[i]];
        }
        out.data<T>()[0] = loss / static_cast<T>(b);
    });

    if (wants_grad(logits)) {
        std::vector<std::int64_t> ls(labels.begin(), labels.end());
        attach(out, {logits}, [logits = logits, probs, ls, b, c](detail::Node& self) mutable {
            dispatch(self.dtype, [&](auto z) {
                using T = decltype(z);
                const T g = self.grad.as<T>(1)[0];
                auto vp = probs.data<T>();
                auto dx = logits.grad<T>();
                const T scale = g / static_cast<T>(b);
                for (std::int64_t i = 0; i < b; ++i) {
                    for (std::int64_t j = 0; j < c; ++j) {
                        const T onehot = ls[static_cast<std::size_t>(i)] == j ? T{1} : T{0};
                        dx[i * c + j] += scale * (vp[i * c + j] - onehot);
                    }
                }
            });
        });
    }
    return out;
}

Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, std::int64_t stride,
              std::int64_t padding, std::int64_t groups) {
    if (input.rank() != 3 || weight.rank() != 4 || bias.rank() != 1) {
        throw DimensionError("conv2d: expects input [C x H x W], weight [O x C/g x K x K], bias [O]");
    }
    const std::int64_t cin = input.dim(0), h = input.dim(1), w = input.dim(2);
    const std::int64_t cout = weight.dim(0), cinpg = weight.dim(1), k = weight.dim(2);
    if (weight.dim(3) != k) {
        throw DimensionError("conv2d: kernel must be square, got " + shape_str(weight.shape()));
    }
    if (groups < 1 || cin % groups != 0 || cout % groups != 0 || cin / groups != cinpg) {
        throw DimensionError("conv2d: group count " + std::to_string(groups) +
                             " incompatible with channels " + std::to_string(cin) + "/" +
                             std::to_string(cout));
    }
    if (bias.dim(0) != cout) {
        throw DimensionError("conv2d: bias size " + std::to_string(bias.dim(0)) + " != " +
                             std::to_string(cout));
    }
    if (stride < 1 || padding < 0) {
        throw DimensionError("conv2d: invalid stride/padding");
    }
    const std::int64_t ho = (h + 2 * padding - k) / stride + 1;
    const std::int64_t wo = (w + 2 * padding - k) / stride + 1;
    if (ho < 1 || wo < 1) {
        throw DimensionError("conv2d: kernel larger than padded input");
    }
    const std::int64_t outpg = cout / groups;

    Tensor out = Tensor::zeros({cout, ho, wo}, input.dtype());
    if (macs::counting()) {
        macs::add(static_cast<std::uint64_t>(cout * ho * wo * cinpg * k * k));
    }
    require_same_dtype(input, weight, "conv2d");
    require_same_dtype(input, bias, "conv2d");

    dispatch(input.dtype(), [&](auto z) {
        using T = decltype(z);
        const T* vi = input.data<T>().data();
        const T* vw = weight.data<T>().data();
        const T* vb = bias.data<T>().data();
        T* vo = out.data<T>().data();
#pragma omp parallel for schedule(static) if (cout * ho * wo * cinpg * k * k > (1 << 15))
        for (std::int64_t o = 0; o < cout; ++o) {
            const std::int64_t g0 = (o / outpg) * cinpg;  // first input channel of o's group
            for (std::int64_t y = 0; y < ho; ++y) {
                for (std::int64_t x = 0; x < wo; ++x) {
                    T acc = vb[o];
                    for (std::int64_t ci = 0; ci < cinpg; ++ci) {
                        const T* plane = vi + (g0 + ci) * h * w;
                        const T* ker = vw + ((o * cinpg + ci) * k) * k;
                        for (std::int64_t ky = 0; ky < k; ++ky) {
                            const std::int64_t iy = y * stride - padding + ky;
                            if (iy < 0 || iy >= h) {
                                continue;
                            }
                            for (std::int64_t kx = 0; kx < k; ++kx) {
                                const std::int64_t ix = x * stride - padding + kx;
                                if (ix < 0 || ix >= w) {
                                    continue;
                                }
                                acc += ker[ky * k + kx] * plane[iy * w + ix];
                            }
                        }
                    }
                    vo[(o * ho + y) * wo + x] = acc;
                }
            }
        }
    });

    if (wants_grad(input, weight) || opdetail::wants_grad(bias)) {
        attach(out, {input, weight, bias},
               [input = input, weight = weight, bias = bias, cin, h, w, cout, cinpg, k, ho, wo,
                stride, padding, outpg](detail::Node& self) mutable {
                   dispatch(self.dtype, [&](auto z) {
                       using T = decltype(z);
                       const T* g = self.grad.as<T>(self.numel).data();
                       const T* vi = input.data<T>().data();
                       const T* vw = weight.data<T>().data();
                       if (bias.requires_grad()) {
                           auto db = bias.grad<T>();
                           for (std::int64_t o = 0; o < cout; ++o) {
                               T acc{};
                               for (std::int64_t f = 0; f < ho * wo; ++f) {
                                   acc += g[o * ho * wo + f];
                               }
                               db[o] += acc;
                           }
                       }
                       if (weight.requires_grad()) {
                           T* dw = weight.grad<T>().data();
#pragma omp parallel for schedule(static) if (cout * ho * wo * cinpg * k * k > (1 << 15))
                           for (std::int64_t o = 0; o < cout; ++o) {
                               const std::int64_t g0 = (o / outpg) * cinpg;
                               for (std::int64_t ci = 0; ci < cinpg; ++ci) {
                                   const T* plane = vi + (g0 + ci) * h * w;
                                   for (std::int64_t ky = 0; ky < k; ++ky) {
                                       for (std::int64_t kx = 0; kx < k; ++kx) {
                                           T acc{};
                                           for (std::int64_t y = 0; y < ho; ++y) {
                                               const std::int64_t iy = y * stride - padding + ky;
                                               if (iy < 0 || iy >= h) {
                                                   continue;
                                               }
                                               for (std::int64_t x = 0; x < wo; ++x) {
                                                   const std::int64_t ix = x * stride - padding + kx;
                                                   if (ix < 0 || ix >= w) {
                                                       continue;
                                                   }
                                                   acc += g[(o * ho + y) * wo + x] * plane[iy * w + ix];
                                               }
                                           }
                                           dw[((o * cinpg + ci) * k + ky) * k + kx] += acc;
                                       }
                                   }
                               }
                           }
                       }
                       if (input.requires_grad()) {
                           T* di = input.grad<T>().data();
                           for (std::int64_t o = 0; o < cout; ++o) {
                               const std::int64_t g0 = (o / outpg) * cinpg;
                               for (std::int64_t y = 0; y < ho; ++y) {
                                   for (std::int64_t x = 0; x < wo; ++x) {
                                       const T gv = g[(o * ho + y) * wo + x];
                                       for (std::int64_t ci = 0; ci < cinpg; ++ci) {
                                           const T* ker = vw + ((o * cinpg + ci) * k) * k;
                                           T* plane = di + (g0 + ci) * h * w;
                                           for (std::int64_t ky = 0; ky < k; ++ky) {
                                               const std::int64_t iy = y * stride - padding + ky;
                                               if (iy < 0 || iy >= h) {
                                                   continue;
                                               }
                                               for (std::int64_t kx = 0; kx < k; ++kx) {
                                                   const std::int64_t ix = x * stride - padding + kx;
                                                   if (ix < 0 || ix >= w) {
                                                       continue;
                                                   }
                                                   plane[iy * w + ix] += gv * ker[ky * k + kx];
                                               }
                                           }
                                       }
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
