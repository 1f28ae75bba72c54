#include <cmath>

#include "gvt/ops.hpp"
#include "op_common.hpp"

namespace gvt {

namespace {

using opdetail::attach;
using opdetail::require_same_dtype;
using opdetail::wants_grad;

// Broadcast layouts permitted for binary ops.
enum class Bcast {
    Same,         // identical shapes
    ScalarRight,  // b has one element
    ScalarLeft,   // a has one element
    TrailRight,   // b is a vector matching a's trailing dimension
    TrailLeft,    // a is a vector matching b's trailing dimension
};

struct BinaryPlan {
    Bcast kind;
    Shape out_shape;
    std::int64_t trail = 1;  // trailing dimension for the Trail cases
};

BinaryPlan plan_binary(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() == b.shape()) {
        return {Bcast::Same, a.shape()};
    }
    if (b.numel() == 1) {
        return {Bcast::ScalarRight, a.shape()};
    }
    if (a.numel() == 1) {
        return {Bcast::ScalarLeft, b.shape()};
    }
    if (b.rank() == 1 && a.rank() >= 1 && b.numel() == a.shape().back()) {
        return {Bcast::TrailRight, a.shape(), a.shape().back()};
    }
    if (a.rank() == 1 && b.rank() >= 1 && a.numel() == b.shape().back()) {
        return {Bcast::TrailLeft, b.shape(), b.shape().back()};
    }
    throw DimensionError(std::string(op) + ": cannot broadcast " + shape_str(a.shape()) + " with " +
                         shape_str(b.shape()));
}

// Maps an output flat index to operand flat indices under the plan.
struct IndexMap {
    Bcast kind;
    std::int64_t trail;
    std::int64_t ia(std::int64_t f) const {
        switch (kind) {
            case Bcast::ScalarLeft: return 0;
            case Bcast::TrailLeft: return f % trail;
            default: return f;
        }
    }
    std::int64_t ib(std::int64_t f) const {
        switch (kind) {
            case Bcast::ScalarRight: return 0;
            case Bcast::TrailRight: return f % trail;
            default: return f;
        }
    }
};

// FwdFn: T(T, T). DaFn/DbFn: T(g, a, b, y) contribution at one position.
template <class FwdFn, class DaFn, class DbFn>
Tensor binary_op(const Tensor& a, const Tensor& b, const char* name, FwdFn fwd, DaFn dfa, DbFn dfb) {
    require_same_dtype(a, b, name);
    const BinaryPlan plan = plan_binary(a, b, name);
    const IndexMap map{plan.kind, plan.trail};
    const DType dt = a.dtype();
    Tensor out = Tensor::zeros(plan.out_shape, dt);
    const std::int64_t n = out.numel();

    dispatch(dt, [&](auto z) {
        using T = decltype(z);
        auto va = a.data<T>();
        auto vb = b.data<T>();
        auto vo = out.data<T>();
        for (std::int64_t f = 0; f < n; ++f) {
            vo[f] = fwd(va[map.ia(f)], vb[map.ib(f)]);
        }
    });

    if (wants_grad(a, b)) {
        attach(out, {a, b}, [a = a, b = b, map, n, dfa, dfb](detail::Node& self) mutable {
            dispatch(self.dtype, [&](auto z) {
                using T = decltype(z);
                auto g = self.grad.as<T>(self.numel);
                auto y = self.data.as<T>(self.numel);
                auto va = a.data<T>();
                auto vb = b.data<T>();
                const bool ga = a.requires_grad();
                const bool gb = b.requires_grad();
                auto da = ga ? a.grad<T>() : std::span<T>{};
                auto db = gb ? b.grad<T>() : std::span<T>{};
                for (std::int64_t f = 0; f < n; ++f) {
                    const std::int64_t i = map.ia(f);
                    const std::int64_t j = map.ib(f);
                    if (ga) {
                        da[i] += dfa(g[f], va[i], vb[j], y[f]);
                    }
                    if (gb) {
                        db[j] += dfb(g[f], va[i], vb[j], y[f]);
                    }
                }
            });
        });
    }
    return out;
}

template <class FwdFn, class DFn>
Tensor unary_op(const Tensor& a, FwdFn fwd, DFn dfn) {
    const DType dt = a.dtype();
    Tensor out = Tensor::zeros(a.shape(), dt);
    const std::int64_t n = out.numel();
    dispatch(dt, [&](auto z) {
        using T = decltype(z);
        auto va = a.data<T>();
        auto vo = out.data<T>();
        for (std::int64_t f = 0; f < n; ++f) {
            vo[f] = fwd(va[f]);
        }
    });
    if (wants_grad(a)) {
        attach(out, {a}, [a = a, n, dfn](detail::Node& self) mutable {
            dispatch(self.dtype, [&](auto z) {
                using T = decltype(z);
                auto g = self.grad.as<T>(self.numel);
                auto y = self.data.as<T>(self.numel);
                auto va = a.data<T>();
                auto da = a.grad<T>();
                for (std::int64_t f = 0; f < n; ++f) {
                    da[f] += dfn(g[f], va[f], y[f]);
                }
            });
        });
    }
    return out;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    return binary_op(
        a, b, "add", [](auto x, auto y) { return x + y; },
        [](auto g, auto, auto, auto) { return g; }, [](auto g, auto, auto, auto) { return g; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    return binary_op(
        a, b, "sub", [](auto x, auto y) { return x - y; },
        [](auto g, auto, auto, auto) { return g; }, [](auto g, auto, auto, auto) { return -g; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    return binary_op(
        a, b, "mul", [](auto x, auto y) { return x * y; },
        [](auto g, auto, auto y_b, auto) { return g * y_b; },
        [](auto g, auto x_a, auto, auto) { return g * x_a; });
}

Tensor div(const Tensor& a, const Tensor& b) {
    return binary_op(
        a, b, "div", [](auto x, auto y) { return x / y; },
        [](auto g, auto, auto den, auto) { return g / den; },
        [](auto g, auto, auto den, auto out) { return -g * out / den; });
}

Tensor add_scalar(const Tensor& a, double c) {
    return unary_op(
        a, [c](auto x) { return static_cast<decltype(x)>(x + c); },
        [](auto g, auto, auto) { return g; });
}

Tensor mul_scalar(const Tensor& a, double c) {
    return unary_op(
        a, [c](auto x) { return static_cast<decltype(x)>(x * c); },
        [c](auto g, auto, auto) { return static_cast<decltype(g)>(g * c); });
}

Tensor sigmoid(const Tensor& a) {
    return unary_op(
        a,
        [](auto x) {
            using T = decltype(x);
            // Split on sign so exp never overflows.
            if (x >= T{0}) {
                return T{1} / (T{1} + std::exp(-x));
            }
            const T e = std::exp(x);
            return e / (T{1} + e);
        },
        [](auto g, auto, auto y) { return g * y * (decltype(y){1} - y); });
}

Tensor relu(const Tensor& a) {
    return unary_op(
        a, [](auto x) { return x > decltype(x){0} ? x : decltype(x){0}; },
        [](auto g, auto x, auto) { return x > decltype(x){0} ? g : decltype(g){0}; });
}

Tensor abs(const Tensor& a) {
    return unary_op(
        a, [](auto x) { return x < decltype(x){0} ? -x : x; },
        [](auto g, auto x, auto) {
            using T = decltype(x);
            if (x > T{0}) {
                return g;
            }
            if (x < T{0}) {
                return -g;
            }
            return decltype(g){0};
        });
}

Tensor sqrt(const Tensor& a) {
    return unary_op(
        a, [](auto x) { return std::sqrt(x); },
        [](auto g, auto, auto y) { return g / (decltype(y){2} * y); });
}

}  // namespace gvt
