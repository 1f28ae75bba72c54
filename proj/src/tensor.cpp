#include "gvt/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <unordered_set>

namespace gvt {

std::int64_t shape_numel(const Shape& shape) {
    std::int64_t n = 1;
    for (auto d : shape) {
        if (d <= 0) {
            throw DimensionError("tensor shape has non-positive dimension " + std::to_string(d));
        }
        n *= d;
    }
    return n;
}

std::string shape_str(const Shape& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        os << (i ? "x" : "") << shape[i];
    }
    os << "]";
    return os.str();
}

namespace detail {

void Buffer::zero() {
    std::memset(bytes_.data(), 0, bytes_.size());
}

}  // namespace detail

namespace {

thread_local bool g_grad_enabled = true;

std::shared_ptr<detail::Node> make_node(Shape shape, DType dt) {
    return std::make_shared<detail::Node>(std::move(shape), dt);
}

}  // namespace

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

double rand_unit(std::mt19937_64& rng) {
    return std::ldexp(static_cast<double>(rng() >> 11), -53);
}

detail::Node& Tensor::must_node() const {
    if (!node_) {
        throw ContractError("operation on an undefined tensor");
    }
    return *node_;
}

const Shape& Tensor::shape() const { return must_node().shape; }
std::int64_t Tensor::numel() const { return must_node().numel; }
DType Tensor::dtype() const { return must_node().dtype; }
bool Tensor::requires_grad() const { return must_node().requires_grad; }

Tensor& Tensor::set_requires_grad(bool value) {
    auto& n = must_node();
    if (value && n.backward_fn) {
        throw ContractError("requires_grad can only be toggled on leaf tensors");
    }
    n.requires_grad = value;
    return *this;
}

bool Tensor::has_grad() const { return !must_node().grad.empty(); }

Tensor Tensor::zeros(Shape shape, DType dt, bool requires_grad) {
    auto n = make_node(std::move(shape), dt);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
}

Tensor Tensor::full(Shape shape, double value, DType dt, bool requires_grad) {
    Tensor t = zeros(std::move(shape), dt, requires_grad);
    dispatch(dt, [&](auto z) {
        using T = decltype(z);
        auto d = t.data<T>();
        std::fill(d.begin(), d.end(), static_cast<T>(value));
    });
    return t;
}

Tensor Tensor::ones(Shape shape, DType dt, bool requires_grad) {
    return full(std::move(shape), 1.0, dt, requires_grad);
}

Tensor Tensor::eye(std::int64_t n, DType dt) {
    Tensor t = zeros({n, n}, dt);
    dispatch(dt, [&](auto z) {
        using T = decltype(z);
        auto d = t.data<T>();
        for (std::int64_t i = 0; i < n; ++i) {
            d[static_cast<std::size_t>(i * n + i)] = T{1};
        }
    });
    return t;
}

Tensor Tensor::scalar(double value, DType dt, bool requires_grad) {
    return full({1}, value, dt, requires_grad);
}

Tensor Tensor::from(Shape shape, std::span<const double> values, DType dt, bool requires_grad) {
    Tensor t = zeros(std::move(shape), dt, requires_grad);
    if (static_cast<std::int64_t>(values.size()) != t.numel()) {
        throw DimensionError("from(): " + std::to_string(values.size()) + " values for shape " +
                             shape_str(t.shape()));
    }
    dispatch(dt, [&](auto z) {
        using T = decltype(z);
        auto d = t.data<T>();
        for (std::size_t i = 0; i < values.size(); ++i) {
            d[i] = static_cast<T>(values[i]);
        }
    });
    return t;
}

Tensor Tensor::from(Shape shape, std::initializer_list<double> values, DType dt, bool requires_grad) {
    return from(std::move(shape), std::span<const double>(values.begin(), values.size()), dt,
                requires_grad);
}

Tensor Tensor::uniform(Shape shape, double lo, double hi, std::mt19937_64& rng, DType dt,
                       bool requires_grad) {
    Tensor t = zeros(std::move(shape), dt, requires_grad);
    dispatch(dt, [&](auto z) {
        using T = decltype(z);
        auto d = t.data<T>();
        for (auto& v : d) {
            v = static_cast<T>(lo + (hi - lo) * rand_unit(rng));
        }
    });
    return t;
}

Tensor Tensor::normal(Shape shape, double mean, double stddev, std::mt19937_64& rng, DType dt,
                      bool requires_grad) {
    Tensor t = zeros(std::move(shape), dt, requires_grad);
    dispatch(dt, [&](auto z) {
        using T = decltype(z);
        auto d = t.data<T>();
        // Box-Muller on the portable uniform; one value kept per pair so the
        // stream consumed per element is fixed.
        for (auto& v : d) {
            double u1 = rand_unit(rng);
            double u2 = rand_unit(rng);
            while (u1 <= 0.0) {
                u1 = rand_unit(rng);
            }
            const double g = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
            v = static_cast<T>(mean + stddev * g);
        }
    });
    return t;
}

double Tensor::at(std::initializer_list<std::int64_t> idx) const {
    const auto& n = must_node();
    if (idx.size() != n.shape.size()) {
        throw DimensionError("at(): rank mismatch for shape " + shape_str(n.shape));
    }
    std::int64_t flat = 0;
    std::size_t k = 0;
    for (auto i : idx) {
        if (i < 0 || i >= n.shape[k]) {
            throw DimensionError("at(): index out of range");
        }
        flat = flat * n.shape[k] + i;
        ++k;
    }
    return dispatch(n.dtype, [&](auto z) {
        using T = decltype(z);
        return static_cast<double>(n.data.as<T>(n.numel)[static_cast<std::size_t>(flat)]);
    });
}

void Tensor::set(std::initializer_list<std::int64_t> idx, double value) {
    auto& n = must_node();
    if (idx.size() != n.shape.size()) {
        throw DimensionError("set(): rank mismatch for shape " + shape_str(n.shape));
    }
    std::int64_t flat = 0;
    std::size_t k = 0;
    for (auto i : idx) {
        if (i < 0 || i >= n.shape[k]) {
            throw DimensionError("set(): index out of range");
        }
        flat = flat * n.shape[k] + i;
        ++k;
    }
    dispatch(n.dtype, [&](auto z) {
        using T = decltype(z);
        n.data.as<T>(n.numel)[static_cast<std::size_t>(flat)] = static_cast<T>(value);
    });
}

double Tensor::item() const {
    if (numel() != 1) {
        throw ContractError("item() requires a single-element tensor, got shape " +
                            shape_str(shape()));
    }
    const auto& n = must_node();
    return dispatch(n.dtype, [&](auto z) {
        using T = decltype(z);
        return static_cast<double>(n.data.as<T>(1)[0]);
    });
}

std::vector<double> Tensor::to_vector() const {
    const auto& n = must_node();
    std::vector<double> out(static_cast<std::size_t>(n.numel));
    dispatch(n.dtype, [&](auto z) {
        using T = decltype(z);
        auto d = n.data.as<T>(n.numel);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = static_cast<double>(d[i]);
        }
    });
    return out;
}

std::vector<double> Tensor::grad_to_vector() const {
    const auto& n = must_node();
    if (n.grad.empty()) {
        throw ContractError("grad_to_vector(): no gradient buffer present");
    }
    std::vector<double> out(static_cast<std::size_t>(n.numel));
    dispatch(n.dtype, [&](auto z) {
        using T = decltype(z);
        auto d = n.grad.as<T>(n.numel);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = static_cast<double>(d[i]);
        }
    });
    return out;
}

Tensor Tensor::clone() const {
    const auto& n = must_node();
    Tensor t = zeros(n.shape, n.dtype, n.requires_grad && !n.backward_fn);
    std::memcpy(t.node()->data.raw(), n.data.raw(), n.data.size_bytes());
    return t;
}

Tensor Tensor::detach() const {
    const auto& n = must_node();
    Tensor t = zeros(n.shape, n.dtype, false);
    std::memcpy(t.node()->data.raw(), n.data.raw(), n.data.size_bytes());
    return t;
}

Tensor Tensor::astype(DType dt) const {
    const auto& n = must_node();
    if (dt == n.dtype) {
        return detach();
    }
    Tensor t = zeros(n.shape, dt, false);
    auto src = to_vector();
    dispatch(dt, [&](auto z) {
        using T = decltype(z);
        auto d = t.data<T>();
        for (std::size_t i = 0; i < src.size(); ++i) {
            d[i] = static_cast<T>(src[i]);
        }
    });
    return t;
}

void Tensor::zero_grad() {
    must_node().ensure_grad();
}

Tensor Tensor::grad_tensor() const {
    const auto& n = must_node();
    if (n.grad.empty()) {
        throw ContractError("grad_tensor(): no gradient buffer present");
    }
    Tensor t = zeros(n.shape, n.dtype, false);
    std::memcpy(t.node()->data.raw(), n.grad.raw(), n.grad.size_bytes());
    return t;
}

bool Tensor::all_finite() const {
    const auto& n = must_node();
    return dispatch(n.dtype, [&](auto z) {
        using T = decltype(z);
        auto d = n.data.as<T>(n.numel);
        for (auto v : d) {
            if (!std::isfinite(static_cast<double>(v))) {
                return false;
            }
        }
        return true;
    });
}

void Tensor::backward() const {
    auto& root = must_node();
    if (root.numel != 1) {
        throw ContractError("backward() requires a scalar loss, got shape " + shape_str(root.shape));
    }
    if (!root.requires_grad) {
        throw ContractError("backward() on a tensor that does not require grad");
    }

    // Iterative post-order DFS over parents; topo holds children after all
    // of their ancestors' dependencies, so the reverse sweep visits each node
    // before any of its parents.
    std::vector<detail::Node*> topo;
    std::unordered_set<detail::Node*> visited;
    std::vector<std::pair<detail::Node*, std::size_t>> stack;
    stack.emplace_back(&root, 0);
    visited.insert(&root);
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            detail::Node* p = node->parents[next].node();
            ++next;
            if (p->requires_grad && !visited.count(p)) {
                visited.insert(p);
                stack.emplace_back(p, 0);
            }
        } else {
            topo.push_back(node);
            stack.pop_back();
        }
    }

    // Overwrite semantics: every grad in the reachable graph starts at zero.
    for (auto* node : topo) {
        node->ensure_grad();
    }
    dispatch(root.dtype, [&](auto z) {
        using T = decltype(z);
        root.grad.as<T>(1)[0] = T{1};
    });

    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        if ((*it)->backward_fn) {
            (*it)->backward_fn(**it);
        }
    }
}

}  // namespace gvt
