#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gvt/dtype.hpp"
#include "gvt/errors.hpp"

namespace gvt {

using Shape = std::vector<std::int64_t>;

std::int64_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

// Untyped contiguous buffer with typed span access.
class Buffer {
  public:
    Buffer() = default;
    Buffer(DType dt, std::int64_t n) : dtype_(dt), bytes_(static_cast<std::size_t>(n) * dtype_size(dt)) {}

    bool empty() const { return bytes_.empty(); }
    void clear() { bytes_.clear(); }
    void zero();

    template <class T>
    std::span<T> as(std::int64_t n) {
        return {reinterpret_cast<T*>(bytes_.data()), static_cast<std::size_t>(n)};
    }
    template <class T>
    std::span<const T> as(std::int64_t n) const {
        return {reinterpret_cast<const T*>(bytes_.data()), static_cast<std::size_t>(n)};
    }

    std::byte* raw() { return bytes_.data(); }
    const std::byte* raw() const { return bytes_.data(); }
    std::size_t size_bytes() const { return bytes_.size(); }
    DType dtype() const { return dtype_; }

  private:
    DType dtype_ = DType::Float32;
    std::vector<std::byte> bytes_;
};

struct Node;

}  // namespace detail

// Dense row-major tensor with an optional gradient buffer. A Tensor is a
// cheap handle onto a shared node; ops return fresh nodes and never mutate
// their inputs, so produced values can be shared freely. When grad recording
// is enabled, each op attaches a backward closure to its output node; the
// closures reachable from a scalar loss form the tape for backward().
class Tensor {
  public:
    Tensor() = default;

    static Tensor zeros(Shape shape, DType dt = DType::Float32, bool requires_grad = false);
    static Tensor ones(Shape shape, DType dt = DType::Float32, bool requires_grad = false);
    static Tensor full(Shape shape, double value, DType dt = DType::Float32, bool requires_grad = false);
    static Tensor eye(std::int64_t n, DType dt = DType::Float32);
    static Tensor scalar(double value, DType dt = DType::Float32, bool requires_grad = false);
    static Tensor from(Shape shape, std::span<const double> values, DType dt = DType::Float32,
                       bool requires_grad = false);
    static Tensor from(Shape shape, std::initializer_list<double> values, DType dt = DType::Float32,
                       bool requires_grad = false);
    // uniform / normal use hand-rolled transforms of the raw engine output so
    // results are identical across standard library implementations.
    static Tensor uniform(Shape shape, double lo, double hi, std::mt19937_64& rng,
                          DType dt = DType::Float32, bool requires_grad = false);
    static Tensor normal(Shape shape, double mean, double stddev, std::mt19937_64& rng,
                         DType dt = DType::Float32, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const;
    std::int64_t dim(std::size_t i) const { return shape().at(i); }
    std::size_t rank() const { return shape().size(); }
    std::int64_t numel() const;
    DType dtype() const;

    bool requires_grad() const;
    Tensor& set_requires_grad(bool value);

    template <class T>
    std::span<T> data();
    template <class T>
    std::span<const T> data() const;

    bool has_grad() const;
    template <class T>
    std::span<T> grad();
    template <class T>
    std::span<const T> grad() const;

    // Element access as double regardless of dtype (convenience for tests
    // and small-scale host code; not for kernels).
    double at(std::initializer_list<std::int64_t> idx) const;
    void set(std::initializer_list<std::int64_t> idx, double value);
    double item() const;
    std::vector<double> to_vector() const;
    std::vector<double> grad_to_vector() const;

    // Deep copy of the data as a fresh leaf (no tape history).
    Tensor clone() const;
    // Same values, detached from the tape, never requiring grad.
    Tensor detach() const;
    Tensor astype(DType dt) const;

    // Allocates (if needed) and zero-fills this tensor's gradient buffer.
    void zero_grad();
    // Copies the gradient buffer into a fresh leaf tensor.
    Tensor grad_tensor() const;

    // Reverse-mode sweep from a scalar. Gradients of every node reachable
    // from this loss are overwritten (zeroed, then accumulated within this
    // single sweep); repeated calls therefore yield identical leaf grads.
    void backward() const;

    bool all_finite() const;

    detail::Node* node() const { return node_.get(); }

    // Internal: wrap an existing node.
    explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

  private:
    std::shared_ptr<detail::Node> node_;

    detail::Node& must_node() const;
};

namespace detail {

struct Node {
    Shape shape;
    std::int64_t numel = 0;
    DType dtype = DType::Float32;
    Buffer data;
    Buffer grad;  // empty until first needed; same shape/dtype as data
    bool requires_grad = false;

    std::vector<Tensor> parents;
    std::function<void(Node&)> backward_fn;  // empty for leaves

    Node(Shape s, DType dt)
        : shape(std::move(s)), numel(shape_numel(shape)), dtype(dt), data(dt, numel) {}

    void ensure_grad() {
        if (grad.empty()) {
            grad = Buffer(dtype, numel);
        }
        grad.zero();
    }
};

}  // namespace detail

template <class T>
std::span<T> Tensor::data() {
    return must_node().data.as<T>(numel());
}
template <class T>
std::span<const T> Tensor::data() const {
    return must_node().data.as<T>(numel());
}
template <class T>
std::span<T> Tensor::grad() {
    auto& n = must_node();
    if (n.grad.empty()) {
        n.ensure_grad();
    }
    return n.grad.as<T>(n.numel);
}
template <class T>
std::span<const T> Tensor::grad() const {
    return must_node().grad.as<T>(numel());
}

// Thread-local switch controlling whether ops record backward closures.
bool grad_enabled();

// RAII guard disabling grad recording in its scope (oracles, data paths,
// evaluation).
class NoGradGuard {
  public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

  private:
    bool previous_;
};

// Uniform double in [0, 1) from the raw 64-bit engine output; identical on
// every standard library.
double rand_unit(std::mt19937_64& rng);

}  // namespace gvt
