#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "gvt/tensor.hpp"

namespace gvt::opdetail {

using detail::Node;

inline void require_same_dtype(const Tensor& a, const Tensor& b, const char* op) {
    if (a.dtype() != b.dtype()) {
        throw ContractError(std::string(op) + ": dtype mismatch (" + dtype_name(a.dtype()) + " vs " +
                            dtype_name(b.dtype()) + ")");
    }
}

inline bool wants_grad(const Tensor& a) { return grad_enabled() && a.requires_grad(); }
inline bool wants_grad(const Tensor& a, const Tensor& b) {
    return grad_enabled() && (a.requires_grad() || b.requires_grad());
}

inline void attach(Tensor& out, std::vector<Tensor> parents, std::function<void(Node&)> fn) {
    Node* n = out.node();
    n->requires_grad = true;
    n->parents = std::move(parents);
    n->backward_fn = std::move(fn);
}

}  // namespace gvt::opdetail
