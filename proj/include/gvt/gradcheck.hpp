#pragma once

#include <functional>

#include "gvt/tensor.hpp"

namespace gvt {

// Central-difference gradient of a scalar-valued function, (f(x + h e_i) -
// f(x - h e_i)) / 2h with h = 1e-5. Uses only forward evaluations, so it is
// a valid independent oracle for any backward implementation. x must be
// float64; f must be deterministic.
Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x,
                        double h = 1e-5);

// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor); the standard gradient-check
// metric.
double max_rel_error(const Tensor& a, const Tensor& b, double floor = 1e-6);

}  // namespace gvt
