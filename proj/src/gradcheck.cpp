#include "gvt/gradcheck.hpp"

#include <cmath>

namespace gvt {

Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x, double h) {
    if (x.dtype() != DType::Float64) {
        throw ContractError("finite_diff_grad: x must be float64");
    }
    NoGradGuard ng;
    Tensor probe = x.detach();
    Tensor out = Tensor::zeros(x.shape(), DType::Float64);
    auto p = probe.data<double>();
    auto g = out.data<double>();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double saved = p[i];
        p[i] = saved + h;
        const double fp = f(probe);
        p[i] = saved - h;
        const double fm = f(probe);
        p[i] = saved;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return out;
}

double max_rel_error(const Tensor& a, const Tensor& b, double floor) {
    if (a.shape() != b.shape()) {
        throw DimensionError("max_rel_error: shape mismatch " + shape_str(a.shape()) + " vs " +
                             shape_str(b.shape()));
    }
    const auto va = a.to_vector();
    const auto vb = b.to_vector();
    double worst = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
        const double denom = std::max({std::abs(va[i]), std::abs(vb[i]), floor});
        worst = std::max(worst, std::abs(va[i] - vb[i]) / denom);
    }
    return worst;
}

}  // namespace gvt
