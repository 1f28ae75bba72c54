#pragma once

#include <cstddef>
#include <cstdint>

namespace gvt {

enum class DType : std::uint8_t { Float32 = 0, Float64 = 1 };

constexpr std::size_t dtype_size(DType dt) {
    return dt == DType::Float32 ? sizeof(float) : sizeof(double);
}

constexpr const char* dtype_name(DType dt) {
    return dt == DType::Float32 ? "float32" : "float64";
}

// Calls f with a value of the scalar type selected by dt. Kernels are written
// once, templated on the scalar type, and dispatched here.
template <class F>
decltype(auto) dispatch(DType dt, F&& f) {
    if (dt == DType::Float32) {
        return f(float{});
    }
    return f(double{});
}

}  // namespace gvt
