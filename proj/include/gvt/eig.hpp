#pragma once

#include <vector>

#include "gvt/tensor.hpp"

namespace gvt {

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
// Converged when the off-diagonal Frobenius norm drops below `tol`; throws
// NumericError (with the sweep count) if that never happens.
std::vector<double> jacobi_eigenvalues(const Tensor& a, double tol = 1e-10, int max_sweeps = 64);

// Eigenvalues of L = I - R_sym, ascending. R_sym must be symmetric within
// 1e-8 (ContractError otherwise); it is exactly symmetrized before the
// solve. For R_sym produced by sym_normalize of a symmetric matrix the
// result lies in [0, 2] up to roundoff.
std::vector<double> laplacian_spectrum(const Tensor& r_sym);

}  // namespace gvt
