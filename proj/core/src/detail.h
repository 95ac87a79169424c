#pragma once

#include <Eigen/Core>

#include "kgreduce/toeplitz.h"

namespace kgr::detail {

// Largest singular value by two-sided power iteration; deterministic start,
// 50 iterations, relative tolerance 1e-8, non-convergence flagged.
NormEstimate power_norm(const Eigen::MatrixXcd& M);

}  // namespace kgr::detail
