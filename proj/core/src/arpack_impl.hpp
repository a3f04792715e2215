// SPDX-License-Identifier: MIT
#pragma once

#include <gridlab/common.hpp>

#include <functional>

namespace gridlab::detail {

struct ArpackResult {
  Vec values;
  CMat vectors;
  int iterations = 0;
};

// Smallest-eigenvalue pairs of a Hermitian operator given by its matvec,
// via ARPACK's implicitly restarted Arnoldi with a deterministic start
// vector.  Throws NumericalError on failure.
ArpackResult arpack_smallest_hermitian(
    const std::function<void(const Cx*, Cx*)>& matvec, int n, int k, int ncv,
    double tol, int max_iter);

}  // namespace gridlab::detail
