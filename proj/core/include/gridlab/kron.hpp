// SPDX-License-Identifier: MIT
#pragma once

#include <gridlab/common.hpp>
#include <gridlab/linalg.hpp>

#include <map>
#include <vector>

namespace gridlab {

// Sum of Kronecker-product terms over a tensor-product space.  Each term is
// coeff * (x) factors, where factors act on a subset of modes (identity on
// the rest).  Mode 0 is the slowest-varying index.
class KronOp {
 public:
  explicit KronOp(std::vector<int> dims);

  void add_term(Cx coeff, const std::map<int, CMat>& factors);

  const std::vector<int>& dims() const { return dims_; }
  long size() const { return size_; }
  int n_terms() const { return static_cast<int>(terms_.size()); }

  // y = H x
  void matvec(const Cx* x, Cx* y) const;
  CVec apply(const CVec& x) const;

  // Dense assembly for small sizes (testing / dense fallback).
  CMat dense() const;

  // 1-norm estimate used by residual checks.
  double norm_estimate() const;

 private:
  struct Term {
    Cx coeff;
    std::vector<std::pair<int, CMat>> factors;  // sorted by mode
  };
  std::vector<int> dims_;
  long size_ = 0;
  std::vector<Term> terms_;
  mutable std::vector<Cx> work_;  // contraction scratch
};

// Lowest-k eigenpairs of a Hermitian KronOp via implicitly restarted Lanczos
// (ARPACK) with a deterministic start vector.  ncv <= 0 selects a default.
Spectrum lowest_eigs(const KronOp& op, int k, int ncv = -1, double tol = 1e-9,
                     int max_iter = 20000);

}  // namespace gridlab
