// SPDX-License-Identifier: MIT
#pragma once

#include <gridlab/common.hpp>

#include <functional>
#include <string>
#include <vector>

namespace gridlab {

// Sorted eigenpairs with provenance metadata.
struct Spectrum {
  Vec energies;  // ascending, h*GHz
  CMat states;   // eigenvectors as columns, canonical phase convention
  std::string model;
  int dim = 0;
};

// Full eigendecomposition of a Hermitian matrix (complex or real-valued
// entries), eigenvalues ascending.  Routes to LAPACK.
void eigh_full(const CMat& h, Vec& values, CMat& vectors);

// Eigenvalues only.
Vec eigvalsh(const CMat& h);

// Lowest k eigenpairs of a dense Hermitian matrix.
void eigh_lowest(const CMat& h, int k, Vec& values, CMat& vectors);

// Lowest k eigenvalues only (no vectors); the cheap path for fit loops.
Vec eigvalsh_lowest(const CMat& h, int k);

// Deterministic eigenvector convention: energies ascending; within clusters
// closer than cluster_tol the subspace basis is rebuilt by coordinate-pivoted
// projection (largest-magnitude component, first index on ties) and every
// vector's pivot component is rotated real-positive.
void canonicalize_eigvecs(const Vec& values, CMat& vectors,
                          double cluster_tol = 1e-9);

// Dense (dim <= 4096) or iterative (above) lowest-k solve with the residual
// contract ||Hv - Ev|| <= 1e-8 ||H|| enforced; throws NumericalError on
// violation or non-convergence.
Spectrum diagonalize(const CMat& h, int k);

// Per-dimension lowest-k table with successive max-deltas.
struct ConvergenceReport {
  std::vector<int> dims;
  std::vector<Vec> energies;   // lowest k per dim
  std::vector<double> deltas;  // max |delta| between consecutive dims
  bool converged = false;
  double tol = 0.0;
};

ConvergenceReport convergence_report(
    const std::function<CMat(int)>& build, const std::vector<int>& dims, int k,
    double tol);

}  // namespace gridlab
