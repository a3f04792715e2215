// SPDX-License-Identifier: MIT
#include <gridlab/linalg.hpp>

#include "arpack_impl.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <complex>
#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace gridlab {

namespace {

bool effectively_real(const CMat& h) {
  const double scale = 1.0 + h.real().cwiseAbs().maxCoeff();
  return h.imag().cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

void check_square(const CMat& h, const char* who) {
  if (h.rows() != h.cols() || h.rows() < 1)
    throw SchemaError(std::string(who) + ": matrix must be square and "
                      "non-empty");
}

void check_hermitian(const CMat& h, const char* who) {
  const double scale = 1.0 + h.cwiseAbs().maxCoeff();
  const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale)
    throw SchemaError(std::string(who) + ": matrix is not Hermitian "
                      "(max asymmetry " + std::to_string(asym) + ")");
}

// LAPACK dsyevr on the (symmetric) real part; values ascending.
void syevr(const Mat& a_in, char jobz, int il, int iu, Vec& values,
           Mat& vectors) {
  const int n = static_cast<int>(a_in.rows());
  Mat a = a_in;  // destroyed by LAPACK
  const int m_expect = iu - il + 1;
  values.resize(m_expect);
  vectors.resize(n, jobz == 'V' ? m_expect : 1);
  std::vector<int> isuppz(2 * std::max(1, m_expect));
  int m = 0;
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  const int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, jobz, 'I', 'L', n, a.data(), n, 0.0, 0.0, il, iu,
      abstol, &m, values.data(), vectors.data(), n, isuppz.data());
  if (info != 0)
    throw NumericalError("dsyevr failed with info=" + std::to_string(info));
  if (m != m_expect)
    throw NumericalError("dsyevr returned " + std::to_string(m) +
                         " eigenvalues, expected " + std::to_string(m_expect));
}

// LAPACK zheevr; values ascending.
void heevr(const CMat& a_in, char jobz, int il, int iu, Vec& values,
           CMat& vectors) {
  const int n = static_cast<int>(a_in.rows());
  CMat a = a_in;  // destroyed by LAPACK
  const int m_expect = iu - il + 1;
  values.resize(m_expect);
  vectors.resize(n, jobz == 'V' ? m_expect : 1);
  std::vector<int> isuppz(2 * std::max(1, m_expect));
  int m = 0;
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  const int info = LAPACKE_zheevr(
      LAPACK_COL_MAJOR, jobz, 'I', 'L', n, a.data(), n, 0.0, 0.0, il, iu,
      abstol, &m, values.data(), vectors.data(), n, isuppz.data());
  if (info != 0)
    throw NumericalError("zheevr failed with info=" + std::to_string(info));
  if (m != m_expect)
    throw NumericalError("zheevr returned " + std::to_string(m) +
                         " eigenvalues, expected " + std::to_string(m_expect));
}

void dense_lowest(const CMat& h, int k, bool want_vectors, Vec& values,
                  CMat& vectors) {
  const int n = static_cast<int>(h.rows());
  const char jobz = want_vectors ? 'V' : 'N';
  if (effectively_real(h)) {
    Mat rvec;
    syevr(h.real(), jobz, 1, k, values, rvec);
    if (want_vectors) vectors = rvec.cast<Cx>();
  } else {
    heevr(h, jobz, 1, k, values, vectors);
  }
  if (!want_vectors) vectors.resize(n, 0);
}

}  // namespace

void eigh_full(const CMat& h, Vec& values, CMat& vectors) {
  check_square(h, "eigh_full");
  dense_lowest(h, static_cast<int>(h.rows()), true, values, vectors);
  canonicalize_eigvecs(values, vectors);
}

Vec eigvalsh(const CMat& h) {
  check_square(h, "eigvalsh");
  Vec values;
  CMat scratch;
  dense_lowest(h, static_cast<int>(h.rows()), false, values, scratch);
  return values;
}

Vec eigvalsh_lowest(const CMat& h, int k) {
  check_square(h, "eigvalsh_lowest");
  if (k < 1 || k > h.rows())
    throw SchemaError("eigvalsh_lowest: need 1 <= k <= dim");
  Vec values;
  CMat scratch;
  dense_lowest(h, k, false, values, scratch);
  return values;
}

void eigh_lowest(const CMat& h, int k, Vec& values, CMat& vectors) {
  check_square(h, "eigh_lowest");
  if (k < 1 || k > h.rows())
    throw SchemaError("eigh_lowest: need 1 <= k <= dim");
  dense_lowest(h, k, true, values, vectors);
  canonicalize_eigvecs(values, vectors);
}

void canonicalize_eigvecs(const Vec& values, CMat& vectors,
                          double cluster_tol) {
  const int m = static_cast<int>(vectors.cols());
  if (m == 0) return;
  if (values.size() != m)
    throw SchemaError("canonicalize_eigvecs: values/vectors size mismatch");

  const int n = static_cast<int>(vectors.rows());
  int start = 0;
  while (start < m) {
    int stop = start + 1;
    while (stop < m && values[stop] - values[stop - 1] <= cluster_tol) ++stop;
    const int w = stop - start;
    const CMat s = vectors.middleCols(start, w);

    // Rebuild the cluster basis by greedy coordinate-pivoted projection:
    // repeatedly project the coordinate axis with the largest remaining
    // subspace weight (first index on ties).  The pivot weights are
    // invariant under any unitary remixing of the incoming cluster basis,
    // so the result is independent of solver-dependent degeneracy choices.
    CMat a = s.adjoint();  // w x n: subspace coordinates of each axis
    CMat v(n, w);
    for (int j = 0; j < w; ++j) {
      int pivot = 0;
      a.colwise().squaredNorm().maxCoeff(&pivot);
      CVec q = a.col(pivot);
      const double qn = q.norm();
      if (qn < 1e-150)
        throw NumericalError("canonicalize_eigvecs: rank-deficient cluster");
      q /= qn;
      a -= q * (q.adjoint() * a);
      v.col(j) = s * q;
      const Cx piv = v(pivot, j);
      v.col(j) *= std::conj(piv) / std::abs(piv);
    }
    vectors.middleCols(start, w) = v;
    start = stop;
  }
}

Spectrum diagonalize(const CMat& h, int k) {
  check_square(h, "diagonalize");
  const int n = static_cast<int>(h.rows());
  if (k < 1 || k > n)
    throw SchemaError("diagonalize: need 1 <= k <= dim, got k=" +
                      std::to_string(k) + " dim=" + std::to_string(n));
  check_hermitian(h, "diagonalize");

  Spectrum out;
  out.dim = n;
  if (n <= 4096) {
    eigh_lowest(h, k, out.energies, out.states);
  } else {
    auto matvec = [&](const Cx* x, Cx* y) {
      Eigen::Map<const CVec> xin(x, n);
      Eigen::Map<CVec> yout(y, n);
      yout.noalias() = h * xin;
    };
    auto res = detail::arpack_smallest_hermitian(matvec, n, k, -1, 1e-9,
                                                 20000);
    out.energies = res.values;
    out.states = res.vectors;
    canonicalize_eigvecs(out.energies, out.states);
  }

  // residual contract
  const double hnorm = h.cwiseAbs().colwise().sum().maxCoeff();
  for (int j = 0; j < k; ++j) {
    const double resid =
        (h * out.states.col(j) - out.energies[j] * out.states.col(j)).norm();
    if (!(resid <= 1e-8 * hnorm))
      throw NumericalError(
          "diagonalize: eigenpair " + std::to_string(j) +
          " violates the residual bound (" + std::to_string(resid) + " > " +
          std::to_string(1e-8 * hnorm) + ")");
  }
  return out;
}

ConvergenceReport convergence_report(const std::function<CMat(int)>& build,
                                     const std::vector<int>& dims, int k,
                                     double tol) {
  if (dims.size() < 2)
    throw SchemaError("convergence_report: need at least two dimensions");
  for (size_t i = 1; i < dims.size(); ++i)
    if (dims[i] <= dims[i - 1])
      throw SchemaError("convergence_report: dimensions must increase");

  ConvergenceReport rep;
  rep.dims = dims;
  rep.tol = tol;
  for (int d : dims) {
    if (k > d)
      throw SchemaError("convergence_report: k exceeds smallest dimension");
    rep.energies.push_back(diagonalize(build(d), k).energies);
  }
  for (size_t i = 1; i < rep.energies.size(); ++i)
    rep.deltas.push_back(
        (rep.energies[i] - rep.energies[i - 1]).cwiseAbs().maxCoeff());
  rep.converged = !rep.deltas.empty() && rep.deltas.back() <= tol;
  return rep;
}

}  // namespace gridlab
