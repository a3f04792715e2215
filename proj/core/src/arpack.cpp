// SPDX-License-Identifier: MIT
#include "arpack_impl.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <vector>

// ARPACK Fortran entry points (complex double driver).
extern "C" {
void znaupd_(int* ido, const char* bmat, const int* n, const char* which,
             const int* nev, const double* tol, gridlab::Cx* resid,
             const int* ncv, gridlab::Cx* v, const int* ldv, int* iparam,
             int* ipntr, gridlab::Cx* workd, gridlab::Cx* workl,
             const int* lworkl, double* rwork, int* info, int bmat_len,
             int which_len);
void zneupd_(const int* rvec, const char* howmny, const int* select,
             gridlab::Cx* d, gridlab::Cx* z, const int* ldz,
             const gridlab::Cx* sigma, gridlab::Cx* workev, const char* bmat,
             const int* n, const char* which, const int* nev,
             const double* tol, gridlab::Cx* resid, const int* ncv,
             gridlab::Cx* v, const int* ldv, int* iparam, int* ipntr,
             gridlab::Cx* workd, gridlab::Cx* workl, const int* lworkl,
             double* rwork, int* info, int howmny_len, int bmat_len,
             int which_len);
}

namespace gridlab::detail {

ArpackResult arpack_smallest_hermitian(
    const std::function<void(const Cx*, Cx*)>& matvec, int n, int k, int ncv,
    double tol, int max_iter) {
  if (k < 1 || k >= n)
    throw SchemaError("arpack: need 1 <= k < n, got k=" + std::to_string(k) +
                      " n=" + std::to_string(n));
  if (ncv <= 0) ncv = std::min(n, std::max(4 * k + 20, 40));
  ncv = std::min(n, std::max(ncv, k + 2));

  std::vector<Cx> resid(n), v(static_cast<size_t>(n) * ncv), workd(3 * n);
  const int lworkl = 3 * ncv * ncv + 5 * ncv;
  std::vector<Cx> workl(lworkl);
  std::vector<double> rwork(ncv);
  int iparam[11] = {0}, ipntr[14] = {0};
  iparam[0] = 1;         // exact shifts
  iparam[2] = max_iter;  // max Arnoldi iterations
  iparam[6] = 1;         // standard eigenproblem

  // deterministic start vector
  for (int i = 0; i < n; ++i) resid[i] = Cx(std::cos(0.7 * i) + 0.3, 0.0);

  int ido = 0, info = 1;  // info=1: use the provided start vector
  const char* bmat = "I";
  const char* which = "SR";
  while (true) {
    znaupd_(&ido, bmat, &n, which, &k, &tol, resid.data(), &ncv, v.data(), &n,
            iparam, ipntr, workd.data(), workl.data(), &lworkl, rwork.data(),
            &info, 1, 2);
    if (ido == -1 || ido == 1) {
      matvec(&workd[ipntr[0] - 1], &workd[ipntr[1] - 1]);
    } else {
      break;
    }
  }
  if (info < 0)
    throw NumericalError("arpack znaupd failed with info=" +
                         std::to_string(info));
  if (info == 1)
    throw NumericalError(
        "arpack: no convergence after " + std::to_string(iparam[2]) +
        " iterations (" + std::to_string(iparam[4]) + "/" +
        std::to_string(k) + " Ritz values converged)");

  std::vector<int> select(ncv, 1);
  std::vector<Cx> d(k + 1), workev(2 * ncv);
  CMat z(n, k);
  const int rvec = 1;
  const Cx sigma(0.0, 0.0);
  int info2 = 0;
  zneupd_(&rvec, "A", select.data(), d.data(), z.data(), &n, &sigma,
          workev.data(), bmat, &n, which, &k, &tol, resid.data(), &ncv,
          v.data(), &n, iparam, ipntr, workd.data(), workl.data(), &lworkl,
          rwork.data(), &info2, 1, 1, 2);
  if (info2 != 0)
    throw NumericalError("arpack zneupd failed with info=" +
                         std::to_string(info2));

  // sort ascending by real part (Hermitian: eigenvalues are real)
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return d[a].real() < d[b].real(); });

  ArpackResult out;
  out.values.resize(k);
  out.vectors.resize(n, k);
  for (int i = 0; i < k; ++i) {
    out.values[i] = d[order[i]].real();
    out.vectors.col(i) = z.col(order[i]);
  }
  out.iterations = iparam[2];
  return out;
}

}  // namespace gridlab::detail
