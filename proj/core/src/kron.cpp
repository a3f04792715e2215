// SPDX-License-Identifier: MIT
#include <gridlab/kron.hpp>

#include "arpack_impl.hpp"

#include <algorithm>
#include <string>

namespace gridlab {

KronOp::KronOp(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw SchemaError("KronOp: need at least one mode");
  size_ = 1;
  for (int d : dims_) {
    if (d < 1) throw SchemaError("KronOp: mode dimensions must be positive");
    if (size_ > (1L << 31) / d)
      throw SchemaError("KronOp: total dimension overflow");
    size_ *= d;
  }
}

void KronOp::add_term(Cx coeff, const std::map<int, CMat>& factors) {
  Term t;
  t.coeff = coeff;
  for (const auto& [mode, m] : factors) {
    if (mode < 0 || mode >= static_cast<int>(dims_.size()))
      throw SchemaError("KronOp: factor mode " + std::to_string(mode) +
                        " out of range");
    if (m.rows() != dims_[mode] || m.cols() != dims_[mode])
      throw SchemaError("KronOp: factor shape mismatch on mode " +
                        std::to_string(mode));
    t.factors.emplace_back(mode, m);
  }
  terms_.push_back(std::move(t));
}

void KronOp::matvec(const Cx* x, Cx* y) const {
  using RowMat =
      Eigen::Matrix<Cx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const long n = size_;
  if (work_.size() < static_cast<size_t>(2 * n)) work_.resize(2 * n);
  Cx* buf = work_.data();
  Cx* tmp = work_.data() + n;

  Eigen::Map<CVec>(y, n).setZero();
  for (const auto& term : terms_) {
    // apply factors axis by axis; mode 0 is the slowest index
    const Cx* src = x;
    Cx* dst = buf;
    for (const auto& [mode, m] : term.factors) {
      long left = 1, right = 1;
      for (int a = 0; a < mode; ++a) left *= dims_[a];
      for (size_t a = mode + 1; a < dims_.size(); ++a) right *= dims_[a];
      const long d = dims_[mode];
      if (right == 1) {
        // contiguous rows: one GEMM over the whole buffer
        Eigen::Map<const RowMat> in(src, left, d);
        Eigen::Map<RowMat> out(dst, left, d);
        out.noalias() = in * m.transpose();
      } else {
        for (long l = 0; l < left; ++l) {
          Eigen::Map<const RowMat> in(src + l * d * right, d, right);
          Eigen::Map<RowMat> out(dst + l * d * right, d, right);
          out.noalias() = m * in;
        }
      }
      src = dst;
      dst = (dst == buf) ? tmp : buf;
    }
    Eigen::Map<CVec>(y, n) += term.coeff * Eigen::Map<const CVec>(src, n);
  }
}

CVec KronOp::apply(const CVec& x) const {
  if (x.size() != size_) throw SchemaError("KronOp: vector length mismatch");
  CVec y(size_);
  matvec(x.data(), y.data());
  return y;
}

CMat KronOp::dense() const {
  if (size_ > 8192)
    throw SchemaError("KronOp::dense: dimension too large for dense assembly");
  CMat h = CMat::Zero(size_, size_);
  CVec e = CVec::Zero(size_);
  CVec col(size_);
  for (long j = 0; j < size_; ++j) {
    e[j] = 1.0;
    matvec(e.data(), col.data());
    h.col(j) = col;
    e[j] = 0.0;
  }
  return h;
}

double KronOp::norm_estimate() const {
  double total = 0.0;
  for (const auto& term : terms_) {
    double prod = std::abs(term.coeff);
    for (const auto& [mode, m] : term.factors) {
      (void)mode;
      prod *= m.cwiseAbs().colwise().sum().maxCoeff();
    }
    total += prod;
  }
  return total;
}

Spectrum lowest_eigs(const KronOp& op, int k, int ncv, double tol,
                     int max_iter) {
  const long n = op.size();
  auto matvec = [&](const Cx* x, Cx* y) { op.matvec(x, y); };
  auto res = detail::arpack_smallest_hermitian(
      matvec, static_cast<int>(n), k, ncv, tol, max_iter);
  Spectrum out;
  out.dim = static_cast<int>(n);
  out.energies = res.values;
  out.states = res.vectors;
  canonicalize_eigvecs(out.energies, out.states);
  // residual contract against the term-norm bound
  const double hnorm = op.norm_estimate();
  CVec hv(n);
  for (int j = 0; j < k; ++j) {
    op.matvec(out.states.col(j).data(), hv.data());
    const double resid = (hv - out.energies[j] * out.states.col(j)).norm();
    if (!(resid <= 1e-8 * std::max(hnorm, 1.0)))
      throw NumericalError("lowest_eigs: eigenpair " + std::to_string(j) +
                           " violates the residual bound");
  }
  return out;
}

}  // namespace gridlab
