// SPDX-License-Identifier: MIT
#include <gridlab/basis.hpp>

#include <gridlab/linalg.hpp>

#include <cmath>
#include <string>

namespace gridlab {

OscillatorBasis make_oscillator_basis(double c_n, double c_phi, int dim) {
  if (!(c_n > 0.0) || !std::isfinite(c_n))
    throw SchemaError("oscillator basis: c_n must be positive and finite");
  if (!(c_phi > 0.0) || !std::isfinite(c_phi))
    throw SchemaError("oscillator basis: c_phi must be positive and finite");
  if (dim < 2) throw SchemaError("oscillator basis: dim must be >= 2");
  OscillatorBasis b;
  b.dim = dim;
  b.c_n = c_n;
  b.c_phi = c_phi;
  b.phi_zpf = std::pow(c_n / c_phi, 0.25) / std::sqrt(2.0);
  b.n_zpf = 0.5 / b.phi_zpf;
  return b;
}

Mat op_annihilation(const OscillatorBasis& b) {
  Mat a = Mat::Zero(b.dim, b.dim);
  for (int k = 1; k < b.dim; ++k) a(k - 1, k) = std::sqrt(double(k));
  return a;
}

CMat op_phase(const OscillatorBasis& b) {
  const Mat a = op_annihilation(b);
  return (b.phi_zpf * (a.transpose() + a)).cast<Cx>();
}

CMat op_charge(const OscillatorBasis& b) {
  const Mat a = op_annihilation(b);
  return Cx(0.0, b.n_zpf) * (a.transpose() - a).cast<Cx>();
}

namespace {
int charge_dim(const ChargeBasis& b) {
  if (b.n_max < 1) throw SchemaError("charge basis: n_max must be >= 1");
  return 2 * b.n_max + 1;
}
}  // namespace

Mat charge_number(const ChargeBasis& b) {
  const int d = charge_dim(b);
  Mat n = Mat::Zero(d, d);
  for (int j = 0; j < d; ++j) n(j, j) = double(j - b.n_max);
  return n;
}

CMat charge_exp_iphi(const ChargeBasis& b) {
  const int d = charge_dim(b);
  CMat e = CMat::Zero(d, d);
  for (int j = 0; j + 1 < d; ++j) e(j + 1, j) = 1.0;  // |n+1><n|
  return e;
}

Mat charge_cos_phi(const ChargeBasis& b) {
  const int d = charge_dim(b);
  Mat c = Mat::Zero(d, d);
  for (int j = 0; j + 1 < d; ++j) {
    c(j + 1, j) = 0.5;
    c(j, j + 1) = 0.5;
  }
  return c;
}

CMat charge_sin_phi(const ChargeBasis& b) {
  const int d = charge_dim(b);
  CMat s = CMat::Zero(d, d);
  for (int j = 0; j + 1 < d; ++j) {
    s(j + 1, j) = Cx(0.0, -0.5);  // (e^{i phi} - e^{-i phi}) / (2i)
    s(j, j + 1) = Cx(0.0, 0.5);
  }
  return s;
}

CMat op_function_hermitian(const CMat& a,
                           const std::function<double(double)>& f) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw SchemaError("op_function: matrix must be square and non-empty");
  const double scale = 1.0 + a.cwiseAbs().maxCoeff();
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw SchemaError("op_function: matrix is not Hermitian");
  Vec w;
  CMat v;
  eigh_full(a, w, v);
  Vec fw(w.size());
  for (int i = 0; i < w.size(); ++i) fw[i] = f(w[i]);
  return v * fw.asDiagonal() * v.adjoint();
}

CMat kron_embed(const std::vector<CMat>& ops, long dim_cap) {
  if (ops.empty()) throw SchemaError("kron_embed: need at least one factor");
  long total = 1;
  for (const auto& m : ops) {
    if (m.rows() != m.cols() || m.rows() < 1)
      throw SchemaError("kron_embed: factors must be square and non-empty");
    if (total > dim_cap / m.rows())
      throw SchemaError("kron_embed: total dimension exceeds cap " +
                        std::to_string(dim_cap));
    total *= m.rows();
  }
  CMat out = CMat::Ones(1, 1);
  for (const auto& m : ops) {
    const long r = out.rows(), d = m.rows();
    CMat next(r * d, r * d);
    for (long i = 0; i < r; ++i)
      for (long j = 0; j < r; ++j)
        next.block(i * d, j * d, d, d) = out(i, j) * m;
    out.swap(next);
  }
  return out;
}

}  // namespace gridlab
