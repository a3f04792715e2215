// SPDX-License-Identifier: MIT
#pragma once

#include <gridlab/common.hpp>

#include <functional>

namespace gridlab {

// Harmonic-oscillator (Fock) basis matched to the quadratic form
// H2 = c_n n^2 + c_phi phi^2, with phi = phi_zpf (a^+ + a) and
// n = i n_zpf (a^+ - a); phi_zpf * n_zpf = 1/2 exactly.
struct OscillatorBasis {
  int dim = 0;
  double c_n = 0.0;
  double c_phi = 0.0;
  double phi_zpf = 0.0;
  double n_zpf = 0.0;
};

OscillatorBasis make_oscillator_basis(double c_n, double c_phi, int dim);

// Real annihilation operator a with a|k> = sqrt(k)|k-1>.
Mat op_annihilation(const OscillatorBasis& b);

// phi = phi_zpf (a^+ + a); Hermitian with real entries.
CMat op_phase(const OscillatorBasis& b);

// n = i n_zpf (a^+ - a); Hermitian with imaginary entries.
CMat op_charge(const OscillatorBasis& b);

// Compact charge basis |n>, n = -n_max..n_max, with e^{i phi}|n> = |n+1>.
struct ChargeBasis {
  int n_max = 0;
  double offset = 0.0;  // offset charge n_g
};

Mat charge_number(const ChargeBasis& b);   // diag(-n_max..n_max)
CMat charge_exp_iphi(const ChargeBasis& b);  // lowering of -n / raising of n
Mat charge_cos_phi(const ChargeBasis& b);
CMat charge_sin_phi(const ChargeBasis& b);

// f(A) by spectral decomposition of the Hermitian argument.  Throws
// SchemaError when A is not Hermitian to 1e-12 relative.
CMat op_function_hermitian(const CMat& a,
                           const std::function<double(double)>& f);

// Kronecker product of the given per-mode operators in declared order;
// identity slots are passed as identity matrices.  Dimension capped.
CMat kron_embed(const std::vector<CMat>& ops,
                long dim_cap = 1 << 22);

}  // namespace gridlab
