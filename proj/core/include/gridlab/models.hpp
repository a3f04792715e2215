// SPDX-License-Identifier: MIT
#pragma once

#include <gridlab/basis.hpp>
#include <gridlab/common.hpp>
#include <gridlab/kron.hpp>
#include <gridlab/linalg.hpp>

#include <map>
#include <optional>
#include <string>

namespace gridlab {

enum class Family {
  ExtendedGKP,
  Dualmon,
  Fluxonium,
  PhaseSlipEffective,
  Cos2phiFluxonium,
  Gridium3,
  Gridium4,
};

Family family_from_string(const std::string& s);
std::string family_name(Family f);
bool family_is_multimode(Family f);

// Named energy set (h*GHz) plus optional dimensionless asymmetries.
struct CircuitParams {
  Family family = Family::ExtendedGKP;
  std::map<std::string, double> energies;
  double eps_J = 0.0;
  double eps_LK = 0.0;

  double energy(const std::string& name) const;
  double energy_or(const std::string& name, double fallback) const;
  bool has(const std::string& name) const;
  void validate() const;  // required energies present and positive
};

// Control knobs; defaults all zero.
struct Controls {
  double phi_ext = 0.0;    // radians
  double theta_ext = 0.0;  // radians
  double ng = 0.0;         // offset charge
};

// Truncation configuration.  Single-mode families use `dim`; multimode
// families use n_max for the compact charge mode and per-oscillator sizes
// (dims overrides everything when non-empty, ordered as the modes).
struct BasisSpec {
  int dim = 500;
  int n_max = 12;
  int osc_dim = 30;
  std::vector<int> dims;

  std::vector<int> mode_dims(Family f) const;
};

// --- single-mode builders (dense Hermitian matrices) -----------------------

CMat build_extended_gkp(const CircuitParams& p, const Controls& c, int dim);
CMat build_dualmon(const CircuitParams& p, const Controls& c, int dim);
CMat build_fluxonium(const CircuitParams& p, const Controls& c, int dim);
// Dual flux-lattice representation of the phase-slip circuit: persistent
// current states |m>, diagonal (E_L/2)(2 pi m + phi_ext)^2, phase-slip
// harmonics as range-k hops of amplitude E_Sk/2.  `dim` is the lattice size
// (rounded up to odd).
CMat build_phase_slip_effective(const CircuitParams& p, const Controls& c,
                                int dim);
CMat build_cos2phi_fluxonium(const CircuitParams& p, const Controls& c,
                             int dim);

// Dispatch over the single-mode families above.
CMat build_single_mode(const CircuitParams& p, const Controls& c, int dim);

// Oscillator basis underlying the single-mode builders, matched to the
// quadratic part of the family Hamiltonian.  PhaseSlipEffective uses a flux
// lattice instead and is rejected here.
OscillatorBasis single_mode_oscillator(const CircuitParams& p, int dim);

// --- multimode builders -----------------------------------------------------

// Transformed-coordinate 3-mode gridium: mode 0 compact charge, modes 1-2
// oscillators.  Offset charge and the eps_K charging reshaping enter here.
KronOp build_gridium3(const CircuitParams& p, const Controls& c,
                      const BasisSpec& basis);

// 4-mode gridium with the internal node as a genuine oscillator mode.
KronOp build_gridium4(const CircuitParams& p, const Controls& c,
                      const BasisSpec& basis);

// Fast-mode elimination of the internal node: returns the equivalent 3-mode
// parameter set (valid for large eps_p).
CircuitParams reduce_gridium4(const CircuitParams& p);

// Read-only documentation of the untransformed Sigma/Delta/S form.
std::string gridium3_sigma_delta_form();

// Per-family record of the literal prefactor conventions implemented.
std::string family_convention(Family f);

// Lowest-k levels for any family (dense or Lanczos as appropriate).
Spectrum levels(const CircuitParams& p, const Controls& c, int k,
                const BasisSpec& basis = {});

// Flux period of the spectrum in phi_ext (pi or 2 pi).
double flux_period(Family f);

// True when the family exposes an offset-charge knob.
bool supports_offset_charge(Family f);

}  // namespace gridlab
