// SPDX-License-Identifier: MIT
#pragma once

#include <gridlab/io.hpp>
#include <gridlab/models.hpp>

#include <string>
#include <utility>
#include <vector>

namespace gridlab {

// Control knob varied by a sweep.
enum class SweepAxis { PhiExt, ThetaExt, OffsetCharge };

SweepAxis axis_from_string(const std::string& s);
std::string axis_name(SweepAxis a);

// Operators whose matrix elements can be tabulated: the mode charge n or the
// mode phase phi, in the basis the single-mode builders use.
enum class ElementOp { Charge, Phase };

// phi or n for a single-mode family, matched to the builder's basis.
CMat single_mode_operator(const CircuitParams& p, ElementOp op, int dim);

struct TransitionBranch {
  int from = 0;
  int to = 1;
  Vec freq_ghz;  // one entry per grid point; NaN where the solver failed
};

struct ElementTrack {
  ElementOp op = ElementOp::Charge;
  int from = 0;
  int to = 1;
  Vec magnitude;  // |<from|op|to>| per grid point; NaN on failure
};

// Transition frequencies (and optional matrix-element magnitudes) along one
// control axis.  Branches are labeled by sorted-energy index, so level
// crossings appear as kinks rather than being tracked through.
struct TransitionSet {
  SweepAxis axis = SweepAxis::PhiExt;
  Vec grid;
  std::vector<TransitionBranch> branches;
  std::vector<ElementTrack> elements;
  std::vector<std::string> errors;  // per grid point; empty string = success

  // First column: axis value; then "f_i_j_GHz" per branch and "|n|_i_j" /
  // "|phi|_i_j" per element track.
  CsvTable to_csv() const;
};

struct SweepRequest {
  SweepAxis axis = SweepAxis::PhiExt;
  Vec grid;  // strictly monotone, nonempty
  int k = 4;
  // Level pairs to record; empty means (0,j) for j = 1..k-1.
  std::vector<std::pair<int, int>> transitions;
  // Matrix-element magnitudes recorded for every listed transition
  // (single-mode families only).
  std::vector<ElementOp> element_ops;
};

// Diagonalize at every grid point and tabulate the requested transitions.
// Solver failures are annotated per point and the sweep continues.
TransitionSet sweep_transitions(const CircuitParams& p, const Controls& base,
                                const SweepRequest& req,
                                const BasisSpec& basis = {});

// <i|op|j> under the deterministic eigenvector phase convention.
Cx matrix_element(const Spectrum& sp, const CMat& op, int i, int j);

struct DispersiveConfig {
  double g = 0.0;        // coupling, GHz
  double omega_r = 0.0;  // resonator frequency, GHz
  ElementOp coupling_op = ElementOp::Charge;
};

struct DispersiveShift {
  double chi_ghz = 0.0;
  // Set when omega_r lies within 1e-6 GHz of a retained transition; the
  // value is still returned.
  bool divergent = false;
};

// chi_i = g^2 sum_{j != i} |<i|op|j>|^2 * 2 w_ij / (w_ij^2 - w_r^2) over the
// lowest `levels_used` states.
DispersiveShift dispersive_shift(const Spectrum& sp, const CMat& coupling,
                                 const DispersiveConfig& cfg, int state,
                                 int levels_used);

// chi_1 - chi_0; divergent if either term is.
DispersiveShift dispersive_shift01(const Spectrum& sp, const CMat& coupling,
                                   const DispersiveConfig& cfg,
                                   int levels_used);

// Peak-to-peak variation of w_ij over an offset-charge grid.  Families
// without an offset-charge knob are rejected.
double charge_dispersion(const CircuitParams& p, const Controls& base, int i,
                         int j, const Vec& ng_grid,
                         const BasisSpec& basis = {});
// Default grid: 41 points over one period.
double charge_dispersion(const CircuitParams& p, const Controls& base, int i,
                         int j, const BasisSpec& basis = {});

// Peak-to-peak variation of w_ij over a flux grid.
double flux_dispersion(const CircuitParams& p, const Controls& base, int i,
                       int j, const Vec& phi_grid,
                       const BasisSpec& basis = {});
// Default grid: 201 points over one flux period.
double flux_dispersion(const CircuitParams& p, const Controls& base, int i,
                       int j, const BasisSpec& basis = {});

enum class WaveBasis { Phase, Charge };

// Eigenstate amplitudes sampled on a grid, contracted with Hermite functions
// (phase) or their Fourier images (charge).  Continuum-normalized: for grids
// covering the support, sum |psi|^2 * dx = 1 to quadrature accuracy.
CVec wavefunction(const CircuitParams& p, const Spectrum& sp, int state,
                  WaveBasis basis, const Vec& grid);

}  // namespace gridlab
