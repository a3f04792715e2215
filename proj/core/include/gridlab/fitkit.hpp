// SPDX-License-Identifier: MIT
#pragma once

#include <gridlab/analysis.hpp>
#include <gridlab/io.hpp>
#include <gridlab/models.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace gridlab {

// --- generic bounded damped least squares ----------------------------------

using ResidualFn = std::function<Vec(const Vec&)>;

struct LsqOptions {
  int max_iter = 60;
  double ftol = 1e-10;  // relative cost-decrease stop
  double xtol = 1e-10;  // relative step-size stop
  int n_starts = 8;     // Latin-hypercube starts when none are given
  std::uint64_t seed = 0;
  bool simplex_fallback = true;  // rerun rank-deficient starts with simplex
  int workers = 1;
};

struct StartOutcome {
  Vec x0;
  Vec x;
  double rms = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string note;
};

struct LsqResult {
  Vec x;
  double rms = 0.0;
  Vec sigma;  // curvature-proxy uncertainty per parameter
  bool converged = false;
  std::vector<StartOutcome> starts;
};

// Minimize ||r(x)||^2 within [lower, upper] by Levenberg-Marquardt with a
// forward-difference Jacobian.  Starts: the given list, or `n_starts`
// seeded Latin-hypercube draws within bounds.  Throws NumericalError when
// every start fails.
LsqResult least_squares(const ResidualFn& residuals, const Vec& lower,
                        const Vec& upper, const std::vector<Vec>& starts,
                        const LsqOptions& opt = {});

// Nelder-Mead on 0.5 ||r||^2 with bound clamping; fallback engine.
LsqResult simplex_minimize(const ResidualFn& residuals, const Vec& lower,
                           const Vec& upper, const Vec& start,
                           const LsqOptions& opt = {});

// --- spectral fitting -------------------------------------------------------

// One observed point.  `line` groups points belonging to the same spectral
// line; the fit assigns each line to one model transition.
struct SpectralTarget {
  double axis = 0.0;
  int line = 0;
  double freq_ghz = 0.0;
  double weight = 1.0;
};

// How data lines map onto model transitions 0 -> j.
enum class AssignMode {
  ByLineId,           // line id is the model transition index j
  Ranked,             // sorted lines onto 1..L in frequency order
  NearestPersistent,  // per-line least-cost match, fixed along the axis
};

struct FitProblem {
  Family family = Family::ExtendedGKP;
  std::vector<std::string> free_names;  // order defines the parameter vector
  Vec lower, upper;
  std::vector<Vec> starts;                       // optional explicit starts
  std::map<std::string, double> fixed;           // pinned energies / eps
  std::vector<std::pair<std::string, std::string>> ties;  // (follower, leader)
  std::vector<SpectralTarget> targets;
  Controls controls;  // base controls; the swept axis overrides its knob
  SweepAxis axis = SweepAxis::PhiExt;
  BasisSpec basis;
  int model_branches = 0;  // transitions 0->1..0->model_branches; 0 = #lines
  AssignMode assign = AssignMode::NearestPersistent;
  bool fit_beta = false;  // multimode flux miscalibration theta = pi + beta*phi
  double beta_lower = -0.05, beta_upper = 0.05;
  LsqOptions opts;
};

struct FitResult {
  std::map<std::string, double> params;
  std::map<std::string, double> sigma;
  double beta = 0.0;
  double residual_rms = 0.0;
  bool converged = false;
  std::vector<int> assignment;  // line id -> model branch j
  std::vector<StartOutcome> starts;
};

FitResult least_squares_fit(const FitProblem& p);

// Serialization of problems/results and CSV target ingestion
// (header: axis, branch, frequency_GHz, weight).
FitProblem fit_problem_from_json(const json& j);
json fit_problem_to_json(const FitProblem& p);
json fit_result_to_json(const FitResult& r);
std::vector<SpectralTarget> targets_from_csv(const CsvTable& t);
CsvTable targets_to_csv(const std::vector<SpectralTarget>& targets);

// Model transition frequencies f(0->j), j = 1..branches, for every axis
// value; row per axis point.  Single-mode families reuse the flux-independent
// matrix blocks across the sweep.
Mat model_transition_table(const CircuitParams& p, const Controls& base,
                           SweepAxis axis, const Vec& axis_values,
                           int branches, const BasisSpec& basis,
                           double beta = 0.0);

// --- model-mapping workflows (effective-parameter extraction) ---------------

struct MapReport {
  CircuitParams effective;       // recovered effective parameters
  double residual_rms = 0.0;
  int branches_used = 0;         // data lines included by the stopping rule
  std::map<std::string, double> sigma;
  std::vector<std::string> log;  // per-stage notes (inclusion decisions)
};

// Effective extended-GKP parameters {E_2J, E_S, E_C, E_L} of a 3- or 4-mode
// circuit: synthesize the theta_ext = pi spectrum, then fit the single-mode
// model, including levels one at a time until parameter uncertainties blow
// up or a data line stops resembling any model line.
MapReport map_multimode_to_gkp(const CircuitParams& p,
                               const BasisSpec& multimode_basis = {},
                               const BasisSpec& fit_basis = {},
                               int workers = 1);

// Effective dualmon parameters {E_J, E_S, E_C, E_L} from the theta_ext = 0
// sweep, fitted on the first transition only.
MapReport map_multimode_to_dualmon(const CircuitParams& p,
                                   const BasisSpec& multimode_basis = {},
                                   const BasisSpec& fit_basis = {},
                                   int workers = 1);

}  // namespace gridlab
