// SPDX-License-Identifier: MIT
#include <gridlab/analysis.hpp>

#include <gridlab/basis.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gridlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void apply_axis(Controls& c, SweepAxis axis, double x) {
  switch (axis) {
    case SweepAxis::PhiExt: c.phi_ext = x; break;
    case SweepAxis::ThetaExt: c.theta_ext = x; break;
    case SweepAxis::OffsetCharge: c.ng = x; break;
  }
}

void check_axis_supported(const CircuitParams& p, SweepAxis axis) {
  if (axis == SweepAxis::OffsetCharge && !supports_offset_charge(p.family))
    throw SchemaError("family " + family_name(p.family) +
                      " has no offset-charge axis");
  if (axis == SweepAxis::ThetaExt && !family_is_multimode(p.family))
    throw SchemaError("family " + family_name(p.family) +
                      " has no theta_ext axis");
}

std::string op_tag(ElementOp op) {
  return op == ElementOp::Charge ? "n" : "phi";
}

// Transition frequency w_ij at one control point, levels retained = k.
Vec point_frequencies(const Spectrum& sp,
                      const std::vector<std::pair<int, int>>& transitions) {
  Vec out(static_cast<long>(transitions.size()));
  for (size_t t = 0; t < transitions.size(); ++t)
    out[static_cast<long>(t)] =
        sp.energies[transitions[t].second] - sp.energies[transitions[t].first];
  return out;
}

}  // namespace

SweepAxis axis_from_string(const std::string& s) {
  if (s == "phi_ext") return SweepAxis::PhiExt;
  if (s == "theta_ext") return SweepAxis::ThetaExt;
  if (s == "n_g") return SweepAxis::OffsetCharge;
  throw SchemaError("unknown sweep axis '" + s +
                    "' (expected phi_ext, theta_ext, or n_g)");
}

std::string axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::PhiExt: return "phi_ext";
    case SweepAxis::ThetaExt: return "theta_ext";
    case SweepAxis::OffsetCharge: return "n_g";
  }
  throw SchemaError("invalid sweep axis");
}

CMat single_mode_operator(const CircuitParams& p, ElementOp op, int dim) {
  const OscillatorBasis b = single_mode_oscillator(p, dim);
  return op == ElementOp::Charge ? op_charge(b) : op_phase(b);
}

CsvTable TransitionSet::to_csv() const {
  CsvTable t;
  t.header.push_back(axis_name(axis));
  for (const auto& br : branches)
    t.header.push_back("f_" + std::to_string(br.from) + "_" +
                       std::to_string(br.to) + "_GHz");
  for (const auto& el : elements)
    t.header.push_back("|" + op_tag(el.op) + "|_" + std::to_string(el.from) +
                       "_" + std::to_string(el.to));
  for (long i = 0; i < grid.size(); ++i) {
    std::vector<double> row;
    row.push_back(grid[i]);
    for (const auto& br : branches) row.push_back(br.freq_ghz[i]);
    for (const auto& el : elements) row.push_back(el.magnitude[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

TransitionSet sweep_transitions(const CircuitParams& p, const Controls& base,
                                const SweepRequest& req,
                                const BasisSpec& basis) {
  if (req.grid.size() == 0) throw SchemaError("sweep grid must be nonempty");
  for (long i = 1; i < req.grid.size(); ++i)
    if (req.grid[i] <= req.grid[i - 1])
      throw SchemaError("sweep grid must be strictly increasing");
  if (req.k < 2) throw SchemaError("sweep needs at least two levels");
  check_axis_supported(p, req.axis);

  std::vector<std::pair<int, int>> transitions = req.transitions;
  if (transitions.empty())
    for (int j = 1; j < req.k; ++j) transitions.emplace_back(0, j);
  for (auto [i, j] : transitions)
    if (i < 0 || j <= i || j >= req.k)
      throw SchemaError("transition indices must satisfy 0 <= i < j < k");
  if (!req.element_ops.empty() && family_is_multimode(p.family))
    throw SchemaError(
        "matrix-element tracks require a single-mode family");

  const long n = req.grid.size();
  TransitionSet out;
  out.axis = req.axis;
  out.grid = req.grid;
  out.errors.assign(static_cast<size_t>(n), "");
  for (auto [i, j] : transitions) {
    TransitionBranch br;
    br.from = i;
    br.to = j;
    br.freq_ghz = Vec::Constant(n, kNaN);
    out.branches.push_back(std::move(br));
  }
  std::vector<CMat> ops;
  for (ElementOp op : req.element_ops) {
    ops.push_back(single_mode_operator(p, op, basis.dim));
    for (auto [i, j] : transitions) {
      ElementTrack el;
      el.op = op;
      el.from = i;
      el.to = j;
      el.magnitude = Vec::Constant(n, kNaN);
      out.elements.push_back(std::move(el));
    }
  }

  for (long g = 0; g < n; ++g) {
    Controls c = base;
    apply_axis(c, req.axis, req.grid[g]);
    try {
      const Spectrum sp = levels(p, c, req.k, basis);
      const Vec freqs = point_frequencies(sp, transitions);
      for (size_t t = 0; t < transitions.size(); ++t)
        out.branches[t].freq_ghz[g] = freqs[static_cast<long>(t)];
      for (size_t o = 0; o < ops.size(); ++o)
        for (size_t t = 0; t < transitions.size(); ++t) {
          const auto [i, j] = transitions[t];
          out.elements[o * transitions.size() + t].magnitude[g] =
              std::abs(matrix_element(sp, ops[o], i, j));
        }
    } catch (const NumericalError& e) {
      out.errors[static_cast<size_t>(g)] = e.what();
    }
  }
  return out;
}

Cx matrix_element(const Spectrum& sp, const CMat& op, int i, int j) {
  if (i < 0 || j < 0 || i >= sp.states.cols() || j >= sp.states.cols())
    throw SchemaError("matrix_element: state index out of range");
  if (op.rows() != sp.states.rows() || op.cols() != sp.states.rows())
    throw SchemaError("matrix_element: operator dimension mismatch");
  return sp.states.col(i).dot(op * sp.states.col(j));
}

DispersiveShift dispersive_shift(const Spectrum& sp, const CMat& coupling,
                                 const DispersiveConfig& cfg, int state,
                                 int levels_used) {
  if (cfg.g < 0.0) throw SchemaError("coupling g must be >= 0");
  if (cfg.omega_r <= 0.0)
    throw SchemaError("resonator frequency must be > 0");
  if (levels_used < 2 || levels_used > sp.energies.size())
    throw SchemaError("dispersive_shift: levels_used out of range");
  if (state < 0 || state >= levels_used)
    throw SchemaError("dispersive_shift: state index out of range");
  DispersiveShift out;
  double sum = 0.0;
  for (int j = 0; j < levels_used; ++j) {
    if (j == state) continue;
    const double wij = sp.energies[j] - sp.energies[state];
    if (std::abs(std::abs(wij) - cfg.omega_r) < 1e-6) out.divergent = true;
    const double nij = std::abs(matrix_element(sp, coupling, state, j));
    sum += nij * nij * 2.0 * wij / (wij * wij - cfg.omega_r * cfg.omega_r);
  }
  out.chi_ghz = cfg.g * cfg.g * sum;
  return out;
}

DispersiveShift dispersive_shift01(const Spectrum& sp, const CMat& coupling,
                                   const DispersiveConfig& cfg,
                                   int levels_used) {
  const DispersiveShift c0 = dispersive_shift(sp, coupling, cfg, 0, levels_used);
  const DispersiveShift c1 = dispersive_shift(sp, coupling, cfg, 1, levels_used);
  DispersiveShift out;
  out.chi_ghz = c1.chi_ghz - c0.chi_ghz;
  out.divergent = c0.divergent || c1.divergent;
  return out;
}

namespace {

double dispersion_over(const CircuitParams& p, const Controls& base,
                       SweepAxis axis, const Vec& grid, int i, int j,
                       const BasisSpec& basis) {
  if (grid.size() == 0) throw SchemaError("dispersion grid must be nonempty");
  if (i < 0 || j <= i) throw SchemaError("transition indices must satisfy i < j");
  check_axis_supported(p, axis);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (long g = 0; g < grid.size(); ++g) {
    Controls c = base;
    apply_axis(c, axis, grid[g]);
    const Spectrum sp = levels(p, c, j + 1, basis);
    const double w = sp.energies[j] - sp.energies[i];
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  return hi - lo;
}

}  // namespace

double charge_dispersion(const CircuitParams& p, const Controls& base, int i,
                         int j, const Vec& ng_grid, const BasisSpec& basis) {
  return dispersion_over(p, base, SweepAxis::OffsetCharge, ng_grid, i, j,
                         basis);
}

double charge_dispersion(const CircuitParams& p, const Controls& base, int i,
                         int j, const BasisSpec& basis) {
  return charge_dispersion(p, base, i, j, linspace(0.0, 1.0, 41), basis);
}

double flux_dispersion(const CircuitParams& p, const Controls& base, int i,
                       int j, const Vec& phi_grid, const BasisSpec& basis) {
  return dispersion_over(p, base, SweepAxis::PhiExt, phi_grid, i, j, basis);
}

double flux_dispersion(const CircuitParams& p, const Controls& base, int i,
                       int j, const BasisSpec& basis) {
  return flux_dispersion(p, base, i, j,
                         linspace(0.0, flux_period(p.family), 201), basis);
}

namespace {

// Orthonormal Hermite functions h_0..h_{kmax-1} at u, stable upward
// recurrence; h_k(u) = u sqrt(2/k) h_{k-1} - sqrt((k-1)/k) h_{k-2}.
Vec hermite_functions(double u, int kmax) {
  Vec h(kmax);
  const double h0 = std::pow(kPi, -0.25) * std::exp(-0.5 * u * u);
  h[0] = h0;
  if (kmax > 1) h[1] = std::sqrt(2.0) * u * h0;
  for (int k = 2; k < kmax; ++k)
    h[k] = u * std::sqrt(2.0 / k) * h[k - 1] -
           std::sqrt((k - 1.0) / k) * h[k - 2];
  return h;
}

}  // namespace

CVec wavefunction(const CircuitParams& p, const Spectrum& sp, int state,
                  WaveBasis basis, const Vec& grid) {
  if (state < 0 || state >= sp.states.cols())
    throw SchemaError("wavefunction: state index out of range");
  const int dim = static_cast<int>(sp.states.rows());
  const OscillatorBasis b = single_mode_oscillator(p, dim);
  // The Fock ladder scale for conjugate pair [phi, n] = i: the phase
  // wavefunctions are Hermite functions of phi / (sqrt(2) phi_zpf), and the
  // charge-side images use the Fourier-dual scale 1 / (sqrt(2) phi_zpf)
  // = sqrt(2) n_zpf, picking up (-i)^k per Fock order.
  const double scale = basis == WaveBasis::Phase ? std::sqrt(2.0) * b.phi_zpf
                                                 : std::sqrt(2.0) * b.n_zpf;
  const CVec coeffs = sp.states.col(state);
  CVec psi(grid.size());
  const Cx mi(0.0, -1.0);
  for (long g = 0; g < grid.size(); ++g) {
    const Vec h = hermite_functions(grid[g] / scale, dim);
    Cx acc = 0.0;
    Cx phase = 1.0;
    for (int k = 0; k < dim; ++k) {
      const Cx factor = basis == WaveBasis::Phase ? Cx(1.0) : phase;
      acc += coeffs[k] * factor * h[k];
      phase *= mi;
    }
    psi[g] = acc / std::sqrt(scale);
  }
  return psi;
}

}  // namespace gridlab
