// SPDX-License-Identifier: MIT
#include <gridlab/models.hpp>

#include <gridlab/basis.hpp>

#include <cmath>
#include <set>

namespace gridlab {

namespace {

const std::set<std::string> kKnownEnergies = {
    "E_C",   "E_L",   "E_2J",  "E_S",    "E_J",
    "E_JS",  "E_CS",  "E_LK",  "eps_p",  "eps_K",
    "E_S1",  "E_S2",  "E_S3",  "E_Lprime", "E_Cprime"};

struct Requirement {
  const char* name;
  bool zero_ok;
};

std::vector<Requirement> required_energies(Family f) {
  switch (f) {
    case Family::ExtendedGKP:
      return {{"E_C", false}, {"E_L", false}, {"E_S", false}, {"E_2J", false}};
    case Family::Dualmon:
      return {{"E_C", false}, {"E_L", false}, {"E_S", false}, {"E_J", false}};
    case Family::Fluxonium:
      return {{"E_C", false}, {"E_J", false}, {"E_L", false}};
    case Family::PhaseSlipEffective:
      return {{"E_L", false}, {"E_S1", false}};
    case Family::Cos2phiFluxonium:
      return {{"E_Cprime", false}, {"E_Lprime", false}, {"E_2J", false}};
    case Family::Gridium3:
      return {{"E_J", false}, {"E_C", false},  {"E_L", false},
              {"E_LK", false}, {"E_JS", false}, {"E_CS", false}};
    case Family::Gridium4:
      return {{"E_J", false},  {"E_C", false},  {"E_L", false},
              {"E_LK", false}, {"E_JS", false}, {"E_CS", false},
              {"eps_p", false}};
  }
  throw SchemaError("unknown family");
}

// cos(s * n) for the oscillator charge operator n = i n_zpf (a^+ - a),
// computed on the real symmetric similarity image n_zpf (a^+ + a) and
// rotated back with the diagonal i^k phase gauge (cos is even).
CMat cos_of_charge(const OscillatorBasis& b, double s) {
  const Mat a = op_annihilation(b);
  const CMat r = (b.n_zpf * (a.transpose() + a)).cast<Cx>();
  const CMat c = op_function_hermitian(r, [s](double x) { return std::cos(s * x); });
  static const Cx iphase[4] = {Cx(1, 0), Cx(0, 1), Cx(-1, 0), Cx(0, -1)};
  CMat out(b.dim, b.dim);
  for (int j = 0; j < b.dim; ++j)
    for (int k = 0; k < b.dim; ++k)
      out(j, k) = iphase[((k - j) % 4 + 4) % 4] * c(j, k);
  return out;
}

CMat quadratic_shifted(const CMat& op, double shift) {
  CMat s = op;
  s.diagonal().array() += shift;
  return s * s;
}

}  // namespace

Family family_from_string(const std::string& s) {
  if (s == "ExtendedGKP") return Family::ExtendedGKP;
  if (s == "Dualmon") return Family::Dualmon;
  if (s == "Fluxonium") return Family::Fluxonium;
  if (s == "PhaseSlipEffective") return Family::PhaseSlipEffective;
  if (s == "Cos2phiFluxonium") return Family::Cos2phiFluxonium;
  if (s == "Gridium3") return Family::Gridium3;
  if (s == "Gridium4") return Family::Gridium4;
  throw SchemaError("unknown model family \"" + s + "\"");
}

std::string family_name(Family f) {
  switch (f) {
    case Family::ExtendedGKP: return "ExtendedGKP";
    case Family::Dualmon: return "Dualmon";
    case Family::Fluxonium: return "Fluxonium";
    case Family::PhaseSlipEffective: return "PhaseSlipEffective";
    case Family::Cos2phiFluxonium: return "Cos2phiFluxonium";
    case Family::Gridium3: return "Gridium3";
    case Family::Gridium4: return "Gridium4";
  }
  throw SchemaError("unknown family");
}

bool family_is_multimode(Family f) {
  return f == Family::Gridium3 || f == Family::Gridium4;
}

double CircuitParams::energy(const std::string& name) const {
  auto it = energies.find(name);
  if (it == energies.end())
    throw SchemaError("missing energy " + name + " for family " +
                      family_name(family));
  return it->second;
}

double CircuitParams::energy_or(const std::string& name,
                                double fallback) const {
  auto it = energies.find(name);
  return it == energies.end() ? fallback : it->second;
}

bool CircuitParams::has(const std::string& name) const {
  return energies.count(name) > 0;
}

void CircuitParams::validate() const {
  for (const auto& [name, value] : energies) {
    if (!kKnownEnergies.count(name))
      throw SchemaError("unknown energy name \"" + name + "\"");
    if (!std::isfinite(value))
      throw SchemaError("energy " + name + " must be finite");
  }
  for (const auto& req : required_energies(family)) {
    const double v = energy(req.name);
    if (!(v > 0.0))
      throw SchemaError("energy " + std::string(req.name) + " for family " +
                        family_name(family) + " must be > 0");
  }
  // optional phase-slip harmonics may be zero but not negative
  for (const char* name : {"E_S2", "E_S3"}) {
    if (has(name) && energy(name) < 0.0)
      throw SchemaError("energy " + std::string(name) +
                        " must be >= 0");
  }
  for (const char* name : {"eps_K"}) {
    if (has(name) && !(energy(name) > 0.0))
      throw SchemaError("energy eps_K must be > 0 when present");
  }
  if (!(std::abs(eps_J) < 1.0) || !(std::abs(eps_LK) < 1.0))
    throw SchemaError("asymmetries must satisfy |eps| < 1");
}

std::vector<int> BasisSpec::mode_dims(Family f) const {
  const int n_modes = f == Family::Gridium3 ? 3
                      : f == Family::Gridium4 ? 4
                                              : 1;
  if (!dims.empty()) {
    if (static_cast<int>(dims.size()) != n_modes)
      throw SchemaError("basis dims must list one entry per mode");
    for (int d : dims)
      if (d < 2) throw SchemaError("basis dims must be >= 2");
    if (f == Family::Gridium3 && dims[0] % 2 == 0)
      throw SchemaError("compact-mode dimension must be odd (2 n_max + 1)");
    return dims;
  }
  if (n_modes == 1) return {dim};
  if (n_modes == 3) return {2 * n_max + 1, osc_dim, osc_dim};
  return {osc_dim, osc_dim, osc_dim, osc_dim};
}

CMat build_extended_gkp(const CircuitParams& p, const Controls& c, int dim) {
  const double EC = p.energy("E_C"), EL = p.energy("E_L");
  const double ES = p.energy("E_S"), E2J = p.energy("E_2J");
  auto b = make_oscillator_basis(EC, EL / 2.0, dim);
  const CMat phi = op_phase(b), n = op_charge(b);
  CMat h = EC * quadratic_shifted(n, c.ng) +
           0.5 * EL * quadratic_shifted(phi, c.phi_ext) -
           ES * cos_of_charge(b, 2.0 * kPi) +
           E2J * op_function_hermitian(
                     phi, [](double x) { return std::cos(2.0 * x); });
  return h;
}

CMat build_dualmon(const CircuitParams& p, const Controls& c, int dim) {
  const double EC = p.energy("E_C"), EL = p.energy("E_L");
  const double ES = p.energy("E_S"), EJ = p.energy("E_J");
  auto b = make_oscillator_basis(4.0 * EC, EL / 2.0, dim);
  const CMat phi = op_phase(b), n = op_charge(b);
  return 4.0 * EC * (n * n) +
         0.5 * EL * quadratic_shifted(phi, c.phi_ext) -
         ES * cos_of_charge(b, 2.0 * kPi) -
         EJ * op_function_hermitian(phi,
                                    [](double x) { return std::cos(x); });
}

CMat build_fluxonium(const CircuitParams& p, const Controls& c, int dim) {
  const double EC = p.energy("E_C"), EL = p.energy("E_L");
  const double EJ = p.energy("E_J");
  auto b = make_oscillator_basis(4.0 * EC, EL / 2.0, dim);
  const CMat phi = op_phase(b), n = op_charge(b);
  return 4.0 * EC * (n * n) -
         EJ * op_function_hermitian(phi,
                                    [](double x) { return std::cos(x); }) +
         0.5 * EL * quadratic_shifted(phi, c.phi_ext);
}

CMat build_phase_slip_effective(const CircuitParams& p, const Controls& c,
                                int dim) {
  const double EL = p.energy("E_L");
  const double es[3] = {p.energy("E_S1"), p.energy_or("E_S2", 0.0),
                        p.energy_or("E_S3", 0.0)};
  if (dim < 3) throw SchemaError("phase-slip lattice needs dim >= 3");
  const int d = (dim % 2 == 0) ? dim + 1 : dim;  // odd lattice, centered
  const int m0 = (d - 1) / 2;
  Mat h = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double phi = 2.0 * kPi * (i - m0) + c.phi_ext;
    h(i, i) = 0.5 * EL * phi * phi;
  }
  for (int k = 1; k <= 3; ++k)
    for (int i = 0; i + k < d; ++i) {
      h(i, i + k) += 0.5 * es[k - 1];
      h(i + k, i) += 0.5 * es[k - 1];
    }
  return h.cast<Cx>();
}

CMat build_cos2phi_fluxonium(const CircuitParams& p, const Controls& c,
                             int dim) {
  const double ECp = p.energy("E_Cprime"), ELp = p.energy("E_Lprime");
  const double E2J = p.energy("E_2J");
  auto b = make_oscillator_basis(4.0 * ECp, ELp / 2.0, dim);
  const CMat phi = op_phase(b), n = op_charge(b);
  return 4.0 * ECp * (n * n) +
         0.5 * ELp * quadratic_shifted(phi, c.phi_ext) +
         E2J * op_function_hermitian(
                   phi, [](double x) { return std::cos(2.0 * x); });
}

OscillatorBasis single_mode_oscillator(const CircuitParams& p, int dim) {
  switch (p.family) {
    case Family::ExtendedGKP:
      return make_oscillator_basis(p.energy("E_C"), p.energy("E_L") / 2.0,
                                   dim);
    case Family::Dualmon:
    case Family::Fluxonium:
      return make_oscillator_basis(4.0 * p.energy("E_C"),
                                   p.energy("E_L") / 2.0, dim);
    case Family::Cos2phiFluxonium:
      return make_oscillator_basis(4.0 * p.energy("E_Cprime"),
                                   p.energy("E_Lprime") / 2.0, dim);
    default:
      throw SchemaError("family " + family_name(p.family) +
                        " does not use a single oscillator basis");
  }
}

CMat build_single_mode(const CircuitParams& p, const Controls& c, int dim) {
  switch (p.family) {
    case Family::ExtendedGKP: return build_extended_gkp(p, c, dim);
    case Family::Dualmon: return build_dualmon(p, c, dim);
    case Family::Fluxonium: return build_fluxonium(p, c, dim);
    case Family::PhaseSlipEffective:
      return build_phase_slip_effective(p, c, dim);
    case Family::Cos2phiFluxonium: return build_cos2phi_fluxonium(p, c, dim);
    default:
      throw SchemaError("family " + family_name(p.family) +
                        " is multimode; use the multimode builder");
  }
}

KronOp build_gridium3(const CircuitParams& p, const Controls& c,
                      const BasisSpec& basis) {
  const double EJ = p.energy("E_J"), EC = p.energy("E_C");
  const double EL = p.energy("E_L"), ELK = p.energy("E_LK");
  const double EJS = p.energy("E_JS"), ECS = p.energy("E_CS");
  const double ECp3 = p.has("eps_K")
                          ? 2.0 * EC * p.energy("eps_K") /
                                (EC + 2.0 * p.energy("eps_K"))
                          : EC;
  const double cphi2 = ELK * EL / (2.0 * ELK + EL);

  const auto dims = basis.mode_dims(Family::Gridium3);
  const int n_max = (dims[0] - 1) / 2;
  ChargeBasis cb{n_max, c.ng};
  const CMat n1 = charge_number(cb).cast<Cx>();
  const CMat cos1 = charge_cos_phi(cb).cast<Cx>();
  const CMat sin1 = charge_sin_phi(cb);

  auto b2 = make_oscillator_basis(2.0 * EC, cphi2, dims[1]);
  auto b3 = make_oscillator_basis(2.0 * ECp3, ELK, dims[2]);
  const CMat phi2 = op_phase(b2), n2 = op_charge(b2);
  const CMat phi3 = op_phase(b3), n3 = op_charge(b3);
  auto cosf = [](double x) { return std::cos(x); };
  auto sinf = [](double x) { return std::sin(x); };
  const CMat cosp2 = op_function_hermitian(phi2, cosf);
  const CMat sinp2 = op_function_hermitian(phi2, sinf);
  const CMat cosp3 = op_function_hermitian(phi3, cosf);
  const CMat sinp3 = op_function_hermitian(phi3, sinf);

  KronOp op(dims);
  // kinetic: 4 E_CS (n1 + n2 + n_g)^2 + 2 E_C n2^2 + 2 E_C' n3^2
  op.add_term(4.0 * ECS, {{0, n1 * n1}});
  op.add_term(4.0 * ECS + 2.0 * EC, {{1, n2 * n2}});
  op.add_term(8.0 * ECS, {{0, n1}, {1, n2}});
  if (c.ng != 0.0) {
    op.add_term(8.0 * ECS * c.ng, {{0, n1}});
    op.add_term(8.0 * ECS * c.ng, {{1, n2}});
    op.add_term(4.0 * ECS * c.ng * c.ng, {});
  }
  op.add_term(2.0 * ECp3, {{2, n3 * n3}});
  // Josephson: -2 E_J cos(phi1 - phi2) cos(phi3)
  op.add_term(-2.0 * EJ, {{0, cos1}, {1, cosp2}, {2, cosp3}});
  op.add_term(-2.0 * EJ, {{0, sin1}, {1, sinp2}, {2, cosp3}});
  // phase-slip junction: -E_JS cos(phi1 - phi_ext)
  op.add_term(-EJS * std::cos(c.phi_ext), {{0, cos1}});
  op.add_term(-EJS * std::sin(c.phi_ext), {{0, sin1}});
  // inductive quadratics
  op.add_term(cphi2, {{1, phi2 * phi2}});
  op.add_term(ELK, {{2, quadratic_shifted(phi3, -0.5 * c.theta_ext)}});
  // junction / inductor asymmetry corrections
  if (p.eps_J != 0.0) {
    op.add_term(2.0 * p.eps_J * EJ, {{0, sin1}, {1, cosp2}, {2, sinp3}});
    op.add_term(-2.0 * p.eps_J * EJ, {{0, cos1}, {1, sinp2}, {2, sinp3}});
  }
  if (p.eps_LK != 0.0) {
    const double et = EL * ELK / (EL + ELK);
    op.add_term(2.0 * p.eps_LK * et, {{1, phi2}, {2, phi3}});
  }
  return op;
}

KronOp build_gridium4(const CircuitParams& p, const Controls& c,
                      const BasisSpec& basis) {
  const double EJ = p.energy("E_J"), EC = p.energy("E_C");
  const double EL = p.energy("E_L"), ELK = p.energy("E_LK");
  const double EJS = p.energy("E_JS"), ECS = p.energy("E_CS");
  const double epsP = p.energy("eps_p");
  const double ECp = p.has("eps_K")
                         ? 2.0 * EC * p.energy("eps_K") /
                               (EC + 2.0 * p.energy("eps_K"))
                         : EC;
  const double elS = 0.5 * EL;
  const double c2 = ELK * elS / (ELK + elS);

  const auto dims = basis.mode_dims(Family::Gridium4);
  auto bS = make_oscillator_basis(2.0 * EC, c2, dims[0]);
  auto bD = make_oscillator_basis(2.0 * ECp, ELK, dims[1]);
  auto bJ = make_oscillator_basis(4.0 * ECS, elS, dims[2]);
  auto bP = make_oscillator_basis(4.0 * epsP, ELK + elS, dims[3]);
  const CMat phiS = op_phase(bS), nS = op_charge(bS);
  const CMat phiD = op_phase(bD), nD = op_charge(bD);
  const CMat phiJ = op_phase(bJ), nJ = op_charge(bJ);
  const CMat phiP = op_phase(bP), nP = op_charge(bP);
  auto cosf = [](double x) { return std::cos(x); };
  const CMat cS = op_function_hermitian(phiS, cosf);
  const CMat cD = op_function_hermitian(phiD, cosf);
  const CMat cJ = op_function_hermitian(phiJ, cosf);

  KronOp op(dims);
  op.add_term(2.0 * EC, {{0, nS * nS}});
  op.add_term(2.0 * ECp, {{1, nD * nD}});
  op.add_term(4.0 * ECS, {{2, nJ * nJ}});
  op.add_term(4.0 * epsP, {{3, nP * nP}});
  // -2 E_J cos(phi_Sigma) cos(phi_Delta)
  op.add_term(-2.0 * EJ, {{0, cS}, {1, cD}});
  // -E_JS cos(phi_S)
  op.add_term(-EJS, {{2, cJ}});
  // E_LK [ (phi_Sigma - phi_P)^2 + (phi_Delta - theta/2)^2 ]
  op.add_term(ELK, {{0, phiS * phiS}});
  op.add_term(-2.0 * ELK, {{0, phiS}, {3, phiP}});
  op.add_term(ELK, {{3, phiP * phiP}});
  op.add_term(ELK, {{1, quadratic_shifted(phiD, -0.5 * c.theta_ext)}});
  // (E_L/2) (phi_S + phi_ext - phi_P)^2
  CMat bshift = phiJ;
  bshift.diagonal().array() += c.phi_ext;
  op.add_term(elS, {{2, bshift * bshift}});
  op.add_term(-2.0 * elS, {{2, bshift}, {3, phiP}});
  op.add_term(elS, {{3, phiP * phiP}});
  return op;
}

CircuitParams reduce_gridium4(const CircuitParams& p) {
  // fast-mode elimination of the internal node: minimizing over phi_P turns
  // E_LK (phi_Sigma - phi_P)^2 + (E_L/2)(phi_S + phi_ext - phi_P)^2 into the
  // series-spring coupling C2 (phi_Sigma - phi_S - phi_ext)^2 with
  // C2 = E_LK (E_L/2) / (E_LK + E_L/2) = E_LK E_L / (2 E_LK + E_L), which is
  // exactly the three-mode inductive coefficient.  Valid for large eps_p.
  CircuitParams out = p;
  out.family = Family::Gridium3;
  out.energies.erase("eps_p");
  return out;
}

std::string gridium3_sigma_delta_form() {
  return "H3 = 2 E_C n_Sigma^2 + 2 E_C' n_Delta^2 + 4 E_CS n_S^2"
         " - 2 E_J cos(phi_Sigma) cos(phi_Delta) - E_JS cos(phi_S - phi_ext)"
         " + E_LK (phi_Delta - theta_ext/2)^2"
         " + [E_LK E_L / (2 E_LK + E_L)] (phi_Sigma - phi_S)^2;"
         " E_C' = 2 E_C eps_K / (E_C + 2 eps_K) when eps_K is present,"
         " else E_C.  Implemented in the transformed coordinates"
         " (phi_1 = phi_S compact, phi_2 = phi_Sigma - phi_S relative,"
         " phi_3 = phi_Delta), where the offset charge n_g couples to"
         " n_1 + n_2 legally.";
}

std::string family_convention(Family f) {
  switch (f) {
    case Family::ExtendedGKP:
      return "H = E_C (n + n_g)^2 + (E_L/2)(phi + phi_ext)^2"
             " - E_S cos(2 pi n) + E_2J cos(2 phi); Fock basis matched to"
             " c_n = E_C, c_phi = E_L/2.  The halved inductive convention is"
             " used; pass E_L doubled to obtain the unhalved variant.";
    case Family::Dualmon:
      return "H = 4 E_C n^2 + (E_L/2)(phi + phi_ext)^2 - E_S cos(2 pi n)"
             " - E_J cos(phi); basis c_n = 4 E_C, c_phi = E_L/2.";
    case Family::Fluxonium:
      return "H = 4 E_C n^2 - E_J cos(phi) + (E_L/2)(phi + phi_ext)^2;"
             " basis c_n = 4 E_C, c_phi = E_L/2.";
    case Family::PhaseSlipEffective:
      return "Dual flux-lattice form on persistent-current states |m>:"
             " diagonal (E_L/2)(2 pi m + phi_ext)^2, range-k hops of"
             " amplitude +E_Sk/2 for k = 1..3.  The hop sign is a fixed"
             " convention: with E_S2 > 0 the all-positive and all-negative"
             " hop choices are not gauge equivalent, and the positive choice"
             " reproduces the full fluxonium band structure.";
    case Family::Cos2phiFluxonium:
      return "H = 4 E_C' n^2 + (E_L'/2)(phi + phi_ext)^2 + E_2J cos(2 phi)"
             " (positive cos(2 phi) sign); basis c_n = 4 E_C',"
             " c_phi = E_L'/2.";
    case Family::Gridium3:
      return "Transformed three-mode form: mode 1 compact charge, mode 2"
             " relative-phase oscillator (c_n = 2 E_C,"
             " c_phi = E_LK E_L/(2 E_LK + E_L)), mode 3 Delta oscillator"
             " (c_n = 2 E_C', c_phi = E_LK).  Kinetic"
             " 4 E_CS (n_1 + n_2 + n_g)^2 + 2 E_C n_2^2 + 2 E_C' n_3^2;"
             " -2 E_J cos(phi_1 - phi_2) cos(phi_3);"
             " -E_JS cos(phi_1 - phi_ext) (flux on the phase-slip junction);"
             " + c_phi2 phi_2^2 + E_LK (phi_3 - theta_ext/2)^2; asymmetry"
             " terms 2 eps_J E_J [sin(phi_1 - phi_2)] cos-> sin(phi_3) and"
             " 2 eps_LK E_L E_LK/(E_L + E_LK) phi_2 phi_3.";
    case Family::Gridium4:
      return "Four-mode Sigma/Delta/S/P form: 2 E_C n_Sigma^2 +"
             " 2 E_C' n_Delta^2 + 4 E_CS n_S^2 + 4 eps_p n_P^2"
             " - 2 E_J cos(phi_Sigma) cos(phi_Delta) - E_JS cos(phi_S)"
             " + E_LK[(phi_Sigma - phi_P)^2 + (phi_Delta - theta_ext/2)^2]"
             " + (E_L/2)(phi_S + phi_ext - phi_P)^2 (flux on the shunt"
             " inductor, halved convention).";
  }
  throw SchemaError("unknown family");
}

Spectrum levels(const CircuitParams& p, const Controls& c, int k,
                const BasisSpec& basis) {
  Spectrum sp;
  if (family_is_multimode(p.family)) {
    KronOp op = p.family == Family::Gridium3 ? build_gridium3(p, c, basis)
                                             : build_gridium4(p, c, basis);
    sp = lowest_eigs(op, k);
  } else {
    sp = diagonalize(build_single_mode(p, c, basis.dim), k);
  }
  sp.model = family_name(p.family);
  return sp;
}

double flux_period(Family f) {
  switch (f) {
    case Family::ExtendedGKP:
    case Family::Cos2phiFluxonium:
    case Family::Gridium3:
      return kPi;
    default:
      return 2.0 * kPi;
  }
}

bool supports_offset_charge(Family f) {
  return f == Family::ExtendedGKP || f == Family::Gridium3;
}

}  // namespace gridlab
