// SPDX-License-Identifier: MIT
#include <gridlab/fitkit.hpp>

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

namespace gridlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFailResidual = 1e6;  // stand-in when a model eval fails

Vec clamp_vec(const Vec& x, const Vec& lo, const Vec& hi) {
  Vec out = x;
  for (long i = 0; i < x.size(); ++i)
    out[i] = std::min(hi[i], std::max(lo[i], x[i]));
  return out;
}

void check_bounds(const Vec& lo, const Vec& hi, long n_params) {
  if (lo.size() != n_params || hi.size() != n_params)
    throw SchemaError("bounds must match the parameter count");
  for (long i = 0; i < n_params; ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]))
      throw SchemaError("bounds must be finite");
    if (!(lo[i] < hi[i]))
      throw SchemaError("lower bound must be strictly below upper bound");
  }
}

double half_sq(const Vec& r) { return 0.5 * r.squaredNorm(); }

double rms_of(const Vec& r) {
  return r.size() == 0 ? 0.0 : std::sqrt(r.squaredNorm() / r.size());
}

// Forward differences, switching to backward at the upper bound.
Mat fd_jacobian(const ResidualFn& f, const Vec& x, const Vec& r0,
                const Vec& lo, const Vec& hi) {
  const long p = x.size();
  Mat jac(r0.size(), p);
  for (long i = 0; i < p; ++i) {
    double h = 1e-6 * std::max(std::abs(x[i]), 1e-2);
    Vec xp = x;
    if (x[i] + h <= hi[i]) {
      xp[i] = x[i] + h;
      jac.col(i) = (f(xp) - r0) / (xp[i] - x[i]);
    } else {
      xp[i] = std::max(lo[i], x[i] - h);
      jac.col(i) = (r0 - f(xp)) / (x[i] - xp[i]);
    }
  }
  return jac;
}

StartOutcome levmar_single(const ResidualFn& f, const Vec& lo, const Vec& hi,
                           const Vec& x0, const LsqOptions& opt) {
  StartOutcome out;
  out.x0 = x0;
  Vec x = clamp_vec(x0, lo, hi);
  Vec r = f(x);
  double cost = half_sq(r);
  double lambda = -1.0;
  bool rank_warn = false;

  for (int iter = 0; iter < opt.max_iter; ++iter) {
    const Mat jac = fd_jacobian(f, x, r, lo, hi);
    const Mat a = jac.transpose() * jac;
    const Vec g = jac.transpose() * r;
    // Projected gradient: descent components blocked by an active bound do
    // not count against convergence (minima may sit on the box).
    Vec gp = g;
    for (int i = 0; i < x.size(); ++i) {
      if (x[i] <= lo[i] && g[i] > 0.0) gp[i] = 0.0;
      if (x[i] >= hi[i] && g[i] < 0.0) gp[i] = 0.0;
    }
    if (gp.lpNorm<Eigen::Infinity>() < 1e-9 * std::max(1.0, cost)) {
      out.converged = true;
      break;
    }
    if (lambda < 0.0) lambda = 1e-3 * std::max(a.diagonal().maxCoeff(), 1e-12);
    Eigen::ColPivHouseholderQR<Mat> qr(jac);
    qr.setThreshold(1e-10);
    if (qr.rank() < x.size()) rank_warn = true;

    Vec d = a.diagonal().cwiseMax(1e-12 * std::max(1.0, a.diagonal().maxCoeff()));
    bool accepted = false;
    for (int trial = 0; trial < 40; ++trial) {
      Mat m = a;
      m.diagonal() += lambda * d;
      const Vec dx = m.ldlt().solve(-g);
      const Vec xn = clamp_vec(x + dx, lo, hi);
      if ((xn - x).lpNorm<Eigen::Infinity>() == 0.0) {
        lambda *= 6.0;
        continue;
      }
      const Vec rn = f(xn);
      const double cn = half_sq(rn);
      if (cn < cost) {
        const bool small_drop = cost - cn <= opt.ftol * std::max(cost, 1e-300);
        const bool small_step =
            (xn - x).norm() <= opt.xtol * (x.norm() + opt.xtol);
        x = xn;
        r = rn;
        cost = cn;
        lambda = std::max(lambda * 0.25, 1e-14);
        accepted = true;
        if (small_drop || small_step) out.converged = true;
        break;
      }
      lambda *= 6.0;
      if (lambda > 1e13) break;
    }
    out.iterations = iter + 1;
    if (!accepted) {
      // Damping exhausted: either we sit at a minimum (small gradient dealt
      // with above) or the Jacobian is degenerate.
      out.note = rank_warn ? "jacobian rank-deficient" : "damping limit";
      break;
    }
    if (out.converged) break;
  }
  if (rank_warn && out.note.empty()) out.note = "jacobian rank-deficient";
  out.x = x;
  out.rms = rms_of(r);
  return out;
}

StartOutcome simplex_single(const ResidualFn& f, const Vec& lo, const Vec& hi,
                            const Vec& x0, const LsqOptions& opt) {
  const long p = x0.size();
  auto cost = [&](const Vec& x) { return half_sq(f(clamp_vec(x, lo, hi))); };
  std::vector<Vec> pts(p + 1, clamp_vec(x0, lo, hi));
  for (long i = 0; i < p; ++i) {
    const double span = 0.05 * (hi[i] - lo[i]);
    pts[i + 1][i] = pts[i + 1][i] + span <= hi[i] ? pts[i + 1][i] + span
                                                  : pts[i + 1][i] - span;
  }
  std::vector<double> fv(p + 1);
  for (long i = 0; i <= p; ++i) fv[i] = cost(pts[i]);

  StartOutcome out;
  out.x0 = x0;
  const int max_iter = 250 * static_cast<int>(p);
  for (int it = 0; it < max_iter; ++it) {
    std::vector<long> ord(p + 1);
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(),
              [&](long a, long b) { return fv[a] < fv[b]; });
    if (fv[ord[p]] - fv[ord[0]] <=
        1e-12 * std::max(1.0, std::abs(fv[ord[0]]))) {
      out.converged = true;
      out.iterations = it;
      break;
    }
    Vec centroid = Vec::Zero(p);
    for (long i = 0; i < p; ++i) centroid += pts[ord[i]];
    centroid /= static_cast<double>(p);
    const Vec& worst = pts[ord[p]];
    const Vec refl = centroid + (centroid - worst);
    const double fr = cost(refl);
    if (fr < fv[ord[0]]) {
      const Vec expd = centroid + 2.0 * (centroid - worst);
      const double fe = cost(expd);
      if (fe < fr) {
        pts[ord[p]] = expd;
        fv[ord[p]] = fe;
      } else {
        pts[ord[p]] = refl;
        fv[ord[p]] = fr;
      }
    } else if (fr < fv[ord[p - 1]]) {
      pts[ord[p]] = refl;
      fv[ord[p]] = fr;
    } else {
      const Vec contr = centroid + 0.5 * (worst - centroid);
      const double fc = cost(contr);
      if (fc < fv[ord[p]]) {
        pts[ord[p]] = contr;
        fv[ord[p]] = fc;
      } else {
        for (long i = 1; i <= p; ++i) {
          pts[ord[i]] = pts[ord[0]] + 0.5 * (pts[ord[i]] - pts[ord[0]]);
          fv[ord[i]] = cost(pts[ord[i]]);
        }
      }
    }
    out.iterations = it + 1;
  }
  long best = 0;
  for (long i = 1; i <= p; ++i)
    if (fv[i] < fv[best]) best = i;
  out.x = clamp_vec(pts[best], lo, hi);
  out.rms = rms_of(f(out.x));
  out.note = "simplex";
  return out;
}

std::vector<Vec> latin_hypercube(const Vec& lo, const Vec& hi, int n,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const long p = lo.size();
  std::vector<Vec> starts(n, Vec(p));
  for (long j = 0; j < p; ++j) {
    std::vector<int> strata(n);
    std::iota(strata.begin(), strata.end(), 0);
    std::shuffle(strata.begin(), strata.end(), rng);
    for (int i = 0; i < n; ++i) {
      const double u = (strata[i] + unif(rng)) / n;
      starts[i][j] = lo[j] + (hi[j] - lo[j]) * u;
    }
  }
  return starts;
}

Vec curvature_sigma(const ResidualFn& f, const Vec& x, const Vec& lo,
                    const Vec& hi) {
  const Vec r = f(x);
  const Mat jac = fd_jacobian(f, x, r, lo, hi);
  const long m = r.size(), p = x.size();
  Vec sigma = Vec::Constant(p, kInf);
  if (m <= p) return sigma;
  const double s2 = r.squaredNorm() / static_cast<double>(m - p);
  const Mat a = jac.transpose() * jac;
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(a);
  const Mat cov = s2 * cod.pseudoInverse();
  for (long i = 0; i < p; ++i)
    sigma[i] = cov(i, i) > 0.0 ? std::sqrt(cov(i, i)) : 0.0;
  return sigma;
}

}  // namespace

LsqResult least_squares(const ResidualFn& residuals, const Vec& lower,
                        const Vec& upper, const std::vector<Vec>& starts,
                        const LsqOptions& opt) {
  const long p = lower.size();
  check_bounds(lower, upper, p);
  std::vector<Vec> x0s = starts;
  if (x0s.empty()) {
    if (opt.n_starts < 1) throw SchemaError("need at least one start");
    x0s = latin_hypercube(lower, upper, opt.n_starts, opt.seed);
  }
  for (const Vec& s : x0s)
    if (s.size() != p) throw SchemaError("start size mismatch");

  LsqResult result;
  for (const Vec& x0 : x0s) {
    StartOutcome so = levmar_single(residuals, lower, upper, x0, opt);
    if (opt.simplex_fallback && !so.converged &&
        so.note == "jacobian rank-deficient") {
      StartOutcome alt = simplex_single(residuals, lower, upper, so.x, opt);
      if (alt.rms < so.rms) {
        alt.x0 = x0;
        so = alt;
      }
    }
    result.starts.push_back(so);
  }
  long best = -1;
  for (size_t i = 0; i < result.starts.size(); ++i) {
    if (!result.starts[i].converged) continue;
    if (best < 0 || result.starts[i].rms < result.starts[best].rms)
      best = static_cast<long>(i);
  }
  if (best < 0) {
    std::string diag = "least_squares: no start converged;";
    for (const auto& so : result.starts)
      diag += " [rms=" + format_double(so.rms) +
              (so.note.empty() ? "" : " " + so.note) + "]";
    throw NumericalError(diag);
  }
  result.x = result.starts[best].x;
  result.rms = result.starts[best].rms;
  result.converged = true;
  result.sigma = curvature_sigma(residuals, result.x, lower, upper);
  return result;
}

LsqResult simplex_minimize(const ResidualFn& residuals, const Vec& lower,
                           const Vec& upper, const Vec& start,
                           const LsqOptions& opt) {
  check_bounds(lower, upper, lower.size());
  LsqResult result;
  StartOutcome so = simplex_single(residuals, lower, upper, start, opt);
  result.converged = so.converged;
  result.x = so.x;
  result.rms = so.rms;
  result.sigma = curvature_sigma(residuals, result.x, lower, upper);
  result.starts.push_back(std::move(so));
  return result;
}

// --- spectral layer ---------------------------------------------------------

namespace {

bool is_osc_single_mode(Family f) {
  return f == Family::ExtendedGKP || f == Family::Dualmon ||
         f == Family::Fluxonium || f == Family::Cos2phiFluxonium;
}

void set_named(CircuitParams& p, const std::string& name, double v) {
  if (name == "eps_J")
    p.eps_J = v;
  else if (name == "eps_LK")
    p.eps_LK = v;
  else
    p.energies[name] = v;
}

double get_named(const CircuitParams& p, const std::string& name) {
  if (name == "eps_J") return p.eps_J;
  if (name == "eps_LK") return p.eps_LK;
  return p.energy(name);
}

CircuitParams assemble_params(const FitProblem& fp, const Vec& x) {
  CircuitParams p;
  p.family = fp.family;
  for (const auto& [name, v] : fp.fixed) set_named(p, name, v);
  for (size_t i = 0; i < fp.free_names.size(); ++i)
    set_named(p, fp.free_names[i], x[static_cast<long>(i)]);
  for (const auto& [follower, leader] : fp.ties)
    set_named(p, follower, get_named(p, leader));
  return p;
}

struct TargetIndex {
  Vec axis_values;                          // sorted unique
  std::vector<long> point_axis;             // target idx -> axis row
  std::vector<int> line_ids;                // sorted unique line ids
  std::vector<long> point_line;             // target idx -> line index
};

TargetIndex index_targets(const std::vector<SpectralTarget>& targets) {
  TargetIndex ti;
  std::vector<double> axes;
  std::vector<int> lines;
  for (const auto& t : targets) {
    axes.push_back(t.axis);
    lines.push_back(t.line);
  }
  std::sort(axes.begin(), axes.end());
  axes.erase(std::unique(axes.begin(), axes.end()), axes.end());
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  ti.axis_values = Eigen::Map<const Vec>(axes.data(), axes.size());
  ti.line_ids = lines;
  for (const auto& t : targets) {
    const long row = std::lower_bound(axes.begin(), axes.end(), t.axis) -
                     axes.begin();
    ti.point_axis.push_back(row);
    const long li = std::lower_bound(lines.begin(), lines.end(), t.line) -
                    lines.begin();
    ti.point_line.push_back(li);
  }
  return ti;
}

// line index -> model branch (1-based transition 0->j), deterministic.
std::vector<int> assign_branches(const FitProblem& fp, const TargetIndex& ti,
                                 const Mat& table) {
  const long n_lines = static_cast<long>(ti.line_ids.size());
  const int branches = static_cast<int>(table.cols());
  std::vector<int> asg(n_lines, -1);
  if (fp.assign == AssignMode::ByLineId) {
    for (long l = 0; l < n_lines; ++l) {
      const int id = ti.line_ids[l];
      if (id < 1 || id > branches)
        throw SchemaError("line id " + std::to_string(id) +
                          " is not a model branch in 1.." +
                          std::to_string(branches));
      asg[l] = id;
    }
    return asg;
  }

  // Weighted per-line cost against every model branch.
  Mat cost = Mat::Zero(n_lines, branches);
  Vec wsum = Vec::Zero(n_lines);
  Vec fmean = Vec::Zero(n_lines);
  for (size_t i = 0; i < fp.targets.size(); ++i) {
    const auto& t = fp.targets[i];
    const long l = ti.point_line[i];
    const long a = ti.point_axis[i];
    wsum[l] += t.weight;
    fmean[l] += t.weight * t.freq_ghz;
    for (int j = 0; j < branches; ++j) {
      const double d = t.freq_ghz - table(a, j);
      cost(l, j) += t.weight * d * d;
    }
  }

  if (fp.assign == AssignMode::Ranked) {
    std::vector<long> order(n_lines);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](long a, long b) {
      return fmean[a] / std::max(wsum[a], 1e-300) <
             fmean[b] / std::max(wsum[b], 1e-300);
    });
    for (long r = 0; r < n_lines; ++r) asg[order[r]] = static_cast<int>(r) + 1;
    return asg;
  }

  // NearestPersistent: greedy unique matching by ascending cost.
  std::vector<std::tuple<double, long, int>> pairs;
  for (long l = 0; l < n_lines; ++l)
    for (int j = 0; j < branches; ++j)
      pairs.emplace_back(cost(l, j), l, j + 1);
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> line_done(n_lines, false), branch_done(branches + 1, false);
  long assigned = 0;
  for (const auto& pr : pairs) {
    const long l = std::get<1>(pr);
    const int j = std::get<2>(pr);
    if (line_done[l] || branch_done[j]) continue;
    asg[l] = j;
    line_done[l] = true;
    branch_done[j] = true;
    if (++assigned == n_lines) break;
  }
  return asg;
}

}  // namespace

Mat model_transition_table(const CircuitParams& p, const Controls& base,
                           SweepAxis axis, const Vec& axis_values,
                           int branches, const BasisSpec& basis,
                           double beta) {
  if (branches < 1) throw SchemaError("need at least one model branch");
  const int k = branches + 1;
  const long n = axis_values.size();
  Mat table(n, branches);

  const bool multimode = family_is_multimode(p.family);
  if (beta != 0.0 && (!multimode || axis != SweepAxis::PhiExt))
    throw SchemaError(
        "flux-miscalibration beta applies to multimode phi_ext sweeps only");

  if (!multimode && is_osc_single_mode(p.family) &&
      (axis == SweepAxis::PhiExt || axis == SweepAxis::OffsetCharge)) {
    // The sweep axis enters the Hamiltonian through one shifted quadratic
    // term; build the rest once and add the linear + scalar pieces per point.
    if (axis == SweepAxis::OffsetCharge && !supports_offset_charge(p.family))
      throw SchemaError("family " + family_name(p.family) +
                        " has no offset-charge axis");
    Controls c0 = base;
    if (axis == SweepAxis::PhiExt)
      c0.phi_ext = 0.0;
    else
      c0.ng = 0.0;
    const CMat h0 = build_single_mode(p, c0, basis.dim);
    const double coeff = axis == SweepAxis::PhiExt
                             ? (p.family == Family::Cos2phiFluxonium
                                    ? p.energy("E_Lprime")
                                    : p.energy("E_L"))
                             : p.energy("E_C");
    const CMat lin = single_mode_operator(
        p, axis == SweepAxis::PhiExt ? ElementOp::Phase : ElementOp::Charge,
        basis.dim);

    auto solve_row = [&](long i) {
      const double a = axis_values[i];
      // (x + a)^2 = x^2 + 2 a x + a^2, quadratic prefactor already in h0.
      const double lin_coeff =
          axis == SweepAxis::PhiExt ? coeff * a : 2.0 * coeff * a;
      CMat h = h0 + lin_coeff * lin;
      h.diagonal().array() +=
          (axis == SweepAxis::PhiExt ? 0.5 : 1.0) * coeff * a * a;
      const Vec ev = eigvalsh_lowest(h, k);
      for (int j = 1; j <= branches; ++j) table(i, j - 1) = ev[j] - ev[0];
    };
    if (k > basis.dim)
      throw SchemaError("model_transition_table: branches exceed basis dim");
    for (long i = 0; i < n; ++i) solve_row(i);
    return table;
  }

  for (long i = 0; i < n; ++i) {
    Controls c = base;
    const double a = axis_values[i];
    switch (axis) {
      case SweepAxis::PhiExt: c.phi_ext = a; break;
      case SweepAxis::ThetaExt: c.theta_ext = a; break;
      case SweepAxis::OffsetCharge: c.ng = a; break;
    }
    if (beta != 0.0) c.theta_ext = base.theta_ext + beta * a;
    const Spectrum sp = levels(p, c, k, basis);
    for (int j = 1; j <= branches; ++j)
      table(i, j - 1) = sp.energies[j] - sp.energies[0];
  }
  return table;
}

FitResult least_squares_fit(const FitProblem& fp) {
  const long n_free = static_cast<long>(fp.free_names.size());
  if (n_free == 0) throw SchemaError("no free parameters");
  check_bounds(fp.lower, fp.upper, n_free);
  if (fp.targets.empty()) throw SchemaError("no fit targets");
  for (const auto& t : fp.targets) {
    if (!(t.weight >= 0.0) || !std::isfinite(t.freq_ghz) ||
        !std::isfinite(t.axis))
      throw SchemaError("fit targets must be finite with weight >= 0");
  }
  const long n_params = n_free + (fp.fit_beta ? 1 : 0);
  if (static_cast<long>(fp.targets.size()) < n_params)
    throw SchemaError("under-determined fit: fewer targets than parameters");
  if (fp.fit_beta &&
      (!family_is_multimode(fp.family) || fp.axis != SweepAxis::PhiExt))
    throw SchemaError("beta term applies to multimode phi_ext sweeps only");

  const TargetIndex ti = index_targets(fp.targets);
  const int branches = fp.model_branches > 0
                           ? fp.model_branches
                           : static_cast<int>(ti.line_ids.size());
  if (branches < static_cast<int>(ti.line_ids.size()))
    throw SchemaError("fewer model branches than data lines");

  Vec lo(n_params), hi(n_params);
  lo.head(n_free) = fp.lower;
  hi.head(n_free) = fp.upper;
  if (fp.fit_beta) {
    lo[n_free] = fp.beta_lower;
    hi[n_free] = fp.beta_upper;
    if (!(fp.beta_lower < fp.beta_upper))
      throw SchemaError("beta bounds must satisfy lower < upper");
  }
  std::vector<Vec> starts;
  for (const Vec& s : fp.starts) {
    if (s.size() == n_free && fp.fit_beta) {
      Vec padded(n_params);
      padded.head(n_free) = s;
      padded[n_free] = 0.0;
      starts.push_back(padded);
    } else {
      starts.push_back(s);
    }
  }

  const long m = static_cast<long>(fp.targets.size());
  auto residuals = [&](const Vec& x) -> Vec {
    try {
      const CircuitParams p = assemble_params(fp, x.head(n_free));
      const double beta = fp.fit_beta ? x[n_free] : 0.0;
      const Mat table = model_transition_table(
          p, fp.controls, fp.axis, ti.axis_values, branches, fp.basis, beta);
      const std::vector<int> asg = assign_branches(fp, ti, table);
      Vec r(m);
      for (long i = 0; i < m; ++i) {
        const auto& t = fp.targets[static_cast<size_t>(i)];
        const double f =
            table(ti.point_axis[static_cast<size_t>(i)],
                  asg[ti.point_line[static_cast<size_t>(i)]] - 1);
        r[i] = std::sqrt(t.weight) * (f - t.freq_ghz);
      }
      return r;
    } catch (const NumericalError&) {
      return Vec::Constant(m, kFailResidual);
    }
  };

  const LsqResult ls = least_squares(residuals, lo, hi, starts, fp.opts);

  FitResult out;
  out.converged = ls.converged;
  out.residual_rms = ls.rms;
  out.starts = ls.starts;
  for (long i = 0; i < n_free; ++i) {
    out.params[fp.free_names[static_cast<size_t>(i)]] = ls.x[i];
    out.sigma[fp.free_names[static_cast<size_t>(i)]] = ls.sigma[i];
  }
  if (fp.fit_beta) {
    out.beta = ls.x[n_free];
    out.sigma["beta"] = ls.sigma[n_free];
  }
  // Recover the winning assignment at the solution.
  const CircuitParams p = assemble_params(fp, ls.x.head(n_free));
  const Mat table =
      model_transition_table(p, fp.controls, fp.axis, ti.axis_values, branches,
                             fp.basis, fp.fit_beta ? ls.x[n_free] : 0.0);
  out.assignment = assign_branches(fp, ti, table);
  return out;
}

// --- serialization ----------------------------------------------------------

std::vector<SpectralTarget> targets_from_csv(const CsvTable& t) {
  const std::vector<std::string> expect = {"axis", "branch", "frequency_GHz",
                                           "weight"};
  if (t.header != expect)
    throw SchemaError(
        "target CSV header must be: axis,branch,frequency_GHz,weight");
  std::vector<SpectralTarget> out;
  for (const auto& row : t.rows) {
    SpectralTarget s;
    s.axis = row[0];
    s.line = static_cast<int>(row[1]);
    if (row[1] != s.line) throw SchemaError("branch id must be an integer");
    s.freq_ghz = row[2];
    s.weight = row[3];
    out.push_back(s);
  }
  return out;
}

CsvTable targets_to_csv(const std::vector<SpectralTarget>& targets) {
  CsvTable t;
  t.header = {"axis", "branch", "frequency_GHz", "weight"};
  for (const auto& s : targets)
    t.rows.push_back({s.axis, static_cast<double>(s.line), s.freq_ghz,
                      s.weight});
  return t;
}

FitProblem fit_problem_from_json(const json& j) {
  require_keys(j, {"family", "free"},
               {"fixed", "ties", "targets", "controls", "axis", "basis",
                "model_branches", "assign", "fit_beta", "beta_bounds",
                "options"},
               "fit problem");
  FitProblem fp;
  fp.family = family_from_string(j.at("family").get<std::string>());
  const json& free = j.at("free");
  if (!free.is_object() || free.empty())
    throw SchemaError("fit problem: 'free' must be a nonempty object");
  std::vector<double> lo, hi;
  std::vector<std::vector<double>> start_cols;
  for (auto it = free.begin(); it != free.end(); ++it) {
    const json& spec = it.value();
    require_keys(spec, {"lower", "upper"}, {"start"},
                 "free parameter " + it.key());
    fp.free_names.push_back(it.key());
    lo.push_back(spec.at("lower").get<double>());
    hi.push_back(spec.at("upper").get<double>());
    start_cols.push_back(
        spec.contains("start")
            ? spec.at("start").get<std::vector<double>>()
            : std::vector<double>{});
  }
  fp.lower = Eigen::Map<const Vec>(lo.data(), lo.size());
  fp.upper = Eigen::Map<const Vec>(hi.data(), hi.size());
  size_t n_starts = 0;
  for (const auto& c : start_cols) n_starts = std::max(n_starts, c.size());
  for (const auto& c : start_cols)
    if (!c.empty() && c.size() != n_starts)
      throw SchemaError("fit problem: per-parameter start lists must agree");
  for (size_t s = 0; s < n_starts; ++s) {
    Vec x(static_cast<long>(start_cols.size()));
    for (size_t i = 0; i < start_cols.size(); ++i)
      x[static_cast<long>(i)] = start_cols[i].empty()
                                    ? 0.5 * (lo[i] + hi[i])
                                    : start_cols[i][s];
    fp.starts.push_back(x);
  }
  if (j.contains("fixed"))
    for (auto it = j.at("fixed").begin(); it != j.at("fixed").end(); ++it)
      fp.fixed[it.key()] = it.value().get<double>();
  if (j.contains("ties"))
    for (const auto& t : j.at("ties"))
      fp.ties.emplace_back(t.at(0).get<std::string>(),
                           t.at(1).get<std::string>());
  if (j.contains("targets")) {
    for (const auto& t : j.at("targets")) {
      require_keys(t, {"axis", "branch", "frequency_GHz"}, {"weight"},
                   "fit target");
      SpectralTarget s;
      s.axis = t.at("axis").get<double>();
      s.line = t.at("branch").get<int>();
      s.freq_ghz = t.at("frequency_GHz").get<double>();
      s.weight = t.contains("weight") ? t.at("weight").get<double>() : 1.0;
      fp.targets.push_back(s);
    }
  }
  if (j.contains("controls")) fp.controls = controls_from_json(j.at("controls"));
  if (j.contains("axis"))
    fp.axis = axis_from_string(j.at("axis").get<std::string>());
  if (j.contains("basis")) fp.basis = basis_from_json(j.at("basis"));
  if (j.contains("model_branches"))
    fp.model_branches = j.at("model_branches").get<int>();
  if (j.contains("assign")) {
    const std::string a = j.at("assign").get<std::string>();
    if (a == "by_line_id")
      fp.assign = AssignMode::ByLineId;
    else if (a == "ranked")
      fp.assign = AssignMode::Ranked;
    else if (a == "nearest")
      fp.assign = AssignMode::NearestPersistent;
    else
      throw SchemaError("unknown assignment mode '" + a + "'");
  }
  if (j.contains("fit_beta")) fp.fit_beta = j.at("fit_beta").get<bool>();
  if (j.contains("beta_bounds")) {
    fp.beta_lower = j.at("beta_bounds").at(0).get<double>();
    fp.beta_upper = j.at("beta_bounds").at(1).get<double>();
  }
  if (j.contains("options")) {
    const json& o = j.at("options");
    require_keys(o, {}, {"max_iter", "n_starts", "seed", "workers"},
                 "fit options");
    if (o.contains("max_iter")) fp.opts.max_iter = o.at("max_iter").get<int>();
    if (o.contains("n_starts")) fp.opts.n_starts = o.at("n_starts").get<int>();
    if (o.contains("seed"))
      fp.opts.seed = o.at("seed").get<std::uint64_t>();
    if (o.contains("workers")) fp.opts.workers = o.at("workers").get<int>();
  }
  return fp;
}

json fit_problem_to_json(const FitProblem& fp) {
  json free = json::object();
  for (size_t i = 0; i < fp.free_names.size(); ++i) {
    json spec = {{"lower", fp.lower[static_cast<long>(i)]},
                 {"upper", fp.upper[static_cast<long>(i)]}};
    if (!fp.starts.empty()) {
      std::vector<double> col;
      for (const Vec& s : fp.starts) col.push_back(s[static_cast<long>(i)]);
      spec["start"] = col;
    }
    free[fp.free_names[i]] = spec;
  }
  json targets = json::array();
  for (const auto& t : fp.targets)
    targets.push_back({{"axis", t.axis},
                       {"branch", t.line},
                       {"frequency_GHz", t.freq_ghz},
                       {"weight", t.weight}});
  json j = {{"family", family_name(fp.family)},
            {"free", free},
            {"targets", targets},
            {"controls", controls_to_json(fp.controls)},
            {"axis", axis_name(fp.axis)},
            {"model_branches", fp.model_branches},
            {"fit_beta", fp.fit_beta}};
  if (!fp.fixed.empty()) j["fixed"] = fp.fixed;
  if (!fp.ties.empty()) {
    json ties = json::array();
    for (const auto& [a, b] : fp.ties) ties.push_back({a, b});
    j["ties"] = ties;
  }
  j["assign"] = fp.assign == AssignMode::ByLineId    ? "by_line_id"
                : fp.assign == AssignMode::Ranked    ? "ranked"
                                                     : "nearest";
  return j;
}

json fit_result_to_json(const FitResult& r) {
  json starts = json::array();
  for (const auto& s : r.starts)
    starts.push_back({{"rms", s.rms},
                      {"iterations", s.iterations},
                      {"converged", s.converged},
                      {"note", s.note}});
  return json{{"params", r.params},
              {"sigma", r.sigma},
              {"beta", r.beta},
              {"residual_rms", r.residual_rms},
              {"converged", r.converged},
              {"assignment", r.assignment},
              {"starts", starts}};
}

}  // namespace gridlab
