// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include <gridlab/analysis.hpp>
#include <gridlab/fitkit.hpp>
#include <gridlab/models.hpp>

#include <cmath>
#include <limits>
#include <vector>

using namespace gridlab;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<long>(v.size()));
  long i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

CircuitParams grid_device() {
  CircuitParams p;
  p.family = Family::ExtendedGKP;
  p.energies = {{"E_2J", 3.97}, {"E_S", 2.95}, {"E_C", 0.42}, {"E_L", 0.41}};
  return p;
}

std::vector<SpectralTarget> table_targets(const Mat& tab, const Vec& axis,
                                          double noise_amp = 0.0) {
  std::vector<SpectralTarget> ts;
  int q = 0;
  for (long i = 0; i < tab.rows(); ++i)
    for (long j = 0; j < tab.cols(); ++j) {
      SpectralTarget t;
      t.axis = axis[i];
      t.line = static_cast<int>(j) + 1;
      t.freq_ghz = tab(i, j) + noise_amp * std::sin(7.0 * ++q + 1.0);
      ts.push_back(t);
    }
  return ts;
}

}  // namespace

TEST_CASE("bounded least squares solves a consistent linear system") {
  // rows (2x0-2, 3x1-3, x0+x1-2) vanish only at (1, 1)
  auto f = [](const Vec& x) {
    return vec({2.0 * x[0] - 2.0, 3.0 * x[1] - 3.0, x[0] + x[1] - 2.0});
  };
  auto res = least_squares(f, vec({0.0, 0.0}), vec({5.0, 5.0}),
                           {vec({4.0, 4.0})});
  REQUIRE(res.converged);
  CHECK(res.x[0] == Approx(1.0).margin(1e-8));
  CHECK(res.x[1] == Approx(1.0).margin(1e-8));
  CHECK(res.rms < 1e-8);
  REQUIRE(res.sigma.size() == 2);
  CHECK(res.sigma[0] < 1e-6);
  CHECK(res.sigma[1] < 1e-6);
  CHECK(res.starts.size() == 1);
}

TEST_CASE("multistart escapes a local basin") {
  // zeros of the first row at +-2; the second row singles out -2
  auto f = [](const Vec& x) {
    return vec({x[0] * x[0] - 4.0, 0.3 * (x[0] + 2.0)});
  };
  LsqOptions opt;
  opt.n_starts = 8;
  opt.seed = 5;

  SECTION("a single bad start stays local") {
    auto res = least_squares(f, vec({-4.0}), vec({4.0}), {vec({3.0})}, opt);
    REQUIRE(res.converged);
    CHECK(res.x[0] > 1.5);
    CHECK(res.rms > 0.1);
  }
  SECTION("stratified starts find the global zero") {
    auto res = least_squares(f, vec({-4.0}), vec({4.0}), {}, opt);
    REQUIRE(res.converged);
    CHECK(res.starts.size() == 8);
    CHECK(res.x[0] == Approx(-2.0).margin(1e-6));
    CHECK(res.rms < 1e-7);
  }
}

TEST_CASE("seeded starts are reproducible") {
  auto f = [](const Vec& x) {
    return vec({10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]});
  };
  const Vec lo = vec({-4.0, -4.0}), hi = vec({4.0, 4.0});
  LsqOptions opt;
  opt.n_starts = 6;
  opt.seed = 11;
  opt.max_iter = 200;
  auto a = least_squares(f, lo, hi, {}, opt);
  auto b = least_squares(f, lo, hi, {}, opt);
  REQUIRE(a.starts.size() == b.starts.size());
  for (std::size_t i = 0; i < a.starts.size(); ++i)
    CHECK(a.starts[i].x0 == b.starts[i].x0);
  CHECK(a.x == b.x);
  CHECK(a.x[0] == Approx(1.0).margin(1e-6));
  CHECK(a.x[1] == Approx(1.0).margin(1e-6));

  opt.seed = 12;
  auto c = least_squares(f, lo, hi, {}, opt);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.starts.size(); ++i)
    if (a.starts[i].x0 != c.starts[i].x0) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("a minimum on the box boundary is accepted") {
  auto f = [](const Vec& x) { return vec({x[0] - 5.0}); };
  auto res = least_squares(f, vec({0.0}), vec({2.0}), {vec({1.0})});
  REQUIRE(res.converged);
  CHECK(res.x[0] == Approx(2.0).margin(1e-12));
  CHECK(res.rms == Approx(3.0).margin(1e-12));
}

TEST_CASE("all-invalid residuals raise a numerical error") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto f = [nan](const Vec&) { return vec({nan}); };
  LsqOptions opt;
  opt.n_starts = 3;
  CHECK_THROWS_AS(least_squares(f, vec({0.0}), vec({1.0}), {}, opt),
                  NumericalError);
  CHECK_THROWS_WITH(least_squares(f, vec({0.0}), vec({1.0}), {}, opt),
                    ContainsSubstring("no start converged"));
}

TEST_CASE("simplex minimizer hones a smooth bowl") {
  auto f = [](const Vec& x) {
    return vec({x[0] * x[0] - 2.0, x[1] + 1.0});
  };
  auto res = simplex_minimize(f, vec({0.0, -4.0}), vec({4.0, 4.0}),
                              vec({3.0, 0.5}));
  REQUIRE(res.converged);
  CHECK(res.x[0] == Approx(std::sqrt(2.0)).margin(1e-4));
  CHECK(res.x[1] == Approx(-1.0).margin(1e-4));
  CHECK(res.rms < 1e-4);
}

TEST_CASE("rank-deficient directions do not stop the informative ones") {
  // second residual ignores x1 entirely
  auto f = [](const Vec& x) { return vec({x[0] - 1.0, 0.0 * x[1]}); };
  auto res = least_squares(f, vec({-4.0, -4.0}), vec({4.0, 4.0}),
                           {vec({2.5, 0.3})});
  REQUIRE(res.converged);
  CHECK(res.x[0] == Approx(1.0).margin(1e-5));
  CHECK(res.rms < 1e-5);
}

TEST_CASE("transition tables match the generic sweep") {
  BasisSpec basis;
  basis.dim = 100;
  Controls base;

  SECTION("flux axis of the grid-state device") {
    const CircuitParams p = grid_device();
    const Vec grid = vec({0.0, 0.7, 1.4});
    const Mat tab = model_transition_table(p, base, SweepAxis::PhiExt, grid, 2,
                                           basis);
    SweepRequest req;
    req.axis = SweepAxis::PhiExt;
    req.grid = grid;
    req.k = 3;
    req.transitions = {{0, 1}, {0, 2}};
    const TransitionSet s = sweep_transitions(p, base, req, basis);
    for (long i = 0; i < grid.size(); ++i) {
      CHECK(tab(i, 0) == Approx(s.branches[0].freq_ghz[i]).margin(1e-9));
      CHECK(tab(i, 1) == Approx(s.branches[1].freq_ghz[i]).margin(1e-9));
    }
  }
  SECTION("offset-charge axis reuses the same blocks") {
    const CircuitParams p = grid_device();
    const Vec grid = vec({0.0, 0.2, 0.4});
    const Mat tab = model_transition_table(p, base, SweepAxis::OffsetCharge,
                                           grid, 2, basis);
    SweepRequest req;
    req.axis = SweepAxis::OffsetCharge;
    req.grid = grid;
    req.k = 3;
    req.transitions = {{0, 1}, {0, 2}};
    const TransitionSet s = sweep_transitions(p, base, req, basis);
    for (long i = 0; i < grid.size(); ++i) {
      CHECK(tab(i, 0) == Approx(s.branches[0].freq_ghz[i]).margin(1e-9));
      CHECK(tab(i, 1) == Approx(s.branches[1].freq_ghz[i]).margin(1e-9));
    }
  }
  SECTION("primed energies drive the quartet fluxonium sweep") {
    CircuitParams p;
    p.family = Family::Cos2phiFluxonium;
    p.energies = {{"E_2J", 10.0}, {"E_Cprime", 0.125}, {"E_Lprime", 0.33}};
    const Vec grid = vec({0.0, 0.8, 1.6});
    const Mat tab = model_transition_table(p, base, SweepAxis::PhiExt, grid, 2,
                                           basis);
    SweepRequest req;
    req.axis = SweepAxis::PhiExt;
    req.grid = grid;
    req.k = 3;
    req.transitions = {{0, 1}, {0, 2}};
    const TransitionSet s = sweep_transitions(p, base, req, basis);
    for (long i = 0; i < grid.size(); ++i) {
      CHECK(tab(i, 0) == Approx(s.branches[0].freq_ghz[i]).margin(1e-9));
      CHECK(tab(i, 1) == Approx(s.branches[1].freq_ghz[i]).margin(1e-9));
    }
  }
  SECTION("misuse is rejected") {
    const CircuitParams p = grid_device();
    const Vec grid = vec({0.0, 0.5});
    CHECK_THROWS_AS(model_transition_table(p, base, SweepAxis::PhiExt, grid, 2,
                                           basis, 0.01),
                    SchemaError);
    CHECK_THROWS_AS(model_transition_table(p, base, SweepAxis::ThetaExt, grid,
                                           2, basis),
                    SchemaError);
  }
}

TEST_CASE("parameter recovery from a transition table") {
  const CircuitParams truth = grid_device();
  Controls base;
  BasisSpec basis;
  basis.dim = 120;
  const Vec axis = vec({0.35, 0.9, 1.45, 2.0, 2.55});
  const Mat tab =
      model_transition_table(truth, base, SweepAxis::PhiExt, axis, 2, basis);

  FitProblem fp;
  fp.family = Family::ExtendedGKP;
  fp.free_names = {"E_2J", "E_S", "E_C", "E_L"};
  fp.lower = vec({2.0, 1.5, 0.2, 0.2});
  fp.upper = vec({8.0, 6.0, 0.9, 0.9});
  fp.starts = {vec({5.2, 3.8, 0.55, 0.53}), vec({3.2, 2.4, 0.33, 0.33})};
  fp.controls = base;
  fp.axis = SweepAxis::PhiExt;
  fp.basis = basis;
  fp.model_branches = 2;
  fp.assign = AssignMode::ByLineId;
  fp.opts.max_iter = 120;

  SECTION("clean tables round-trip within one percent") {
    fp.targets = table_targets(tab, axis);
    const FitResult res = least_squares_fit(fp);
    REQUIRE(res.converged);
    CHECK(res.residual_rms < 1e-6);
    CHECK(res.params.at("E_2J") == Approx(3.97).epsilon(0.01));
    CHECK(res.params.at("E_S") == Approx(2.95).epsilon(0.01));
    CHECK(res.params.at("E_C") == Approx(0.42).epsilon(0.01));
    CHECK(res.params.at("E_L") == Approx(0.41).epsilon(0.01));
    CHECK(res.sigma.at("E_2J") < 1e-3);
  }
  SECTION("five-megahertz noise keeps parameters within five percent") {
    fp.targets = table_targets(tab, axis, 0.005);
    const FitResult res = least_squares_fit(fp);
    REQUIRE(res.converged);
    CHECK(res.residual_rms < 0.02);
    CHECK(res.params.at("E_2J") == Approx(3.97).epsilon(0.05));
    CHECK(res.params.at("E_S") == Approx(2.95).epsilon(0.05));
    CHECK(res.params.at("E_C") == Approx(0.42).epsilon(0.05));
    CHECK(res.params.at("E_L") == Approx(0.41).epsilon(0.05));
  }
}

TEST_CASE("line assignment modes") {
  CircuitParams p;
  p.family = Family::Fluxonium;
  p.energies = {{"E_J", 8.0}, {"E_C", 1.0}, {"E_L", 0.5}};
  Controls base;
  BasisSpec basis;
  basis.dim = 80;
  const Vec axis = vec({0.5, 1.0});
  const Mat tab =
      model_transition_table(p, base, SweepAxis::PhiExt, axis, 2, basis);

  FitProblem fp;
  fp.family = Family::Fluxonium;
  fp.free_names = {"E_J"};
  fp.lower = vec({5.0});
  fp.upper = vec({12.0});
  fp.starts = {vec({6.5})};
  fp.fixed = {{"E_C", 1.0}, {"E_L", 0.5}};
  fp.controls = base;
  fp.basis = basis;

  // arbitrary non-contiguous line ids: 3 carries f01, 7 carries f02
  std::vector<SpectralTarget> ts;
  for (long i = 0; i < axis.size(); ++i) {
    ts.push_back({axis[i], 3, tab(i, 0), 1.0});
    ts.push_back({axis[i], 7, tab(i, 1), 1.0});
  }
  fp.targets = ts;

  SECTION("ranked ids map onto branches in frequency order") {
    fp.assign = AssignMode::Ranked;
    const FitResult res = least_squares_fit(fp);
    REQUIRE(res.converged);
    CHECK(res.params.at("E_J") == Approx(8.0).margin(1e-5));
    REQUIRE(res.assignment.size() == 2);
    CHECK(res.assignment[0] == 1);
    CHECK(res.assignment[1] == 2);
  }
  SECTION("nearest-persistent matching finds the same pairing") {
    fp.assign = AssignMode::NearestPersistent;
    const FitResult a = least_squares_fit(fp);
    const FitResult b = least_squares_fit(fp);
    REQUIRE(a.converged);
    CHECK(a.params.at("E_J") == Approx(8.0).margin(1e-5));
    CHECK(a.assignment == std::vector<int>{1, 2});
    CHECK(a.params.at("E_J") == b.params.at("E_J"));
  }
  SECTION("line-id mode validates its ids") {
    fp.assign = AssignMode::ByLineId;
    CHECK_THROWS_AS(least_squares_fit(fp), SchemaError);
  }
}

TEST_CASE("tied parameters follow their leader") {
  CircuitParams truth;
  truth.family = Family::Fluxonium;
  truth.energies = {{"E_J", 5.0}, {"E_C", 1.0}, {"E_L", 1.0}};
  Controls base;
  BasisSpec basis;
  basis.dim = 80;
  const Vec axis = vec({0.4, 1.1, 1.9});
  const Mat tab =
      model_transition_table(truth, base, SweepAxis::PhiExt, axis, 1, basis);

  FitProblem fp;
  fp.family = Family::Fluxonium;
  fp.free_names = {"E_J"};
  fp.lower = vec({2.0});
  fp.upper = vec({9.0});
  fp.starts = {vec({3.0})};
  fp.fixed = {{"E_C", 1.0}};
  fp.ties = {{"E_L", "E_C"}};
  fp.targets = table_targets(tab, axis);
  fp.controls = base;
  fp.basis = basis;
  fp.assign = AssignMode::ByLineId;

  const FitResult res = least_squares_fit(fp);
  REQUIRE(res.converged);
  CHECK(res.params.at("E_J") == Approx(5.0).margin(1e-5));
  CHECK(res.params.at("E_L") == 1.0);
  CHECK(res.residual_rms < 1e-7);
}

TEST_CASE("under-determined problems are rejected") {
  FitProblem fp;
  fp.family = Family::ExtendedGKP;
  fp.free_names = {"E_2J", "E_S", "E_C", "E_L"};
  fp.lower = vec({2.0, 1.5, 0.2, 0.2});
  fp.upper = vec({8.0, 6.0, 0.9, 0.9});
  fp.targets = {{0.5, 1, 1.0, 1.0}, {1.0, 1, 1.1, 1.0}};
  CHECK_THROWS_WITH(least_squares_fit(fp),
                    ContainsSubstring("under-determined"));
}

TEST_CASE("fit problems and targets serialize round-trip") {
  FitProblem fp;
  fp.family = Family::ExtendedGKP;
  fp.free_names = {"E_2J", "E_S", "E_C", "E_L"};
  fp.lower = vec({2.0, 1.5, 0.2, 0.2});
  fp.upper = vec({8.0, 6.0, 0.9, 0.9});
  fp.starts = {vec({5.2, 3.8, 0.55, 0.53})};
  fp.fixed = {{"eps_J", 0.01}};
  fp.ties = {{"E_Lprime", "E_L"}};
  fp.targets = {{0.5, 1, 1.25, 1.0}, {1.0, 2, 3.5, 0.5}};
  fp.controls.phi_ext = 0.25;
  fp.controls.ng = 0.1;
  fp.axis = SweepAxis::PhiExt;
  fp.basis.dim = 150;
  fp.model_branches = 2;
  fp.assign = AssignMode::Ranked;
  fp.opts.n_starts = 4;
  fp.opts.seed = 9;

  SECTION("json is stable across a decode-encode cycle") {
    const json j1 = fit_problem_to_json(fp);
    const FitProblem back = fit_problem_from_json(j1);
    const json j2 = fit_problem_to_json(back);
    CHECK(j1 == j2);
    CHECK(back.targets.size() == fp.targets.size());
    CHECK(back.assign == AssignMode::Ranked);
    CHECK(back.basis.dim == 150);
    CHECK(back.fixed.at("eps_J") == 0.01);
  }
  SECTION("unknown keys and missing fields are schema errors") {
    json j = fit_problem_to_json(fp);
    j["bogus"] = 1;
    CHECK_THROWS_AS(fit_problem_from_json(j), SchemaError);
    json k = fit_problem_to_json(fp);
    k.erase("family");
    CHECK_THROWS_AS(fit_problem_from_json(k), SchemaError);
  }
  SECTION("csv targets preserve every field") {
    const CsvTable t = targets_to_csv(fp.targets);
    REQUIRE(t.header ==
            std::vector<std::string>{"axis", "branch", "frequency_GHz",
                                     "weight"});
    const auto back = targets_from_csv(t);
    REQUIRE(back.size() == fp.targets.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      CHECK(back[i].axis == fp.targets[i].axis);
      CHECK(back[i].line == fp.targets[i].line);
      CHECK(back[i].freq_ghz == fp.targets[i].freq_ghz);
      CHECK(back[i].weight == fp.targets[i].weight);
    }
  }
}
