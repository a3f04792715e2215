// SPDX-License-Identifier: MIT
#include <benchmark/benchmark.h>

#include <gridlab/models.hpp>

namespace {

gridlab::CircuitParams gkp_params() {
  return {gridlab::Family::ExtendedGKP,
          {{"E_C", 12.0}, {"E_L", 4.0}, {"E_S", 0.5}, {"E_2J", 0.5}},
          0.0,
          0.0};
}

void BM_BuildExtendedGKP(benchmark::State& state) {
  const auto p = gkp_params();
  const int dim = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto h = gridlab::build_extended_gkp(p, {}, dim);
    benchmark::DoNotOptimize(h.data());
  }
}
BENCHMARK(BM_BuildExtendedGKP)->Arg(200)->Arg(400);

void BM_DiagonalizeExtendedGKP(benchmark::State& state) {
  const auto p = gkp_params();
  const int dim = static_cast<int>(state.range(0));
  const auto h = gridlab::build_extended_gkp(p, {}, dim);
  for (auto _ : state) {
    auto sp = gridlab::diagonalize(h, 8);
    benchmark::DoNotOptimize(sp.energies.data());
  }
}
BENCHMARK(BM_DiagonalizeExtendedGKP)->Arg(200)->Arg(400);

void BM_Gridium3Matvec(benchmark::State& state) {
  gridlab::CircuitParams p{gridlab::Family::Gridium3,
                           {{"E_J", 5.0},
                            {"E_C", 1.0},
                            {"E_L", 1.0},
                            {"E_LK", 4.0},
                            {"E_JS", 10.0},
                            {"E_CS", 10.0}},
                           0.0,
                           0.0};
  gridlab::BasisSpec basis;
  basis.dims = {17, 40, 22};
  auto op = gridlab::build_gridium3(p, {}, basis);
  gridlab::CVec x = gridlab::CVec::Ones(op.size());
  for (auto _ : state) {
    gridlab::CVec y = op.apply(x);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_Gridium3Matvec);

}  // namespace

BENCHMARK_MAIN();
