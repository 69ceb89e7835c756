#include <benchmark/benchmark.h>

#include "qds/conn.hpp"
#include "qds/forms.hpp"

using namespace qds;

static void BM_EchelonRandom(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Echelon e(n);
    for (int r = 0; r < n; ++r) {
      SparseVec v;
      for (int c = 0; c < n; ++c)
        if ((r * 7 + c * 3) % 5 < 2) v.push(c, Scalar::frac((r + 1) * (c + 2) % 11 - 5, 1 + (r + c) % 3));
      e.insert(v);
    }
    benchmark::DoNotOptimize(e.rows().size());
  }
}
BENCHMARK(BM_EchelonRandom)->Arg(16)->Arg(32)->Arg(64);

static void BM_OmegaQdsPoint(benchmark::State& state) {
  bool parallel = state.range(1) != 0;
  int cutoff = static_cast<int>(state.range(0));
  for (auto _ : state) {
    FormContext c(make_qds(make_point(), cutoff), 1, Mode::Bounded, Family::All, parallel);
    benchmark::DoNotOptimize(omega_d(c, 2).quotient_dim);
  }
}
BENCHMARK(BM_OmegaQdsPoint)->Args({4, 0})->Args({4, 1})->Args({6, 0})->Args({6, 1})->Unit(benchmark::kMillisecond);

static void BM_OmegaCircle(benchmark::State& state) {
  bool parallel = state.range(0) != 0;
  for (auto _ : state) {
    FormContext c(make_circle(8, 1), 3, Mode::Calkin, Family::All, parallel);
    benchmark::DoNotOptimize(omega_d(c, 1).quotient_dim);
  }
}
BENCHMARK(BM_OmegaCircle)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_QdsProduct(benchmark::State& state) {
  auto t = make_qds(make_circle(8, 1), static_cast<int>(state.range(0)));
  FormContext c(t, 2, Mode::Bounded);
  const auto& e = c.spanning().elems;
  for (auto _ : state) {
    Op acc = identity(c.layer());
    for (std::size_t i = 1; i < e.size(); i += 3) acc = add(c.layer(), acc, op_mul(c.layer(), e[i], e[e.size() - i]));
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_QdsProduct)->Arg(3)->Arg(6);

BENCHMARK_MAIN();
