#include "krf/cohomology.hpp"
#include "krf/flow.hpp"
#include "krf/geometry.hpp"
#include "krf/kernels.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

using namespace krf;

namespace {

kernels::Exec exec_of(const benchmark::State& st) {
  return st.range(1) ? kernels::Exec::Parallel : kernels::Exec::Serial;
}

void BM_Derivatives(benchmark::State& st) {
  LineGridSpec spec;
  spec.nodes = static_cast<int>(st.range(0));
  const Grid1D grid = Grid1D::truncated_line(spec);
  std::vector<double> f(grid.size()), d1(grid.size()), d2(grid.size());
  for (int i = 0; i < grid.size(); ++i) f[i] = std::log1p(std::exp(grid.node(i)));
  for (auto _ : st) {
    kernels::derivatives(exec_of(st), grid, f, d1, d2);
    benchmark::DoNotOptimize(d2.data());
  }
  st.SetItemsProcessed(st.iterations() * grid.size());
}

void BM_OperatorRows(benchmark::State& st) {
  LineGridSpec spec;
  spec.nodes = static_cast<int>(st.range(0));
  const Grid1D grid = Grid1D::truncated_line(spec);
  std::vector<double> c1(grid.size(), 1.0), c2(grid.size(), 2.0), vals(4 * grid.size());
  for (auto _ : st) {
    kernels::operator_rows(exec_of(st), grid, c1, c2, vals);
    benchmark::DoNotOptimize(vals.data());
  }
  st.SetItemsProcessed(st.iterations() * grid.size());
}

void BM_LogRatio2(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  std::vector<double> a(n, 1.5), b(n, 2.5), ar(n, 1.0), br(n, 1.0), out(n);
  for (auto _ : st) {
    kernels::log_ratio2(exec_of(st), a, b, ar, br, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(n));
}

void BM_CalabiMaLog(benchmark::State& st) {
  BackendSettings bs;
  bs.line.nodes = static_cast<int>(st.range(0));
  bs.exec = exec_of(st);
  auto m = ModelGeometry::hirzebruch(1);
  auto g = make_geometry(class_path(KahlerClass{m, {Rational(2), Rational(5)}}), bs);
  Field u(g->dof(), 0.0);
  for (auto _ : st) benchmark::DoNotOptimize(g->ma_log(u, 0.1));
}

void args(benchmark::internal::Benchmark* b) {
  for (long n : {1 << 10, 1 << 14, 1 << 18})
    for (long p : {0, 1}) b->Args({n, p});
  b->ArgNames({"N", "parallel"});
}

}  // namespace

BENCHMARK(BM_Derivatives)->Apply(args);
BENCHMARK(BM_OperatorRows)->Apply(args);
BENCHMARK(BM_LogRatio2)->Apply(args);
BENCHMARK(BM_CalabiMaLog)->Apply(args);

BENCHMARK_MAIN();
