#include "krf/kernels.hpp"

#include "krf/errors.hpp"

#include <cmath>

namespace krf::kernels {

namespace {

template <class Body>
void for_each_node(Exec exec, int n, Body&& body) {
  if (exec == Exec::Parallel && n >= kParallelMinNodes) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) body(i);
  } else {
    for (int i = 0; i < n; ++i) body(i);
  }
}

}  // namespace

Exec parse_exec(const std::string& s) {
  if (s == "serial") return Exec::Serial;
  if (s == "parallel" || s == "openmp") return Exec::Parallel;
  throw ConfigError("unknown execution policy '" + s + "'");
}

void derivatives(Exec exec, const Grid1D& grid, std::span<const double> f, std::span<double> d1,
                 std::span<double> d2) {
  const auto& rows = grid.stencil();
  for_each_node(exec, grid.size(), [&](int i) {
    const StencilRow& r = rows[i];
    double a = 0.0, b = 0.0;
    for (int k = 0; k < r.count; ++k) {
      a += r.d1[k] * f[r.col[k]];
      b += r.d2[k] * f[r.col[k]];
    }
    d1[i] = a;
    d2[i] = b;
  });
}

void add_fields(Exec exec, std::span<const double> base1, std::span<const double> base2,
                std::span<const double> du1, std::span<const double> du2, std::span<double> a,
                std::span<double> b) {
  for_each_node(exec, static_cast<int>(a.size()), [&](int i) {
    a[i] = base1[i] + du1[i];
    b[i] = base2[i] + du2[i];
  });
}

void log_ratio2(Exec exec, std::span<const double> a, std::span<const double> b, std::span<const double> a_ref,
                std::span<const double> b_ref, std::span<double> out) {
  for_each_node(exec, static_cast<int>(out.size()),
                [&](int i) { out[i] = std::log(a[i] / a_ref[i]) + std::log(b[i] / b_ref[i]); });
}

void log_ratio(Exec exec, std::span<const double> a, std::span<const double> a_ref, std::span<double> out) {
  for_each_node(exec, static_cast<int>(out.size()), [&](int i) { out[i] = std::log(a[i] / a_ref[i]); });
}

void apply_operator(Exec exec, const Grid1D& grid, std::span<const double> c1, std::span<const double> c2,
                    std::span<const double> v, std::span<double> out) {
  const auto& rows = grid.stencil();
  for_each_node(exec, grid.size(), [&](int i) {
    const StencilRow& r = rows[i];
    double a = 0.0, b = 0.0;
    for (int k = 0; k < r.count; ++k) {
      a += r.d1[k] * v[r.col[k]];
      b += r.d2[k] * v[r.col[k]];
    }
    out[i] = c1[i] * a + c2[i] * b;
  });
}

void operator_rows(Exec exec, const Grid1D& grid, std::span<const double> c1, std::span<const double> c2,
                   std::span<double> values) {
  const auto& rows = grid.stencil();
  for_each_node(exec, grid.size(), [&](int i) {
    const StencilRow& r = rows[i];
    for (int k = 0; k < 4; ++k) values[4 * i + k] = k < r.count ? c1[i] * r.d1[k] + c2[i] * r.d2[k] : 0.0;
  });
}

void trace2(Exec exec, std::span<const double> p1, std::span<const double> p2, std::span<const double> a,
            std::span<const double> b, std::span<double> out) {
  for_each_node(exec, static_cast<int>(out.size()), [&](int i) { out[i] = p1[i] / a[i] + p2[i] / b[i]; });
}

}  // namespace krf::kernels
