#pragma once

// Data-parallel node loops used by the geometry backends. Every kernel has
// an OpenMP path and a plain serial path; the serial path is the reference
// the tests compare against and must produce bit-identical output.

#include "krf/grid.hpp"

#include <span>
#include <string>

namespace krf::kernels {

enum class Exec { Serial, Parallel };

/// Loops shorter than this run serially even under Exec::Parallel.
inline constexpr int kParallelMinNodes = 2048;

Exec parse_exec(const std::string& s);

/// d1 = D_x f, d2 = D_xx f using the grid stencil.
void derivatives(Exec exec, const Grid1D& grid, std::span<const double> f, std::span<double> d1,
                 std::span<double> d2);

/// Metric coefficients a = base1 + du1, b = base2 + du2.
void add_fields(Exec exec, std::span<const double> base1, std::span<const double> base2,
                std::span<const double> du1, std::span<const double> du2, std::span<double> a,
                std::span<double> b);

/// out = log(a / a_ref) + log(b / b_ref).
void log_ratio2(Exec exec, std::span<const double> a, std::span<const double> b, std::span<const double> a_ref,
                std::span<const double> b_ref, std::span<double> out);

/// out = log(a / a_ref).
void log_ratio(Exec exec, std::span<const double> a, std::span<const double> a_ref, std::span<double> out);

/// out_i = c1_i * (D_x v)_i + c2_i * (D_xx v)_i.
void apply_operator(Exec exec, const Grid1D& grid, std::span<const double> c1, std::span<const double> c2,
                    std::span<const double> v, std::span<double> out);

/// Stencil-row values of the operator above: values[4 i + k] multiplies v[col_k(i)].
void operator_rows(Exec exec, const Grid1D& grid, std::span<const double> c1, std::span<const double> c2,
                   std::span<double> values);

/// out = p1 / a + p2 / b (trace of a form with coefficients (p1, p2) against (a, b)).
void trace2(Exec exec, std::span<const double> p1, std::span<const double> p2, std::span<const double> a,
            std::span<const double> b, std::span<double> out);

}  // namespace krf::kernels
