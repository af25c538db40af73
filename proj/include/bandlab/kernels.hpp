#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version in
// `parallel` and a plain loop in `reference`; the two must agree exactly
// (bitwise for fill_sample) and the tests hold them to it.

#include "bandlab/common.hpp"
#include "bandlab/ensemble.hpp"
#include "bandlab/profile.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace bandlab::kernels {

namespace parallel {

void fill_sample(const VarianceProfile& p, DistTag tag, std::uint64_t seed, CMatrix& out);
double max_row_abs_sum(const CMatrix& m);
std::vector<Complex> stieltjes_curve(std::span<const double> svals, std::span<const double> etas);

}  // namespace parallel

namespace reference {

void fill_sample(const VarianceProfile& p, DistTag tag, std::uint64_t seed, CMatrix& out);
double max_row_abs_sum(const CMatrix& m);
std::vector<Complex> stieltjes_curve(std::span<const double> svals, std::span<const double> etas);

}  // namespace reference

/// Number of OpenMP threads available (1 without OpenMP).
int max_threads();

}  // namespace bandlab::kernels
