#pragma once

#include "bandlab/common.hpp"

#include <array>

namespace bandlab {

/// All three roots of c3 x^3 + c2 x^2 + c1 x + c0 with complex coefficients
/// (c3 != 0), by Cardano's formula followed by two Newton steps per root.
std::array<Complex, 3> cubic_roots(Complex c3, Complex c2, Complex c1, Complex c0);

}  // namespace bandlab
