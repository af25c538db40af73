#include "bandlab/cubic.hpp"

#include <cmath>

namespace bandlab {

namespace {

Complex eval(Complex c3, Complex c2, Complex c1, Complex c0, Complex x) { return ((c3 * x + c2) * x + c1) * x + c0; }

Complex polish(Complex c3, Complex c2, Complex c1, Complex c0, Complex x) {
    for (int it = 0; it < 3; ++it) {
        const Complex f = eval(c3, c2, c1, c0, x);
        const Complex df = (3.0 * c3 * x + 2.0 * c2) * x + c1;
        if (df == Complex{}) break;
        const Complex next = x - f / df;
        if (!(std::abs(eval(c3, c2, c1, c0, next)) < std::abs(f))) break;
        x = next;
    }
    return x;
}

}  // namespace

std::array<Complex, 3> cubic_roots(Complex c3, Complex c2, Complex c1, Complex c0) {
    const Complex d0 = c2 * c2 - 3.0 * c3 * c1;
    const Complex d1 = 2.0 * c2 * c2 * c2 - 9.0 * c3 * c2 * c1 + 27.0 * c3 * c3 * c0;
    const Complex disc = std::sqrt(d1 * d1 - 4.0 * d0 * d0 * d0);
    // Take the sign that avoids cancellation.
    const Complex big = std::abs(d1 + disc) >= std::abs(d1 - disc) ? d1 + disc : d1 - disc;

    std::array<Complex, 3> roots;
    if (std::abs(big) == 0.0) {
        roots.fill(-c2 / (3.0 * c3));
        return roots;
    }
    const Complex c = std::pow(0.5 * big, 1.0 / 3.0);
    const Complex xi{-0.5, 0.5 * std::sqrt(3.0)};
    Complex rot{1.0, 0.0};
    for (auto& r : roots) {
        const Complex ck = rot * c;
        r = -(c2 + ck + d0 / ck) / (3.0 * c3);
        r = polish(c3, c2, c1, c0, r);
        rot *= xi;
    }
    return roots;
}

}  // namespace bandlab
