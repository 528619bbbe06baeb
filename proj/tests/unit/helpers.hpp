#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "cpfix/cpsemi.hpp"
#include "cpfix/matcore.hpp"
#include "cpfix/vnalg.hpp"

namespace cpfix::test {

inline CMatrix pauli_x() { return CMatrix{{0.0, 1.0}, {1.0, 0.0}}; }

inline CMatrix phase_diag(double theta) {
    return CMatrix{{1.0, 0.0}, {0.0, std::polar(1.0, theta)}};
}

inline AlgebraElement single(const CMatrix& m) {
    return AlgebraElement(BlockStructure({m.rows()}), {m});
}

inline double dist(const AlgebraElement& a, const AlgebraElement& b) { return (a - b).norm(); }

}  // namespace cpfix::test
