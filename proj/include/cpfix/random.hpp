#pragma once

#include <cstdint>
#include <random>

#include "cpfix/matcore.hpp"
#include "cpfix/vnalg.hpp"

namespace cpfix {

/// Seeded sampler. Complex entries are standard normal (real and imaginary
/// parts N(0, 1/2)); "unit" samplers normalize the result afterwards.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0);
    std::size_t uniform_index(std::size_t n);  // in [0, n)
    Complex cnormal();

    CMatrix gaussian(std::size_t rows, std::size_t cols);
    CMatrix hermitian(std::size_t n);
    /// Unit vector in C^n.
    std::vector<Complex> unit_vector(std::size_t n);
    /// Element with Gaussian blocks, scaled to operator norm 1.
    AlgebraElement unit_element(const BlockStructure& s);

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// exp(i t H) for Hermitian H.
CMatrix unitary_exp(const CMatrix& h, double t);

} // namespace cpfix
