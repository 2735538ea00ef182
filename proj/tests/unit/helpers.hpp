#pragma once

#include <random>

#include "lindblad_modes/operator_space.hpp"
#include "lindblad_modes/superalgebra.hpp"

namespace testutil {

using lindblad::Complex;
using lindblad::Dims;
using lindblad::FockOperator;
using lindblad::Matrix;

inline Matrix random_matrix(int side, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(side, side);
    for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j) m(i, j) = Complex(n(rng), n(rng));
    return m;
}

inline FockOperator random_operator(const Dims& dims, std::mt19937_64& rng) {
    return FockOperator(dims, random_matrix(lindblad::total_dim(dims), rng));
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double diff(const FockOperator& a, const FockOperator& b) { return max_abs(a.matrix() - b.matrix()); }

// Random superoperator with `terms` random (c, L, R) terms.
inline lindblad::Superoperator random_super(const Dims& dims, int terms, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    lindblad::Superoperator s(dims);
    for (int k = 0; k < terms; ++k)
        s.add_term(Complex(n(rng), n(rng)), random_operator(dims, rng), random_operator(dims, rng));
    return s;
}

} // namespace testutil
