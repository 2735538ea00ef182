#pragma once

// Data-parallel kernels. Each *_parallel routine is an OpenMP loop over
// independent items whose per-item arithmetic is identical to the serial
// reference, so the two agree bit for bit.

#include <memory>
#include <vector>

#include "lindblad_modes/eigenbasis.hpp"
#include "lindblad_modes/operator_space.hpp"

namespace lindblad {

// Terms of sum_i C_i exp(lambda_i tau) R_i, in table order. Either `states`
// (nonzero terms only) or `factorization` (all table entries) supplies R_i.
struct ModeSum {
    Dims dims;
    std::vector<Complex> coefficients;
    std::vector<Complex> rates;
    std::vector<const Eigen::SparseMatrix<Complex>*> states;
    std::shared_ptr<const TwoModeFactorization> factorization;
};

// Borrows stored eigenstates when every nonzero term has one; two-mode tables
// without them use the factorization.
ModeSum mode_sum(const EigenTable& table);

// rho(tau) for each tau in `taus` (elapsed times).
std::vector<Matrix> synthesize_serial(const ModeSum& sum, const std::vector<double>& taus);
std::vector<Matrix> synthesize_parallel(const ModeSum& sum, const std::vector<double>& taus);

// unvec(expm(G tau) vec(rho0)) per tau, one independent exponential per point.
std::vector<Matrix> expm_series_serial(const Matrix& generator, const Matrix& rho0, const std::vector<double>& taus);
std::vector<Matrix> expm_series_parallel(const Matrix& generator, const Matrix& rho0,
                                         const std::vector<double>& taus);

} // namespace lindblad
