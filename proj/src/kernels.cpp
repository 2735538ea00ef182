#include "lindblad_modes/kernels.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "lindblad_modes/errors.hpp"
#include "lindblad_modes/parallel.hpp"
#include "lindblad_modes/superalgebra.hpp"

namespace lindblad {

ModeSum mode_sum(const EigenTable& table) {
    ModeSum sum;
    sum.dims = model_dims(table.model);
    bool stored = true;
    for (const EigenEntry& e : table.entries)
        if (e.coefficient != Complex(0.0, 0.0) && !e.eigenstate) stored = false;
    if (!stored && is_two_mode(table.model.tag)) {
        sum.factorization = std::make_shared<const TwoModeFactorization>(table);
        for (const EigenEntry& e : table.entries) {
            sum.coefficients.push_back(e.coefficient);
            sum.rates.push_back(e.index.eigenvalue);
        }
        return sum;
    }
    for (const EigenEntry& e : table.entries) {
        if (e.coefficient == Complex(0.0, 0.0)) continue;
        require(e.eigenstate.has_value(), ErrorCode::InvalidArgument,
                "mode_sum: table entry with nonzero coefficient has no stored eigenstate");
        sum.coefficients.push_back(e.coefficient);
        sum.rates.push_back(e.index.eigenvalue);
        sum.states.push_back(&e.eigenstate->matrix);
    }
    return sum;
}

namespace {

Matrix synthesize_one(const ModeSum& sum, double tau) {
    if (sum.factorization) {
        std::vector<Complex> w(sum.coefficients.size());
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = sum.coefficients[i] == Complex(0.0, 0.0) ? Complex(0.0, 0.0)
                                                           : sum.coefficients[i] * std::exp(sum.rates[i] * tau);
        return sum.factorization->combine(w);
    }
    const Eigen::Index d = total_dim(sum.dims);
    Matrix out = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < sum.states.size(); ++i)
        out += (sum.coefficients[i] * std::exp(sum.rates[i] * tau)) * *sum.states[i];
    return out;
}

Matrix expm_one(const Matrix& generator, const Eigen::VectorXcd& v0, double tau, Eigen::Index side) {
    if (tau == 0.0) return unvec(v0, side);
    const Matrix propagator = (generator * Complex(tau, 0.0)).exp();
    return unvec(propagator * v0, side);
}

} // namespace

std::vector<Matrix> synthesize_serial(const ModeSum& sum, const std::vector<double>& taus) {
    std::vector<Matrix> out;
    out.reserve(taus.size());
    for (double tau : taus) out.push_back(synthesize_one(sum, tau));
    return out;
}

std::vector<Matrix> synthesize_parallel(const ModeSum& sum, const std::vector<double>& taus) {
    std::vector<Matrix> out(taus.size());
    const long n = static_cast<long>(taus.size());
#pragma omp parallel for schedule(static) num_threads(thread_cap())
    for (long i = 0; i < n; ++i) out[i] = synthesize_one(sum, taus[i]);
    return out;
}

std::vector<Matrix> expm_series_serial(const Matrix& generator, const Matrix& rho0, const std::vector<double>& taus) {
    require(generator.rows() == rho0.size(), ErrorCode::DimensionMismatch, "generator side must equal dim^2");
    const Eigen::VectorXcd v0 = vec(rho0);
    std::vector<Matrix> out;
    out.reserve(taus.size());
    for (double tau : taus) out.push_back(expm_one(generator, v0, tau, rho0.rows()));
    return out;
}

std::vector<Matrix> expm_series_parallel(const Matrix& generator, const Matrix& rho0,
                                         const std::vector<double>& taus) {
    require(generator.rows() == rho0.size(), ErrorCode::DimensionMismatch, "generator side must equal dim^2");
    const Eigen::VectorXcd v0 = vec(rho0);
    std::vector<Matrix> out(taus.size());
    const long n = static_cast<long>(taus.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_cap())
    for (long i = 0; i < n; ++i) out[i] = expm_one(generator, v0, taus[i], rho0.rows());
    return out;
}

} // namespace lindblad
