#include "lindblad_modes/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "lindblad_modes/errors.hpp"
#include "lindblad_modes/kernels.hpp"
#include "lindblad_modes/special.hpp"
#include "lindblad_modes/superalgebra.hpp"

namespace lindblad {

std::vector<double> TimeGrid::times() const {
    std::vector<double> out;
    if (steps <= 1) {
        out.push_back(t0);
        return out;
    }
    out.reserve(static_cast<std::size_t>(steps));
    const double dt = (t1 - t0) / (steps - 1);
    for (int i = 0; i < steps; ++i) out.push_back(i == steps - 1 ? t1 : t0 + i * dt);
    return out;
}

void validate(const TimeGrid& grid) {
    require(std::isfinite(grid.t0) && std::isfinite(grid.t1), ErrorCode::InvalidArgument, "grid times must be finite");
    require(grid.t1 >= grid.t0, ErrorCode::InvalidArgument, "grid needs t1 >= t0");
    require(grid.steps >= 1, ErrorCode::InvalidArgument, "grid needs steps >= 1");
}

namespace {

std::vector<double> elapsed(const TimeGrid& grid) {
    std::vector<double> taus = grid.times();
    for (double& t : taus) t -= grid.t0;
    return taus;
}

void record_leakage(const ModelSpec& spec, const FockOperator& rho0, EvolutionResult& result,
                    const LeakageOptions& opts) {
    double worst = leakage(spec, rho0);
    for (const FockOperator& s : result.states) worst = std::max(worst, leakage(spec, s));
    result.max_leakage = worst;
    if (worst > opts.tolerance) {
        std::ostringstream os;
        os << "truncation leakage " << worst << " exceeds " << opts.tolerance << "; increase the Fock dimension";
        if (opts.strict) fail(ErrorCode::TruncationStrict, os.str());
        result.warnings.push_back(os.str());
    }
}

} // namespace

double leakage(const ModelSpec& spec, const FockOperator& rho) {
    if (is_two_level(spec.tag)) return 0.0;
    const Dims& dims = rho.dims();
    const int n = total_dim(dims);
    double sum = 0.0;
    for (int flat = 0; flat < n; ++flat) {
        bool top = false;
        int stride = 1;
        for (int f = static_cast<int>(dims.size()) - 1; f >= 0; --f) {
            const int idx = (flat / stride) % dims[f];
            if (idx >= dims[f] - 2) top = true;
            stride *= dims[f];
        }
        if (top) sum += rho(flat, flat).real();
    }
    return std::abs(sum);
}

EvolutionResult evolve_table(const EigenTable& table, const TimeGrid& grid, const EigenmodeOptions& opts) {
    validate(grid);
    if (opts.check_convergence) {
        const ConvergenceReport report = convergence_diagnostic(table, opts.convergence);
        if (report.status != ConvergenceStatus::Converged)
            fail(ErrorCode::Divergence, "eigenmode expansion does not converge: " + report.summary());
    }
    EvolutionResult result;
    result.grid = grid;
    result.times = grid.times();
    result.method = "eigenmode";
    result.warnings = table.warnings;
    const ModeSum sum = mode_sum(table);
    const std::vector<double> taus = elapsed(grid);
    std::vector<Matrix> states = opts.parallel ? synthesize_parallel(sum, taus) : synthesize_serial(sum, taus);
    result.states.reserve(states.size());
    for (Matrix& m : states) result.states.emplace_back(sum.dims, std::move(m));
    // the first grid point is t0, where the sum must give back rho0
    const double residual = (result.states.front().matrix() - table.rho0.matrix()).cwiseAbs().maxCoeff();
    if (residual > 1e-8) {
        std::ostringstream os;
        os << "expansion up to max index " << table.max_index << " reproduces rho0 only to " << residual
           << "; raise the max index";
        result.warnings.push_back(os.str());
    }
    record_leakage(table.model, table.rho0, result, opts.leakage);
    return result;
}

EvolutionResult evolve_eigenmode(const ModelSpec& spec, const FockOperator& rho0, const TimeGrid& grid,
                                 const EigenmodeOptions& opts) {
    validate(spec);
    validate(grid);
    require(rho0.dims() == model_dims(spec), ErrorCode::DimensionMismatch, "rho0 dims do not match the model");
    const int m = opts.max_index < 0 ? default_max_index(spec) : opts.max_index;
    CoefficientOptions copts;
    copts.parallel = opts.parallel;
    const EigenTable table = expansion_coefficients(spec, rho0, m, copts);
    return evolve_table(table, grid, opts);
}

EvolutionResult crop_result(EvolutionResult result, const Dims& dims) {
    for (FockOperator& rho : result.states) rho = crop_to(rho, dims);
    return result;
}

bool closed_form_supported(const ModelSpec& spec, const StateSpec& initial) {
    using K = StateSpec::Kind;
    switch (spec.tag) {
    case ModelTag::SingleZeroT: return initial.kind == K::Fock || initial.kind == K::Coherent;
    case ModelTag::SingleThermal: return initial.kind == K::Thermal;
    case ModelTag::TwoLevelThermal: return initial.kind == K::TwoLevelThermal;
    case ModelTag::TwoModeZeroT:
        return initial.kind == K::Product && initial.factors.size() == 2 &&
               initial.factors[0].kind == K::Coherent && initial.factors[1].kind == K::Coherent;
    case ModelTag::TwoModeThermal: return false;
    }
    return false;
}

std::pair<Complex, Complex> two_mode_coherent_amplitudes(const ModelSpec& spec, Complex alpha, Complex beta,
                                                         double t) {
    const TwoModeCoefficients c = two_mode_coefficients(spec);
    const Complex phase = std::exp(-kI * c.R * t);
    const Complex cs = std::cos(c.Delta * t);
    const Complex sn = std::sin(c.Delta * t) / c.Delta;
    const Complex F = (cs - kI * c.S * sn) * phase;
    const Complex G = -kI * c.U * sn * phase;
    const Complex H = -kI * c.V * sn * phase;
    const Complex I = (cs + kI * c.S * sn) * phase;
    return {alpha * F + beta * G, alpha * H + beta * I};
}

FockOperator closed_form(const ModelSpec& spec, const StateSpec& initial, double t, const TruncationOptions& trunc) {
    validate(spec);
    validate(initial);
    if (!closed_form_supported(spec, initial))
        fail(ErrorCode::Unsupported, "no closed form for model " + to_string(spec.tag) + " with initial state " +
                                         to_string(initial.kind));
    switch (spec.tag) {
    case ModelTag::SingleZeroT: {
        if (initial.kind == StateSpec::Kind::Coherent)
            return coherent_density(initial.alpha * std::exp(Complex(-0.5 * spec.gamma, -spec.omega) * t), spec.dim,
                                    trunc);
        const int n = initial.fock_n;
        require(n < spec.dim, ErrorCode::IndexOutOfRange, "Fock level exceeds the truncation");
        const double decay = std::exp(-spec.gamma * t);
        Matrix m = Matrix::Zero(spec.dim, spec.dim);
        for (int k = 0; k <= n; ++k) m(k, k) = binomial(n, k) * std::pow(decay, k) * std::pow(1.0 - decay, n - k);
        return FockOperator({spec.dim}, std::move(m));
    }
    case ModelTag::SingleThermal:
        return thermal_density(spec.nbar + (initial.nbar0 - spec.nbar) * std::exp(-spec.gamma * t), spec.dim, trunc);
    case ModelTag::TwoLevelThermal: {
        const double nf = two_level_nbar_fermi(spec);
        return two_level_thermal_density(nf + (initial.excited_population - nf) * std::exp(-two_level_rate(spec) * t));
    }
    case ModelTag::TwoModeZeroT: {
        const auto [a, b] = two_mode_coherent_amplitudes(spec, initial.factors[0].alpha, initial.factors[1].alpha, t);
        return tensor(coherent_density(a, spec.dim, trunc), coherent_density(b, spec.dim, trunc));
    }
    case ModelTag::TwoModeThermal: break;
    }
    fail(ErrorCode::Unsupported, "no closed form");
}

EvolutionResult evolve_closed_form(const ModelSpec& spec, const StateSpec& initial, const TimeGrid& grid,
                                   const TruncationOptions& trunc) {
    validate(grid);
    EvolutionResult result;
    result.grid = grid;
    result.times = grid.times();
    result.method = "closed-form";
    for (double t : result.times) result.states.push_back(closed_form(spec, initial, t - grid.t0, trunc));
    return result;
}

std::string to_string(OracleKind k) {
    switch (k) {
    case OracleKind::Auto: return "auto";
    case OracleKind::Exp: return "exp";
    case OracleKind::Stepper: return "stepper";
    }
    return "auto";
}

OracleKind parse_oracle_kind(const std::string& s) {
    if (s == "auto") return OracleKind::Auto;
    if (s == "exp") return OracleKind::Exp;
    if (s == "stepper" || s == "rk4") return OracleKind::Stepper;
    fail(ErrorCode::Parse, "unknown oracle kind '" + s + "'");
}

namespace {

double spectral_bound(const Matrix& a) {
    if (a.isIdentity(0.0)) return 1.0;
    const double col = a.cwiseAbs().colwise().sum().maxCoeff();
    const double row = a.cwiseAbs().rowwise().sum().maxCoeff();
    return std::sqrt(col * row);
}

Matrix rk4_step(const CompiledSuperoperator& k, const Matrix& y, double h) {
    const Matrix k1 = k.apply(y);
    const Matrix k2 = k.apply(y + (0.5 * h) * k1);
    const Matrix k3 = k.apply(y + (0.5 * h) * k2);
    const Matrix k4 = k.apply(y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace

double rk4_step_size(const Superoperator& k, const Matrix& rho0, double horizon, double tolerance) {
    if (horizon <= 0.0) return 0.0;
    double bound = 0.0;
    for (const SuperTerm& t : k.terms())
        bound += std::abs(t.coeff) * spectral_bound(t.left.matrix()) * spectral_bound(t.right.matrix());
    const CompiledSuperoperator compiled(k);
    // |h lambda| <= 2 keeps every mode inside the RK4 stability region
    double h = bound > 0.0 ? std::min(horizon, 2.0 / bound) : horizon;
    for (int iter = 0; iter < 60; ++iter) {
        const Matrix full = rk4_step(compiled, rho0, h);
        const Matrix half = rk4_step(compiled, rk4_step(compiled, rho0, 0.5 * h), 0.5 * h);
        const double local = (full - half).norm() / 15.0;
        if (local <= tolerance) break;
        h *= 0.5;
    }
    return 0.5 * h;
}

EvolutionResult evolve_oracle(const ModelSpec& spec, const FockOperator& rho0, const TimeGrid& grid,
                              const OracleOptions& opts) {
    validate(spec);
    validate(grid);
    const Dims dims = model_dims(spec);
    require(rho0.dims() == dims, ErrorCode::DimensionMismatch, "rho0 dims do not match the model");
    const int d = total_dim(dims);
    if (d > opts.dim_cap)
        fail(ErrorCode::DimensionCap, "oracle: total dimension " + std::to_string(d) + " exceeds cap " +
                                          std::to_string(opts.dim_cap));
    const long side = static_cast<long>(d) * d;
    OracleKind kind = opts.kind;
    if (kind == OracleKind::Auto) kind = side <= opts.exp_max_vec_side ? OracleKind::Exp : OracleKind::Stepper;
    if (kind == OracleKind::Exp && side > opts.exp_hard_limit)
        fail(ErrorCode::DimensionCap, "oracle: dense exponential needs dim^2 <= " +
                                          std::to_string(opts.exp_hard_limit));

    const Superoperator k = liouvillian(spec);
    EvolutionResult result;
    result.grid = grid;
    result.times = grid.times();
    const std::vector<double> taus = elapsed(grid);
    if (kind == OracleKind::Exp) {
        result.method = "oracle-exp";
        const Matrix g = to_matrix(k);
        std::vector<Matrix> states = opts.parallel ? expm_series_parallel(g, rho0.matrix(), taus)
                                                   : expm_series_serial(g, rho0.matrix(), taus);
        for (Matrix& m : states) result.states.emplace_back(dims, std::move(m));
    } else {
        result.method = "oracle-rk4";
        const double horizon = grid.t1 - grid.t0;
        const double h = opts.step > 0.0 ? opts.step : rk4_step_size(k, rho0.matrix(), horizon, opts.step_tolerance);
        const CompiledSuperoperator compiled(k);
        Matrix y = rho0.matrix();
        double now = 0.0;
        for (double tau : taus) {
            const double span = tau - now;
            if (span > 0.0) {
                const long n = std::max(1L, static_cast<long>(std::ceil(span / h - 1e-9)));
                const double hh = span / static_cast<double>(n);
                for (long s = 0; s < n; ++s) y = rk4_step(compiled, y, hh);
                now = tau;
            }
            result.states.emplace_back(dims, y);
        }
    }
    record_leakage(spec, rho0, result, opts.leakage);
    return result;
}

std::vector<std::string> default_observables(const ModelSpec& spec) {
    (void)spec;
    return {"trace", "purity", "mean_n", "min_eig", "leakage"};
}

namespace {

double min_eig_hermitian_part(const FockOperator& rho) {
    const Matrix h = 0.5 * (rho.matrix() + rho.matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double mode_occupation(const FockOperator& rho, int mode) {
    const Dims& dims = rho.dims();
    const int n = total_dim(dims);
    int stride = 1;
    for (int f = static_cast<int>(dims.size()) - 1; f > mode; --f) stride *= dims[f];
    double sum = 0.0;
    for (int flat = 0; flat < n; ++flat) sum += ((flat / stride) % dims[mode]) * rho(flat, flat).real();
    return sum;
}

} // namespace

ObservableTable observables(const EvolutionResult& result, const ModelSpec& spec,
                            const std::vector<std::string>& which, const std::vector<FockOperator>* reference) {
    ObservableTable table;
    table.times = result.times;
    const Dims dims = model_dims(spec);
    const int d = total_dim(dims);
    enum class Obs { Trace, Purity, MeanN, Pop, MinEig, Leakage, Fidelity };
    struct Column {
        Obs obs;
        int arg;
    };
    std::vector<Column> cols;
    auto add = [&](const std::string& name, bool cplx, Obs o, int arg) {
        table.names.push_back(name);
        table.is_complex.push_back(cplx);
        cols.push_back({o, arg});
    };
    for (const std::string& w : which) {
        if (w == "trace") {
            add("trace", true, Obs::Trace, 0);
        } else if (w == "purity") {
            add("purity", false, Obs::Purity, 0);
        } else if (w == "mean_n") {
            if (is_two_mode(spec.tag)) {
                add("mean_n_a", false, Obs::MeanN, 0);
                add("mean_n_b", false, Obs::MeanN, 1);
            } else {
                add("mean_n", false, Obs::MeanN, 0);
            }
        } else if (w == "mean_n_a" && is_two_mode(spec.tag)) {
            add("mean_n_a", false, Obs::MeanN, 0);
        } else if (w == "mean_n_b" && is_two_mode(spec.tag)) {
            add("mean_n_b", false, Obs::MeanN, 1);
        } else if (w == "populations") {
            for (int k = 0; k < d; ++k) add("pop_" + std::to_string(k), false, Obs::Pop, k);
        } else if (w == "min_eig") {
            add("min_eig", false, Obs::MinEig, 0);
        } else if (w == "leakage") {
            add("leakage", false, Obs::Leakage, 0);
        } else if (w == "fidelity") {
            require(reference && reference->size() == result.states.size(), ErrorCode::InvalidArgument,
                    "fidelity needs one reference state per time point");
            add("fidelity", false, Obs::Fidelity, 0);
        } else {
            fail(ErrorCode::InvalidArgument, "undefined observable '" + w + "' for model " + to_string(spec.tag));
        }
    }
    for (std::size_t t = 0; t < result.states.size(); ++t) {
        const FockOperator& rho = result.states[t];
        std::vector<Complex> row;
        row.reserve(cols.size());
        for (const Column& c : cols) {
            switch (c.obs) {
            case Obs::Trace: row.push_back(trace(rho)); break;
            case Obs::Purity: row.emplace_back(purity(rho), 0.0); break;
            case Obs::MeanN: row.emplace_back(mode_occupation(rho, c.arg), 0.0); break;
            case Obs::Pop: row.emplace_back(rho(c.arg, c.arg).real(), 0.0); break;
            case Obs::MinEig: row.emplace_back(min_eig_hermitian_part(rho), 0.0); break;
            case Obs::Leakage: row.emplace_back(leakage(spec, rho), 0.0); break;
            case Obs::Fidelity: row.emplace_back(fidelity(rho, (*reference)[t]), 0.0); break;
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace lindblad
