#pragma once

// Time evolution: eigenmode synthesis, closed-form worked examples, and a
// direct-integration oracle on the vectorized Liouvillian.

#include <string>
#include <vector>

#include "lindblad_modes/eigenbasis.hpp"
#include "lindblad_modes/models.hpp"
#include "lindblad_modes/operator_space.hpp"

namespace lindblad {

struct TimeGrid {
    double t0 = 0.0;
    double t1 = 1.0;
    int steps = 11;   // number of points; 1 means t0 only

    std::vector<double> times() const;
};

void validate(const TimeGrid& grid);

struct EvolutionResult {
    TimeGrid grid;
    std::vector<double> times;
    std::vector<FockOperator> states;
    std::string method;
    std::vector<std::string> warnings;
    double max_leakage = 0.0;
};

struct LeakageOptions {
    bool strict = false;
    double tolerance = 1e-6;
};

// tr(rho P_top), P_top projecting on the top two Fock levels of any mode; 0
// for the two-level system.
double leakage(const ModelSpec& spec, const FockOperator& rho);

struct EigenmodeOptions {
    int max_index = -1;   // -1: default_max_index
    bool parallel = true;
    bool check_convergence = true;
    ConvergenceOptions convergence;
    LeakageOptions leakage;
};

EvolutionResult evolve_eigenmode(const ModelSpec& spec, const FockOperator& rho0, const TimeGrid& grid,
                                 const EigenmodeOptions& opts = {});
// Synthesis from a prepared table (coefficients and eigenstates reused).
EvolutionResult evolve_table(const EigenTable& table, const TimeGrid& grid, const EigenmodeOptions& opts = {});

// States cropped to `dims`, for runs made on a padded truncation.
EvolutionResult crop_result(EvolutionResult result, const Dims& dims);

bool closed_form_supported(const ModelSpec& spec, const StateSpec& initial);
// State after elapsed time t for one of the worked examples.
FockOperator closed_form(const ModelSpec& spec, const StateSpec& initial, double t,
                         const TruncationOptions& trunc = {});
EvolutionResult evolve_closed_form(const ModelSpec& spec, const StateSpec& initial, const TimeGrid& grid,
                                   const TruncationOptions& trunc = {});

// Two-mode amplitudes alpha(t), beta(t) of the product coherent solution.
std::pair<Complex, Complex> two_mode_coherent_amplitudes(const ModelSpec& spec, Complex alpha, Complex beta,
                                                         double t);

enum class OracleKind { Auto, Exp, Stepper };
std::string to_string(OracleKind k);
OracleKind parse_oracle_kind(const std::string& s);

struct OracleOptions {
    OracleKind kind = OracleKind::Auto;
    double step = 0.0;           // 0: chosen automatically
    int dim_cap = 400;           // total Hilbert dimension
    int exp_max_vec_side = 400;  // Auto picks Exp at or below this dim^2
    int exp_hard_limit = 2500;   // Exp refused above this dim^2
    double step_tolerance = 1e-10;
    bool parallel = true;
    LeakageOptions leakage;
};

EvolutionResult evolve_oracle(const ModelSpec& spec, const FockOperator& rho0, const TimeGrid& grid,
                              const OracleOptions& opts = {});

// RK4 step for the generator over `horizon`: starts at 2/||K|| (bound), then
// step doubling on rho0, halved until the local error estimate is within
// `tolerance`, then halved once more. Modes only decay, so the error measured
// on rho0 bounds later steps.
double rk4_step_size(const Superoperator& k, const Matrix& rho0, double horizon, double tolerance);

struct ObservableTable {
    std::vector<double> times;
    std::vector<std::string> names;
    std::vector<bool> is_complex;
    std::vector<std::vector<Complex>> rows;   // rows[time][column]
};

std::vector<std::string> default_observables(const ModelSpec& spec);

// Names: trace, purity, mean_n (per mode for two modes), populations, min_eig,
// leakage, fidelity (requires `reference`, one state per time).
ObservableTable observables(const EvolutionResult& result, const ModelSpec& spec,
                            const std::vector<std::string>& which,
                            const std::vector<FockOperator>* reference = nullptr);

} // namespace lindblad
