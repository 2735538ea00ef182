#pragma once

// The five quadratic master equations: Liouvillians, ladder superoperator sets
// with their eigenvalue shifts, and the two-mode normal-mode coefficients.
// hbar = 1; frequencies and rates share inverse-time units.

#include <string>
#include <vector>

#include "lindblad_modes/operator_space.hpp"
#include "lindblad_modes/superalgebra.hpp"

namespace lindblad {

enum class ModelTag { SingleZeroT, SingleThermal, TwoLevelThermal, TwoModeZeroT, TwoModeThermal };

// Which square root of S^2 + UV the two-mode coefficients use.
enum class DeltaBranch { Principal, Flipped };

enum class ReservoirCase { Separate, Common, Intermediate };

struct ModelSpec {
    ModelTag tag = ModelTag::SingleZeroT;
    // single mode and two-level
    double omega = 1.0;
    double gamma = 1.0;
    // all thermal models
    double nbar = 0.0;
    // two modes
    double omega_a = 1.0;
    double omega_b = 1.0;
    double gamma_a = 1.0;
    double gamma_b = 1.0;
    Complex g{0.0, 0.0};
    Complex gamma_c{0.0, 0.0};
    // per-mode Fock dimension (fixed to 2 for the two-level system)
    int dim = 10;
    DeltaBranch branch = DeltaBranch::Principal;

    static ModelSpec single_zero_t(double omega, double gamma, int dim);
    static ModelSpec single_thermal(double omega, double gamma, double nbar, int dim);
    static ModelSpec two_level_thermal(double omega, double gamma, double nbar);
    static ModelSpec two_mode_zero_t(double omega_a, double omega_b, double gamma_a, double gamma_b, Complex g,
                                     Complex gamma_c, int dim);
    static ModelSpec two_mode_thermal(double omega_a, double omega_b, double gamma_a, double gamma_b, Complex g,
                                      Complex gamma_c, double nbar, int dim);
};

std::string to_string(ModelTag tag);
ModelTag parse_model_tag(const std::string& s);

bool is_two_mode(ModelTag tag);
bool is_thermal(ModelTag tag);
bool is_two_level(ModelTag tag);

void validate(const ModelSpec& spec);

Dims model_dims(const ModelSpec& spec);
int ladder_pair_count(const ModelSpec& spec);
ModelSpec with_dim(ModelSpec spec, int dim);

// Rate used to express time grids as gamma*t: gamma, Gamma = gamma(2n+1) for
// the two-level system, max(gamma_a, gamma_b) for two modes.
double reference_rate(const ModelSpec& spec);

// Two-level thermal parameters derived from nbar.
double two_level_nbar_fermi(const ModelSpec& spec);   // n/(2n+1)
double two_level_rate(const ModelSpec& spec);         // gamma(2n+1)

ReservoirCase reservoir_case(const ModelSpec& spec, double tol = 1e-12);
std::string to_string(ReservoirCase c);

struct TwoModeCoefficients {
    Complex U, V, S, Delta, R;
    Complex lambda_plus, lambda_minus;
    Complex r_plus, r_minus, s_plus, s_minus;
    Complex u_plus, u_minus, v_plus, v_minus;
};

TwoModeCoefficients two_mode_coefficients(const ModelSpec& spec);

Superoperator liouvillian(const ModelSpec& spec);

enum class Statistics { Bosonic, Fermionic };

struct LadderSet {
    std::vector<std::string> names;
    std::vector<Superoperator> raising;
    std::vector<Superoperator> lowering;
    std::vector<Complex> shifts;
    Statistics statistics = Statistics::Bosonic;
};

LadderSet ladder_set(const ModelSpec& spec);
// The primed two-level set P', Q'.
LadderSet two_level_alternative_ladder_set(const ModelSpec& spec);

// Eigenvalue shifts without building the superoperators.
std::vector<Complex> ladder_shifts(const ModelSpec& spec);

} // namespace lindblad
