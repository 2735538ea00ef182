#pragma once

// Built-in invariant suites and seeded random instances shared by the CLI,
// the tests and the acceptance binary.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lindblad_modes/evolution.hpp"
#include "lindblad_modes/models.hpp"
#include "lindblad_modes/operator_space.hpp"

namespace lindblad {

struct VerifyRecord {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::string suite;
    std::uint64_t seed = 42;
    std::vector<VerifyRecord> records;

    void add(std::string name, double residual, double tolerance);
    bool all_pass() const;
    std::string to_json() const;
};

// algebra, eigen, closed-form, oracle, all
const std::vector<std::string>& verify_suites();
VerifyReport run_verify_suite(const std::string& suite, std::uint64_t seed = 42);

// Individual checks, each returning the worst residual.
double factorization_residual(const ModelSpec& spec);
double ladder_shift_residual(const ModelSpec& spec);
double ladder_commutation_residual(const ModelSpec& spec);
double eigen_relation_residual(const ModelSpec& spec, int max_index);
double biorthogonality_residual(const ModelSpec& spec, int max_index);
double trace_property_residual(const ModelSpec& spec, int max_index);
double explicit_ladder_residual(const ModelSpec& spec, int max_index);

// Small representative instance of each model.
std::vector<ModelSpec> reference_models();

// rho = A A^dagger / tr with complex Gaussian A on Fock levels <= support per mode.
FockOperator random_density(const Dims& dims, int support, std::mt19937_64& rng);
// Hermitian, unit trace, not necessarily positive; same support rule.
FockOperator random_hermitian_unit_trace(const Dims& dims, int support, std::mt19937_64& rng);

struct RandomInstance {
    ModelSpec model;
    FockOperator rho0;
    TimeGrid grid;   // reference_rate * t over [0, 3]
};

// Random valid parameters and a random density supported well inside the truncation.
RandomInstance random_instance(ModelTag tag, std::mt19937_64& rng, int points = 10);

struct CrossCheck {
    double eigen_vs_oracle = 0.0;   // max trace distance over the grid
    double semigroup = 0.0;         // split evolution vs direct
};
CrossCheck cross_check(const RandomInstance& inst);

} // namespace lindblad
