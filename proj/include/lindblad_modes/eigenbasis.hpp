#pragma once

// Liouvillian eigenstates, expansion coefficients, reconstruction and the
// per-matrix-element convergence diagnostic.
//
// Index layout follows the ladder set: (m, n) single mode, (p, q) two-level,
// (m, n, p, q) two modes. The eigenvalue of an index is sum_i index_i * shift_i.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "lindblad_modes/models.hpp"
#include "lindblad_modes/operator_space.hpp"

namespace lindblad {

using IndexTuple = std::vector<int>;

struct EigenIndex {
    IndexTuple indices;
    Complex eigenvalue{0.0, 0.0};
};

Complex eigenvalue_of(const IndexTuple& idx, const std::vector<Complex>& shifts);

// Ascending total index, then lexicographic.
bool index_order(const IndexTuple& a, const IndexTuple& b);

// max(dim - 4, 0) for a single mode; 2 (dim - 1) for two modes, whose
// truncated states need the full index range; 1 for the two-level system.
int default_max_index(const ModelSpec& spec);

// Indices used for expansion, each component <= max_index. Single mode: m, n
// <= dim - 1. Two modes: m + n and p + q <= 2 (dim - 1); indices whose
// eigenstate support passes dim - 1 are kept in cropped form, since the
// truncated two-mode operator space needs them. Exclusions and cropping are
// reported in `warnings`.
std::vector<IndexTuple> index_set(const ModelSpec& spec, int max_index, std::vector<std::string>* warnings = nullptr);

// Throws IndexOutOfRange unless idx is representable at the model's dimension.
void validate_index(const ModelSpec& spec, const IndexTuple& idx);

double polynomial_P(int k, int l, int m, double x);
Complex mixing_coefficient_D(int k, int m, int n, const TwoModeCoefficients& c);

// Steady state R^{0...0}; for thermal models this is the raw (un-renormalized)
// thermal distribution on the truncated space.
FockOperator steady_state(const ModelSpec& spec);

FockOperator eigenstate_explicit(const ModelSpec& spec, const IndexTuple& idx);
// Raising superoperators applied to the steady state in a padded space, then
// cropped back to the model dimension.
FockOperator eigenstate_ladder(const ModelSpec& spec, const IndexTuple& idx);
// Batch form sharing one padded ladder set.
std::vector<FockOperator> eigenstates_ladder(const ModelSpec& spec, const std::vector<IndexTuple>& indices);

// Auto: None for two modes (sums go through TwoModeFactorization), NonZero otherwise.
enum class EigenstateStorage { Auto, None, NonZero, All };

struct CoefficientOptions {
    EigenstateStorage storage = EigenstateStorage::Auto;
    bool parallel = true;
    double trace_tolerance = 1e-8;
};

// Eigenstates are banded (one diagonal per mode), so tables keep them sparse.
struct SparseOperator {
    Dims dims;
    Eigen::SparseMatrix<Complex> matrix;

    FockOperator dense() const;
};

struct EigenEntry {
    EigenIndex index;
    Complex coefficient{0.0, 0.0};
    std::optional<SparseOperator> eigenstate;
};

struct EigenTable {
    ModelSpec model;
    int max_index = 0;
    FockOperator rho0;
    std::vector<EigenEntry> entries;   // sorted by index_order
    std::vector<std::string> warnings;

    const EigenEntry* find(const IndexTuple& idx) const;
};

// Coefficient for one index: normalized lowering product applied to rho0, traced.
Complex expansion_coefficient(const ModelSpec& spec, const FockOperator& rho0, const IndexTuple& idx);

EigenTable expansion_coefficients(const ModelSpec& spec, const FockOperator& rho0, int max_index,
                                  const CoefficientOptions& opts = {});

struct ConvergenceOptions {
    double bound_factor = 1e3;
    int window = 8;
};

enum class ConvergenceStatus { Converged, NotConverged, Divergent };

std::string to_string(ConvergenceStatus s);

struct ConvergenceReport {
    ConvergenceStatus status = ConvergenceStatus::Converged;
    double bound = 0.0;
    double max_partial = 0.0;            // largest |partial sum| over elements and shells
    int worst_row = 0;
    int worst_col = 0;
    std::vector<double> shell_increments;  // max |shell contribution| per shell
    std::vector<std::pair<int, int>> divergent_elements;  // partial sum passed the bound, row-major order
    bool flags(int row, int col) const;
    std::string summary() const;
};

// Partial sums of C * R per matrix element over shells of increasing max index.
ConvergenceReport convergence_diagnostic(const EigenTable& table, const ConvergenceOptions& opts = {});

// Two-mode sums  sum_e w_e R_e  over table entries, evaluated through the
// single-mode factors: sum over (K, L, k, l) of W_{KLkl} R_a^{k,l} (x)
// R_b^{K-k, L-l}, with W_{KLkl} = sum over m+n=K, p+q=L of w D_k^{mn} conj(D_l^{pq}).
// Read-only after construction.
class TwoModeFactorization {
public:
    explicit TwoModeFactorization(const EigenTable& table);
    Matrix combine(const std::vector<Complex>& weights) const;

private:
    using Triplets = std::vector<Eigen::Triplet<Complex>>;
    int d_ = 0;
    int span_ = 0;
    std::vector<Triplets> single_;                 // R^{k,l} on one mode, k, l < span_
    std::vector<std::vector<Complex>> d_left_;     // per entry: D_k^{mn}
    std::vector<std::vector<Complex>> d_right_;    // per entry: conj(D_l^{pq})
    std::vector<std::pair<int, int>> sums_;        // per entry: (m+n, p+q)
};

// sum_e weights[e] R_e in table order, using stored eigenstates, the two-mode
// factorization, or on-demand construction.
Matrix weighted_sum(const EigenTable& table, const std::vector<Complex>& weights);

// Sum of C * R in table order. Throws Divergence when the diagnostic does not
// report convergence.
FockOperator reconstruct(const EigenTable& table, const ConvergenceOptions& opts = {});
// Same sum without the gate.
FockOperator reconstruct_unchecked(const EigenTable& table);

// "idx... re(lambda) im(lambda) re(C) im(C)" per entry.
void write_table(std::ostream& out, const EigenTable& table);

} // namespace lindblad
