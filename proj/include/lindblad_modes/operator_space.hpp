#pragma once

// Dense operators on truncated Fock spaces (single mode, two-level system, or
// a two-mode tensor product with mode a as the major index).

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lindblad {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Dims = std::vector<int>;

inline constexpr Complex kI{0.0, 1.0};

int total_dim(const Dims& dims);

class FockOperator {
public:
    FockOperator() = default;
    FockOperator(Dims dims, Matrix entries);

    static FockOperator zero(const Dims& dims);
    static FockOperator identity(const Dims& dims);

    const Dims& dims() const noexcept { return dims_; }
    const Matrix& matrix() const noexcept { return entries_; }
    Eigen::Index side() const noexcept { return entries_.rows(); }
    Complex operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

    FockOperator& operator+=(const FockOperator& other);
    FockOperator& operator-=(const FockOperator& other);
    FockOperator& operator*=(Complex c);

private:
    Dims dims_;
    Matrix entries_;
};

FockOperator operator+(FockOperator a, const FockOperator& b);
FockOperator operator-(FockOperator a, const FockOperator& b);
FockOperator operator*(Complex c, FockOperator a);
FockOperator operator*(const FockOperator& a, const FockOperator& b);

void require_same_dims(const FockOperator& a, const FockOperator& b, const char* where);

// |k><l| on a single factor of dimension dim.
FockOperator fock_ket_bra(int k, int l, int dim);

// Truncated ladder operators, a|k> = sqrt(k)|k-1>.
FockOperator annihilation(int dim);
FockOperator creation(int dim);
FockOperator number_operator(int dim);

// Lifts a single-factor operator to factor `mode` of a product space.
FockOperator embed(const FockOperator& single, int mode, const Dims& dims);

FockOperator tensor(const FockOperator& a, const FockOperator& b);
FockOperator adjoint(const FockOperator& a);
Complex trace(const FockOperator& a);
double frobenius_norm(const FockOperator& a);
// Hilbert-Schmidt inner product tr(a^dagger b).
Complex hs_inner(const FockOperator& a, const FockOperator& b);
double trace_distance(const FockOperator& a, const FockOperator& b);
bool is_hermitian(const FockOperator& a, double tol = 1e-10);
double min_eigenvalue_hermitian(const FockOperator& a, double tol = 1e-10);
double purity(const FockOperator& rho);
// Traces out every factor except `keep`.
FockOperator partial_trace(const FockOperator& a, int keep);
// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 of two density operators.
double fidelity(const FockOperator& rho, const FockOperator& sigma);

// Embeds into larger per-factor dimensions (zero padding) or crops back.
FockOperator pad_to(const FockOperator& a, const Dims& dims);
FockOperator crop_to(const FockOperator& a, const Dims& dims);

struct TruncationOptions {
    double tail_tolerance = 1e-10;
    bool strict = false;
};

struct StateMetadata {
    double discarded_weight = 0.0;
    std::vector<std::string> warnings;
};

// Renormalized to unit trace; the discarded tail weight goes to `meta`.
FockOperator coherent_density(Complex alpha, int dim, const TruncationOptions& opts = {},
                              StateMetadata* meta = nullptr);
FockOperator thermal_density(double nbar, int dim, const TruncationOptions& opts = {},
                             StateMetadata* meta = nullptr);
// Ground state is index 0, excited state index 1.
FockOperator two_level_thermal_density(double excited_population);

double coherent_tail_weight(Complex alpha, int dim);
double thermal_tail_weight(double nbar, int dim);

struct StateSpec {
    enum class Kind { Fock, Coherent, Thermal, TwoLevelThermal, Product, Explicit };

    Kind kind = Kind::Fock;
    int fock_n = 0;
    Complex alpha{0.0, 0.0};
    double nbar0 = 0.0;
    double excited_population = 0.0;
    std::string path;
    std::vector<StateSpec> factors;

    static StateSpec fock(int n);
    static StateSpec coherent(Complex alpha);
    static StateSpec thermal(double nbar0);
    static StateSpec two_level_thermal(double excited_population);
    static StateSpec product(StateSpec a, StateSpec b);
    static StateSpec explicit_matrix(std::string path);
};

std::string to_string(StateSpec::Kind kind);

void validate(const StateSpec& spec);

FockOperator build_state(const StateSpec& spec, const Dims& dims, const TruncationOptions& opts = {},
                         StateMetadata* meta = nullptr);

// Explicit-matrix text format: header "dims d1 [d2]", then "i j re im" per
// nonzero entry, 0-based, whitespace separated, '#' comments allowed.
FockOperator parse_explicit_matrix(std::istream& in, double tol = 1e-8);
FockOperator read_explicit_matrix(const std::string& path, double tol = 1e-8);
void write_explicit_matrix(std::ostream& out, const FockOperator& rho);

} // namespace lindblad
