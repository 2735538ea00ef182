#pragma once

// Superoperators as formal sums of left/right multiplication pairs.
//
// A term (c, L, R) acts as rho -> c * L * rho * R, so the left-action atom
// "A." is (1, A, I) and the right-action atom ".A" is (1, I, A). Composition
// follows  A.B. = AB.  and  .A.B = .BA  : the composed term of (L1, R1) after
// (L2, R2) has left L1*L2 and right R2*R1.
//
// Vectorization stacks columns, so L rho R  maps to  (R^T kron L) vec(rho).

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "lindblad_modes/operator_space.hpp"

namespace lindblad {

struct SuperTerm {
    Complex coeff;
    FockOperator left;
    FockOperator right;
};

class Superoperator {
public:
    Superoperator() = default;
    explicit Superoperator(Dims dims) : dims_(std::move(dims)) {}

    static Superoperator zero(const Dims& dims) { return Superoperator(dims); }
    static Superoperator identity(const Dims& dims);
    static Superoperator left(const FockOperator& a);
    static Superoperator right(const FockOperator& a);
    // rho -> l * rho * r  (the "l..r" atom).
    static Superoperator sandwich(const FockOperator& l, const FockOperator& r);

    const Dims& dims() const noexcept { return dims_; }
    const std::vector<SuperTerm>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    // Builder used while assembling; the value is treated as immutable afterwards.
    Superoperator& add_term(Complex c, FockOperator l, FockOperator r);

private:
    Dims dims_;
    std::vector<SuperTerm> terms_;
};

inline constexpr double kMergeTolerance = 1e-14;

// Merges terms with entrywise-equal (left, right) pairs and drops terms whose
// coefficient magnitude falls below kMergeTolerance.
Superoperator simplify(const Superoperator& s);

Superoperator add(const Superoperator& a, const Superoperator& b);
Superoperator scale(Complex c, const Superoperator& s);
Superoperator compose(const Superoperator& a, const Superoperator& b);
Superoperator commutator(const Superoperator& a, const Superoperator& b);
Superoperator anticommutator(const Superoperator& a, const Superoperator& b);
Superoperator power(const Superoperator& s, int k);
// Adjoint under the Hilbert-Schmidt pairing: (c, L, R) -> (c*, L^dag, R^dag).
Superoperator hs_adjoint(const Superoperator& s);

Superoperator operator+(const Superoperator& a, const Superoperator& b);
Superoperator operator-(const Superoperator& a, const Superoperator& b);
Superoperator operator*(Complex c, const Superoperator& s);
Superoperator operator*(const Superoperator& a, const Superoperator& b);

FockOperator apply(const Superoperator& s, const FockOperator& rho);

Matrix to_matrix(const Superoperator& s);
Eigen::VectorXcd vec(const Matrix& m);
Matrix unvec(const Eigen::VectorXcd& v, Eigen::Index side);

// Compiled form of a superoperator for repeated application: one-sided terms
// are merged into a single left and a single right factor, identity factors
// are skipped, coefficients are folded into the left factor.
class CompiledSuperoperator {
public:
    CompiledSuperoperator() = default;
    explicit CompiledSuperoperator(const Superoperator& s);

    const Dims& dims() const noexcept { return dims_; }
    Matrix apply(const Matrix& rho) const;
    FockOperator apply(const FockOperator& rho) const;

    // One matrix factor. Ladder operators on the flat index occupy a few
    // diagonals, so those are stored as (offset, values) pairs; anything
    // wider is kept dense.
    class Factor {
    public:
        Factor() = default;
        explicit Factor(const Matrix& m);
        void left_add(const Matrix& rho, Matrix& out) const;  // out += A rho
        void right_add(const Matrix& rho, Matrix& out) const; // out += rho A

    private:
        Eigen::Index n_ = 0;
        bool banded_ = true;
        std::vector<Eigen::Index> offsets_; // column minus row
        std::vector<Eigen::VectorXcd> values_;
        Matrix dense_;
    };

private:
    struct Term {
        Factor left;
        Factor right;
    };
    Dims dims_;
    Complex scalar_{0.0, 0.0};
    std::optional<Factor> left_;
    std::optional<Factor> right_;
    std::vector<Term> terms_;
};

// Flat indices whose every bosonic factor index is <= dim - 1 - step. With
// `truncated` false (two-level space) every index is interior.
std::vector<Eigen::Index> interior_indices(const Dims& dims, int step, bool truncated = true);

// Frobenius norm of the operator restricted to interior rows and columns.
double interior_norm(const FockOperator& a, int step, bool truncated = true);

// Frobenius norm of the superoperator matrix restricted to interior inputs and
// outputs (vec indices whose row and column are both interior).
double interior_residual(const Superoperator& s, int step, bool truncated = true);

} // namespace lindblad
