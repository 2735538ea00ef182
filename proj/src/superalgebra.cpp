#include "lindblad_modes/superalgebra.hpp"

#include <algorithm>

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "lindblad_modes/errors.hpp"

namespace lindblad {

namespace {

void require_same(const Dims& a, const Dims& b, const char* where) {
    if (a != b) fail(ErrorCode::DimensionMismatch, std::string(where) + ": superoperator dims differ");
}

bool entrywise_equal(const Matrix& a, const Matrix& b, double tol) {
    return (a - b).cwiseAbs().maxCoeff() <= tol;
}

bool is_exact_identity(const Matrix& m) { return m.isIdentity(0.0); }

} // namespace

Superoperator Superoperator::identity(const Dims& dims) {
    Superoperator s(dims);
    s.add_term(1.0, FockOperator::identity(dims), FockOperator::identity(dims));
    return s;
}

Superoperator Superoperator::left(const FockOperator& a) {
    Superoperator s(a.dims());
    s.add_term(1.0, a, FockOperator::identity(a.dims()));
    return s;
}

Superoperator Superoperator::right(const FockOperator& a) {
    Superoperator s(a.dims());
    s.add_term(1.0, FockOperator::identity(a.dims()), a);
    return s;
}

Superoperator Superoperator::sandwich(const FockOperator& l, const FockOperator& r) {
    require_same_dims(l, r, "sandwich");
    Superoperator s(l.dims());
    s.add_term(1.0, l, r);
    return s;
}

Superoperator& Superoperator::add_term(Complex c, FockOperator l, FockOperator r) {
    if (dims_.empty()) dims_ = l.dims();
    require(l.dims() == dims_ && r.dims() == dims_, ErrorCode::DimensionMismatch,
            "superoperator term dims do not match");
    terms_.push_back({c, std::move(l), std::move(r)});
    return *this;
}

Superoperator simplify(const Superoperator& s) {
    std::vector<SuperTerm> merged;
    merged.reserve(s.terms().size());
    for (const SuperTerm& t : s.terms()) {
        bool found = false;
        for (SuperTerm& m : merged) {
            if (entrywise_equal(m.left.matrix(), t.left.matrix(), kMergeTolerance) &&
                entrywise_equal(m.right.matrix(), t.right.matrix(), kMergeTolerance)) {
                m.coeff += t.coeff;
                found = true;
                break;
            }
        }
        if (!found) merged.push_back(t);
    }
    Superoperator out(s.dims());
    for (SuperTerm& m : merged)
        if (std::abs(m.coeff) >= kMergeTolerance) out.add_term(m.coeff, std::move(m.left), std::move(m.right));
    return out;
}

Superoperator add(const Superoperator& a, const Superoperator& b) {
    if (a.dims().empty()) return b;
    if (b.dims().empty()) return a;
    require_same(a.dims(), b.dims(), "add");
    Superoperator out(a.dims());
    for (const auto& t : a.terms()) out.add_term(t.coeff, t.left, t.right);
    for (const auto& t : b.terms()) out.add_term(t.coeff, t.left, t.right);
    return simplify(out);
}

Superoperator scale(Complex c, const Superoperator& s) {
    Superoperator out(s.dims());
    for (const auto& t : s.terms()) out.add_term(c * t.coeff, t.left, t.right);
    return simplify(out);
}

Superoperator compose(const Superoperator& a, const Superoperator& b) {
    require_same(a.dims(), b.dims(), "compose");
    Superoperator out(a.dims());
    for (const auto& ta : a.terms())
        for (const auto& tb : b.terms())
            out.add_term(ta.coeff * tb.coeff, ta.left * tb.left, tb.right * ta.right);
    return simplify(out);
}

Superoperator commutator(const Superoperator& a, const Superoperator& b) {
    return add(compose(a, b), scale(-1.0, compose(b, a)));
}

Superoperator anticommutator(const Superoperator& a, const Superoperator& b) {
    return add(compose(a, b), compose(b, a));
}

Superoperator power(const Superoperator& s, int k) {
    require(k >= 0, ErrorCode::InvalidArgument, "superoperator power must be >= 0");
    Superoperator out = Superoperator::identity(s.dims());
    for (int i = 0; i < k; ++i) out = compose(s, out);
    return out;
}

Superoperator hs_adjoint(const Superoperator& s) {
    Superoperator out(s.dims());
    for (const auto& t : s.terms()) out.add_term(std::conj(t.coeff), adjoint(t.left), adjoint(t.right));
    return out;
}

Superoperator operator+(const Superoperator& a, const Superoperator& b) { return add(a, b); }
Superoperator operator-(const Superoperator& a, const Superoperator& b) { return add(a, scale(-1.0, b)); }
Superoperator operator*(Complex c, const Superoperator& s) { return scale(c, s); }
Superoperator operator*(const Superoperator& a, const Superoperator& b) { return compose(a, b); }

FockOperator apply(const Superoperator& s, const FockOperator& rho) {
    if (!s.dims().empty()) require(s.dims() == rho.dims(), ErrorCode::DimensionMismatch, "apply: dims differ");
    return CompiledSuperoperator(s).apply(rho);
}

Matrix to_matrix(const Superoperator& s) {
    const Eigen::Index n = total_dim(s.dims());
    Matrix m = Matrix::Zero(n * n, n * n);
    for (const auto& t : s.terms())
        m += t.coeff * Matrix(Eigen::kroneckerProduct(t.right.matrix().transpose(), t.left.matrix()));
    return m;
}

Eigen::VectorXcd vec(const Matrix& m) { return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size()); }

Matrix unvec(const Eigen::VectorXcd& v, Eigen::Index side) {
    require(v.size() == side * side, ErrorCode::DimensionMismatch, "unvec: length is not side^2");
    return Eigen::Map<const Matrix>(v.data(), side, side);
}

CompiledSuperoperator::CompiledSuperoperator(const Superoperator& s) : dims_(s.dims()) {
    const Eigen::Index n = total_dim(s.dims());
    Matrix left_sum = Matrix::Zero(n, n), right_sum = Matrix::Zero(n, n);
    bool any_left = false, any_right = false;
    // two-sided terms sharing a right factor share one product
    std::vector<std::pair<Matrix, Matrix>> sandwiches;
    for (const auto& t : s.terms()) {
        const bool li = is_exact_identity(t.left.matrix());
        const bool ri = is_exact_identity(t.right.matrix());
        if (li && ri) {
            scalar_ += t.coeff;
        } else if (ri) {
            left_sum += t.coeff * t.left.matrix();
            any_left = true;
        } else if (li) {
            right_sum += t.coeff * t.right.matrix();
            any_right = true;
        } else {
            auto same = std::find_if(sandwiches.begin(), sandwiches.end(),
                                     [&](const auto& p) { return p.second == t.right.matrix(); });
            if (same != sandwiches.end())
                same->first += t.coeff * t.left.matrix();
            else
                sandwiches.emplace_back(t.coeff * t.left.matrix(), t.right.matrix());
        }
    }
    for (const auto& [l, r] : sandwiches) terms_.push_back({Factor(l), Factor(r)});
    if (any_left) left_ = Factor(left_sum);
    if (any_right) right_ = Factor(right_sum);
}

CompiledSuperoperator::Factor::Factor(const Matrix& m) : n_(m.rows()) {
    for (Eigen::Index k = -(n_ - 1); k < n_; ++k) {
        const Eigen::Index len = n_ - std::abs(k);
        Eigen::VectorXcd v(len);
        for (Eigen::Index t = 0; t < len; ++t) v(t) = k >= 0 ? m(t, t + k) : m(t - k, t);
        if ((v.array() != Complex(0.0)).any()) {
            offsets_.push_back(k);
            values_.push_back(std::move(v));
        }
    }
    if (static_cast<Eigen::Index>(offsets_.size()) > std::max<Eigen::Index>(4, n_ / 4)) {
        banded_ = false;
        offsets_.clear();
        values_.clear();
        dense_ = m;
    }
}

void CompiledSuperoperator::Factor::left_add(const Matrix& rho, Matrix& out) const {
    if (!banded_) {
        out.noalias() += dense_ * rho;
        return;
    }
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
        const Eigen::Index k = offsets_[i], len = values_[i].size();
        if (k >= 0)
            out.topRows(len) += values_[i].asDiagonal() * rho.middleRows(k, len);
        else
            out.bottomRows(len) += values_[i].asDiagonal() * rho.topRows(len);
    }
}

void CompiledSuperoperator::Factor::right_add(const Matrix& rho, Matrix& out) const {
    if (!banded_) {
        out.noalias() += rho * dense_;
        return;
    }
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
        const Eigen::Index k = offsets_[i], len = values_[i].size();
        if (k >= 0)
            out.rightCols(len) += rho.leftCols(len) * values_[i].asDiagonal();
        else
            out.leftCols(len) += rho.rightCols(len) * values_[i].asDiagonal();
    }
}

Matrix CompiledSuperoperator::apply(const Matrix& rho) const {
    Matrix out = scalar_ * rho;
    if (left_) left_->left_add(rho, out);
    if (right_) right_->right_add(rho, out);
    Matrix tmp(rho.rows(), rho.cols());
    for (const Term& t : terms_) {
        tmp.setZero();
        t.left.left_add(rho, tmp);
        t.right.right_add(tmp, out);
    }
    return out;
}

FockOperator CompiledSuperoperator::apply(const FockOperator& rho) const {
    if (!dims_.empty()) require(dims_ == rho.dims(), ErrorCode::DimensionMismatch, "apply: dims differ");
    return FockOperator(rho.dims(), apply(rho.matrix()));
}

std::vector<Eigen::Index> interior_indices(const Dims& dims, int step, bool truncated) {
    const int n = total_dim(dims);
    std::vector<Eigen::Index> out;
    out.reserve(n);
    for (Eigen::Index flat = 0; flat < n; ++flat) {
        bool inside = true;
        if (truncated) {
            Eigen::Index stride = 1;
            for (int f = static_cast<int>(dims.size()) - 1; f >= 0; --f) {
                const Eigen::Index idx = (flat / stride) % dims[f];
                if (idx > dims[f] - 1 - step) inside = false;
                stride *= dims[f];
            }
        }
        if (inside) out.push_back(flat);
    }
    return out;
}

double interior_norm(const FockOperator& a, int step, bool truncated) {
    const auto idx = interior_indices(a.dims(), step, truncated);
    double sum = 0.0;
    for (Eigen::Index j : idx)
        for (Eigen::Index i : idx) sum += std::norm(a(i, j));
    return std::sqrt(sum);
}

double interior_residual(const Superoperator& s, int step, bool truncated) {
    if (s.terms().empty()) return 0.0;
    const auto idx = interior_indices(s.dims(), step, truncated);
    const auto n = static_cast<Eigen::Index>(idx.size());
    // Restricted factors: the image of |i><j| under (c, L, R) is c L[:, i] R[j, :].
    std::vector<Matrix> lefts, rights;
    for (const auto& t : s.terms()) {
        Matrix l(n, n), r(n, n);
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = 0; b < n; ++b) {
                l(a, b) = t.left(idx[a], idx[b]);
                r(a, b) = t.right(idx[a], idx[b]);
            }
        lefts.push_back(std::move(l));
        rights.push_back(std::move(r));
    }
    double sum = 0.0;
    Matrix image(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            image.setZero();
            for (std::size_t t = 0; t < lefts.size(); ++t)
                image.noalias() += s.terms()[t].coeff * lefts[t].col(i) * rights[t].row(j);
            sum += image.squaredNorm();
        }
    return std::sqrt(sum);
}

} // namespace lindblad
