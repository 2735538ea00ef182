#include "lindblad_modes/eigenbasis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <locale>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <tuple>

#include "lindblad_modes/errors.hpp"
#include "lindblad_modes/parallel.hpp"
#include "lindblad_modes/special.hpp"

namespace lindblad {

Complex eigenvalue_of(const IndexTuple& idx, const std::vector<Complex>& shifts) {
    require(idx.size() == shifts.size(), ErrorCode::DimensionMismatch, "index length does not match ladder count");
    Complex lambda{0.0, 0.0};
    for (std::size_t i = 0; i < idx.size(); ++i) lambda += static_cast<double>(idx[i]) * shifts[i];
    return lambda;
}

bool index_order(const IndexTuple& a, const IndexTuple& b) {
    const int sa = std::accumulate(a.begin(), a.end(), 0);
    const int sb = std::accumulate(b.begin(), b.end(), 0);
    if (sa != sb) return sa < sb;
    return a < b;
}

int default_max_index(const ModelSpec& spec) {
    if (is_two_level(spec.tag)) return 1;
    if (is_two_mode(spec.tag)) return 2 * (spec.dim - 1);
    return std::clamp(spec.dim - 4, 0, spec.dim - 1);
}

std::vector<IndexTuple> index_set(const ModelSpec& spec, int max_index, std::vector<std::string>* warnings) {
    require(max_index >= 0, ErrorCode::InvalidArgument, "max index must be >= 0");
    std::vector<IndexTuple> out;
    if (is_two_level(spec.tag)) {
        const int top = std::min(max_index, 1);
        for (int p = 0; p <= top; ++p)
            for (int q = 0; q <= top; ++q) out.push_back({p, q});
    } else if (!is_two_mode(spec.tag)) {
        const int top = std::min(max_index, spec.dim - 1);
        if (top < max_index && warnings)
            warnings->push_back("max index " + std::to_string(max_index) + " exceeds dim - 1; indices above " +
                                std::to_string(top) + " excluded");
        for (int m = 0; m <= top; ++m)
            for (int n = 0; n <= top; ++n) out.push_back({m, n});
    } else {
        const int cap = 2 * (spec.dim - 1);
        long excluded = 0, cropped = 0;
        for (int m = 0; m <= max_index; ++m)
            for (int n = 0; n <= max_index; ++n)
                for (int p = 0; p <= max_index; ++p)
                    for (int q = 0; q <= max_index; ++q) {
                        if (m + n > cap || p + q > cap) {
                            ++excluded;
                            continue;
                        }
                        if (m + n > spec.dim - 1 || p + q > spec.dim - 1) ++cropped;
                        out.push_back({m, n, p, q});
                    }
        if (excluded > 0 && warnings)
            warnings->push_back(std::to_string(excluded) +
                                " two-mode indices excluded (m+n or p+q exceeds 2 (dim - 1))");
        if (cropped > 0 && warnings)
            warnings->push_back(std::to_string(cropped) + " two-mode eigenstates cropped to the truncation");
    }
    std::sort(out.begin(), out.end(), index_order);
    return out;
}

void validate_index(const ModelSpec& spec, const IndexTuple& idx) {
    const std::size_t want = static_cast<std::size_t>(ladder_pair_count(spec));
    require(idx.size() == want, ErrorCode::IndexOutOfRange, "index has wrong length for model");
    for (int k : idx) require(k >= 0, ErrorCode::IndexOutOfRange, "negative eigen index");
    if (is_two_level(spec.tag)) {
        for (int k : idx) require(k <= 1, ErrorCode::IndexOutOfRange, "two-level indices are 0 or 1");
    } else if (is_two_mode(spec.tag)) {
        const int cap = 2 * (spec.dim - 1);
        require(idx[0] + idx[1] <= cap && idx[2] + idx[3] <= cap, ErrorCode::IndexOutOfRange,
                "two-mode index sum exceeds 2 (dim - 1)");
    } else {
        for (int k : idx) require(k <= spec.dim - 1, ErrorCode::IndexOutOfRange, "eigen index exceeds dim - 1");
    }
}

double polynomial_P(int k, int l, int m, double x) {
    require(k >= 0 && m >= 0, ErrorCode::InvalidArgument, "polynomial_P needs k, m >= 0");
    long double sum = 0.0L;
    for (int j = std::max(0, l); j <= k; ++j) {
        if (j > 0 && x == 0.0) break;
        const double log_mag = log_factorial(j + m) - log_factorial(j - l) - log_factorial(k - j) -
                               log_factorial(j) + (j > 0 ? j * std::log(x) : 0.0);
        const long double term = std::exp(static_cast<long double>(log_mag));
        sum += ((j - l) % 2 == 0) ? term : -term;
    }
    return static_cast<double>(sum);
}

namespace {

Complex ipow(Complex z, int e) {
    Complex r{1.0, 0.0};
    for (int i = 0; i < e; ++i) r *= z;
    return r;
}

} // namespace

Complex mixing_coefficient_D(int k, int m, int n, const TwoModeCoefficients& c) {
    require(m >= 0 && n >= 0 && k >= 0 && k <= m + n, ErrorCode::IndexOutOfRange, "D needs 0 <= k <= m + n");
    Complex sum{0.0, 0.0};
    for (int j = std::max(0, k - n); j <= std::min(m, k); ++j)
        sum += binomial(m, j) * binomial(n, k - j) * ipow(c.r_plus, j) * ipow(c.s_plus, m - j) *
               ipow(c.r_minus, k - j) * ipow(c.s_minus, n - k + j);
    const double norm =
        std::exp(0.5 * (log_factorial(k) + log_factorial(m + n - k) - log_factorial(m) - log_factorial(n)));
    return norm * sum;
}

namespace {

using Triplets = std::vector<std::tuple<int, int, Complex>>;

// Single-mode R^{m,n} (zero-T when nbar == 0) as nonzero entries on dim d.
Triplets single_mode_eigenstate(int m, int n, double nbar, int d) {
    Triplets out;
    if (m < n) {
        for (auto [i, j, v] : single_mode_eigenstate(n, m, nbar, d)) out.emplace_back(j, i, std::conj(v));
        return out;
    }
    if (nbar == 0.0) {
        for (int k = 0; k <= n; ++k) {
            const double log_mag = 0.5 * (log_factorial(m) + log_factorial(n) - log_factorial(m - k) -
                                          log_factorial(n - k)) -
                                   log_factorial(k);
            const double v = (k % 2 == 0 ? 1.0 : -1.0) * std::exp(log_mag);
            if (m - k < d && n - k < d) out.emplace_back(m - k, n - k, Complex(v, 0.0));
        }
        return out;
    }
    const double x = nbar / (nbar + 1.0);
    const double log_x = std::log(x);
    const int shift = m - n;
    for (int k = 0; k + shift < d; ++k) {
        const double log_pre = 0.5 * (log_factorial(n) + log_factorial(k) - log_factorial(m) -
                                      log_factorial(k + shift)) -
                               (m + 1) * std::log1p(nbar);
        const int l = k - n;
        long double sum = 0.0L;
        for (int j = std::max(0, l); j <= k; ++j) {
            const double log_mag = log_pre + log_factorial(j + m) - log_factorial(j - l) - log_factorial(k - j) -
                                   log_factorial(j) + j * log_x;
            const long double term = std::exp(static_cast<long double>(log_mag));
            sum += ((j - l) % 2 == 0) ? term : -term;
        }
        if (sum != 0.0L) out.emplace_back(k + shift, k, Complex(static_cast<double>(sum), 0.0));
    }
    return out;
}

// Nonzero entries with flat row/column indices.
using FlatTriplets = std::vector<Eigen::Triplet<Complex>>;

// Builds explicit eigenstates for one model; read-only after construction so
// build() may be called concurrently.
class EigenstateFactory {
public:
    explicit EigenstateFactory(const ModelSpec& spec) : spec_(spec), dims_(model_dims(spec)), d_(spec.dim) {
        validate(spec_);
        if (is_two_mode(spec_.tag)) {
            coeffs_ = two_mode_coefficients(spec_);
            nbar_ = spec_.tag == ModelTag::TwoModeThermal ? spec_.nbar : 0.0;
            span_ = 2 * d_ - 1;
            single_.resize(static_cast<std::size_t>(span_ * span_));
            for (int k = 0; k < span_; ++k)
                for (int l = 0; l < span_; ++l) single_[k * span_ + l] = single_mode_eigenstate(k, l, nbar_, d_);
        } else if (!is_two_level(spec_.tag)) {
            nbar_ = spec_.tag == ModelTag::SingleThermal ? spec_.nbar : 0.0;
        }
    }

    FlatTriplets triplets(const IndexTuple& idx) const {
        validate_index(spec_, idx);
        FlatTriplets out;
        if (is_two_level(spec_.tag)) {
            two_level(idx[0], idx[1], out);
        } else if (!is_two_mode(spec_.tag)) {
            for (auto [i, j, v] : single_mode_eigenstate(idx[0], idx[1], nbar_, d_)) out.emplace_back(i, j, v);
        } else {
            two_mode(idx[0], idx[1], idx[2], idx[3], out);
        }
        return out;
    }

    FockOperator dense(const IndexTuple& idx) const {
        const int n = total_dim(dims_);
        Matrix m = Matrix::Zero(n, n);
        for (const auto& t : triplets(idx)) m(t.row(), t.col()) += t.value();
        return FockOperator(dims_, std::move(m));
    }

    SparseOperator sparse(const IndexTuple& idx) const {
        const int n = total_dim(dims_);
        SparseOperator out{dims_, Eigen::SparseMatrix<Complex>(n, n)};
        const FlatTriplets t = triplets(idx);
        out.matrix.setFromTriplets(t.begin(), t.end());
        out.matrix.prune(Complex(0.0, 0.0), 0.0);
        return out;
    }

private:
    void two_level(int p, int q, FlatTriplets& out) const {
        const double nf = two_level_nbar_fermi(spec_);
        if (p == 0 && q == 0) {
            out.emplace_back(0, 0, Complex(1.0 - nf, 0.0));
            out.emplace_back(1, 1, Complex(nf, 0.0));
        } else if (p == 1 && q == 0) {
            out.emplace_back(1, 0, Complex(1.0, 0.0));
        } else if (p == 0 && q == 1) {
            out.emplace_back(0, 1, Complex(1.0, 0.0));
        } else {
            out.emplace_back(0, 0, Complex(-1.0, 0.0));
            out.emplace_back(1, 1, Complex(1.0, 0.0));
        }
    }

    // Sum over k, l of D_k^{mn} conj(D_l^{pq}) R_a^{k,l} (x) R_b^{m+n-k, p+q-l}.
    void two_mode(int m, int n, int p, int q, FlatTriplets& out) const {
        const int d = d_;
        std::vector<Complex> dl(static_cast<std::size_t>(p + q + 1));
        for (int l = 0; l <= p + q; ++l) dl[l] = std::conj(mixing_coefficient_D(l, p, q, coeffs_));
        for (int k = 0; k <= m + n; ++k) {
            const Complex dk = mixing_coefficient_D(k, m, n, coeffs_);
            if (dk == Complex(0.0, 0.0)) continue;
            for (int l = 0; l <= p + q; ++l) {
                const Complex w = dk * dl[l];
                if (w == Complex(0.0, 0.0)) continue;
                const Triplets& a = single_[k * span_ + l];
                const Triplets& b = single_[(m + n - k) * span_ + (p + q - l)];
                for (auto [i, j, va] : a)
                    for (auto [i2, j2, vb] : b) out.emplace_back(i * d + i2, j * d + j2, w * va * vb);
            }
        }
    }

    ModelSpec spec_;
    Dims dims_;
    int d_;
    int span_ = 0;
    double nbar_ = 0.0;
    TwoModeCoefficients coeffs_{};
    std::vector<Triplets> single_;
};

double log_index_factorials(const IndexTuple& idx) {
    double s = 0.0;
    for (int k : idx) s += log_factorial(k);
    return s;
}

Matrix padded_identity(const Dims& dims) { return Matrix::Identity(total_dim(dims), total_dim(dims)); }

IndexTuple slice(const IndexTuple& idx, std::size_t from, std::size_t to) {
    return IndexTuple(idx.begin() + static_cast<long>(from), idx.begin() + static_cast<long>(to));
}

// Repeated application of per-slot superoperators, one cached matrix per
// distinct sub-index. Each tuple is reached from its predecessor with the
// first nonzero slot decremented; the operators commute, so the order is free.
std::map<IndexTuple, Matrix> chain_cache(const std::vector<IndexTuple>& tuples,
                                         const std::vector<CompiledSuperoperator>& ops, const Matrix& seed) {
    std::vector<IndexTuple> sorted = tuples;
    std::sort(sorted.begin(), sorted.end(), index_order);
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::map<IndexTuple, Matrix> cache;
    const IndexTuple zero(ops.size(), 0);
    cache.emplace(zero, seed);
    for (const IndexTuple& t : sorted) {
        if (cache.count(t)) continue;
        // Walk down from t to the nearest cached ancestor, then back up.
        std::vector<std::pair<IndexTuple, std::size_t>> path;
        IndexTuple cur = t;
        while (!cache.count(cur)) {
            std::size_t slot = 0;
            while (cur[slot] == 0) ++slot;
            path.emplace_back(cur, slot);
            --cur[slot];
        }
        Matrix value = cache.at(cur);
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
            value = ops[it->second].apply(value);
            cache.emplace(it->first, value);
        }
    }
    return cache;
}

int coefficient_padding(const ModelSpec& spec, const std::vector<IndexTuple>& indices) {
    // Thermal lowering superoperators contain column- (row-) raising parts,
    // which lose weight at the truncation edge unless the space is padded.
    if (!is_thermal(spec.tag) || is_two_level(spec.tag)) return 0;
    int pad = 0;
    const std::size_t half = indices.empty() ? 0 : indices.front().size() / 2;
    for (const IndexTuple& idx : indices) {
        int first = 0, second = 0;
        for (std::size_t i = 0; i < idx.size(); ++i) (i < half ? first : second) += idx[i];
        pad = std::max({pad, first, second});
    }
    return pad;
}

std::vector<Complex> coefficients_generic(const ModelSpec& spec, const FockOperator& rho0,
                                          const std::vector<IndexTuple>& indices, bool parallel) {
    if (indices.empty()) return {};
    const int pad = coefficient_padding(spec, indices);
    const ModelSpec padded = with_dim(spec, spec.dim + pad);
    const Dims pdims = model_dims(padded);
    const LadderSet set = ladder_set(padded);
    const std::size_t half = set.lowering.size() / 2;
    std::vector<CompiledSuperoperator> first, second;
    for (std::size_t i = 0; i < half; ++i) first.emplace_back(set.lowering[i]);
    for (std::size_t i = half; i < set.lowering.size(); ++i) second.emplace_back(hs_adjoint(set.lowering[i]));

    std::vector<IndexTuple> firsts, seconds;
    for (const IndexTuple& idx : indices) {
        firsts.push_back(slice(idx, 0, half));
        seconds.push_back(slice(idx, half, idx.size()));
    }
    const auto xs = chain_cache(firsts, first, pad_to(rho0, pdims).matrix());
    const auto ys = chain_cache(seconds, second, padded_identity(pdims));

    std::vector<Complex> out(indices.size());
    const long count = static_cast<long>(indices.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_cap()) if (parallel)
    for (long e = 0; e < count; ++e) {
        const Matrix& x = xs.at(firsts[e]);
        const Matrix& y = ys.at(seconds[e]);
        const Complex pairing = (y.conjugate().cwiseProduct(x)).sum();
        out[e] = pairing * std::exp(-0.5 * log_index_factorials(indices[e]));
    }
    return out;
}

// Two modes through single-mode duals. Product coefficients
//   c(k, l) = < Y_a^{k,l} (x) Y_b^{K-k, L-l}, rho0 >
// with Y^{k,l} the normalized single-mode dual, then per (K, L) block
// c = A Ct B^H, where A[k][m] = D_k^{m, K-m} and B[l][p] = D_l^{p, L-p}.
std::vector<Complex> coefficients_two_mode_dual(const ModelSpec& spec, const FockOperator& rho0,
                                                const std::vector<IndexTuple>& indices) {
    if (indices.empty()) return {};
    const int d = spec.dim;
    const double nbar = spec.tag == ModelTag::TwoModeThermal ? spec.nbar : 0.0;
    const TwoModeCoefficients c = two_mode_coefficients(spec);
    int top = 0;
    for (const IndexTuple& idx : indices) top = std::max({top, idx[0] + idx[1], idx[2] + idx[3]});

    // Duals are polynomials of degree k + l in a, a^dag; padding by that degree
    // keeps the d x d block exact.
    const ModelSpec single = ModelSpec::single_thermal(1.0, 1.0, nbar, d + 2 * top);
    const LadderSet set = ladder_set(single);
    const std::vector<CompiledSuperoperator> adj = {CompiledSuperoperator(hs_adjoint(set.lowering[0])),
                                                    CompiledSuperoperator(hs_adjoint(set.lowering[1]))};
    std::vector<IndexTuple> tuples;
    for (int k = 0; k <= top; ++k)
        for (int l = 0; l <= top; ++l) tuples.push_back({k, l});
    const auto ys = chain_cache(tuples, adj, padded_identity({single.dim}));
    const auto dual = [&](int k, int l) -> Matrix {
        return ys.at({k, l}).topLeftCorner(d, d) * std::exp(-0.5 * (log_factorial(k) + log_factorial(l)));
    };

    // z[(k', l')](ia, ja) = sum_{ib, jb} conj(Y_b^{k',l'}(ib, jb)) rho0(ia d + ib, ja d + jb)
    const Matrix& rho = rho0.matrix();
    std::map<std::pair<int, int>, Matrix> z;
    std::map<std::pair<int, int>, Matrix> ya;
    for (int k = 0; k <= top; ++k)
        for (int l = 0; l <= top; ++l) {
            const Matrix yb = dual(k, l).conjugate();
            ya.emplace(std::make_pair(k, l), yb);   // conj(Y^{k,l}), same for both modes
            Matrix zz(d, d);
            for (int ia = 0; ia < d; ++ia)
                for (int ja = 0; ja < d; ++ja)
                    zz(ia, ja) = yb.cwiseProduct(rho.block(ia * d, ja * d, d, d)).sum();
            z.emplace(std::make_pair(k, l), std::move(zz));
        }

    std::map<int, Eigen::PartialPivLU<Matrix>> mixing;
    const auto lu = [&](int K) -> const Eigen::PartialPivLU<Matrix>& {
        auto it = mixing.find(K);
        if (it != mixing.end()) return it->second;
        Matrix a(K + 1, K + 1);
        for (int k = 0; k <= K; ++k)
            for (int m = 0; m <= K; ++m) a(k, m) = mixing_coefficient_D(k, m, K - m, c);
        return mixing.emplace(K, Eigen::PartialPivLU<Matrix>(a)).first->second;
    };

    std::map<std::pair<int, int>, Matrix> blocks;   // Ct[m][p] for (K, L)
    std::vector<Complex> out(indices.size());
    for (std::size_t e = 0; e < indices.size(); ++e) {
        const IndexTuple& idx = indices[e];
        const int K = idx[0] + idx[1], L = idx[2] + idx[3];
        auto it = blocks.find({K, L});
        if (it == blocks.end()) {
            Matrix cp(K + 1, L + 1);
            for (int k = 0; k <= K; ++k)
                for (int l = 0; l <= L; ++l)
                    cp(k, l) = ya.at({k, l}).cwiseProduct(z.at({K - k, L - l})).sum();
            // Ct = A^{-1} cp B^{-H}
            const Matrix left = lu(K).solve(cp);
            const Matrix ct = lu(L).solve(left.adjoint()).adjoint();
            it = blocks.emplace(std::make_pair(K, L), ct).first;
        }
        out[e] = it->second(idx[0], idx[2]);
    }
    return out;
}

std::vector<Complex> compute_coefficients(const ModelSpec& spec, const FockOperator& rho0,
                                          const std::vector<IndexTuple>& indices, bool parallel) {
    require(rho0.dims() == model_dims(spec), ErrorCode::DimensionMismatch, "rho0 dims do not match the model");
    if (is_two_mode(spec.tag)) return coefficients_two_mode_dual(spec, rho0, indices);
    return coefficients_generic(spec, rho0, indices, parallel);
}

} // namespace

FockOperator steady_state(const ModelSpec& spec) {
    return EigenstateFactory(spec).dense(IndexTuple(static_cast<std::size_t>(ladder_pair_count(spec)), 0));
}

FockOperator eigenstate_explicit(const ModelSpec& spec, const IndexTuple& idx) {
    return EigenstateFactory(spec).dense(idx);
}

std::vector<FockOperator> eigenstates_ladder(const ModelSpec& spec, const std::vector<IndexTuple>& indices) {
    validate(spec);
    int pad = 0;
    for (const IndexTuple& idx : indices) {
        validate_index(spec, idx);
        if (!is_two_level(spec.tag)) pad = std::max(pad, std::accumulate(idx.begin(), idx.end(), 0));
    }
    const ModelSpec padded = with_dim(spec, spec.dim + pad);
    const LadderSet set = ladder_set(padded);
    std::vector<CompiledSuperoperator> raise;
    for (const Superoperator& r : set.raising) raise.emplace_back(r);
    const Matrix base = steady_state(padded).matrix();
    std::vector<FockOperator> out;
    out.reserve(indices.size());
    for (const IndexTuple& idx : indices) {
        Matrix state = base;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] == 0) continue;
            for (int s = 0; s < idx[i]; ++s) state = raise[i].apply(state);
            state *= std::exp(-0.5 * log_factorial(idx[i]));
        }
        out.push_back(crop_to(FockOperator(model_dims(padded), std::move(state)), model_dims(spec)));
    }
    return out;
}

FockOperator eigenstate_ladder(const ModelSpec& spec, const IndexTuple& idx) {
    return eigenstates_ladder(spec, {idx}).front();
}

FockOperator SparseOperator::dense() const { return FockOperator(dims, Matrix(matrix)); }

const EigenEntry* EigenTable::find(const IndexTuple& idx) const {
    for (const EigenEntry& e : entries)
        if (e.index.indices == idx) return &e;
    return nullptr;
}

Complex expansion_coefficient(const ModelSpec& spec, const FockOperator& rho0, const IndexTuple& idx) {
    validate(spec);
    validate_index(spec, idx);
    return compute_coefficients(spec, rho0, {idx}, false).front();
}

EigenTable expansion_coefficients(const ModelSpec& spec, const FockOperator& rho0, int max_index,
                                  const CoefficientOptions& opts) {
    validate(spec);
    EigenTable table;
    table.model = spec;
    table.max_index = max_index;
    table.rho0 = rho0;
    const Complex tr = trace(rho0);
    if (std::abs(tr - 1.0) > opts.trace_tolerance) {
        std::ostringstream os;
        os << "initial state trace " << tr.real() << " differs from 1";
        table.warnings.push_back(os.str());
    }
    const std::vector<IndexTuple> indices = index_set(spec, max_index, &table.warnings);
    const std::vector<Complex> shifts = ladder_shifts(spec);
    const std::vector<Complex> coeffs = compute_coefficients(spec, rho0, indices, opts.parallel);

    table.entries.resize(indices.size());
    for (std::size_t e = 0; e < indices.size(); ++e) {
        table.entries[e].index = {indices[e], eigenvalue_of(indices[e], shifts)};
        table.entries[e].coefficient = coeffs[e];
    }
    EigenstateStorage storage = opts.storage;
    if (storage == EigenstateStorage::Auto)
        storage = is_two_mode(spec.tag) ? EigenstateStorage::None : EigenstateStorage::NonZero;
    if (storage != EigenstateStorage::None) {
        const EigenstateFactory factory(spec);
        const long count = static_cast<long>(indices.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_cap()) if (opts.parallel)
        for (long e = 0; e < count; ++e) {
            EigenEntry& entry = table.entries[e];
            if (storage == EigenstateStorage::All || entry.coefficient != Complex(0.0, 0.0))
                entry.eigenstate = factory.sparse(entry.index.indices);
        }
    }
    return table;
}

TwoModeFactorization::TwoModeFactorization(const EigenTable& table) {
    const ModelSpec& spec = table.model;
    if (!is_two_mode(spec.tag)) fail(ErrorCode::InvalidArgument, "two-mode factorization needs a two-mode table");
    d_ = spec.dim;
    span_ = 2 * d_ - 1;
    const double nbar = spec.tag == ModelTag::TwoModeThermal ? spec.nbar : 0.0;
    const TwoModeCoefficients c = two_mode_coefficients(spec);
    single_.resize(static_cast<std::size_t>(span_ * span_));
    for (int k = 0; k < span_; ++k)
        for (int l = 0; l < span_; ++l)
            for (auto [i, j, v] : single_mode_eigenstate(k, l, nbar, d_)) single_[k * span_ + l].emplace_back(i, j, v);
    std::map<std::pair<int, int>, std::vector<Complex>> cache;
    auto coeffs = [&](int m, int n) -> const std::vector<Complex>& {
        auto it = cache.find({m, n});
        if (it != cache.end()) return it->second;
        std::vector<Complex> v(static_cast<std::size_t>(m + n + 1));
        for (int k = 0; k <= m + n; ++k) v[k] = mixing_coefficient_D(k, m, n, c);
        return cache.emplace(std::make_pair(m, n), std::move(v)).first->second;
    };
    for (const EigenEntry& e : table.entries) {
        const IndexTuple& idx = e.index.indices;
        d_left_.push_back(coeffs(idx[0], idx[1]));
        std::vector<Complex> r = coeffs(idx[2], idx[3]);
        for (Complex& z : r) z = std::conj(z);
        d_right_.push_back(std::move(r));
        sums_.emplace_back(idx[0] + idx[1], idx[2] + idx[3]);
    }
}

Matrix TwoModeFactorization::combine(const std::vector<Complex>& weights) const {
    const int top = span_ - 1;
    std::vector<Matrix> w(static_cast<std::size_t>(span_ * span_));
    for (std::size_t e = 0; e < sums_.size(); ++e) {
        if (weights[e] == Complex(0.0, 0.0)) continue;
        const auto [K, L] = sums_[e];
        Matrix& blk = w[K * span_ + L];
        if (blk.size() == 0) blk = Matrix::Zero(K + 1, L + 1);
        const auto& dl = d_left_[e];
        const auto& dr = d_right_[e];
        for (int k = 0; k <= K; ++k) {
            const Complex a = weights[e] * dl[k];
            if (a == Complex(0.0, 0.0)) continue;
            for (int l = 0; l <= L; ++l) blk(k, l) += a * dr[l];
        }
    }
    Matrix out = Matrix::Zero(d_ * d_, d_ * d_);
    for (int K = 0; K <= top; ++K)
        for (int L = 0; L <= top; ++L) {
            const Matrix& blk = w[K * span_ + L];
            if (blk.size() == 0) continue;
            for (int k = 0; k <= K; ++k)
                for (int l = 0; l <= L; ++l) {
                    const Complex x = blk(k, l);
                    if (x == Complex(0.0, 0.0)) continue;
                    const Triplets& a = single_[k * span_ + l];
                    const Triplets& b = single_[(K - k) * span_ + (L - l)];
                    for (const auto& ta : a) {
                        const Complex xa = x * ta.value();
                        for (const auto& tb : b)
                            out(ta.row() * d_ + tb.row(), ta.col() * d_ + tb.col()) += xa * tb.value();
                    }
                }
        }
    return out;
}

Matrix weighted_sum(const EigenTable& table, const std::vector<Complex>& weights) {
    if (weights.size() != table.entries.size()) fail(ErrorCode::InvalidArgument, "weight count mismatch");
    const int d = total_dim(model_dims(table.model));
    bool stored = true;
    for (std::size_t e = 0; e < weights.size(); ++e)
        if (weights[e] != Complex(0.0, 0.0) && !table.entries[e].eigenstate) stored = false;
    if (!stored && is_two_mode(table.model.tag)) return TwoModeFactorization(table).combine(weights);
    std::optional<EigenstateFactory> factory;
    Matrix sum = Matrix::Zero(d, d);
    for (std::size_t e = 0; e < weights.size(); ++e) {
        const Complex w = weights[e];
        if (w == Complex(0.0, 0.0)) continue;
        const EigenEntry& entry = table.entries[e];
        if (entry.eigenstate) {
            const auto& sp = entry.eigenstate->matrix;
            for (int col = 0; col < sp.outerSize(); ++col)
                for (Eigen::SparseMatrix<Complex>::InnerIterator it(sp, col); it; ++it)
                    sum(it.row(), it.col()) += w * it.value();
        } else {
            if (!factory) factory.emplace(table.model);
            for (const auto& t : factory->triplets(entry.index.indices)) sum(t.row(), t.col()) += w * t.value();
        }
    }
    return sum;
}

std::string to_string(ConvergenceStatus s) {
    switch (s) {
    case ConvergenceStatus::Converged: return "CONVERGED";
    case ConvergenceStatus::NotConverged: return "NOT_CONVERGED";
    case ConvergenceStatus::Divergent: return "DIVERGENT";
    }
    return "UNKNOWN";
}

std::string ConvergenceReport::summary() const {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << to_string(status) << " max_partial=" << std::setprecision(6) << max_partial << " bound=" << bound
       << " element=(" << worst_row << "," << worst_col << ")";
    if (!divergent_elements.empty())
        os << " divergent_elements=" << divergent_elements.size() << " first=(" << divergent_elements.front().first
           << "," << divergent_elements.front().second << ")";
    os << " shells=" << shell_increments.size();
    if (!shell_increments.empty()) os << " last_increment=" << shell_increments.back();
    return os.str();
}

bool ConvergenceReport::flags(int row, int col) const {
    return std::find(divergent_elements.begin(), divergent_elements.end(), std::make_pair(row, col)) !=
           divergent_elements.end();
}

ConvergenceReport convergence_diagnostic(const EigenTable& table, const ConvergenceOptions& opts) {
    ConvergenceReport report;
    const Dims dims = model_dims(table.model);
    const int d = total_dim(dims);
    report.bound = opts.bound_factor * frobenius_norm(table.rho0);
    int top_shell = 0;
    for (const EigenEntry& e : table.entries)
        top_shell = std::max(top_shell, *std::max_element(e.index.indices.begin(), e.index.indices.end()));
    std::optional<TwoModeFactorization> fact;
    if (is_two_mode(table.model.tag)) fact.emplace(table);
    Matrix running = Matrix::Zero(d, d);
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> over = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(d, d, false);
    std::vector<Complex> shell_w(table.entries.size());
    for (int shell = 0; shell <= top_shell; ++shell) {
        bool any = false;
        for (std::size_t i = 0; i < shell_w.size(); ++i) {
            const IndexTuple& idx = table.entries[i].index.indices;
            shell_w[i] =
                *std::max_element(idx.begin(), idx.end()) == shell ? table.entries[i].coefficient : Complex(0.0, 0.0);
            any = any || shell_w[i] != Complex(0.0, 0.0);
        }
        const Matrix inc = !any ? Matrix(Matrix::Zero(d, d)) : fact ? fact->combine(shell_w) : weighted_sum(table, shell_w);
        running += inc;
        over = over || (running.array().abs() > report.bound);
        report.shell_increments.push_back(inc.cwiseAbs().maxCoeff());
        Eigen::Index r = 0, c = 0;
        const double peak = running.cwiseAbs().maxCoeff(&r, &c);
        if (peak > report.max_partial) {
            report.max_partial = peak;
            report.worst_row = static_cast<int>(r);
            report.worst_col = static_cast<int>(c);
        }
    }
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            if (over(r, c)) report.divergent_elements.emplace_back(r, c);
    if (report.max_partial > report.bound) {
        report.status = ConvergenceStatus::Divergent;
        return report;
    }
    const auto& inc = report.shell_increments;
    const std::size_t w = static_cast<std::size_t>(std::max(opts.window, 1));
    const double floor = 1e-14 * std::max(frobenius_norm(table.rho0), 1e-300);
    if (inc.size() >= w && inc.back() > floor) {
        bool rising = true;
        for (std::size_t i = inc.size() - w + 1; i < inc.size(); ++i)
            if (inc[i] < inc[i - 1]) rising = false;
        if (rising) report.status = ConvergenceStatus::NotConverged;
    }
    return report;
}

FockOperator reconstruct_unchecked(const EigenTable& table) {
    std::vector<Complex> w;
    w.reserve(table.entries.size());
    for (const EigenEntry& e : table.entries) w.push_back(e.coefficient);
    return FockOperator(model_dims(table.model), weighted_sum(table, w));
}

FockOperator reconstruct(const EigenTable& table, const ConvergenceOptions& opts) {
    const ConvergenceReport report = convergence_diagnostic(table, opts);
    if (report.status != ConvergenceStatus::Converged)
        fail(ErrorCode::Divergence, "expansion does not converge: " + report.summary());
    return reconstruct_unchecked(table);
}

void write_table(std::ostream& out, const EigenTable& table) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17);
    for (const EigenEntry& e : table.entries) {
        for (int k : e.index.indices) os << k << ' ';
        os << e.index.eigenvalue.real() << ' ' << e.index.eigenvalue.imag() << ' ' << e.coefficient.real() << ' '
           << e.coefficient.imag() << '\n';
    }
    out << os.str();
}

} // namespace lindblad
