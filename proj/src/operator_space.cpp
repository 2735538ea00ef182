#include "lindblad_modes/operator_space.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lindblad_modes/errors.hpp"
#include "lindblad_modes/special.hpp"

namespace lindblad {

int total_dim(const Dims& dims) {
    return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

FockOperator::FockOperator(Dims dims, Matrix entries) : dims_(std::move(dims)), entries_(std::move(entries)) {
    require(!dims_.empty(), ErrorCode::InvalidArgument, "operator needs at least one factor");
    for (int d : dims_) require(d >= 1, ErrorCode::InvalidArgument, "factor dimension must be >= 1");
    const int n = total_dim(dims_);
    require(entries_.rows() == n && entries_.cols() == n, ErrorCode::DimensionMismatch,
            "matrix side " + std::to_string(entries_.rows()) + "x" + std::to_string(entries_.cols()) +
                " does not match product of dims " + std::to_string(n));
}

FockOperator FockOperator::zero(const Dims& dims) {
    const int n = total_dim(dims);
    return FockOperator(dims, Matrix::Zero(n, n));
}

FockOperator FockOperator::identity(const Dims& dims) {
    const int n = total_dim(dims);
    return FockOperator(dims, Matrix::Identity(n, n));
}

void require_same_dims(const FockOperator& a, const FockOperator& b, const char* where) {
    if (a.dims() != b.dims()) fail(ErrorCode::DimensionMismatch, std::string(where) + ": operand dims differ");
}

FockOperator& FockOperator::operator+=(const FockOperator& other) {
    require_same_dims(*this, other, "operator+");
    entries_ += other.entries_;
    return *this;
}

FockOperator& FockOperator::operator-=(const FockOperator& other) {
    require_same_dims(*this, other, "operator-");
    entries_ -= other.entries_;
    return *this;
}

FockOperator& FockOperator::operator*=(Complex c) {
    entries_ *= c;
    return *this;
}

FockOperator operator+(FockOperator a, const FockOperator& b) { return a += b; }
FockOperator operator-(FockOperator a, const FockOperator& b) { return a -= b; }
FockOperator operator*(Complex c, FockOperator a) { return a *= c; }

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
    require_same_dims(a, b, "operator product");
    return FockOperator(a.dims(), a.matrix() * b.matrix());
}

FockOperator fock_ket_bra(int k, int l, int dim) {
    require(dim >= 1, ErrorCode::InvalidArgument, "dimension must be >= 1");
    require(k >= 0 && k < dim && l >= 0 && l < dim, ErrorCode::IndexOutOfRange,
            "ket-bra index (" + std::to_string(k) + "," + std::to_string(l) + ") outside dimension " +
                std::to_string(dim));
    Matrix m = Matrix::Zero(dim, dim);
    m(k, l) = 1.0;
    return FockOperator({dim}, std::move(m));
}

FockOperator annihilation(int dim) {
    require(dim >= 1, ErrorCode::InvalidArgument, "dimension must be >= 1");
    Matrix m = Matrix::Zero(dim, dim);
    for (int k = 1; k < dim; ++k) m(k - 1, k) = std::sqrt(static_cast<double>(k));
    return FockOperator({dim}, std::move(m));
}

FockOperator creation(int dim) { return adjoint(annihilation(dim)); }

FockOperator number_operator(int dim) {
    Matrix m = Matrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) m(k, k) = static_cast<double>(k);
    return FockOperator({dim}, std::move(m));
}

FockOperator embed(const FockOperator& single, int mode, const Dims& dims) {
    require(single.dims().size() == 1, ErrorCode::InvalidArgument, "embed expects a single-factor operator");
    require(mode >= 0 && mode < static_cast<int>(dims.size()), ErrorCode::IndexOutOfRange, "embed: bad mode");
    require(single.dims()[0] == dims[mode], ErrorCode::DimensionMismatch, "embed: factor dimension mismatch");
    if (dims.size() == 1) return single;
    FockOperator out = FockOperator::identity({dims[0]});
    for (std::size_t f = 0; f < dims.size(); ++f) {
        const FockOperator factor = static_cast<int>(f) == mode ? single : FockOperator::identity({dims[f]});
        out = f == 0 ? factor : tensor(out, factor);
    }
    return out;
}

FockOperator tensor(const FockOperator& a, const FockOperator& b) {
    const Eigen::Index na = a.side(), nb = b.side();
    Matrix m(na * nb, na * nb);
    for (Eigen::Index i = 0; i < na; ++i)
        for (Eigen::Index j = 0; j < na; ++j) m.block(i * nb, j * nb, nb, nb) = a(i, j) * b.matrix();
    Dims dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    return FockOperator(std::move(dims), std::move(m));
}

FockOperator adjoint(const FockOperator& a) { return FockOperator(a.dims(), a.matrix().adjoint()); }

Complex trace(const FockOperator& a) { return a.matrix().trace(); }

double frobenius_norm(const FockOperator& a) { return a.matrix().norm(); }

Complex hs_inner(const FockOperator& a, const FockOperator& b) {
    require_same_dims(a, b, "hs_inner");
    return (a.matrix().conjugate().cwiseProduct(b.matrix())).sum();
}

double trace_distance(const FockOperator& a, const FockOperator& b) {
    require_same_dims(a, b, "trace_distance");
    const Matrix diff = a.matrix() - b.matrix();
    Eigen::BDCSVD<Matrix> svd(diff);
    return 0.5 * svd.singularValues().sum();
}

bool is_hermitian(const FockOperator& a, double tol) {
    return (a.matrix() - a.matrix().adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double min_eigenvalue_hermitian(const FockOperator& a, double tol) {
    require(is_hermitian(a, tol), ErrorCode::NonHermitian, "min_eigenvalue_hermitian: input is not Hermitian");
    const Matrix h = 0.5 * (a.matrix() + a.matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double purity(const FockOperator& rho) {
    // tr(rho^2) without forming the product.
    return (rho.matrix().transpose().cwiseProduct(rho.matrix())).sum().real();
}

FockOperator partial_trace(const FockOperator& a, int keep) {
    const Dims& dims = a.dims();
    if (dims.size() == 1) {
        require(keep == 0, ErrorCode::IndexOutOfRange, "partial_trace: bad factor");
        return a;
    }
    require(dims.size() == 2, ErrorCode::Unsupported, "partial_trace supports at most two factors");
    require(keep == 0 || keep == 1, ErrorCode::IndexOutOfRange, "partial_trace: bad factor");
    const int da = dims[0], db = dims[1];
    const int dk = dims[keep];
    Matrix out = Matrix::Zero(dk, dk);
    const Matrix& m = a.matrix();
    if (keep == 0) {
        for (int ia = 0; ia < da; ++ia)
            for (int ja = 0; ja < da; ++ja)
                for (int ib = 0; ib < db; ++ib) out(ia, ja) += m(ia * db + ib, ja * db + ib);
    } else {
        for (int ib = 0; ib < db; ++ib)
            for (int jb = 0; jb < db; ++jb)
                for (int ia = 0; ia < da; ++ia) out(ib, jb) += m(ia * db + ib, ia * db + jb);
    }
    return FockOperator({dk}, std::move(out));
}

namespace {

Matrix psd_sqrt(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

// Maps a flat index of `from` to the flat index in `to` (same factor count);
// returns -1 when any factor index falls outside `to`.
Eigen::Index remap(Eigen::Index flat, const Dims& from, const Dims& to) {
    Eigen::Index out = 0;
    Eigen::Index stride_from = 1;
    Eigen::Index stride_to = 1;
    for (int f = static_cast<int>(from.size()) - 1; f >= 0; --f) {
        const Eigen::Index idx = (flat / stride_from) % from[f];
        if (idx >= to[f]) return -1;
        out += idx * stride_to;
        stride_from *= from[f];
        stride_to *= to[f];
    }
    return out;
}

FockOperator reshape_dims(const FockOperator& a, const Dims& dims) {
    require(dims.size() == a.dims().size(), ErrorCode::DimensionMismatch, "resize: factor count differs");
    const int n = total_dim(dims);
    Matrix out = Matrix::Zero(n, n);
    const Eigen::Index side = a.side();
    std::vector<Eigen::Index> map(side);
    for (Eigen::Index i = 0; i < side; ++i) map[i] = remap(i, a.dims(), dims);
    for (Eigen::Index j = 0; j < side; ++j) {
        if (map[j] < 0) continue;
        for (Eigen::Index i = 0; i < side; ++i) {
            if (map[i] < 0) continue;
            out(map[i], map[j]) = a(i, j);
        }
    }
    return FockOperator(dims, std::move(out));
}

} // namespace

double fidelity(const FockOperator& rho, const FockOperator& sigma) {
    require_same_dims(rho, sigma, "fidelity");
    const Matrix s = psd_sqrt(rho.matrix());
    const Matrix inner = s * sigma.matrix() * s;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
    const double f = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return f * f;
}

FockOperator pad_to(const FockOperator& a, const Dims& dims) {
    for (std::size_t f = 0; f < dims.size() && f < a.dims().size(); ++f)
        require(dims[f] >= a.dims()[f], ErrorCode::InvalidArgument, "pad_to: target smaller than source");
    return reshape_dims(a, dims);
}

FockOperator crop_to(const FockOperator& a, const Dims& dims) {
    for (std::size_t f = 0; f < dims.size() && f < a.dims().size(); ++f)
        require(dims[f] <= a.dims()[f], ErrorCode::InvalidArgument, "crop_to: target larger than source");
    return reshape_dims(a, dims);
}

double coherent_tail_weight(Complex alpha, int dim) {
    // Sum of the Poisson tail from k = dim on; terms past the mode decay geometrically.
    const double r2 = std::norm(alpha);
    if (r2 == 0.0) return 0.0;
    double log_term = -r2 + dim * std::log(r2) - log_factorial(dim);
    double sum = 0.0;
    for (int k = dim; k < dim + 10000; ++k) {
        const double term = std::exp(log_term);
        sum += term;
        if (k > r2 && term < 1e-18 * std::max(sum, 1e-300)) break;
        log_term += std::log(r2) - std::log(k + 1.0);
    }
    return sum;
}

double thermal_tail_weight(double nbar, int dim) {
    if (nbar == 0.0) return 0.0;
    return std::pow(nbar / (nbar + 1.0), dim);
}

FockOperator coherent_density(Complex alpha, int dim, const TruncationOptions& opts, StateMetadata* meta) {
    require(dim >= 1, ErrorCode::InvalidArgument, "coherent_density: dimension must be >= 1");
    const double tail = coherent_tail_weight(alpha, dim);
    if (tail > opts.tail_tolerance) {
        std::ostringstream msg;
        msg << "coherent state |alpha|=" << std::abs(alpha) << " loses tail weight " << tail << " at dim " << dim;
        if (opts.strict) fail(ErrorCode::TruncationStrict, msg.str());
        if (meta) meta->warnings.push_back(msg.str());
    }
    Eigen::VectorXcd amp(dim);
    amp(0) = std::exp(-0.5 * std::norm(alpha));
    for (int k = 1; k < dim; ++k) amp(k) = amp(k - 1) * alpha / std::sqrt(static_cast<double>(k));
    const double kept = amp.squaredNorm();
    if (meta) meta->discarded_weight += tail;
    return FockOperator({dim}, amp * amp.adjoint() / kept);
}

FockOperator thermal_density(double nbar, int dim, const TruncationOptions& opts, StateMetadata* meta) {
    require(nbar >= 0.0 && std::isfinite(nbar), ErrorCode::InvalidArgument, "thermal_density: nbar must be >= 0");
    require(dim >= 1, ErrorCode::InvalidArgument, "thermal_density: dimension must be >= 1");
    const double tail = thermal_tail_weight(nbar, dim);
    if (tail > opts.tail_tolerance) {
        std::ostringstream msg;
        msg << "thermal state nbar=" << nbar << " loses tail weight " << tail << " at dim " << dim;
        if (opts.strict) fail(ErrorCode::TruncationStrict, msg.str());
        if (meta) meta->warnings.push_back(msg.str());
    }
    const double x = nbar / (nbar + 1.0);
    Matrix m = Matrix::Zero(dim, dim);
    double p = 1.0 / (nbar + 1.0);
    double kept = 0.0;
    for (int k = 0; k < dim; ++k) {
        m(k, k) = p;
        kept += p;
        p *= x;
    }
    if (meta) meta->discarded_weight += tail;
    return FockOperator({dim}, m / kept);
}

FockOperator two_level_thermal_density(double excited_population) {
    require(excited_population >= 0.0 && excited_population <= 1.0, ErrorCode::InvalidArgument,
            "two-level excited population must lie in [0,1]");
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0 - excited_population;
    m(1, 1) = excited_population;
    return FockOperator({2}, std::move(m));
}

StateSpec StateSpec::fock(int n) {
    StateSpec s;
    s.kind = Kind::Fock;
    s.fock_n = n;
    return s;
}

StateSpec StateSpec::coherent(Complex alpha) {
    StateSpec s;
    s.kind = Kind::Coherent;
    s.alpha = alpha;
    return s;
}

StateSpec StateSpec::thermal(double nbar0) {
    StateSpec s;
    s.kind = Kind::Thermal;
    s.nbar0 = nbar0;
    return s;
}

StateSpec StateSpec::two_level_thermal(double excited_population) {
    StateSpec s;
    s.kind = Kind::TwoLevelThermal;
    s.excited_population = excited_population;
    return s;
}

StateSpec StateSpec::product(StateSpec a, StateSpec b) {
    StateSpec s;
    s.kind = Kind::Product;
    s.factors = {std::move(a), std::move(b)};
    return s;
}

StateSpec StateSpec::explicit_matrix(std::string path) {
    StateSpec s;
    s.kind = Kind::Explicit;
    s.path = std::move(path);
    return s;
}

std::string to_string(StateSpec::Kind kind) {
    switch (kind) {
    case StateSpec::Kind::Fock: return "fock";
    case StateSpec::Kind::Coherent: return "coherent";
    case StateSpec::Kind::Thermal: return "thermal";
    case StateSpec::Kind::TwoLevelThermal: return "two-level-thermal";
    case StateSpec::Kind::Product: return "product";
    case StateSpec::Kind::Explicit: return "explicit";
    }
    return "unknown";
}

void validate(const StateSpec& spec) {
    switch (spec.kind) {
    case StateSpec::Kind::Fock:
        require(spec.fock_n >= 0, ErrorCode::InvalidArgument, "fock state index must be >= 0");
        break;
    case StateSpec::Kind::Coherent:
        require(std::isfinite(spec.alpha.real()) && std::isfinite(spec.alpha.imag()), ErrorCode::InvalidArgument,
                "coherent amplitude must be finite");
        break;
    case StateSpec::Kind::Thermal:
        require(spec.nbar0 >= 0.0 && std::isfinite(spec.nbar0), ErrorCode::InvalidArgument,
                "thermal occupation must be >= 0");
        break;
    case StateSpec::Kind::TwoLevelThermal:
        require(spec.excited_population >= 0.0 && spec.excited_population <= 1.0, ErrorCode::InvalidArgument,
                "two-level population must lie in [0,1]");
        break;
    case StateSpec::Kind::Product:
        require(spec.factors.size() == 2, ErrorCode::InvalidArgument, "product state needs exactly two factors");
        for (const auto& f : spec.factors) {
            require(f.kind != StateSpec::Kind::Product && f.kind != StateSpec::Kind::Explicit,
                    ErrorCode::Unsupported, "product factors must be single-mode states");
            validate(f);
        }
        break;
    case StateSpec::Kind::Explicit:
        require(!spec.path.empty(), ErrorCode::InvalidArgument, "explicit state needs a file path");
        break;
    }
}

FockOperator build_state(const StateSpec& spec, const Dims& dims, const TruncationOptions& opts,
                         StateMetadata* meta) {
    validate(spec);
    const auto single_dim = [&] {
        require(dims.size() == 1, ErrorCode::DimensionMismatch,
                to_string(spec.kind) + " state needs a single-factor space");
        return dims[0];
    };
    switch (spec.kind) {
    case StateSpec::Kind::Fock: {
        const int d = single_dim();
        return fock_ket_bra(spec.fock_n, spec.fock_n, d);
    }
    case StateSpec::Kind::Coherent: return coherent_density(spec.alpha, single_dim(), opts, meta);
    case StateSpec::Kind::Thermal: return thermal_density(spec.nbar0, single_dim(), opts, meta);
    case StateSpec::Kind::TwoLevelThermal:
        require(dims == Dims{2}, ErrorCode::DimensionMismatch, "two-level state needs dims {2}");
        return two_level_thermal_density(spec.excited_population);
    case StateSpec::Kind::Product: {
        require(dims.size() == 2, ErrorCode::DimensionMismatch, "product state needs a two-factor space");
        return tensor(build_state(spec.factors[0], {dims[0]}, opts, meta),
                      build_state(spec.factors[1], {dims[1]}, opts, meta));
    }
    case StateSpec::Kind::Explicit: {
        FockOperator rho = read_explicit_matrix(spec.path);
        require(rho.dims() == dims, ErrorCode::DimensionMismatch, "explicit state dims do not match the model");
        return rho;
    }
    }
    fail(ErrorCode::Unsupported, "unknown state kind");
}

FockOperator parse_explicit_matrix(std::istream& in, double tol) {
    Dims dims;
    Matrix m;
    std::string line;
    int line_no = 0;
    const auto bad = [&](const std::string& why) {
        fail(ErrorCode::Parse, "explicit matrix line " + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        ls.imbue(std::locale::classic());
        std::string first;
        if (!(ls >> first)) continue;
        if (dims.empty()) {
            if (first != "dims") bad("expected header 'dims d1 [d2]'");
            int d = 0;
            while (ls >> d) {
                if (d < 1) bad("dimension must be >= 1");
                dims.push_back(d);
            }
            if (dims.empty() || dims.size() > 2) bad("header must list one or two dimensions");
            const int n = total_dim(dims);
            m = Matrix::Zero(n, n);
            continue;
        }
        std::istringstream row(line);
        row.imbue(std::locale::classic());
        long i = 0, j = 0;
        double re = 0, im = 0;
        if (!(row >> i >> j >> re >> im)) bad("expected 'i j re im'");
        std::string extra;
        if (row >> extra) bad("trailing tokens");
        if (i < 0 || j < 0 || i >= m.rows() || j >= m.cols()) bad("index out of range");
        m(i, j) = Complex(re, im);
    }
    if (dims.empty()) fail(ErrorCode::Parse, "explicit matrix: missing 'dims' header");
    FockOperator rho(dims, std::move(m));
    require(is_hermitian(rho, tol), ErrorCode::InvalidArgument, "explicit matrix is not Hermitian");
    require(std::abs(trace(rho) - 1.0) <= tol, ErrorCode::InvalidArgument, "explicit matrix does not have unit trace");
    require(min_eigenvalue_hermitian(rho, tol) >= -tol, ErrorCode::InvalidArgument,
            "explicit matrix is not positive semidefinite");
    return rho;
}

FockOperator read_explicit_matrix(const std::string& path, double tol) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::Parse, "cannot open explicit matrix file '" + path + "'");
    return parse_explicit_matrix(in, tol);
}

void write_explicit_matrix(std::ostream& out, const FockOperator& rho) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << "dims";
    for (int d : rho.dims()) os << ' ' << d;
    os << '\n' << std::setprecision(17);
    for (Eigen::Index i = 0; i < rho.side(); ++i)
        for (Eigen::Index j = 0; j < rho.side(); ++j)
            if (rho(i, j) != Complex(0.0, 0.0))
                os << i << ' ' << j << ' ' << rho(i, j).real() << ' ' << rho(i, j).imag() << '\n';
    out << os.str();
}

} // namespace lindblad
