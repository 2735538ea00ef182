#include "lindblad_modes/models.hpp"

#include <algorithm>
#include <cmath>

#include "lindblad_modes/errors.hpp"

namespace lindblad {

ModelSpec ModelSpec::single_zero_t(double omega, double gamma, int dim) {
    ModelSpec s;
    s.tag = ModelTag::SingleZeroT;
    s.omega = omega;
    s.gamma = gamma;
    s.dim = dim;
    return s;
}

ModelSpec ModelSpec::single_thermal(double omega, double gamma, double nbar, int dim) {
    ModelSpec s = single_zero_t(omega, gamma, dim);
    s.tag = ModelTag::SingleThermal;
    s.nbar = nbar;
    return s;
}

ModelSpec ModelSpec::two_level_thermal(double omega, double gamma, double nbar) {
    ModelSpec s = single_thermal(omega, gamma, nbar, 2);
    s.tag = ModelTag::TwoLevelThermal;
    return s;
}

ModelSpec ModelSpec::two_mode_zero_t(double omega_a, double omega_b, double gamma_a, double gamma_b, Complex g,
                                     Complex gamma_c, int dim) {
    ModelSpec s;
    s.tag = ModelTag::TwoModeZeroT;
    s.omega_a = omega_a;
    s.omega_b = omega_b;
    s.gamma_a = gamma_a;
    s.gamma_b = gamma_b;
    s.g = g;
    s.gamma_c = gamma_c;
    s.dim = dim;
    return s;
}

ModelSpec ModelSpec::two_mode_thermal(double omega_a, double omega_b, double gamma_a, double gamma_b, Complex g,
                                      Complex gamma_c, double nbar, int dim) {
    ModelSpec s = two_mode_zero_t(omega_a, omega_b, gamma_a, gamma_b, g, gamma_c, dim);
    s.tag = ModelTag::TwoModeThermal;
    s.nbar = nbar;
    return s;
}

std::string to_string(ModelTag tag) {
    switch (tag) {
    case ModelTag::SingleZeroT: return "single-zero-T";
    case ModelTag::SingleThermal: return "single-thermal";
    case ModelTag::TwoLevelThermal: return "two-level-thermal";
    case ModelTag::TwoModeZeroT: return "two-mode-zero-T";
    case ModelTag::TwoModeThermal: return "two-mode-thermal";
    }
    return "unknown";
}

ModelTag parse_model_tag(const std::string& s) {
    for (ModelTag t : {ModelTag::SingleZeroT, ModelTag::SingleThermal, ModelTag::TwoLevelThermal,
                       ModelTag::TwoModeZeroT, ModelTag::TwoModeThermal})
        if (to_string(t) == s) return t;
    fail(ErrorCode::Parse, "unknown model tag '" + s + "'");
}

bool is_two_mode(ModelTag tag) { return tag == ModelTag::TwoModeZeroT || tag == ModelTag::TwoModeThermal; }
bool is_thermal(ModelTag tag) { return tag != ModelTag::SingleZeroT && tag != ModelTag::TwoModeZeroT; }
bool is_two_level(ModelTag tag) { return tag == ModelTag::TwoLevelThermal; }

void validate(const ModelSpec& spec) {
    const auto finite = [](double v) { return std::isfinite(v); };
    if (is_thermal(spec.tag))
        require(spec.nbar >= 0.0 && finite(spec.nbar), ErrorCode::InvalidArgument, "nbar must be >= 0");
    if (is_two_mode(spec.tag)) {
        require(spec.gamma_a > 0.0 && spec.gamma_b > 0.0, ErrorCode::InvalidArgument,
                "gamma_a and gamma_b must be > 0");
        require(finite(spec.omega_a) && finite(spec.omega_b), ErrorCode::InvalidArgument, "frequencies must be finite");
        const double bound = std::sqrt(spec.gamma_a * spec.gamma_b);
        require(std::abs(spec.gamma_c) <= bound * (1.0 + 1e-12), ErrorCode::InvalidArgument,
                "|gamma_c| exceeds sqrt(gamma_a gamma_b)");
        require(spec.dim >= 2, ErrorCode::InvalidArgument, "per-mode dimension must be >= 2");
    } else {
        require(spec.gamma > 0.0, ErrorCode::InvalidArgument, "gamma must be > 0");
        require(finite(spec.omega), ErrorCode::InvalidArgument, "omega must be finite");
        if (is_two_level(spec.tag))
            require(spec.dim == 2, ErrorCode::InvalidArgument, "two-level system has dimension 2");
        else
            require(spec.dim >= 2, ErrorCode::InvalidArgument, "Fock dimension must be >= 2");
    }
}

Dims model_dims(const ModelSpec& spec) {
    if (is_two_mode(spec.tag)) return {spec.dim, spec.dim};
    if (is_two_level(spec.tag)) return {2};
    return {spec.dim};
}

int ladder_pair_count(const ModelSpec& spec) { return is_two_mode(spec.tag) ? 4 : 2; }

ModelSpec with_dim(ModelSpec spec, int dim) {
    if (!is_two_level(spec.tag)) spec.dim = dim;
    return spec;
}

double reference_rate(const ModelSpec& spec) {
    if (is_two_mode(spec.tag)) return std::max(spec.gamma_a, spec.gamma_b);
    if (is_two_level(spec.tag)) return two_level_rate(spec);
    return spec.gamma;
}

double two_level_nbar_fermi(const ModelSpec& spec) { return spec.nbar / (2.0 * spec.nbar + 1.0); }
double two_level_rate(const ModelSpec& spec) { return spec.gamma * (2.0 * spec.nbar + 1.0); }

ReservoirCase reservoir_case(const ModelSpec& spec, double tol) {
    const double c = std::abs(spec.gamma_c);
    if (c <= tol) return ReservoirCase::Separate;
    const double bound = std::sqrt(spec.gamma_a * spec.gamma_b);
    if (std::abs(c - bound) <= tol * std::max(1.0, bound)) return ReservoirCase::Common;
    return ReservoirCase::Intermediate;
}

std::string to_string(ReservoirCase c) {
    switch (c) {
    case ReservoirCase::Separate: return "separate";
    case ReservoirCase::Common: return "common";
    case ReservoirCase::Intermediate: return "intermediate";
    }
    return "unknown";
}

namespace {

// Picks an eigenvalue-sigma*Delta eigenvector pair of [[S, U], [V, -S]] and
// normalizes it as r = i w1/sqrt(Y), s = i w2/sqrt(Y), u = sigma z1/sqrt(Y),
// v = sigma z2/sqrt(Y) with Y = sigma i (z.w). With w = (S+sigma Delta, V),
// z = (S+sigma Delta, U) this is exactly the closed-form coefficient set; the
// alternate pair (U, sigma Delta - S), (V, sigma Delta - S) takes over when
// the closed form is 0/0 (uncoupled modes).
void normal_mode(const Complex& S, const Complex& U, const Complex& V, const Complex& Delta, double sigma,
                 Complex& r, Complex& s, Complex& u, Complex& v) {
    const Complex sd = S + sigma * Delta;
    Complex w1 = sd, w2 = V, z1 = sd, z2 = U;
    Complex dot = z1 * w1 + z2 * w2;
    const double scale = std::max({std::abs(S), std::abs(U), std::abs(V), std::abs(Delta)});
    if (std::abs(dot) < 1e-8 * scale * scale) {
        const Complex alt = sigma * Delta - S;
        const Complex aw1 = U, aw2 = alt, az1 = V, az2 = alt;
        const Complex adot = az1 * aw1 + az2 * aw2;
        if (std::abs(adot) > std::abs(dot)) {
            w1 = aw1;
            w2 = aw2;
            z1 = az1;
            z2 = az2;
            dot = adot;
        }
    }
    const Complex root = std::sqrt(sigma * kI * dot);
    r = kI * w1 / root;
    s = kI * w2 / root;
    u = sigma * z1 / root;
    v = sigma * z2 / root;
}

void add_dissipator(Superoperator& out, Complex rate, const FockOperator& jump, const FockOperator& partner) {
    // rate/2 (2 A rho B - B A rho - rho B A)
    const FockOperator ba = partner * jump;
    const FockOperator id = FockOperator::identity(jump.dims());
    out.add_term(rate, jump, partner);
    out.add_term(-0.5 * rate, ba, id);
    out.add_term(-0.5 * rate, id, ba);
}

void add_hamiltonian(Superoperator& out, const FockOperator& h) {
    const FockOperator id = FockOperator::identity(h.dims());
    out.add_term(-kI, h, id);
    out.add_term(kI, id, h);
}

struct ModeOps {
    FockOperator a, ad;
};

ModeOps mode_ops(const Dims& dims, int mode) {
    const FockOperator a = embed(annihilation(dims[mode]), mode, dims);
    return {a, adjoint(a)};
}

Superoperator left_of(const FockOperator& a) { return Superoperator::left(a); }
Superoperator right_of(const FockOperator& a) { return Superoperator::right(a); }

// Single-mode ladder atoms: raise_m = a^dag. - .a^dag, raise_n = .a - a.,
// and the lowering atoms with thermal weights (nbar = 0 gives a. and .a^dag).
struct ModeLadder {
    Superoperator raise_m, raise_n, lower_m, lower_n;
};

ModeLadder mode_ladder(const ModeOps& ops, double nbar) {
    ModeLadder l;
    l.raise_m = left_of(ops.ad) - right_of(ops.ad);
    l.raise_n = right_of(ops.a) - left_of(ops.a);
    if (nbar == 0.0) {
        l.lower_m = left_of(ops.a);
        l.lower_n = right_of(ops.ad);
    } else {
        l.lower_m = Complex(nbar + 1.0) * left_of(ops.a) - Complex(nbar) * right_of(ops.a);
        l.lower_n = Complex(nbar + 1.0) * right_of(ops.ad) - Complex(nbar) * left_of(ops.ad);
    }
    return l;
}

FockOperator sigma_minus() { return fock_ket_bra(0, 1, 2); }
FockOperator sigma_plus() { return fock_ket_bra(1, 0, 2); }
FockOperator sigma_z() { return fock_ket_bra(1, 1, 2) - fock_ket_bra(0, 0, 2); }

} // namespace

TwoModeCoefficients two_mode_coefficients(const ModelSpec& spec) {
    validate(spec);
    require(is_two_mode(spec.tag), ErrorCode::InvalidArgument, "two_mode_coefficients needs a two-mode model");
    TwoModeCoefficients c;
    c.U = spec.g - 0.5 * kI * spec.gamma_c;
    c.V = std::conj(spec.g) - 0.5 * kI * std::conj(spec.gamma_c);
    c.S = Complex(0.5 * (spec.omega_a - spec.omega_b), -0.25 * (spec.gamma_a - spec.gamma_b));
    c.R = Complex(0.5 * (spec.omega_a + spec.omega_b), -0.25 * (spec.gamma_a + spec.gamma_b));
    Complex delta = std::sqrt(c.S * c.S + c.U * c.V);
    if (delta.real() < 0.0 || (delta.real() == 0.0 && delta.imag() < 0.0)) delta = -delta;
    const double scale = std::max({std::abs(c.S), std::abs(c.U), std::abs(c.V), 1.0});
    if (std::abs(delta) < 1e-12 * scale)
        fail(ErrorCode::Degeneracy, "two-mode spectrum is degenerate (Delta = 0, exceptional point)");
    if (spec.branch == DeltaBranch::Flipped) delta = -delta;
    c.Delta = delta;
    c.lambda_plus = -kI * c.R - kI * delta;
    c.lambda_minus = -kI * c.R + kI * delta;
    normal_mode(c.S, c.U, c.V, delta, +1.0, c.r_plus, c.s_plus, c.u_plus, c.v_plus);
    normal_mode(c.S, c.U, c.V, delta, -1.0, c.r_minus, c.s_minus, c.u_minus, c.v_minus);
    return c;
}

Superoperator liouvillian(const ModelSpec& spec) {
    validate(spec);
    const Dims dims = model_dims(spec);
    Superoperator k(dims);
    switch (spec.tag) {
    case ModelTag::SingleZeroT:
    case ModelTag::SingleThermal: {
        const ModeOps m = mode_ops(dims, 0);
        add_hamiltonian(k, Complex(spec.omega) * (m.ad * m.a));
        add_dissipator(k, (spec.nbar + 1.0) * spec.gamma, m.a, m.ad);
        if (spec.nbar > 0.0) add_dissipator(k, spec.nbar * spec.gamma, m.ad, m.a);
        break;
    }
    case ModelTag::TwoLevelThermal: {
        const double nf = two_level_nbar_fermi(spec);
        const double rate = two_level_rate(spec);
        add_hamiltonian(k, Complex(0.5 * spec.omega) * sigma_z());
        add_dissipator(k, (1.0 - nf) * rate, sigma_minus(), sigma_plus());
        if (nf > 0.0) add_dissipator(k, nf * rate, sigma_plus(), sigma_minus());
        break;
    }
    case ModelTag::TwoModeZeroT:
    case ModelTag::TwoModeThermal: {
        const ModeOps a = mode_ops(dims, 0);
        const ModeOps b = mode_ops(dims, 1);
        const FockOperator h = Complex(spec.omega_a) * (a.ad * a.a) + Complex(spec.omega_b) * (b.ad * b.a) +
                               spec.g * (a.ad * b.a) + std::conj(spec.g) * (a.a * b.ad);
        add_hamiltonian(k, h);
        const double up = spec.nbar + 1.0;
        add_dissipator(k, up * spec.gamma_a, a.a, a.ad);
        add_dissipator(k, up * spec.gamma_b, b.a, b.ad);
        if (spec.gamma_c != Complex(0.0, 0.0)) {
            add_dissipator(k, up * spec.gamma_c, b.a, a.ad);
            add_dissipator(k, up * std::conj(spec.gamma_c), a.a, b.ad);
        }
        if (spec.nbar > 0.0) {
            add_dissipator(k, spec.nbar * spec.gamma_a, a.ad, a.a);
            add_dissipator(k, spec.nbar * spec.gamma_b, b.ad, b.a);
            if (spec.gamma_c != Complex(0.0, 0.0)) {
                add_dissipator(k, spec.nbar * spec.gamma_c, a.ad, b.a);
                add_dissipator(k, spec.nbar * std::conj(spec.gamma_c), b.ad, a.a);
            }
        }
        break;
    }
    }
    return simplify(k);
}

std::vector<Complex> ladder_shifts(const ModelSpec& spec) {
    validate(spec);
    if (is_two_mode(spec.tag)) {
        const TwoModeCoefficients c = two_mode_coefficients(spec);
        return {c.lambda_plus, c.lambda_minus, std::conj(c.lambda_plus), std::conj(c.lambda_minus)};
    }
    const double rate = is_two_level(spec.tag) ? two_level_rate(spec) : spec.gamma;
    return {Complex(-0.5 * rate, -spec.omega), Complex(-0.5 * rate, spec.omega)};
}

LadderSet ladder_set(const ModelSpec& spec) {
    validate(spec);
    const Dims dims = model_dims(spec);
    LadderSet set;
    set.shifts = ladder_shifts(spec);
    switch (spec.tag) {
    case ModelTag::SingleZeroT:
    case ModelTag::SingleThermal: {
        const ModeLadder l = mode_ladder(mode_ops(dims, 0), spec.tag == ModelTag::SingleThermal ? spec.nbar : 0.0);
        set.names = {"M", "N"};
        set.raising = {l.raise_m, l.raise_n};
        set.lowering = {l.lower_m, l.lower_n};
        break;
    }
    case ModelTag::TwoLevelThermal: {
        const double nf = two_level_nbar_fermi(spec);
        const FockOperator sp = sigma_plus(), sm = sigma_minus(), sz = sigma_z();
        const Superoperator p_up = left_of(sp) + Superoperator::sandwich(sz, sp);
        const Superoperator p_down =
            Complex(1.0 - nf) * left_of(sm) + Complex(nf) * Superoperator::sandwich(sz, sm);
        const Superoperator q_up = right_of(sm) + Superoperator::sandwich(sm, sz);
        const Superoperator q_down =
            Complex(1.0 - nf) * right_of(sp) + Complex(nf) * Superoperator::sandwich(sp, sz);
        set.names = {"P", "Q"};
        set.raising = {p_up, q_up};
        set.lowering = {p_down, q_down};
        set.statistics = Statistics::Fermionic;
        break;
    }
    case ModelTag::TwoModeZeroT:
    case ModelTag::TwoModeThermal: {
        const double nbar = spec.tag == ModelTag::TwoModeThermal ? spec.nbar : 0.0;
        const ModeLadder la = mode_ladder(mode_ops(dims, 0), nbar);
        const ModeLadder lb = mode_ladder(mode_ops(dims, 1), nbar);
        const TwoModeCoefficients c = two_mode_coefficients(spec);
        using std::conj;
        set.names = {"M", "N", "P", "Q"};
        set.raising = {
            c.r_plus * la.raise_m + c.s_plus * lb.raise_m,
            c.r_minus * la.raise_m + c.s_minus * lb.raise_m,
            conj(c.r_plus) * la.raise_n + conj(c.s_plus) * lb.raise_n,
            conj(c.r_minus) * la.raise_n + conj(c.s_minus) * lb.raise_n,
        };
        set.lowering = {
            c.u_plus * la.lower_m + c.v_plus * lb.lower_m,
            c.u_minus * la.lower_m + c.v_minus * lb.lower_m,
            conj(c.u_plus) * la.lower_n + conj(c.v_plus) * lb.lower_n,
            conj(c.u_minus) * la.lower_n + conj(c.v_minus) * lb.lower_n,
        };
        break;
    }
    }
    return set;
}

LadderSet two_level_alternative_ladder_set(const ModelSpec& spec) {
    validate(spec);
    require(is_two_level(spec.tag), ErrorCode::InvalidArgument, "alternative ladder set is for the two-level model");
    const double nf = two_level_nbar_fermi(spec);
    const FockOperator sp = sigma_plus(), sm = sigma_minus(), sz = sigma_z();
    LadderSet set;
    set.names = {"P'", "Q'"};
    set.shifts = ladder_shifts(spec);
    set.statistics = Statistics::Fermionic;
    set.raising = {right_of(sp) - Superoperator::sandwich(sp, sz), left_of(sm) - Superoperator::sandwich(sz, sm)};
    set.lowering = {Complex(nf) * right_of(sm) - Complex(1.0 - nf) * Superoperator::sandwich(sm, sz),
                    Complex(nf) * left_of(sp) - Complex(1.0 - nf) * Superoperator::sandwich(sz, sp)};
    return set;
}

} // namespace lindblad
