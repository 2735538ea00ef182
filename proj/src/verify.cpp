#include "lindblad_modes/verify.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "lindblad_modes/eigenbasis.hpp"
#include "lindblad_modes/errors.hpp"
#include "lindblad_modes/superalgebra.hpp"

namespace lindblad {

void VerifyReport::add(std::string name, double residual, double tolerance) {
    records.push_back({std::move(name), residual, tolerance, std::isfinite(residual) && residual <= tolerance});
}

bool VerifyReport::all_pass() const {
    return std::all_of(records.begin(), records.end(), [](const VerifyRecord& r) { return r.pass; });
}

std::string VerifyReport::to_json() const {
    nlohmann::json j;
    j["suite"] = suite;
    j["seed"] = seed;
    j["pass"] = all_pass();
    j["records"] = nlohmann::json::array();
    for (const auto& r : records)
        j["records"].push_back({{"name", r.name}, {"residual", r.residual}, {"tolerance", r.tolerance},
                                {"pass", r.pass}});
    return j.dump(2) + "\n";
}

const std::vector<std::string>& verify_suites() {
    static const std::vector<std::string> s = {"algebra", "eigen", "closed-form", "oracle", "all"};
    return s;
}

namespace {

bool truncated(const ModelSpec& s) { return !is_two_level(s.tag); }
int interior_step(const ModelSpec& s) { return is_two_level(s.tag) ? 0 : 3; }
bool is_zero_index(const IndexTuple& idx) {
    return std::all_of(idx.begin(), idx.end(), [](int k) { return k == 0; });
}

} // namespace

double factorization_residual(const ModelSpec& spec) {
    const Superoperator k = liouvillian(spec);
    const LadderSet l = ladder_set(spec);
    Superoperator f(k.dims());
    for (std::size_t i = 0; i < l.raising.size(); ++i) f = f + l.shifts[i] * (l.raising[i] * l.lowering[i]);
    return interior_residual(k - f, interior_step(spec), truncated(spec));
}

double ladder_shift_residual(const ModelSpec& spec) {
    const Superoperator k = liouvillian(spec);
    const LadderSet l = ladder_set(spec);
    double worst = 0.0;
    for (std::size_t i = 0; i < l.raising.size(); ++i) {
        worst = std::max(worst, interior_residual(commutator(k, l.raising[i]) - l.shifts[i] * l.raising[i],
                                                  interior_step(spec), truncated(spec)));
        worst = std::max(worst, interior_residual(commutator(k, l.lowering[i]) + l.shifts[i] * l.lowering[i],
                                                  interior_step(spec), truncated(spec)));
    }
    return worst;
}

// Bosonic: [X_i, Y_j] = delta_ij and lowering/raising sets commute among
// themselves. Two-level: {P, P^+} = {Q, Q^+} = 1 within a pair; distinct pairs commute.
double ladder_commutation_residual(const ModelSpec& spec) {
    const LadderSet l = ladder_set(spec);
    const Superoperator id = Superoperator::identity(model_dims(spec));
    const bool fermi = l.statistics == Statistics::Fermionic;
    double worst = 0.0;
    const auto res = [&](const Superoperator& s) { return interior_residual(s, interior_step(spec), truncated(spec)); };
    for (std::size_t i = 0; i < l.raising.size(); ++i)
        for (std::size_t j = 0; j < l.raising.size(); ++j) {
            Superoperator c = (fermi && i == j) ? anticommutator(l.lowering[i], l.raising[j])
                                                : commutator(l.lowering[i], l.raising[j]);
            if (i == j) c = c - id;
            worst = std::max(worst, res(c));
            if (i < j) {
                worst = std::max(worst, res(commutator(l.raising[i], l.raising[j])));
                worst = std::max(worst, res(commutator(l.lowering[i], l.lowering[j])));
            }
        }
    return worst;
}

double eigen_relation_residual(const ModelSpec& spec, int max_index) {
    const Superoperator k = liouvillian(spec);
    const std::vector<Complex> shifts = ladder_shifts(spec);
    double worst = 0.0;
    for (const IndexTuple& idx : index_set(spec, max_index)) {
        const FockOperator r = eigenstate_explicit(spec, idx);
        const FockOperator res = apply(k, r) - eigenvalue_of(idx, shifts) * r;
        worst = std::max(worst, interior_norm(res, interior_step(spec), truncated(spec)));
    }
    return worst;
}

double biorthogonality_residual(const ModelSpec& spec, int max_index) {
    const std::vector<IndexTuple> indices = index_set(spec, max_index);
    double worst = 0.0;
    for (const IndexTuple& j : indices) {
        const FockOperator r = eigenstate_explicit(spec, j);
        const EigenTable t = expansion_coefficients(spec, r, max_index, {EigenstateStorage::None, false, 1e300});
        for (const EigenEntry& e : t.entries) {
            const double want = e.index.indices == j ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(e.coefficient - want));
        }
    }
    return worst;
}

double trace_property_residual(const ModelSpec& spec, int max_index) {
    double worst = 0.0;
    for (const IndexTuple& idx : index_set(spec, max_index)) {
        const Complex tr = trace(eigenstate_explicit(spec, idx));
        worst = std::max(worst, std::abs(tr - (is_zero_index(idx) ? 1.0 : 0.0)));
    }
    return worst;
}

double explicit_ladder_residual(const ModelSpec& spec, int max_index) {
    const std::vector<IndexTuple> indices = index_set(spec, max_index);
    const std::vector<FockOperator> ladder = eigenstates_ladder(spec, indices);
    double worst = 0.0;
    for (std::size_t i = 0; i < indices.size(); ++i)
        worst = std::max(worst, frobenius_norm(eigenstate_explicit(spec, indices[i]) - ladder[i]));
    return worst;
}

std::vector<ModelSpec> reference_models() {
    return {ModelSpec::single_zero_t(1.0, 0.7, 8),
            ModelSpec::single_thermal(1.0, 0.7, 0.3, 8),
            ModelSpec::two_level_thermal(1.0, 0.7, 0.3),
            ModelSpec::two_mode_zero_t(1.0, 1.3, 0.4, 0.2, {0.3, 0.1}, {0.1, 0.05}, 5),
            ModelSpec::two_mode_thermal(1.0, 1.3, 0.4, 0.2, {0.3, 0.1}, {0.1, 0.05}, 0.2, 5)};
}

namespace {

// Thermal eigenstates have infinite support; the cropped tail of R^{n,n} falls
// off like (nbar/(nbar+1))^(dim-n), so the thermal cases keep nbar small.
std::vector<std::pair<ModelSpec, int>> eigen_models() {
    return {{ModelSpec::single_zero_t(1.0, 0.7, 12), 4},
            {ModelSpec::single_thermal(1.0, 0.7, 0.1, 30), 4},
            {ModelSpec::two_level_thermal(1.0, 0.7, 0.3), 1},
            {ModelSpec::two_mode_zero_t(1.0, 1.3, 0.4, 0.2, {0.3, 0.1}, {0.1, 0.05}, 8), 2},
            {ModelSpec::two_mode_thermal(1.0, 1.3, 0.4, 0.2, {0.3, 0.1}, {0.1, 0.05}, 0.01, 10), 1}};
}

void algebra_suite(VerifyReport& r) {
    std::vector<ModelSpec> models = reference_models();
    ModelSpec flipped = models[4];
    flipped.branch = DeltaBranch::Flipped;
    models.push_back(flipped);
    for (const ModelSpec& m : models) {
        std::string name = to_string(m.tag);
        if (m.branch == DeltaBranch::Flipped) name += "/flipped";
        r.add("algebra/" + name + "/factorization", factorization_residual(m), 1e-9);
        r.add("algebra/" + name + "/ladder-shift", ladder_shift_residual(m), 1e-10);
        r.add("algebra/" + name + "/commutation", ladder_commutation_residual(m), 1e-10);
    }
}

void eigen_suite(VerifyReport& r) {
    for (const auto& [m, M] : eigen_models()) {
        const std::string name = "eigen/" + to_string(m.tag);
        r.add(name + "/eigen-relation", eigen_relation_residual(m, M), 1e-9);
        r.add(name + "/biorthogonality", biorthogonality_residual(m, M), 1e-10);
        r.add(name + "/trace-property", trace_property_residual(m, M), 1e-12);
        r.add(name + "/explicit-vs-ladder", explicit_ladder_residual(m, M), 1e-9);
    }
}

double max_distance(const EvolutionResult& a, const EvolutionResult& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.states.size(); ++i)
        worst = std::max(worst, trace_distance(a.states[i], b.states[i]));
    return worst;
}

void closed_form_suite(VerifyReport& r) {
    struct Case {
        std::string name;
        ModelSpec model;
        StateSpec initial;
    };
    const std::vector<Case> cases = {
        {"fock-decay", ModelSpec::single_zero_t(1.0, 1.0, 12), StateSpec::fock(3)},
        {"coherent", ModelSpec::single_zero_t(1.0, 0.5, 30), StateSpec::coherent(1.2)},
        {"thermal", ModelSpec::single_thermal(1.0, 1.0, 0.2, 40), StateSpec::thermal(0.5)},
        {"two-level", ModelSpec::two_level_thermal(1.0, 1.0, 0.4), StateSpec::two_level_thermal(0.9)},
        {"two-mode-coherent", ModelSpec::two_mode_zero_t(1.0, 1.3, 0.4, 0.2, {0.3, 0.0}, {0.0, 0.0}, 10),
         StateSpec::product(StateSpec::coherent(0.4), StateSpec::coherent(0.3))},
    };
    for (const Case& c : cases) {
        const TimeGrid grid{0.0, 3.0 / reference_rate(c.model), 7};
        const FockOperator rho0 = build_state(c.initial, model_dims(c.model));
        const EvolutionResult e = evolve_eigenmode(c.model, rho0, grid);
        const EvolutionResult f = evolve_closed_form(c.model, c.initial, grid);
        r.add("closed-form/" + c.name, max_distance(e, f), 1e-8);
    }
}

void oracle_suite(VerifyReport& r, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (ModelTag tag : {ModelTag::SingleZeroT, ModelTag::SingleThermal, ModelTag::TwoLevelThermal,
                         ModelTag::TwoModeZeroT, ModelTag::TwoModeThermal}) {
        const RandomInstance inst = random_instance(tag, rng);
        const CrossCheck c = cross_check(inst);
        r.add("oracle/" + to_string(tag) + "/eigenmode-vs-oracle", c.eigen_vs_oracle, 1e-7);
        r.add("oracle/" + to_string(tag) + "/semigroup", c.semigroup, 1e-7);
    }
}

} // namespace

VerifyReport run_verify_suite(const std::string& suite, std::uint64_t seed) {
    VerifyReport r;
    r.suite = suite;
    r.seed = seed;
    const bool all = suite == "all";
    bool known = all;
    if (all || suite == "algebra") algebra_suite(r), known = true;
    if (all || suite == "eigen") eigen_suite(r), known = true;
    if (all || suite == "closed-form") closed_form_suite(r), known = true;
    if (all || suite == "oracle") oracle_suite(r, seed), known = true;
    if (!known) fail(ErrorCode::Parse, "unknown verify suite '" + suite + "'");
    return r;
}

namespace {

bool within_support(Eigen::Index flat, const Dims& dims, int support) {
    for (int f = static_cast<int>(dims.size()) - 1; f >= 0; --f) {
        if (flat % dims[f] > support) return false;
        flat /= dims[f];
    }
    return true;
}

Matrix gaussian_block(const Dims& dims, int support, std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    const int n = total_dim(dims);
    Matrix a = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (within_support(i, dims, support) && within_support(j, dims, support)) {
                const double re = n01(rng);
                a(i, j) = Complex(re, n01(rng));
            }
    return a;
}

} // namespace

FockOperator random_density(const Dims& dims, int support, std::mt19937_64& rng) {
    const Matrix a = gaussian_block(dims, support, rng);
    Matrix rho = a * a.adjoint();
    rho /= rho.trace();
    return FockOperator(dims, rho);
}

FockOperator random_hermitian_unit_trace(const Dims& dims, int support, std::mt19937_64& rng) {
    const Matrix a = gaussian_block(dims, support, rng);
    Matrix h = 0.5 * (a + a.adjoint());
    Complex tr = h.trace();
    if (std::abs(tr) < 0.1) {
        h(0, 0) += 1.0;
        tr = h.trace();
    }
    h /= tr.real();
    return FockOperator(dims, h);
}

RandomInstance random_instance(ModelTag tag, std::mt19937_64& rng, int points) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
    RandomInstance inst;
    int support = 2;
    switch (tag) {
    case ModelTag::SingleZeroT:
        inst.model = ModelSpec::single_zero_t(in(0.5, 2.0), in(0.2, 1.5), 7 + static_cast<int>(in(0, 4)));
        support = 3;
        break;
    case ModelTag::SingleThermal:
        inst.model = ModelSpec::single_thermal(in(0.5, 2.0), in(0.2, 1.5), in(0.05, 0.2), 24);
        break;
    case ModelTag::TwoLevelThermal:
        inst.model = ModelSpec::two_level_thermal(in(0.5, 2.0), in(0.2, 1.5), in(0.0, 1.0));
        support = 1;
        break;
    case ModelTag::TwoModeZeroT:
    case ModelTag::TwoModeThermal:
        for (;;) {
            const double ga = in(0.2, 0.8), gb = in(0.1, 0.6);
            const Complex g = std::polar(in(0.1, 0.5), in(0.0, 2.0 * M_PI));
            const Complex gc = std::polar(in(0.0, 1.0) * std::sqrt(ga * gb), in(0.0, 2.0 * M_PI));
            if (tag == ModelTag::TwoModeZeroT) {
                inst.model = ModelSpec::two_mode_zero_t(in(0.5, 1.5), in(0.5, 1.5), ga, gb, g, gc, 5);
            } else {
                inst.model = ModelSpec::two_mode_thermal(in(0.5, 1.5), in(0.5, 1.5), ga, gb, g, gc, in(0.01, 0.05), 7);
                support = 1;
            }
            try {
                const TwoModeCoefficients c = two_mode_coefficients(inst.model);
                if (std::abs(c.Delta) > 0.05) break;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::Degeneracy) throw;
            }
        }
        break;
    }
    inst.rho0 = random_density(model_dims(inst.model), support, rng);
    inst.grid = TimeGrid{0.0, 3.0 / reference_rate(inst.model), points};
    return inst;
}

CrossCheck cross_check(const RandomInstance& inst) {
    CrossCheck out;
    EigenmodeOptions eo;
    // full index range for single modes: thermal expansions of finite-support states are infinite series
    if (!is_two_mode(inst.model.tag) && !is_two_level(inst.model.tag)) eo.max_index = inst.model.dim - 1;
    const EvolutionResult e = evolve_eigenmode(inst.model, inst.rho0, inst.grid, eo);
    const EvolutionResult o = evolve_oracle(inst.model, inst.rho0, inst.grid);
    out.eigen_vs_oracle = max_distance(e, o);
    // evolve to the middle point, restart from there, compare at the end
    const std::size_t mid = e.states.size() / 2;
    const double t_mid = e.times[mid];
    const double t_end = e.times.back();
    const EvolutionResult restarted =
        evolve_eigenmode(inst.model, e.states[mid], TimeGrid{t_mid, t_end, 2}, eo);
    out.semigroup = trace_distance(restarted.states.back(), e.states.back());
    return out;
}

} // namespace lindblad
