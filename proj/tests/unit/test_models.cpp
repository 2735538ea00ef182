#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "lindblad_modes/errors.hpp"
#include "lindblad_modes/models.hpp"

using namespace lindblad;
using testutil::diff;
using testutil::max_abs;

namespace {

std::vector<ModelSpec> all_models() {
    return {ModelSpec::single_zero_t(1.0, 0.7, 6),
            ModelSpec::single_thermal(1.0, 0.7, 0.4, 6),
            ModelSpec::two_level_thermal(1.0, 0.7, 0.3),
            ModelSpec::two_mode_zero_t(1.0, 1.3, 0.4, 0.2, {0.3, 0.1}, {0.1, 0.05}, 4),
            ModelSpec::two_mode_thermal(1.0, 1.3, 0.4, 0.2, {0.3, 0.1}, {0.1, 0.05}, 0.2, 4)};
}

} // namespace

TEST_SUITE("models") {

TEST_CASE("steady states of the Liouvillian") {
    const ModelSpec z = ModelSpec::single_zero_t(1.0, 0.8, 6);
    CHECK(max_abs(apply(liouvillian(z), fock_ket_bra(0, 0, 6)).matrix()) < 1e-15);
    // the truncated thermal state is stationary up to the top-level boundary
    const ModelSpec t = ModelSpec::single_thermal(1.0, 0.8, 0.3, 12);
    CHECK(interior_norm(apply(liouvillian(t), thermal_density(0.3, 12)), 1) < 1e-13);
}

TEST_CASE("trace preservation") {
    std::mt19937_64 rng(11);
    for (const ModelSpec& m : all_models()) {
        const FockOperator r = testutil::random_operator(model_dims(m), rng);
        CHECK(std::abs(trace(apply(liouvillian(m), r))) < 1e-12);
    }
}

TEST_CASE("ladder commutator with K") {
    const ModelSpec z = ModelSpec::single_zero_t(1.3, 0.8, 7);
    const LadderSet set = ladder_set(z);
    const Superoperator k = liouvillian(z);
    const Complex shift(-0.4, -1.3);
    CHECK(std::abs(set.shifts[0] - shift) < 1e-15);
    CHECK(interior_residual(commutator(k, set.raising[0]) - shift * set.raising[0], 2) < 1e-12);
    CHECK(interior_residual(commutator(k, set.lowering[0]) + shift * set.lowering[0], 2) < 1e-12);
}

TEST_CASE("thermal lowering annihilates the thermal state") {
    const ModelSpec t = ModelSpec::single_thermal(1.0, 0.8, 0.3, 14);
    const LadderSet set = ladder_set(t);
    for (const Superoperator& low : set.lowering)
        CHECK(interior_norm(apply(low, thermal_density(0.3, 14)), 1) < 1e-14);
}

TEST_CASE("two-level raising squares to zero") {
    const ModelSpec tl = ModelSpec::two_level_thermal(1.0, 0.5, 0.3);
    std::mt19937_64 rng(12);
    const LadderSet set = ladder_set(tl);
    for (const Superoperator& up : set.raising) {
        const FockOperator r = testutil::random_operator({2}, rng);
        CHECK(max_abs(apply(up, apply(up, r)).matrix()) < 1e-14);
    }
    CHECK(set.statistics == Statistics::Fermionic);
}

TEST_CASE("two-level alternative set gives the same products") {
    const ModelSpec tl = ModelSpec::two_level_thermal(1.0, 0.5, 0.3);
    const LadderSet a = ladder_set(tl), b = two_level_alternative_ladder_set(tl);
    for (int i = 0; i < 2; ++i)
        CHECK(max_abs(to_matrix(compose(a.raising[i], a.lowering[i])) - to_matrix(compose(b.raising[i], b.lowering[i]))) <
              1e-14);
}

TEST_CASE("two-mode coefficients, symmetric case") {
    const double w = 1.1, g = 0.3, gam = 0.4;
    const ModelSpec m = ModelSpec::two_mode_zero_t(w, w, gam, gam, g, 0.0, 3);
    const TwoModeCoefficients c = two_mode_coefficients(m);
    CHECK(std::abs(c.S) < 1e-15);
    CHECK(std::abs(c.U - Complex(g)) < 1e-15);
    CHECK(std::abs(c.V - Complex(g)) < 1e-15);
    CHECK(std::abs(c.Delta - Complex(g)) < 1e-15);
    CHECK(std::abs(c.lambda_plus - Complex(-gam / 2, -w - g)) < 1e-14);
    CHECK(std::abs(c.lambda_minus - Complex(-gam / 2, -w + g)) < 1e-14);
}

TEST_CASE("two-mode eigenvalues against the 2x2 amplitude matrix") {
    const ModelSpec m = ModelSpec::two_mode_zero_t(1.0, 1.3, 0.4, 0.2, {0.3, 0.1}, {0.1, 0.05}, 3);
    const TwoModeCoefficients c = two_mode_coefficients(m);
    const Complex i{0.0, 1.0};
    Eigen::Matrix2cd a;
    a << -i * m.omega_a - m.gamma_a / 2, -i * c.U, -i * c.V, -i * m.omega_b - m.gamma_b / 2;
    const Eigen::Vector2cd ev = a.eigenvalues();
    for (const Complex lam : {c.lambda_plus, c.lambda_minus})
        CHECK(std::min(std::abs(ev(0) - lam), std::abs(ev(1) - lam)) < 1e-13);
    CHECK(std::abs(c.Delta * c.Delta - (c.S * c.S + c.U * c.V)) < 1e-14);
    Eigen::Matrix2cd rs, uv;
    rs << c.r_plus, c.r_minus, c.s_plus, c.s_minus;
    uv << c.u_plus, c.v_plus, c.u_minus, c.v_minus;
    CHECK(max_abs(rs * uv - Eigen::Matrix2cd::Identity()) < 1e-12);
}

TEST_CASE("uncoupled limit reduces to single-mode shifts") {
    const ModelSpec m = ModelSpec::two_mode_zero_t(1.0, 1.7, 0.4, 0.2, 0.0, 0.0, 3);
    const TwoModeCoefficients c = two_mode_coefficients(m);
    const Complex sa(-0.2, -1.0), sb(-0.1, -1.7);
    for (const Complex lam : {c.lambda_plus, c.lambda_minus})
        CHECK(std::min(std::abs(lam - sa), std::abs(lam - sb)) < 1e-14);
}

TEST_CASE("degeneracy and validation errors") {
    const ModelSpec deg = ModelSpec::two_mode_zero_t(1.0, 1.0, 0.3, 0.3, 0.0, 0.0, 3);
    try {
        (void)two_mode_coefficients(deg);
        FAIL("expected degeneracy");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Degeneracy);
    }
    CHECK_THROWS_AS(validate(ModelSpec::single_zero_t(1.0, -1.0, 4)), Error);
    CHECK_THROWS_AS(validate(ModelSpec::single_thermal(1.0, 1.0, -0.1, 4)), Error);
    CHECK_THROWS_AS(validate(ModelSpec::two_mode_zero_t(1.0, 1.0, 0.2, 0.2, 0.1, 0.5, 3)), Error);
    CHECK_NOTHROW(validate(ModelSpec::two_mode_zero_t(1.0, 1.2, 0.2, 0.2, 0.1, 0.2, 3)));
}

TEST_CASE("reservoir classification") {
    CHECK(reservoir_case(ModelSpec::two_mode_zero_t(1.0, 1.2, 0.4, 0.1, 0.1, 0.0, 3)) == ReservoirCase::Separate);
    CHECK(reservoir_case(ModelSpec::two_mode_zero_t(1.0, 1.2, 0.4, 0.1, 0.1, 0.2, 3)) == ReservoirCase::Common);
    CHECK(reservoir_case(ModelSpec::two_mode_zero_t(1.0, 1.2, 0.4, 0.1, 0.1, 0.1, 3)) == ReservoirCase::Intermediate);
}

TEST_CASE("shifts have non-positive real part") {
    for (const ModelSpec& m : all_models())
        for (const Complex s : ladder_shifts(m)) CHECK(s.real() <= 0.0);
}

TEST_CASE("two-level parameters from nbar") {
    const ModelSpec tl = ModelSpec::two_level_thermal(1.0, 0.5, 0.3);
    CHECK(std::abs(two_level_nbar_fermi(tl) - 0.3 / 1.6) < 1e-15);
    CHECK(std::abs(two_level_rate(tl) - 0.8) < 1e-15);
    // steady state carries the Fermi occupation
    const FockOperator ss = two_level_thermal_density(0.3 / 1.6);
    CHECK(max_abs(apply(liouvillian(tl), ss).matrix()) < 1e-15);
}

}
