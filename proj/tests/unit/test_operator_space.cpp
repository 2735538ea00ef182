#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "lindblad_modes/errors.hpp"
#include "lindblad_modes/operator_space.hpp"

using namespace lindblad;
using testutil::diff;

TEST_SUITE("operator_space") {

TEST_CASE("fock_ket_bra places a single unit entry") {
    const FockOperator p = fock_ket_bra(0, 0, 4);
    CHECK(p(0, 0) == Complex(1.0));
    CHECK(testutil::max_abs(p.matrix()) == 1.0);
    CHECK(std::abs(p.matrix().sum() - Complex(1.0)) == 0.0);
    const FockOperator q = fock_ket_bra(1, 0, 4);
    CHECK(q(1, 0) == Complex(1.0));
    CHECK(std::abs(q.matrix().sum() - Complex(1.0)) == 0.0);
    CHECK_THROWS_AS(fock_ket_bra(4, 0, 4), Error);
    try {
        fock_ket_bra(4, 0, 4);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IndexOutOfRange);
    }
}

TEST_CASE("ladder operators") {
    const FockOperator a = annihilation(5);
    for (int k = 1; k < 5; ++k) CHECK(std::abs(a(k - 1, k) - std::sqrt(double(k))) < 1e-15);
    CHECK(diff(creation(5), adjoint(a)) == 0.0);
    const FockOperator n = number_operator(5);
    CHECK(diff(n, creation(5) * a) < 1e-14);
}

TEST_CASE("coherent density") {
    const FockOperator vac = coherent_density(0.0, 5);
    CHECK(diff(vac, fock_ket_bra(0, 0, 5)) < 1e-15);
    // <0|rho|0> = exp(-|alpha|^2), series oracle for the tail is negligible at dim 30
    const FockOperator c = coherent_density(1.0, 30);
    CHECK(std::abs(c(0, 0).real() - std::exp(-1.0)) < 1e-12);
    CHECK(std::abs(c(2, 1) - Complex(std::exp(-1.0) / std::sqrt(2.0))) < 1e-12);
    TruncationOptions strict;
    strict.strict = true;
    CHECK_THROWS_AS(coherent_density(1.0, 2, strict), Error);
    StateMetadata meta;
    (void)coherent_density(1.0, 2, {}, &meta);
    CHECK(meta.discarded_weight > 0.2);
    CHECK_FALSE(meta.warnings.empty());
}

TEST_CASE("thermal density") {
    CHECK(diff(thermal_density(0.0, 5), fock_ket_bra(0, 0, 5)) < 1e-15);
    const FockOperator t = thermal_density(1.0, 60);
    for (int k = 0; k < 6; ++k) CHECK(std::abs(t(k, k).real() - std::pow(0.5, k + 1)) < 1e-15);
    // before renormalization <0|rho|0> = 1/1.2; the dim-40 tail is ~(1/6)^40
    StateMetadata meta;
    const FockOperator s = thermal_density(0.2, 40, {}, &meta);
    CHECK(std::abs(s(0, 0).real() - 1.0 / 1.2) < 1e-14);
    CHECK(meta.discarded_weight < 1e-30);
}

TEST_CASE("tensor index convention") {
    const FockOperator z = tensor(fock_ket_bra(0, 0, 2), fock_ket_bra(0, 0, 2));
    CHECK(z.dims() == Dims{2, 2});
    CHECK(z(0, 0) == Complex(1.0));
    CHECK(testutil::max_abs(z.matrix()) == 1.0);
    CHECK(diff(tensor(FockOperator::identity({2}), FockOperator::identity({2})), FockOperator::identity({2, 2})) == 0.0);
    // row (1,0) = 2, col (0,1) = 1
    const FockOperator x = tensor(fock_ket_bra(1, 0, 2), fock_ket_bra(0, 1, 2));
    CHECK(x(2, 1) == Complex(1.0));
    CHECK(std::abs(x.matrix().sum() - Complex(1.0)) == 0.0);
}

TEST_CASE("scalar functionals") {
    CHECK(trace(fock_ket_bra(0, 0, 3)) == Complex(1.0));
    CHECK(trace(fock_ket_bra(1, 0, 3)) == Complex(0.0));
    const FockOperator r = coherent_density(0.5, 10);
    CHECK(trace_distance(r, r) == 0.0);
    CHECK(std::abs(trace_distance(fock_ket_bra(0, 0, 3), fock_ket_bra(1, 1, 3)) - 1.0) < 1e-14);
    CHECK_THROWS_AS(trace_distance(r, fock_ket_bra(0, 0, 3)), Error);
    CHECK_THROWS_AS(min_eigenvalue_hermitian(fock_ket_bra(1, 0, 3)), Error);
    CHECK(std::abs(purity(r) - 1.0) < 1e-12);
    // square roots of rank-deficient states cost about half the digits
    CHECK(std::abs(fidelity(r, r) - 1.0) < 1e-7);
    const FockOperator th = thermal_density(0.7, 10);
    CHECK(std::abs(fidelity(th, th) - 1.0) < 1e-10);
    CHECK(std::abs(fidelity(fock_ket_bra(0, 0, 3), fock_ket_bra(1, 1, 3))) < 1e-7);
}

TEST_CASE("partial trace of a product") {
    const FockOperator a = coherent_density(0.4, 4), b = thermal_density(0.3, 3);
    const FockOperator ab = tensor(a, b);
    CHECK(diff(partial_trace(ab, 0), a) < 1e-14);
    CHECK(diff(partial_trace(ab, 1), b) < 1e-14);
}

TEST_CASE("pad and crop") {
    const FockOperator a = tensor(coherent_density(0.4, 3), thermal_density(0.3, 3));
    const FockOperator p = pad_to(a, {5, 5});
    CHECK(p.dims() == Dims{5, 5});
    CHECK(std::abs(trace(p) - trace(a)) < 1e-15);
    CHECK(diff(crop_to(p, {3, 3}), a) == 0.0);
}

TEST_CASE("state specs") {
    CHECK_THROWS_AS(validate(StateSpec::fock(-1)), Error);
    CHECK_THROWS_AS(validate(StateSpec::thermal(-0.1)), Error);
    CHECK_THROWS_AS(validate(StateSpec::two_level_thermal(1.5)), Error);
    const FockOperator p = build_state(StateSpec::product(StateSpec::fock(1), StateSpec::coherent(0.3)), {3, 6});
    CHECK(diff(p, tensor(fock_ket_bra(1, 1, 3), coherent_density(0.3, 6))) < 1e-15);
    CHECK_THROWS_AS(build_state(StateSpec::fock(3), {3}), Error);
    const FockOperator q = build_state(StateSpec::two_level_thermal(0.25), {2});
    CHECK(std::abs(q(1, 1).real() - 0.25) < 1e-15);
}

TEST_CASE("explicit matrix text format") {
    std::istringstream in("# comment\ndims 2\n0 0 0.75 0\n1 1 0.25 0\n0 1 0.1 0.2\n1 0 0.1 -0.2\n");
    const FockOperator r = parse_explicit_matrix(in);
    CHECK(r.dims() == Dims{2});
    CHECK(r(0, 1) == Complex(0.1, 0.2));
    std::ostringstream out;
    write_explicit_matrix(out, r);
    std::istringstream back(out.str());
    CHECK(diff(parse_explicit_matrix(back), r) == 0.0);

    std::istringstream two("dims 2 2\n0 0 1 0\n");
    CHECK(parse_explicit_matrix(two).dims() == Dims{2, 2});

    std::istringstream nonherm("dims 2\n0 0 1 0\n0 1 0.1 0\n");
    CHECK_THROWS_AS(parse_explicit_matrix(nonherm), Error);
    std::istringstream badtrace("dims 2\n0 0 0.5 0\n");
    CHECK_THROWS_AS(parse_explicit_matrix(badtrace), Error);
    std::istringstream negative("dims 2\n0 0 1.5 0\n1 1 -0.5 0\n");
    CHECK_THROWS_AS(parse_explicit_matrix(negative), Error);
    std::istringstream range("dims 2\n2 0 1 0\n");
    CHECK_THROWS_AS(parse_explicit_matrix(range), Error);
    std::istringstream junk("dims x\n");
    CHECK_THROWS_AS(parse_explicit_matrix(junk), Error);
}

}
