#include <doctest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "helpers.hpp"
#include "lindblad_modes/kernels.hpp"
#include "lindblad_modes/parallel.hpp"
#include "lindblad_modes/verify.hpp"

using namespace lindblad;
using testutil::max_abs;

TEST_SUITE("kernels") {

TEST_CASE("serial and parallel synthesis are identical") {
    std::mt19937_64 rng(41);
    std::vector<double> taus;
    for (int i = 0; i < 37; ++i) taus.push_back(0.1 * i);
    for (const ModelSpec& m : reference_models()) {
        const FockOperator rho = random_density(model_dims(m), 1, rng);
        const EigenTable table = expansion_coefficients(m, rho, default_max_index(m));
        const ModeSum sum = mode_sum(table);
        const std::vector<Matrix> a = synthesize_serial(sum, taus), b = synthesize_parallel(sum, taus);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(max_abs(a[i] - b[i]) == 0.0);
    }
}

TEST_CASE("two-mode factorized sum equals stored eigenstates") {
    std::mt19937_64 rng(42);
    const ModelSpec s = ModelSpec::two_mode_thermal(1.0, 1.3, 0.4, 0.2, {0.3, 0.1}, {0.1, 0.05}, 0.1, 4);
    const FockOperator rho = random_density({4, 4}, 1, rng);
    CoefficientOptions all;
    all.storage = EigenstateStorage::All;
    const EigenTable stored = expansion_coefficients(s, rho, 4, all);
    const EigenTable bare = expansion_coefficients(s, rho, 4);
    const ModeSum a = mode_sum(stored), b = mode_sum(bare);
    CHECK(a.factorization == nullptr);
    CHECK(b.factorization != nullptr);
    const std::vector<double> taus{0.0, 0.5, 2.0};
    const std::vector<Matrix> x = synthesize_serial(a, taus), y = synthesize_serial(b, taus);
    for (std::size_t i = 0; i < taus.size(); ++i) CHECK(max_abs(x[i] - y[i]) < 1e-12);
}

TEST_CASE("expm series against Eigen") {
    std::mt19937_64 rng(43);
    const ModelSpec m = ModelSpec::single_thermal(1.0, 0.5, 0.3, 4);
    const Matrix g = to_matrix(liouvillian(m));
    const FockOperator rho = random_density({4}, 2, rng);
    const std::vector<double> taus{0.0, 0.3, 1.7};
    const std::vector<Matrix> s = expm_series_serial(g, rho.matrix(), taus);
    const std::vector<Matrix> p = expm_series_parallel(g, rho.matrix(), taus);
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const Matrix ref = unvec((g * taus[i]).exp() * vec(rho.matrix()), 4);
        CHECK(max_abs(s[i] - ref) < 1e-12);
        CHECK(max_abs(s[i] - p[i]) == 0.0);
    }
}

TEST_CASE("thread cap") {
    const int before = thread_cap();
    set_thread_cap(1);
    CHECK(thread_cap() == 1);
    set_thread_cap(before);
    CHECK(thread_cap() >= 1);
}

}
