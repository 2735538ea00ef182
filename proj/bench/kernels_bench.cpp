// Serial reference vs OpenMP kernels. Thread count follows LINDBLAD_MODES_THREADS.

#include <benchmark/benchmark.h>

#include "lindblad_modes/eigenbasis.hpp"
#include "lindblad_modes/kernels.hpp"
#include "lindblad_modes/superalgebra.hpp"

using namespace lindblad;

namespace {

std::vector<double> grid(int n, double t1) {
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) t[i] = t1 * i / std::max(1, n - 1);
    return t;
}

const EigenTable& single_table() {
    static const EigenTable t = [] {
        const ModelSpec s = ModelSpec::single_zero_t(1.0, 1.0, 16);
        return expansion_coefficients(s, coherent_density(1.0, 16), default_max_index(s));
    }();
    return t;
}

const EigenTable& two_mode_table() {
    static const EigenTable t = [] {
        const ModelSpec s = ModelSpec::two_mode_zero_t(1.0, 1.3, 0.4, 0.2, {0.3, 0.0}, {0.0, 0.0}, 8);
        return expansion_coefficients(s, tensor(coherent_density(0.7, 8), coherent_density(0.5, 8)),
                                      default_max_index(s));
    }();
    return t;
}

template <bool Parallel>
void synth_single(benchmark::State& st) {
    const ModeSum sum = mode_sum(single_table());
    const auto taus = grid(static_cast<int>(st.range(0)), 3.0);
    for (auto _ : st) {
        auto out = Parallel ? synthesize_parallel(sum, taus) : synthesize_serial(sum, taus);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void synth_two_mode(benchmark::State& st) {
    const ModeSum sum = mode_sum(two_mode_table());
    const auto taus = grid(static_cast<int>(st.range(0)), 7.5);
    for (auto _ : st) {
        auto out = Parallel ? synthesize_parallel(sum, taus) : synthesize_serial(sum, taus);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void expm_single(benchmark::State& st) {
    const ModelSpec s = ModelSpec::single_zero_t(1.0, 1.0, 16);
    const Matrix g = to_matrix(liouvillian(s));
    const Matrix rho0 = coherent_density(1.0, 16).matrix();
    const auto taus = grid(static_cast<int>(st.range(0)), 3.0);
    for (auto _ : st) {
        auto out = Parallel ? expm_series_parallel(g, rho0, taus) : expm_series_serial(g, rho0, taus);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

} // namespace

BENCHMARK(synth_single<false>)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(synth_single<true>)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(synth_two_mode<false>)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(synth_two_mode<true>)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(expm_single<false>)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(expm_single<true>)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
