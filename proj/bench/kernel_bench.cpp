// Serial reference kernels against their OpenMP counterparts.
// Argument: number of sites.

#include <benchmark/benchmark.h>

#include <vector>

#include "rmspt/hamiltonian.hpp"
#include "rmspt/kernels.hpp"
#include "rmspt/protocols.hpp"
#include "rmspt/rng.hpp"

using namespace rmspt;

namespace {

std::vector<Complex> random_amplitudes(int n) {
    Rng rng = make_stream(7, StreamTag::Test, {static_cast<std::uint64_t>(n)});
    const auto s = StateVector::random(n, rng);
    return {s.amplitudes().begin(), s.amplitudes().end()};
}

kernels::ChainTerms terms_for(int n) {
    HamiltonianSpec h;
    h.num_sites = n;
    h.exchange_prime = 0.5;
    h.breaking = 0.1;
    h.neel_field = 1.0;
    return compile_terms(h);
}

template <auto Kernel>
void chain_matvec(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto terms = terms_for(n);
    const auto in = random_amplitudes(n);
    std::vector<Complex> out(in.size());
    for (auto _ : state) {
        Kernel(terms, in, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.size()));
}

template <auto Kernel>
void apply_one_site(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto amps = random_amplitudes(n);
    Rng rng = make_stream(8, StreamTag::Test);
    const Matrix2c u = sample_cue(rng);
    for (auto _ : state) {
        for (int site = 0; site < n; ++site) Kernel(amps, site, u);
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * n * static_cast<std::int64_t>(amps.size()));
}

template <auto Kernel>
void marginal_probabilities(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto amps = random_amplitudes(n);
    std::vector<int> sites;
    for (int k = n / 2 - 3; k < n / 2 + 3; ++k) sites.push_back(k);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(amps, sites));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(amps.size()));
}

template <auto Kernel>
void factorized_form(benchmark::State& state) {
    const int bits = static_cast<int>(state.range(0));
    const std::size_t dim = std::size_t{1} << bits;
    std::vector<double> p(dim, 1.0 / static_cast<double>(dim)), q(p);
    Eigen::Matrix2d w;
    w << 1.0, -0.5, -0.5, 1.0;
    const std::vector<Eigen::Matrix2d> weights(bits, w);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(p, weights, q));
}

} // namespace

BENCHMARK(chain_matvec<kernels::serial::chain_matvec>)->Name("chain_matvec/serial")->DenseRange(10, 16, 2);
BENCHMARK(chain_matvec<kernels::parallel::chain_matvec>)->Name("chain_matvec/parallel")->DenseRange(10, 16, 2);
BENCHMARK(apply_one_site<kernels::serial::apply_one_site>)->Name("apply_one_site/serial")->DenseRange(10, 16, 2);
BENCHMARK(apply_one_site<kernels::parallel::apply_one_site>)->Name("apply_one_site/parallel")->DenseRange(10, 16, 2);
BENCHMARK(marginal_probabilities<kernels::serial::marginal_probabilities>)
    ->Name("marginal_probabilities/serial")
    ->DenseRange(10, 16, 2);
BENCHMARK(marginal_probabilities<kernels::parallel::marginal_probabilities>)
    ->Name("marginal_probabilities/parallel")
    ->DenseRange(10, 16, 2);
BENCHMARK(factorized_form<kernels::serial::factorized_form>)->Name("factorized_form/serial")->DenseRange(4, 8, 2);
BENCHMARK(factorized_form<kernels::parallel::factorized_form>)->Name("factorized_form/parallel")->DenseRange(4, 8, 2);

BENCHMARK_MAIN();
