#include "rmspt/spin_core.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "rmspt/kernels.hpp"

namespace rmspt {

StateVector::StateVector(int num_sites) : num_sites_(num_sites) {
    if (num_sites < 1 || num_sites > kMaxStateSites) {
        throw std::invalid_argument("num_sites must be in [1, " + std::to_string(kMaxStateSites) + "]");
    }
    amplitudes_.assign(std::size_t{1} << num_sites, Complex{});
    amplitudes_[0] = 1.0;
}

StateVector::StateVector(int num_sites, std::vector<Complex> amplitudes)
    : num_sites_(num_sites), amplitudes_(std::move(amplitudes)) {
    if (num_sites < 1 || num_sites > kMaxStateSites) {
        throw std::invalid_argument("num_sites must be in [1, " + std::to_string(kMaxStateSites) + "]");
    }
    if (amplitudes_.size() != (std::size_t{1} << num_sites)) {
        throw std::invalid_argument("amplitude count must be 2^num_sites");
    }
}

StateVector StateVector::basis_state(int num_sites, BasisIndex index) {
    StateVector s(num_sites);
    if (index >= s.dimension()) throw std::out_of_range("basis index out of range");
    s.amplitudes_[0] = 0.0;
    s.amplitudes_[index] = 1.0;
    return s;
}

StateVector StateVector::random(int num_sites, Rng& rng) {
    std::normal_distribution<double> gauss;
    std::vector<Complex> amps(std::size_t{1} << num_sites);
    for (auto& a : amps) {
        const double re = gauss(rng);
        a = Complex(re, gauss(rng));
    }
    return StateVector(num_sites, std::move(amps)).normalized();
}

double StateVector::norm() const {
    double sum = 0.0;
    for (const auto& a : amplitudes_) sum += std::norm(a);
    return std::sqrt(sum);
}

StateVector StateVector::normalized() const {
    const double nrm = norm();
    if (nrm == 0.0) throw std::domain_error("cannot normalize the zero vector");
    std::vector<Complex> amps(amplitudes_);
    for (auto& a : amps) a /= nrm;
    return StateVector(num_sites_, std::move(amps));
}

Complex inner_product(const StateVector& bra, const StateVector& ket) {
    if (bra.dimension() != ket.dimension()) throw std::invalid_argument("dimension mismatch");
    Complex acc{};
    for (std::size_t s = 0; s < bra.dimension(); ++s) acc += std::conj(bra[s]) * ket[s];
    return acc;
}

double overlap(const StateVector& a, const StateVector& b) { return std::norm(inner_product(a, b)); }

double expectation_z(const StateVector& state, int site) {
    if (site < 0 || site >= state.num_sites()) throw std::out_of_range("site out of range");
    double acc = 0.0;
    for (std::size_t s = 0; s < state.dimension(); ++s) {
        acc += spin_z((s >> site) & 1U) * std::norm(state[s]);
    }
    return acc;
}

bool is_unitary(const Matrix2c& m, double tol) {
    return (m.adjoint() * m - Matrix2c::Identity()).norm() <= tol;
}

LocalUnitary LocalUnitary::make(int site, const Matrix2c& matrix) {
    if (!is_unitary(matrix)) throw std::invalid_argument("local gate is not unitary");
    return LocalUnitary{site, matrix};
}

StateVector apply_local_unitary(const StateVector& state, const LocalUnitary& u) {
    if (u.site < 0 || u.site >= state.num_sites()) {
        throw std::out_of_range("gate site " + std::to_string(u.site) + " outside chain of " +
                                std::to_string(state.num_sites()) + " sites");
    }
    std::vector<Complex> amps(state.amplitudes().begin(), state.amplitudes().end());
    kernels::parallel::apply_one_site(amps, u.site, u.matrix);
    return StateVector(state.num_sites(), std::move(amps));
}

StateVector apply_local_unitaries(const StateVector& state, std::span<const LocalUnitary> us) {
    std::vector<Complex> amps(state.amplitudes().begin(), state.amplitudes().end());
    for (const auto& u : us) {
        if (u.site < 0 || u.site >= state.num_sites()) throw std::out_of_range("gate site out of range");
        kernels::parallel::apply_one_site(amps, u.site, u.matrix);
    }
    return StateVector(state.num_sites(), std::move(amps));
}

Bitstring Bitstring::from_spins(std::span<const int> spins) {
    if (spins.size() > 63) throw std::invalid_argument("bitstring too long");
    Bitstring b{0, static_cast<int>(spins.size())};
    for (std::size_t k = 0; k < spins.size(); ++k) {
        if (spins[k] != 0 && spins[k] != 1) throw std::invalid_argument("spin values must be 0 (up) or 1 (down)");
        b.bits |= static_cast<BasisIndex>(spins[k]) << k;
    }
    return b;
}

std::vector<int> Bitstring::spins() const {
    std::vector<int> out(length);
    for (int k = 0; k < length; ++k) out[k] = (*this)[k];
    return out;
}

int hamming_distance(const Bitstring& a, const Bitstring& b) {
    if (a.length != b.length) throw std::invalid_argument("hamming_distance: length mismatch");
    return hamming_distance(a.bits, b.bits);
}

BasisIndex reverse_bits(BasisIndex bits, int length) {
    BasisIndex out = 0;
    for (int k = 0; k < length; ++k) out |= ((bits >> k) & 1U) << (length - 1 - k);
    return out;
}

Bitstring reflect_bitstring(const Bitstring& s) {
    if (s.length <= 0 || s.length % 2 != 0) {
        throw std::invalid_argument("reflect_bitstring: interval length must be even and positive");
    }
    return Bitstring{reverse_bits(s.bits, s.length), s.length};
}

std::vector<double> marginal_probabilities(const StateVector& state, std::span<const int> region) {
    if (region.empty()) throw std::invalid_argument("measurement region is empty");
    for (int site : region) {
        if (site < 0 || site >= state.num_sites()) throw std::out_of_range("region site out of range");
    }
    return kernels::parallel::marginal_probabilities(state.amplitudes(), region);
}

std::vector<std::int64_t> sample_counts(std::span<const double> probs, int n_shots, Rng& rng) {
    if (n_shots < 1) throw std::invalid_argument("n_shots must be >= 1");
    // Inverse-CDF sampling; clamped weights absorb round-off negatives.
    std::vector<double> weights(probs.size());
    std::transform(probs.begin(), probs.end(), weights.begin(), [](double p) { return std::max(p, 0.0); });
    std::discrete_distribution<std::size_t> dist(weights.begin(), weights.end());
    std::vector<std::int64_t> counts(probs.size(), 0);
    for (int shot = 0; shot < n_shots; ++shot) ++counts[dist(rng)];
    return counts;
}

Histogram sample_bitstrings(const StateVector& state, std::span<const int> region, int n_shots, Rng& rng) {
    const auto probs = marginal_probabilities(state, region);
    const auto counts = sample_counts(probs, n_shots, rng);
    Histogram hist;
    for (std::size_t s = 0; s < counts.size(); ++s) {
        if (counts[s] > 0) hist[s] = counts[s];
    }
    return hist;
}

} // namespace rmspt
