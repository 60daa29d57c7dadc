#pragma once

// Statevectors of spin-1/2 chains and the bitstring utilities shared by all
// estimators.
//
// Encoding: site k (0-based) is bit k of the basis index, so site 1 of the
// usual 1-based chain labelling is the lowest-order bit. Bit value 0 is spin
// up with sigma^z|up> = +|up>; bit value 1 is spin down. Region-local
// bitstrings use the same rule with the region's sites taken in the order
// given (local bit k <- region[k]).

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rmspt/types.hpp"

namespace rmspt {

inline constexpr int kMaxStateSites = 24;

class StateVector {
  public:
    /// All spins up.
    explicit StateVector(int num_sites);
    /// Takes ownership of `amplitudes`; length must be 2^num_sites.
    StateVector(int num_sites, std::vector<Complex> amplitudes);

    static StateVector basis_state(int num_sites, BasisIndex index);
    /// Normalized complex-Gaussian vector (Haar-random pure state).
    static StateVector random(int num_sites, Rng& rng);

    int num_sites() const { return num_sites_; }
    std::size_t dimension() const { return amplitudes_.size(); }
    std::span<const Complex> amplitudes() const { return amplitudes_; }
    Complex operator[](BasisIndex index) const { return amplitudes_[index]; }

    double norm() const;
    StateVector normalized() const;

  private:
    int num_sites_;
    std::vector<Complex> amplitudes_;
};

Complex inner_product(const StateVector& bra, const StateVector& ket);
/// |<a|b>|^2
double overlap(const StateVector& a, const StateVector& b);
/// <sigma^z> at `site`.
double expectation_z(const StateVector& state, int site);

/// 2x2 unitary acting on one site.
struct LocalUnitary {
    int site = 0;
    Matrix2c matrix = Matrix2c::Identity();

    /// Throws std::invalid_argument when `matrix` is not unitary within 1e-12.
    static LocalUnitary make(int site, const Matrix2c& matrix);
};

bool is_unitary(const Matrix2c& m, double tol = 1e-12);

/// Throws std::out_of_range for a site outside [0, N).
StateVector apply_local_unitary(const StateVector& state, const LocalUnitary& u);
StateVector apply_local_unitaries(const StateVector& state, std::span<const LocalUnitary> us);

/// Spin configuration on an ordered region.
struct Bitstring {
    BasisIndex bits = 0;
    int length = 0;

    static Bitstring from_spins(std::span<const int> spins);
    std::vector<int> spins() const;
    int operator[](int k) const { return static_cast<int>((bits >> k) & 1U); }
    friend bool operator==(const Bitstring&, const Bitstring&) = default;
};

/// Number of positions where the spins differ; throws on length mismatch.
int hamming_distance(const Bitstring& a, const Bitstring& b);
/// Plain popcount version for hot loops on equal-length local indices.
inline int hamming_distance(BasisIndex a, BasisIndex b) { return __builtin_popcountll(a ^ b); }

/// Reverses the spin order (s_1..s_2n -> s_2n..s_1). Length must be even and positive.
Bitstring reflect_bitstring(const Bitstring& s);
BasisIndex reverse_bits(BasisIndex bits, int length);

using Histogram = std::map<BasisIndex, std::int64_t>;

/// Born distribution of `region` (local bit k <- region[k]).
std::vector<double> marginal_probabilities(const StateVector& state, std::span<const int> region);

/// Draws `n_shots` outcomes from a discrete distribution; counts per outcome.
std::vector<std::int64_t> sample_counts(std::span<const double> probs, int n_shots, Rng& rng);

/// Projective measurement of `region` repeated `n_shots` times.
Histogram sample_bitstrings(const StateVector& state, std::span<const int> region, int n_shots, Rng& rng);

} // namespace rmspt
