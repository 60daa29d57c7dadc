#pragma once

// Data-parallel inner loops. Every kernel exists twice: `serial` is the
// straightforward reference kept for testing and benchmarking, `parallel` is
// the OpenMP version used by the library. Parallel kernels partition work in
// a way that does not depend on the thread count, so results are identical
// for any --jobs value.

#include <span>
#include <vector>

#include "rmspt/types.hpp"

namespace rmspt::kernels {

/// Nearest-neighbour spin-1/2 chain in the computational basis. Bond j
/// couples sites j and j+1; all per-bond vectors have num_sites - 1 entries.
struct ChainTerms {
    int num_sites = 0;
    std::vector<double> flip;  ///< amplitude of |01> <-> |10> on bond j
    std::vector<double> zz;    ///< coefficient of sz_j sz_{j+1}
    std::vector<double> twist; ///< coefficient of (sx_j sz_{j+1} - sz_j sx_{j+1})
    std::vector<double> field; ///< coefficient of sz_k, one per site
};

using Amplitudes = std::span<Complex>;
using ConstAmplitudes = std::span<const Complex>;

/// Two-site gates act on (site, site+1) with local index b_site + 2 * b_{site+1}.
namespace serial {

void chain_matvec(const ChainTerms& terms, ConstAmplitudes in, Amplitudes out);
void apply_one_site(Amplitudes amps, int site, const Matrix2c& u);
void apply_two_site(Amplitudes amps, int site, const Matrix4c& u);
void diagonal_phase(Amplitudes amps, std::span<const double> diag, double scale);

/// Born probabilities of `sites` (local bit k <- sites[k]), other sites traced out.
std::vector<double> marginal_probabilities(ConstAmplitudes amps, std::span<const int> sites);

/// p^T (W_0 (x) W_1 (x) ...) q with W_k acting on local bit k; direct double sum.
double factorized_form(std::span<const double> p, std::span<const Eigen::Matrix2d> weights,
                       std::span<const double> q);

} // namespace serial

namespace parallel {

void chain_matvec(const ChainTerms& terms, ConstAmplitudes in, Amplitudes out);
void apply_one_site(Amplitudes amps, int site, const Matrix2c& u);
void apply_two_site(Amplitudes amps, int site, const Matrix4c& u);
void diagonal_phase(Amplitudes amps, std::span<const double> diag, double scale);
std::vector<double> marginal_probabilities(ConstAmplitudes amps, std::span<const int> sites);

/// Same value as the serial form, computed by per-bit transforms in O(L 2^L).
double factorized_form(std::span<const double> p, std::span<const Eigen::Matrix2d> weights,
                       std::span<const double> q);

} // namespace parallel

/// Inserts a zero bit at position `pos`, shifting higher bits up.
constexpr BasisIndex insert_zero_bit(BasisIndex x, int pos) {
    const BasisIndex low = x & ((BasisIndex{1} << pos) - 1);
    return ((x >> pos) << (pos + 1)) | low;
}

/// Local index of basis state `index` restricted to `sites`.
inline BasisIndex extract_bits(BasisIndex index, std::span<const int> sites) {
    BasisIndex local = 0;
    for (std::size_t k = 0; k < sites.size(); ++k) {
        local |= ((index >> sites[k]) & 1U) << k;
    }
    return local;
}

} // namespace rmspt::kernels
