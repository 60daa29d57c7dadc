#pragma once

// Exact reduced density matrices and direct contractions of the invariants.
// Matrices act on the interval's local index (see partition.hpp for the bit
// layout); everything here is a dense reference computation.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "rmspt/partition.hpp"
#include "rmspt/spin_core.hpp"
#include "rmspt/types.hpp"

namespace rmspt {

inline constexpr int kMaxRdmSites = 12;

enum class InvariantKind { R, T, D2, KB };

std::string to_string(InvariantKind kind);
InvariantKind parse_invariant_kind(const std::string& text);

struct ReducedDensityMatrix {
    PartitionSpec partition;
    MatrixXc matrix;

    int num_bits() const { return partition.interval_size(); }
};

/// Tr over the complement of the partition's interval. |I| <= 12.
ReducedDensityMatrix reduced_density_matrix(const StateVector& state, const PartitionSpec& partition);

double purity(const MatrixXc& rho);
double purity(const ReducedDensityMatrix& rdm);

/// Keeps the local bits listed in `keep` (new bit k <- keep[k]), traces the rest.
MatrixXc partial_trace_keep(const MatrixXc& rho, int num_bits, std::span<const int> keep);
/// Reduced matrix of segment k of the partition.
MatrixXc segment_rdm(const ReducedDensityMatrix& rdm, int segment);

/// (rho^{T1})_{(a,b),(a',b')} = rho_{(a',b),(a,b')}, a = the low `low_bits` bits.
MatrixXc partial_transpose_low(const MatrixXc& rho, int num_bits, int low_bits);
/// (prod_k P_k) rho (prod_k P_k)^dagger for one Pauli P on each listed local bit.
MatrixXc conjugate_by_pauli(const MatrixXc& rho, int num_bits, std::span<const int> bits, const Matrix2c& pauli);

/// Per-site operator on a (copy 1, copy 2) pair of the same site.
enum class PairOp { Identity, Swap, Transpose, ZZ };

/// Tr[(prod_k O_k) (A (x) B)] with O_k acting on local bit k of both copies.
/// Runs in O(4^L) by enumerating the non-zero pattern of each factor.
Complex two_copy_trace(const MatrixXc& a, const MatrixXc& b, std::span<const PairOp> ops);

struct InvariantValue {
    InvariantKind kind = InvariantKind::R;
    double raw = 0.0;
    double normalized = 0.0;
    std::vector<double> segment_purities;  ///< one per segment
    double normalizing_purity = 0.0;       ///< mean purity entering the normalization
    double imaginary_residual = 0.0;       ///< |Im| of the assembled trace before it was dropped
};

/// Tr[rho R] with R reversing the interval. Requires two equal segments.
InvariantValue exact_zr(const ReducedDensityMatrix& rdm);
/// Tr[rho u rho^{T1} u^dagger], u = prod sigma^y on I1. Requires two equal segments.
InvariantValue exact_zt(const ReducedDensityMatrix& rdm);
/// Tr[S_{I1} Z_{I2} S_{I3} (rho' (x) rho)], rho' = sigma^x on I1 conjugating rho.
InvariantValue exact_zd2(const ReducedDensityMatrix& rdm);
/// Tr[S_{I1} Z_{I2} S_{I3} (u rho^{T1} u^dagger (x) rho)], u = prod sigma^y on I1.
InvariantValue exact_zkb(const ReducedDensityMatrix& rdm);

InvariantValue exact_zd2(const StateVector& state, const PartitionSpec& partition);
InvariantValue exact_zkb(const StateVector& state, const PartitionSpec& partition);

InvariantValue exact_invariant(InvariantKind kind, const ReducedDensityMatrix& rdm);
InvariantValue exact_invariant(InvariantKind kind, const StateVector& state, const PartitionSpec& partition);

} // namespace rmspt
