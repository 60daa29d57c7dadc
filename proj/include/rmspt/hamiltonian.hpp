#pragma once

// Bond-alternating XXZ chain with open boundaries and its optional extras:
//
//   H = sum_j (c_j / 2) (sx sx + sy sy + delta sz sz)_{j,j+1}     c_j = J on bonds (0,1),(2,3),...
//                                                                 c_j = J' on bonds (1,2),(3,4),...
//     + B sum_j (sx_j sz_{j+1} - sz_j sx_{j+1})                   reflection/D2-breaking term
//     + neel_weight * Delta * sum_k (-1)^k sz_k                   staggered field, k 0-based
//     + delta_p sz_0                                              boundary pinning field
//
// With Delta > 0 the staggered field's ground state is |dn up dn up ...>,
// the adiabatic ramp's starting point; delta_p > 0 likewise favours site 0 down.

#include <vector>

#include "rmspt/kernels.hpp"
#include "rmspt/spin_core.hpp"
#include "rmspt/types.hpp"

namespace rmspt {

inline constexpr int kMaxHamiltonianSites = 16;
inline constexpr int kMaxDenseSites = 10;

struct HamiltonianSpec {
    int num_sites = 12;
    double exchange = 1.0;        ///< J
    double exchange_prime = 1.0;  ///< J'
    double anisotropy = 1.0;      ///< delta
    double breaking = 0.0;        ///< B
    double neel_field = 0.0;      ///< Delta
    double pinning = 0.05;        ///< delta_p
    double neel_weight = 1.0;     ///< f(t) multiplying the staggered field

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    friend bool operator==(const HamiltonianSpec&, const HamiltonianSpec&) = default;
};

kernels::ChainTerms compile_terms(const HamiltonianSpec& spec);

/// Matrix-free operator; matvec goes through the OpenMP chain kernel.
class HamiltonianOperator {
  public:
    explicit HamiltonianOperator(const HamiltonianSpec& spec);

    int num_sites() const { return terms_.num_sites; }
    std::size_t dimension() const { return std::size_t{1} << terms_.num_sites; }
    const kernels::ChainTerms& terms() const { return terms_; }

    void apply(std::span<const Complex> in, std::span<Complex> out) const;
    StateVector apply(const StateVector& state) const;
    double expectation(const StateVector& state) const;

  private:
    kernels::ChainTerms terms_;
};

/// H|psi> (unnormalized). Throws std::invalid_argument on dimension mismatch.
StateVector matvec(const HamiltonianSpec& spec, const StateVector& state);

/// Dense matrix assembled from Kronecker products of Pauli matrices. This
/// path shares no code with the matvec kernels and serves as their oracle.
MatrixXc dense_matrix(const HamiltonianSpec& spec);

/// Hermitian 4x4 bond operator on (j, j+1), local index b_j + 2 b_{j+1}.
Matrix4c bond_matrix(const HamiltonianSpec& spec, int bond);

/// sz_k coefficients of the diagonal single-site terms (staggered + pinning).
std::vector<double> field_coefficients(const HamiltonianSpec& spec);

/// |dn up dn up ...>: site 0 down.
StateVector neel_state(int num_sites);

/// Mirror image across the chain centre (site k <-> N-1-k).
StateVector reflect_chain(const StateVector& state);

/// sum_k sz_k applied to a state.
StateVector total_sz(const StateVector& state);

} // namespace rmspt
