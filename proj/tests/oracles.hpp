#pragma once

// Brute-force reference computations used only by the tests. They follow the
// textbook definitions with plain loops and share no code with the library's
// contraction routines.

#include <cmath>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "rmspt/spin_core.hpp"
#include "rmspt/types.hpp"

namespace oracle {

using rmspt::BasisIndex;
using rmspt::Complex;
using rmspt::MatrixXc;

/// rho_{ab} = sum_env psi(a, env) psi*(b, env), local bit k <- sites[k].
inline MatrixXc rdm(const rmspt::StateVector& psi, const std::vector<int>& sites) {
    const int L = static_cast<int>(sites.size());
    const std::size_t d = std::size_t{1} << L;
    MatrixXc rho = MatrixXc::Zero(d, d);
    BasisIndex mask = 0;
    for (int s : sites) mask |= BasisIndex{1} << s;
    auto local = [&](BasisIndex full) {
        BasisIndex out = 0;
        for (int k = 0; k < L; ++k) out |= ((full >> sites[k]) & 1U) << k;
        return out;
    };
    for (BasisIndex x = 0; x < psi.dimension(); ++x) {
        for (BasisIndex y = 0; y < psi.dimension(); ++y) {
            if ((x & ~mask) != (y & ~mask)) continue;
            rho(local(x), local(y)) += psi[x] * std::conj(psi[y]);
        }
    }
    return rho;
}

/// Kronecker product with local bit 0 as the rightmost factor.
inline MatrixXc kron_sites(const std::vector<rmspt::Matrix2c>& per_bit) {
    MatrixXc out = MatrixXc::Identity(1, 1);
    for (int k = static_cast<int>(per_bit.size()) - 1; k >= 0; --k) {
        MatrixXc next = Eigen::kroneckerProduct(out, per_bit[k]).eval();
        out = next;
    }
    return out;
}

inline BasisIndex reverse(BasisIndex s, int L) {
    BasisIndex out = 0;
    for (int k = 0; k < L; ++k)
        if ((s >> k) & 1U) out |= BasisIndex{1} << (L - 1 - k);
    return out;
}

/// Tr[rho R] with R the explicit bit-reversal permutation matrix.
inline double zr(const MatrixXc& rho, int L) {
    const std::size_t d = std::size_t{1} << L;
    MatrixXc R = MatrixXc::Zero(d, d);
    for (BasisIndex s = 0; s < d; ++s) R(reverse(s, L), s) = 1.0;
    return (rho * R).trace().real();
}

/// Partial transpose on the low `low` bits, written out element by element.
inline MatrixXc transpose_low(const MatrixXc& rho, int L, int low) {
    const std::size_t d = std::size_t{1} << L;
    const BasisIndex m = (BasisIndex{1} << low) - 1;
    MatrixXc out(d, d);
    for (BasisIndex r = 0; r < d; ++r)
        for (BasisIndex c = 0; c < d; ++c) {
            const BasisIndex r2 = (r & ~m) | (c & m);
            const BasisIndex c2 = (c & ~m) | (r & m);
            out(r, c) = rho(r2, c2);
        }
    return out;
}

inline Complex zt(const MatrixXc& rho, int L, int n1) {
    std::vector<rmspt::Matrix2c> u(L, rmspt::Matrix2c::Identity());
    for (int k = 0; k < n1; ++k) u[k] = rmspt::pauli::y();
    const MatrixXc U = kron_sites(u);
    return (rho * U * transpose_low(rho, L, n1) * U.adjoint()).trace();
}

enum class Pair { Swap, ZZ, Id, Transpose };

/// Tr[(prod_k O_k)(A (x) B)] by the definition, summing over all index quadruples.
inline Complex two_copy(const MatrixXc& a, const MatrixXc& b, const std::vector<Pair>& ops) {
    const int L = static_cast<int>(ops.size());
    const BasisIndex d = BasisIndex{1} << L;
    Complex total = 0.0;
    for (BasisIndex i = 0; i < d; ++i)
        for (BasisIndex j = 0; j < d; ++j)
            for (BasisIndex ip = 0; ip < d; ++ip)
                for (BasisIndex jp = 0; jp < d; ++jp) {
                    // <i j| O |ip jp>
                    double w = 1.0;
                    for (int k = 0; k < L && w != 0.0; ++k) {
                        const int a1 = (i >> k) & 1, b1 = (j >> k) & 1, a2 = (ip >> k) & 1, b2 = (jp >> k) & 1;
                        switch (ops[k]) {
                        case Pair::Swap: w *= (a1 == b2 && b1 == a2) ? 1.0 : 0.0; break;
                        case Pair::ZZ: w *= (a1 == a2 && b1 == b2) ? (a1 ? -1.0 : 1.0) * (b1 ? -1.0 : 1.0) : 0.0; break;
                        case Pair::Id: w *= (a1 == a2 && b1 == b2) ? 1.0 : 0.0; break;
                        case Pair::Transpose: w *= (a1 == b1 && a2 == b2) ? 1.0 : 0.0; break;
                        }
                    }
                    if (w != 0.0) total += w * a(ip, i) * b(jp, j);
                }
    return total;
}

inline std::vector<Pair> d2_ops(int m) {
    std::vector<Pair> ops(m, Pair::Swap);
    ops.insert(ops.end(), m, Pair::ZZ);
    ops.insert(ops.end(), m, Pair::Swap);
    return ops;
}

/// The 24 single-qubit Cliffords (up to phase), a unitary 2-design: averaging
/// a quadratic function of U over them gives the exact Haar average.
inline std::vector<rmspt::Matrix2c> clifford_group() {
    rmspt::Matrix2c h, s;
    const double r = 1.0 / std::sqrt(2.0);
    h << r, r, r, -r;
    s << 1.0, 0.0, 0.0, Complex(0.0, 1.0);
    std::vector<rmspt::Matrix2c> group{rmspt::Matrix2c::Identity()};
    auto known = [&](const rmspt::Matrix2c& m) {
        for (const auto& g : group) {
            // equal up to a global phase
            if (std::abs(std::abs((g.adjoint() * m).trace()) - 2.0) < 1e-9) return true;
        }
        return false;
    };
    for (std::size_t i = 0; i < group.size(); ++i) {
        for (const auto& gen : {h, s}) {
            const rmspt::Matrix2c m = gen * group[i];
            if (!known(m)) group.push_back(m);
        }
    }
    return group;
}

inline double purity(const MatrixXc& rho) { return (rho * rho).trace().real(); }

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace oracle
