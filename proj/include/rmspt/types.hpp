#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace rmspt {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

/// Integer encoding of a computational basis state. Bit k holds site k
/// (sites are 0-based throughout the library); bit value 0 is spin up.
using BasisIndex = std::uint64_t;

/// All randomness flows through explicitly seeded 64-bit Mersenne streams.
using Rng = std::mt19937_64;

namespace pauli {

inline Matrix2c identity() { return Matrix2c::Identity(); }

inline Matrix2c x() {
    Matrix2c m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline Matrix2c y() {
    Matrix2c m;
    m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    return m;
}

inline Matrix2c z() {
    Matrix2c m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

} // namespace pauli

/// sigma^z eigenvalue of a bit: up (0) -> +1, down (1) -> -1.
constexpr int spin_z(BasisIndex bit) { return bit ? -1 : 1; }

} // namespace rmspt
