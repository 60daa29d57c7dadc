#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "rmspt/hamiltonian.hpp"
#include "rmspt/rng.hpp"

using namespace rmspt;

namespace {

HamiltonianSpec bare(int n) {
    HamiltonianSpec s;
    s.num_sites = n;
    s.pinning = 0.0;
    return s;
}

HamiltonianSpec busy(int n) {
    HamiltonianSpec s;
    s.num_sites = n;
    s.exchange = 0.8;
    s.exchange_prime = 1.7;
    s.anisotropy = 0.25;
    s.breaking = 0.4;
    s.neel_field = 1.3;
    s.neel_weight = 0.6;
    s.pinning = 0.05;
    return s;
}

VectorXc as_vector(const StateVector& s) {
    VectorXc v(s.dimension());
    for (std::size_t i = 0; i < s.dimension(); ++i) v[i] = s[i];
    return v;
}

double max_diff(const VectorXc& a, const StateVector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < b.dimension(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_SUITE("hamiltonian") {

TEST_CASE("validation names the offending field") {
    auto s = bare(7);
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("N must be"), std::invalid_argument);
    s = bare(18);
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("N must be"), std::invalid_argument);
    s = bare(4);
    s.neel_weight = 1.5;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("neel_weight"), std::invalid_argument);
    s = bare(4);
    s.anisotropy = std::nan("");
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("delta"), std::invalid_argument);
    CHECK_NOTHROW(bare(2).validate());
}

TEST_CASE("XX chain annihilates the fully polarized state") {
    auto s = bare(4);
    s.exchange_prime = 0.0;
    s.anisotropy = 0.0;
    const auto out = matvec(s, StateVector(4));
    CHECK(out.norm() == 0.0);
}

TEST_CASE("two-site XX chain matches the hand-built matrix") {
    auto s = bare(2);
    s.anisotropy = 0.0;
    s.exchange = 0.7;
    MatrixXc want = MatrixXc::Zero(4, 4);
    want(1, 2) = want(2, 1) = 0.7;
    CHECK((dense_matrix(s) - want).norm() < 1e-15);
}

TEST_CASE("two-site Heisenberg singlet energy") {
    // (J/2) sigma.sigma on the singlet: sigma.sigma has eigenvalue -3.
    auto s = bare(2);
    const double h = 1.0 / std::sqrt(2.0);
    const StateVector singlet(2, {0.0, h, -h, 0.0});
    const auto out = matvec(s, singlet);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(out[i] + 1.5 * singlet[i]) < 1e-14);
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(dense_matrix(s));
    CHECK(es.eigenvalues()[0] == doctest::Approx(-1.5).epsilon(1e-14));
}

TEST_CASE("bond matrix equals the two-site dense Hamiltonian") {
    auto s = busy(2);
    s.neel_field = 0.0;
    s.pinning = 0.0;
    CHECK((MatrixXc(bond_matrix(s, 0)) - dense_matrix(s)).norm() < 1e-14);
}

TEST_CASE("dense matrix agrees with matvec on every basis vector at N=6") {
    const auto spec = busy(6);
    const MatrixXc h = dense_matrix(spec);
    for (BasisIndex k = 0; k < 64; ++k) {
        const auto col = matvec(spec, StateVector::basis_state(6, k));
        REQUIRE(max_diff(h.col(static_cast<Eigen::Index>(k)), col) < 1e-12);
    }
    Eigen::ComplexEigenSolver<MatrixXc> es(h);
    CHECK(es.eigenvalues().imag().cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("matvec agrees with the dense matrix on 100 random vectors at N=8") {
    const auto spec = busy(8);
    const MatrixXc h = dense_matrix(spec);
    Rng rng(21);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto psi = StateVector::random(8, rng);
        worst = std::max(worst, max_diff(h * as_vector(psi), matvec(spec, psi)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("matvec is Hermitian") {
    const auto spec = busy(10);
    Rng rng(2);
    const auto phi = StateVector::random(10, rng);
    const auto psi = StateVector::random(10, rng);
    const Complex a = inner_product(phi, matvec(spec, psi));
    const Complex b = std::conj(inner_product(psi, matvec(spec, phi)));
    CHECK(std::abs(a - b) < 1e-10);
}

TEST_CASE("without B the Hamiltonian conserves total magnetization") {
    auto spec = busy(10);
    spec.breaking = 0.0;
    Rng rng(8);
    const auto psi = StateVector::random(10, rng);
    const HamiltonianOperator h(spec);
    // <psi|[H, Sz]|psi> = <H psi|Sz psi> - <Sz psi|H psi>
    const Complex comm = inner_product(h.apply(psi), total_sz(psi)) - inner_product(total_sz(psi), h.apply(psi));
    CHECK(std::abs(comm) < 1e-10);
    // Full operator identity, not only the expectation value.
    const auto lhs = h.apply(total_sz(psi));
    const auto rhs = total_sz(h.apply(psi));
    double err = 0.0;
    for (std::size_t i = 0; i < psi.dimension(); ++i) err = std::max(err, std::abs(lhs[i] - rhs[i]));
    CHECK(err < 1e-10);
}

TEST_CASE("B breaks magnetization conservation") {
    const auto spec = busy(6);
    Rng rng(8);
    const auto psi = StateVector::random(6, rng);
    const HamiltonianOperator h(spec);
    const auto lhs = h.apply(total_sz(psi));
    const auto rhs = total_sz(h.apply(psi));
    double err = 0.0;
    for (std::size_t i = 0; i < psi.dimension(); ++i) err = std::max(err, std::abs(lhs[i] - rhs[i]));
    CHECK(err > 1e-3);
}

TEST_CASE("bond-centred reflection commutes with the symmetric Hamiltonian") {
    // Bonds (k, k+1) and (N-2-k, N-1-k) carry the same coupling for even N.
    auto spec = bare(10);
    spec.exchange_prime = 0.3;
    spec.anisotropy = 1.4;
    Rng rng(31);
    const auto psi = StateVector::random(10, rng);
    const auto lhs = matvec(spec, reflect_chain(psi));
    const auto rhs = reflect_chain(matvec(spec, psi));
    double err = 0.0;
    for (std::size_t i = 0; i < psi.dimension(); ++i) err = std::max(err, std::abs(lhs[i] - rhs[i]));
    CHECK(err < 1e-10);

    spec.pinning = 0.05;
    const auto lhs2 = matvec(spec, reflect_chain(psi));
    const auto rhs2 = reflect_chain(matvec(spec, psi));
    err = 0.0;
    for (std::size_t i = 0; i < psi.dimension(); ++i) err = std::max(err, std::abs(lhs2[i] - rhs2[i]));
    CHECK(err > 1e-4);
}

TEST_CASE("staggered field favours the state with site 0 down") {
    auto spec = bare(6);
    spec.exchange = spec.exchange_prime = 0.0;
    spec.neel_field = 2.0;
    const auto neel = neel_state(6);
    CHECK(neel[0b010101] == Complex(1.0));
    const double e = HamiltonianOperator(spec).expectation(neel);
    CHECK(e == doctest::Approx(-12.0));
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(dense_matrix(spec));
    CHECK(es.eigenvalues()[0] == doctest::Approx(e));
}

TEST_CASE("dimension mismatch and oversized dense requests throw") {
    CHECK_THROWS_AS(matvec(bare(4), StateVector(6)), std::invalid_argument);
    CHECK_THROWS_AS(dense_matrix(bare(12)), std::invalid_argument);
}

}
