#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "rmspt/dynamics.hpp"
#include "rmspt/groundstate.hpp"
#include "rmspt/hamiltonian.hpp"
#include "rmspt/rng.hpp"

using namespace rmspt;

namespace {

HamiltonianSpec chain(int n, double jp) {
    HamiltonianSpec s;
    s.num_sites = n;
    s.exchange_prime = jp;
    s.anisotropy = 0.25;
    return s;
}

double distance(const StateVector& a, const StateVector& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.dimension(); ++i) sum += std::norm(a[i] - b[i]);
    return std::sqrt(sum);
}

StateVector exact_evolution(const HamiltonianSpec& spec, const StateVector& psi, double t) {
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(dense_matrix(spec));
    VectorXc v(psi.dimension());
    for (std::size_t i = 0; i < psi.dimension(); ++i) v[i] = psi[i];
    VectorXc phases(psi.dimension());
    for (Eigen::Index k = 0; k < phases.size(); ++k) phases[k] = std::polar(1.0, -es.eigenvalues()[k] * t);
    const VectorXc out = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint() * v;
    return StateVector(psi.num_sites(), std::vector<Complex>(out.data(), out.data() + out.size()));
}

RampSpec ramp(double t_final, std::vector<double> samples = {}) {
    RampSpec r;
    r.t_final = t_final;
    r.sample_times = std::move(samples);
    return r;
}

} // namespace

TEST_SUITE("dynamics") {

TEST_CASE("ramp profile endpoints and shape") {
    const auto r = ramp(20.0);
    CHECK(ramp_profile(r, 0.0) == 1.0);
    CHECK(ramp_profile(r, 20.0) == 0.0);
    for (double t : {1.0, 7.5, 13.0}) CHECK(ramp_profile(r, t) == doctest::Approx(std::pow(t / 20.0 - 1.0, 4)));
}

TEST_CASE("ramp validation") {
    auto r = ramp(1.0);
    r.dt = 2.0;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
    r = ramp(1.0, {1.5});
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
    r = ramp(-1.0);
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
    r = ramp(1.0);
    r.ramp_exponent = 0;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
}

TEST_CASE("step size divides t_F and snapshots include the endpoint") {
    auto r = ramp(1.0, {0.0, 0.5});
    r.dt = 0.3;
    const auto evo = adiabatic_evolve(chain(6, 0.5), r);
    CHECK(evo.steps == 4);
    CHECK(evo.step_size == doctest::Approx(0.25));
    REQUIRE(evo.snapshots.size() == 3);
    CHECK(evo.snapshots.front().time == 0.0);
    CHECK(evo.snapshots.back().time == doctest::Approx(1.0));
    CHECK(distance(evo.snapshots.front().state, neel_state(6)) == 0.0);
}

TEST_CASE("weak staggered field triggers a warning") {
    auto r = ramp(0.5);
    r.neel_field = 5.0;
    CHECK(!adiabatic_evolve(chain(6, 0.5), r).warnings.empty());
    r.neel_field = 40.0;
    CHECK(adiabatic_evolve(chain(6, 0.5), r).warnings.empty());
}

TEST_CASE("sudden quench leaves the Neel state") {
    auto r = ramp(0.01);
    const auto evo = adiabatic_evolve(chain(12, 0.2), r);
    CHECK(evo.steps == 1);
    CHECK(overlap(evo.snapshots.back().state, neel_state(12)) > 0.99);
}

TEST_CASE("slow ramp reaches the ground state") {
    for (double jp : {0.2, 5.0}) {
        const auto spec = chain(12, jp);
        const auto evo = adiabatic_evolve(spec, ramp(20.0));
        const auto gs = ground_state(spec);
        CHECK(overlap(evo.snapshots.back().state, gs.state) > 0.9);
        CHECK(std::abs(evo.snapshots.back().state.norm() - 1.0) < 1e-8);
    }
}

TEST_CASE("energy is conserved without a ramp") {
    Rng rng(3);
    auto spec = chain(10, 0.6);
    const auto psi = StateVector::random(10, rng);
    const HamiltonianOperator h(spec);
    const auto later = evolve(spec, psi, 10.0, 0.01);
    CHECK(std::abs(h.expectation(later) - h.expectation(psi)) <= 1e-6);
    CHECK(std::abs(later.norm() - 1.0) < 1e-10);
}

TEST_CASE("evolution matches the exact propagator") {
    Rng rng(4);
    auto spec = chain(6, 0.7);
    spec.breaking = 0.2;
    spec.neel_field = 0.5;
    const auto psi = StateVector::random(6, rng);
    CHECK(distance(evolve(spec, psi, 1.0, 0.001), exact_evolution(spec, psi, 1.0)) < 1e-5);
}

TEST_CASE("Trotter splitting is second order") {
    Rng rng(5);
    auto spec = chain(8, 0.5);
    spec.breaking = 0.3;
    spec.neel_field = 1.0;
    const auto psi = StateVector::random(8, rng);
    const double t = 2.0, dt = 0.1;
    const auto ref = evolve(spec, psi, t, dt / 4);
    const double coarse = distance(evolve(spec, psi, t, dt), ref);
    const double fine = distance(evolve(spec, psi, t, dt / 2), ref);
    // Against the dt/4 reference the ideal ratio is (1 - 1/16) / (1/4 - 1/16) = 5.
    const double ratio = coarse / fine;
    CHECK(ratio > 5.0 / 2.0);
    CHECK(ratio < 5.0 * 2.0);
}

TEST_CASE("monitoring the Neel state at t = 0") {
    const auto evo = adiabatic_evolve(chain(8, 0.2), ramp(0.5, {0.0}));
    const auto rows = monitor_invariants(evo.snapshots, PartitionSpec::reflection_pair(8, 1), {InvariantKind::R},
                                         MonitorMode{});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].time == 0.0);
    CHECK(rows[0].exact.raw == doctest::Approx(0.0));
    CHECK(!rows[0].sampled);
    CHECK_THROWS_AS(monitor_invariants({}, PartitionSpec::reflection_pair(8, 1), {InvariantKind::R}, MonitorMode{}),
                    std::invalid_argument);
}

TEST_CASE("monitored endpoint matches the ground state") {
    const auto spec = chain(12, 0.2);
    const auto evo = adiabatic_evolve(spec, ramp(20.0, {10.0}));
    const auto pair = PartitionSpec::reflection_pair(12, 2);
    const auto rows = monitor_invariants(evo.snapshots, pair, {InvariantKind::R}, MonitorMode{});
    const double gs = exact_invariant(InvariantKind::R, ground_state(spec).state, pair).normalized;
    CHECK(std::abs(rows.back().exact.normalized - gs) <= 0.1);
}

TEST_CASE("intermediate |Z_R| shrinks with n") {
    const auto evo = adiabatic_evolve(chain(12, 0.2), ramp(20.0, {6.0}));
    std::vector<double> mags;
    for (int n : {1, 2, 3}) {
        const auto rows = monitor_invariants({evo.snapshots[0]}, PartitionSpec::reflection_pair(12, n),
                                             {InvariantKind::R}, MonitorMode{});
        mags.push_back(std::abs(rows[0].exact.normalized));
    }
    CHECK(evo.snapshots[0].time == doctest::Approx(6.0));
    CHECK(mags[0] > mags[1]);
    CHECK(mags[1] > mags[2]);
}

TEST_CASE("sampled monitoring is reproducible") {
    const auto evo = adiabatic_evolve(chain(8, 0.2), ramp(1.0));
    MonitorMode mode;
    mode.sampled = true;
    mode.params.num_unitaries = 20;
    mode.params.num_shots = 20;
    mode.params.master_seed = 9;
    const auto pair = PartitionSpec::reflection_pair(8, 1);
    const auto a = monitor_invariants(evo.snapshots, pair, {InvariantKind::R, InvariantKind::T}, mode);
    const auto b = monitor_invariants(evo.snapshots, pair, {InvariantKind::R, InvariantKind::T}, mode);
    REQUIRE(a.size() == 2);
    REQUIRE(a[0].sampled);
    CHECK(a[0].sampled->value == b[0].sampled->value);
    CHECK(a[1].kind == InvariantKind::T);
}

}
