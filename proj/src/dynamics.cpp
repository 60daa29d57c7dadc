#include "rmspt/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "rmspt/kernels.hpp"
#include "rmspt/rng.hpp"

namespace rmspt {
namespace {

Matrix4c exp_minus_i(const Matrix4c& h, double tau) {
    Eigen::SelfAdjointEigenSolver<Matrix4c> eig(h);
    Eigen::Vector4cd phases;
    for (int k = 0; k < 4; ++k) phases(k) = std::polar(1.0, -tau * eig.eigenvalues()(k));
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

/// Bond gates and diagonal profiles shared by all steps of one evolution.
class Propagator {
  public:
    Propagator(const HamiltonianSpec& spec, double h) : spec_(spec), h_(h) {
        spec.validate();
        const int n = spec.num_sites;
        for (int j = 0; j + 1 < n; ++j) half_gates_.push_back(exp_minus_i(bond_matrix(spec, j), 0.5 * h));
        const std::size_t dim = std::size_t{1} << n;
        neel_.assign(dim, 0.0);
        pin_.assign(dim, 0.0);
        for (BasisIndex s = 0; s < dim; ++s) {
            for (int k = 0; k < n; ++k) neel_[s] += (k % 2 == 0 ? 1.0 : -1.0) * spin_z((s >> k) & 1U);
            pin_[s] = spin_z(s & 1U);
        }
        diag_.resize(dim);
    }

    void step(std::vector<Complex>& amps, double neel_weight) {
        apply_bonds(amps, 0);
        apply_bonds(amps, 1);
        const double field = neel_weight * spec_.neel_field;
        for (std::size_t s = 0; s < diag_.size(); ++s) diag_[s] = field * neel_[s] + spec_.pinning * pin_[s];
        kernels::parallel::diagonal_phase(amps, diag_, h_);
        apply_bonds(amps, 1);
        apply_bonds(amps, 0);
    }

  private:
    void apply_bonds(std::vector<Complex>& amps, int parity) {
        for (std::size_t j = parity; j < half_gates_.size(); j += 2) {
            kernels::parallel::apply_two_site(amps, static_cast<int>(j), half_gates_[j]);
        }
    }

    HamiltonianSpec spec_;
    double h_;
    std::vector<Matrix4c> half_gates_;
    std::vector<double> neel_;
    std::vector<double> pin_;
    std::vector<double> diag_;
};

double squared_norm(const std::vector<Complex>& amps) {
    double acc = 0.0;
    for (const auto& a : amps) acc += std::norm(a);
    return acc;
}

} // namespace

void RampSpec::validate() const {
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw std::invalid_argument("t_F must be positive");
    if (!(dt > 0.0) || dt > t_final) throw std::invalid_argument("dt must satisfy 0 < dt <= t_F");
    if (!std::isfinite(neel_field)) throw std::invalid_argument("Delta must be finite");
    if (ramp_exponent < 1) throw std::invalid_argument("ramp_exponent must be >= 1");
    for (double t : sample_times) {
        if (!(t >= 0.0 && t <= t_final)) throw std::invalid_argument("sample_times must lie in [0, t_F]");
    }
}

double ramp_profile(const RampSpec& ramp, double t) {
    return std::pow(1.0 - t / ramp.t_final, ramp.ramp_exponent);
}

void trotter_step(const HamiltonianSpec& spec, std::vector<Complex>& amps, double h) {
    Propagator prop(spec, h);
    prop.step(amps, spec.neel_weight);
}

StateVector evolve(const HamiltonianSpec& spec, const StateVector& state, double t, double dt) {
    if (!(t >= 0.0) || !(dt > 0.0)) throw std::invalid_argument("evolve: need t >= 0 and dt > 0");
    if (state.num_sites() != spec.num_sites) throw std::invalid_argument("evolve: state size mismatch");
    std::vector<Complex> amps(state.amplitudes().begin(), state.amplitudes().end());
    const int steps = static_cast<int>(std::ceil(t / dt - 1e-9));
    if (steps > 0) {
        Propagator prop(spec, t / steps);
        for (int k = 0; k < steps; ++k) prop.step(amps, spec.neel_weight);
    }
    return StateVector(state.num_sites(), std::move(amps));
}

EvolutionResult adiabatic_evolve(const HamiltonianSpec& spec, const RampSpec& ramp) {
    ramp.validate();
    HamiltonianSpec target = spec;
    target.neel_field = ramp.neel_field;
    target.neel_weight = 1.0;
    target.validate();

    EvolutionResult out;
    if (ramp.neel_field < 10.0 * std::abs(spec.exchange)) {
        out.warnings.push_back("Delta < 10 J: the Neel state is not close to the initial ground state");
    }
    out.steps = static_cast<int>(std::ceil(ramp.t_final / ramp.dt - 1e-9));
    out.step_size = ramp.t_final / out.steps;
    const double h = out.step_size;

    std::vector<int> wanted;
    for (double t : ramp.sample_times) wanted.push_back(static_cast<int>(std::lround(t / h)));
    wanted.push_back(out.steps);
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

    const StateVector start = neel_state(spec.num_sites);
    std::vector<Complex> amps(start.amplitudes().begin(), start.amplitudes().end());
    Propagator prop(target, h);
    std::size_t next = 0;
    for (int k = 0; k <= out.steps; ++k) {
        if (next < wanted.size() && wanted[next] == k) {
            out.snapshots.push_back({k * h, StateVector(spec.num_sites, amps)});
            ++next;
        }
        if (k == out.steps) break;
        prop.step(amps, ramp_profile(ramp, (k + 0.5) * h));
    }
    const double drift = std::abs(squared_norm(amps) - 1.0);
    if (drift > 1e-8) {
        throw std::runtime_error("norm drift " + std::to_string(drift) + " exceeds 1e-8; reduce dt");
    }
    return out;
}

std::vector<MonitorRow> monitor_invariants(const std::vector<Snapshot>& snapshots, const PartitionSpec& partition,
                                           const std::set<InvariantKind>& which, const MonitorMode& mode) {
    if (snapshots.empty()) throw std::invalid_argument("monitor_invariants: no snapshots");
    std::vector<MonitorRow> rows;
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        const auto rdm = reduced_density_matrix(snapshots[i].state, partition);
        for (InvariantKind kind : which) {
            MonitorRow row;
            row.time = snapshots[i].time;
            row.kind = kind;
            row.exact = exact_invariant(kind, rdm);
            if (mode.sampled) {
                ProtocolParams params = mode.params;
                params.kind = protocol_for(kind);
                params.partition = partition;
                params.master_seed = derive_seed(mode.params.master_seed, StreamTag::Monitor,
                                                 {i, static_cast<std::uint64_t>(kind)});
                auto est = estimate_invariant(kind, campaign_data(run_campaign(snapshots[i].state, params), params));
                est.master_seed = params.master_seed;
                est.exact_reference = row.exact.raw;
                est.exact_normalized_reference = row.exact.normalized;
                row.sampled = std::move(est);
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

} // namespace rmspt
