#pragma once

// Second-order Trotter evolution of the chain and the adiabatic ramp
// H(t) = H_XXZ + f(t) H_Neel, f(t) = (1 - t/t_F)^p, started from the Neel state.
// One step of length h is A(h/2) B(h/2) C(h) B(h/2) A(h/2) with A the even
// bonds, B the odd bonds and C the diagonal fields evaluated at the midpoint.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rmspt/hamiltonian.hpp"
#include "rmspt/partition.hpp"
#include "rmspt/protocols.hpp"
#include "rmspt/rdm.hpp"
#include "rmspt/spin_core.hpp"

namespace rmspt {

struct RampSpec {
    double t_final = 20.0;  ///< t_F in units of 1/J
    double dt = 0.01;
    double neel_field = 40.0;  ///< Delta at f = 1
    int ramp_exponent = 4;
    std::vector<double> sample_times;  ///< t_F is always appended

    void validate() const;
};

/// f(t) = (1 - t/t_F)^p; equals (t/t_F - 1)^p for the default even p.
double ramp_profile(const RampSpec& ramp, double t);

struct Snapshot {
    double time = 0.0;
    StateVector state{1};
};

struct EvolutionResult {
    std::vector<Snapshot> snapshots;
    int steps = 0;
    double step_size = 0.0;  ///< t_F / steps, never larger than the requested dt
    std::vector<std::string> warnings;
};

/// Ramp from the Neel state. The spec supplies the XXZ couplings, B and the
/// pinning field; its own neel_field/neel_weight are replaced by the ramp.
/// Snapshots are taken at the step boundary nearest each sample time.
EvolutionResult adiabatic_evolve(const HamiltonianSpec& spec, const RampSpec& ramp);

/// exp(-i H t) |psi> for the time-independent spec, by the same splitting.
StateVector evolve(const HamiltonianSpec& spec, const StateVector& state, double t, double dt);

/// One symmetric Trotter step at fixed Neel weight.
void trotter_step(const HamiltonianSpec& spec, std::vector<Complex>& amps, double h);

struct MonitorMode {
    bool sampled = false;
    ProtocolParams params;  ///< kind is overridden per invariant; seed is split per snapshot
};

struct MonitorRow {
    double time = 0.0;
    InvariantKind kind = InvariantKind::R;
    InvariantValue exact;
    std::optional<EstimatorResult> sampled;
};

/// Invariants per snapshot. Exact values are always computed; sampled mode
/// adds an estimate from a simulated campaign.
std::vector<MonitorRow> monitor_invariants(const std::vector<Snapshot>& snapshots, const PartitionSpec& partition,
                                           const std::set<InvariantKind>& which, const MonitorMode& mode);

} // namespace rmspt
