#pragma once

// Parameter sweeps, correlation-length fits, error-scaling scans and the
// symmetry-breaking comparison. Every study returns a Table whose row order
// depends only on its inputs.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "rmspt/dynamics.hpp"
#include "rmspt/groundstate.hpp"
#include "rmspt/hamiltonian.hpp"
#include "rmspt/protocols.hpp"
#include "rmspt/rdm.hpp"

namespace rmspt {

using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    int column(const std::string& name) const;  ///< throws if absent
    double number(std::size_t row, const std::string& name) const;
    std::string text(std::size_t row, const std::string& name) const;
};

/// Axis names: J_prime_over_J, delta, B, Delta, N, n, N_U, N_M, t_F.
struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

enum class SweepMode { Exact, Sampled };

struct SweepSpec {
    HamiltonianSpec base;
    std::vector<SweepAxis> axes;
    std::set<InvariantKind> kinds{InvariantKind::R};
    int n = 2;  ///< sites per segment unless swept
    SweepMode mode = SweepMode::Exact;
    int num_unitaries = 512;
    int num_shots = 256;
    int repetitions = 1;
    std::uint64_t master_seed = 0;
    LanczosOptions solver;
    /// Used when t_F is an axis: the state comes from the ramp instead of the solver.
    RampSpec ramp;

    void validate() const;
};

bool is_sweep_axis(const std::string& name);

/// Cartesian product of the axes, values ascending, first axis slowest.
/// One row per (point, repetition, kind); failures are recorded in the
/// status/error columns and the sweep carries on.
Table run_sweep(const SweepSpec& spec);

enum class FitStatus { Ok, Converged, NotConverging };
std::string to_string(FitStatus status);

struct CorrelationLengthFit {
    double lambda = 0.0;  ///< sites; 0 unless status is Ok
    double amplitude = 0.0;
    std::vector<std::pair<int, double>> fit_points;
    int quantized_target = 1;
    double residual = 0.0;  ///< RMS of the log-space fit residuals
    FitStatus status = FitStatus::Ok;
    bool outside_unit_interval = false;  ///< some |Z| >= 1 among the fit points
};

/// Fits |Z(n) - s| = A exp(-n / lambda) on the first `use_points` entries
/// (by ascending n); s = target_sign or, if 0, the sign at the largest n.
CorrelationLengthFit fit_correlation_length(std::vector<std::pair<int, double>> series, int target_sign = 0,
                                            int use_points = 3);

enum class ScanAxis { NumUnitaries, NumShots, SegmentLength };
std::string to_string(ScanAxis axis);
ScanAxis parse_scan_axis(const std::string& text);

/// Mean |estimate - exact| of the raw invariant over `repetitions`
/// independent campaigns, for each axis value. Partitions for the n axis are
/// rebuilt with the base layout (pair for R/T/purity, triple for D2/KB).
Table error_scaling_scan(const StateVector& state, const ProtocolParams& base, ScanAxis axis,
                         const std::vector<int>& values, int repetitions);

/// Z_T and Z_R on the same ground state for each n (pair layout).
Table symmetry_breaking_report(const HamiltonianSpec& spec, const std::vector<int>& n_values,
                               const LanczosOptions& solver = {});

PartitionSpec layout_for(InvariantKind kind, int num_sites, int n);
PartitionSpec layout_for(ProtocolKind kind, int num_sites, int n);

} // namespace rmspt
