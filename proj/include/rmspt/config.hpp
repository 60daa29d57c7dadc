#pragma once

// Run configuration: an INI-style file of [section] blocks with key = value
// lines (';' or '#' start a comment). Lists are comma separated. Unknown
// sections and keys are errors, as are out-of-range values.

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmspt/analysis.hpp"
#include "rmspt/dynamics.hpp"
#include "rmspt/groundstate.hpp"
#include "rmspt/hamiltonian.hpp"
#include "rmspt/protocols.hpp"
#include "rmspt/serialize.hpp"

namespace rmspt {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class SweepStudy { Grid, CorrelationLength, SymmetryBreaking };

struct PartitionConfig {
    std::string layout;  ///< "pair" or "triple"; empty picks the kind's default
    int n = 2;
};

struct ProtocolConfig {
    ProtocolKind kind = ProtocolKind::R;
    std::vector<InvariantKind> invariants;  ///< for the invariants command; defaults to {kind}
    int num_unitaries = 512;
    int num_shots = 256;
    bool exact_reference = true;
};

struct RampConfig {
    RampSpec spec;
    std::vector<double> t_final_values;  ///< adiabatic sweep over t_F; defaults to {t_F}
    std::vector<int> n_values{2};
    std::vector<InvariantKind> invariants{InvariantKind::R, InvariantKind::T};
};

struct SweepConfig {
    SweepStudy study = SweepStudy::Grid;
    std::vector<SweepAxis> axes;
    std::vector<InvariantKind> kinds{InvariantKind::R};
    SweepMode mode = SweepMode::Exact;
    int repetitions = 1;
};

struct ErrorScanConfig {
    ScanAxis axis = ScanAxis::NumUnitaries;
    std::vector<int> values;
    int repetitions = 32;
    std::string state = "ground_state";  ///< or "random"
};

struct RunConfig {
    HamiltonianSpec hamiltonian;
    PartitionConfig partition;
    ProtocolConfig protocol;
    RampConfig ramp;
    SweepConfig sweep;
    ErrorScanConfig error_scan;
    LanczosOptions solver;
    int twirl_samples = 100000;
    std::optional<std::uint64_t> master_seed;
    std::string out_dir = ".";
    int jobs = 0;  ///< 0 = OpenMP default
    std::string source;  ///< path the config was read from

    /// Partition for a given kind using the configured layout and n.
    PartitionSpec partition_for(InvariantKind kind, int n) const;
    PartitionSpec partition_for(ProtocolKind kind) const;
    /// Throws ConfigError when no seed was given in the file or on the command line.
    std::uint64_t require_seed(const std::string& purpose) const;
    SweepSpec sweep_spec() const;
};

RunConfig parse_config(const std::string& text, const std::string& source = "<string>");
RunConfig load_config(const std::string& path);

/// Every resolved value, including defaults that were not in the file.
Json resolved_config(const RunConfig& config);

} // namespace rmspt
