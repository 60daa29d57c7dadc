#pragma once

// Randomized-measurement campaigns and their estimators.
//
// A campaign draws N_U local unitary patterns, applies each (one or two
// experiments per pattern) to the state and measures the interval N_M times.
// Estimators are weighted sums over outcome frequencies with per-site weights
// (-2)^{-D} (Hamming) or sz*sz' (on I2 for D2/KB); error bars come from a
// seeded bootstrap over the unitary axis.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rmspt/partition.hpp"
#include "rmspt/rdm.hpp"
#include "rmspt/spin_core.hpp"
#include "rmspt/types.hpp"

namespace rmspt {

enum class ProtocolKind { R, T, D2, KB, Purity };

std::string to_string(ProtocolKind kind);
ProtocolKind parse_protocol_kind(const std::string& text);
ProtocolKind protocol_for(InvariantKind kind);
int num_experiments(ProtocolKind kind);

inline constexpr int kBootstrapResamples = 200;

struct ProtocolParams {
    ProtocolKind kind = ProtocolKind::R;
    int num_unitaries = 512;  ///< N_U
    int num_shots = 256;      ///< N_M, per experiment
    PartitionSpec partition;
    std::uint64_t master_seed = 0;

    /// Throws std::invalid_argument for N_U < 2, N_M < 2 or a partition the kind cannot use.
    void validate() const;
};

/// Haar-random 2x2 unitary: QR of a complex Ginibre matrix, phases fixed by diag(R).
Matrix2c sample_cue(Rng& rng);

struct UnitaryPattern {
    ProtocolKind kind = ProtocolKind::R;
    std::vector<Matrix2c> base;          ///< the sampled U_i, one per interval site
    std::vector<Matrix2c> experiment_1;  ///< gate on each interval site
    std::vector<Matrix2c> experiment_2;  ///< empty for R and purity campaigns
};

UnitaryPattern build_pattern(ProtocolKind kind, const PartitionSpec& partition, Rng& rng);
/// Pattern of unitary `index` in a campaign; a pure function of (seed, index).
UnitaryPattern campaign_pattern(const ProtocolParams& params, int index);

struct MeasurementRecord {
    int unitary_index = 0;
    int experiment = 1;
    Histogram counts;
    friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;
};

/// Simulated measurements: records ordered by (unitary_index, experiment).
std::vector<MeasurementRecord> run_campaign(const StateVector& state, const ProtocolParams& params);

/// Born probabilities of the interval after the pattern's experiment gates.
std::vector<double> pattern_probabilities(const StateVector& state, const PartitionSpec& partition,
                                          const std::vector<Matrix2c>& gates);

/// Outcome distributions per unitary and experiment, either measured
/// frequencies (finite N_M) or exact Born probabilities (infinite-shot limit).
struct CampaignData {
    ProtocolParams params;
    bool exact = false;
    std::vector<std::vector<std::vector<double>>> distributions;  ///< [unitary][experiment][outcome]
};

CampaignData campaign_data(const std::vector<MeasurementRecord>& records, const ProtocolParams& params);
/// Same pattern draws as run_campaign, but no shots: exact probabilities.
CampaignData run_exact_campaign(const StateVector& state, const ProtocolParams& params);

struct EstimatorResult {
    std::string quantity;  ///< "Z_R", "Z_T", "Z_D2", "Z_KB" or "purity"
    ProtocolKind kind = ProtocolKind::R;
    double value = 0.0;      ///< raw invariant, or the purity
    double std_error = 0.0;  ///< bootstrap over unitaries
    std::optional<double> normalized;
    std::optional<double> normalized_std_error;
    std::vector<std::optional<double>> segment_purities;  ///< estimated; empty where not measurable
    int num_unitaries = 0;
    int num_shots = 0;  ///< 0 in the infinite-shot limit
    std::uint64_t master_seed = 0;
    std::optional<double> exact_reference;
    std::optional<double> exact_normalized_reference;
};

EstimatorResult estimate_zr(const CampaignData& data);
EstimatorResult estimate_zt(const CampaignData& data);
EstimatorResult estimate_zd2(const CampaignData& data);
EstimatorResult estimate_zkb(const CampaignData& data);
/// Purity of one segment (or, with segment = -1, of the whole interval).
EstimatorResult estimate_purity(const CampaignData& data, int segment);
EstimatorResult estimate_invariant(InvariantKind kind, const CampaignData& data);

EstimatorResult estimate_zr(const std::vector<MeasurementRecord>& records, const ProtocolParams& params);
EstimatorResult estimate_zt(const std::vector<MeasurementRecord>& records, const ProtocolParams& params);
EstimatorResult estimate_zd2(const std::vector<MeasurementRecord>& records, const ProtocolParams& params);
EstimatorResult estimate_zkb(const std::vector<MeasurementRecord>& records, const ProtocolParams& params);
EstimatorResult estimate_purity(const std::vector<MeasurementRecord>& records, const ProtocolParams& params,
                                int segment);

/// 2^n sum_s (-2)^{-D(s,R(s))/2} p(s) for one distribution over the 2n-site interval.
double zr_single(std::span<const double> p, int interval_bits);
/// 2^L sum (-2)^{-D(s,s')} p(s) q(s') (finite-shot U-statistic if num_shots > 0).
double purity_single(std::span<const double> p, int bits, int num_shots);
/// Marginal of a distribution on local bits [offset, offset+count).
std::vector<double> marginalize(std::span<const double> p, int bits, int offset, int count);

enum class TwirlChannel { Phi, Psi };

struct TwirlReport {
    TwirlChannel channel = TwirlChannel::Phi;
    int num_samples = 0;
    Matrix4c estimate;
    Matrix4c target;
    double frobenius_error = 0.0;
};

/// diag(2, -1, -1, 2): the single-site Hamming weight operator.
Matrix4c hamming_weight_operator();
Matrix4c swap_operator();
/// sum_{s,s'} |ss><s's'|
Matrix4c transpose_swap_operator();
/// Monte Carlo twirl of the Hamming operator with U (x) U (Phi) or U (x) U* (Psi).
TwirlReport twirl_check(TwirlChannel channel, int num_samples, Rng& rng);
/// Closed-form Phi(O) = (Tr O - Tr SO / 2)/3 * 1 + (Tr SO - Tr O / 2)/3 * S.
Matrix4c twirl_closed_form(const Matrix4c& o);

} // namespace rmspt
