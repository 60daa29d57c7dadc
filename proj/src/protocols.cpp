#include "rmspt/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

#include "rmspt/kernels.hpp"
#include "rmspt/rng.hpp"

namespace rmspt {
namespace {

using Rows = std::vector<std::vector<double>>;

Eigen::Matrix2d hamming_weights() {
    Eigen::Matrix2d w;
    w << 1.0, -0.5, -0.5, 1.0;
    return w;
}

Eigen::Matrix2d zz_weights() {
    Eigen::Matrix2d w;
    w << 1.0, -1.0, -1.0, 1.0;
    return w;
}

void require_kind(const CampaignData& data, ProtocolKind kind, const char* what) {
    if (data.params.kind != kind) {
        throw std::invalid_argument(std::string(what) + " needs a " + to_string(kind) + " campaign, got " +
                                    to_string(data.params.kind));
    }
}

struct Summary {
    double value = 0.0;
    double std_error = 0.0;
};

/// Point value and bootstrap spread of stat(column means). Rows are put in a
/// canonical order first so the result ignores how unitaries were labelled.
Summary bootstrap(Rows rows, const std::function<double(const std::vector<double>&)>& stat, std::uint64_t seed) {
    std::sort(rows.begin(), rows.end());
    const std::size_t n = rows.size();
    const std::size_t cols = rows.front().size();
    auto means_of = [&](auto&& index_at) {
        std::vector<double> sums(cols, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& row = rows[index_at(i)];
            for (std::size_t c = 0; c < cols; ++c) sums[c] += row[c];
        }
        for (auto& s : sums) s /= static_cast<double>(n);
        return sums;
    };
    Summary out;
    out.value = stat(means_of([](std::size_t i) { return i; }));

    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> draw(n);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int b = 0; b < kBootstrapResamples; ++b) {
        for (auto& d : draw) d = pick(rng);
        const double v = stat(means_of([&](std::size_t i) { return draw[i]; }));
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / kBootstrapResamples;
    out.std_error = std::sqrt(std::max(0.0, (sum_sq - kBootstrapResamples * mean * mean) / (kBootstrapResamples - 1)));
    return out;
}

std::uint64_t bootstrap_seed(const CampaignData& data, std::uint64_t quantity) {
    return derive_seed(data.params.master_seed, StreamTag::Bootstrap, {quantity});
}

EstimatorResult base_result(const CampaignData& data, std::string quantity) {
    EstimatorResult r;
    r.quantity = std::move(quantity);
    r.kind = data.params.kind;
    r.num_unitaries = data.params.num_unitaries;
    r.num_shots = data.exact ? 0 : data.params.num_shots;
    r.master_seed = data.params.master_seed;
    return r;
}

int shots_for(const CampaignData& data) { return data.exact ? 0 : data.params.num_shots; }

/// Segment purity from one distribution over the interval.
double segment_purity(const CampaignData& data, std::span<const double> p, int segment) {
    const auto& part = data.params.partition;
    const int bits = part.interval_size();
    if (segment < 0) return purity_single(p, bits, shots_for(data));
    const int len = part.segments.at(segment).length;
    return purity_single(marginalize(p, bits, part.local_offset(segment), len), len, shots_for(data));
}

/// Mean of a segment's purity over the experiments that randomize it.
double averaged_purity(const CampaignData& data, std::size_t u, int segment) {
    double acc = 0.0;
    const auto& dists = data.distributions[u];
    for (const auto& p : dists) acc += segment_purity(data, p, segment);
    return acc / static_cast<double>(dists.size());
}

/// Two-experiment cross-correlation estimate for T, D2 and KB.
EstimatorResult cross_estimate(const CampaignData& data, const std::vector<Eigen::Matrix2d>& weights,
                               int twirled_sites, const std::string& quantity, std::uint64_t tag,
                               int first_segment, int second_segment) {
    const double prefactor = std::ldexp(1.0, twirled_sites);
    Rows rows(data.distributions.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t u = 0; u < static_cast<std::int64_t>(rows.size()); ++u) {
        const auto& d = data.distributions[u];
        rows[u] = {prefactor * kernels::parallel::factorized_form(d[0], weights, d[1]),
                   averaged_purity(data, u, first_segment), averaged_purity(data, u, second_segment)};
    }
    EstimatorResult r = base_result(data, quantity);
    const auto raw = bootstrap(rows, [](const std::vector<double>& m) { return m[0]; }, bootstrap_seed(data, tag));
    const auto norm = bootstrap(
        rows, [](const std::vector<double>& m) { return m[0] / std::pow(0.5 * (m[1] + m[2]), 1.5); },
        bootstrap_seed(data, tag));
    r.value = raw.value;
    r.std_error = raw.std_error;
    r.normalized = norm.value;
    r.normalized_std_error = norm.std_error;
    const auto pur1 = bootstrap(rows, [](const std::vector<double>& m) { return m[1]; }, bootstrap_seed(data, tag));
    const auto pur2 = bootstrap(rows, [](const std::vector<double>& m) { return m[2]; }, bootstrap_seed(data, tag));
    r.segment_purities.assign(data.params.partition.num_segments(), std::nullopt);
    r.segment_purities[first_segment] = pur1.value;
    r.segment_purities[second_segment] = pur2.value;
    return r;
}

} // namespace

// ------------------------------------------------------------------ kinds --

std::string to_string(ProtocolKind kind) {
    switch (kind) {
    case ProtocolKind::R: return "R";
    case ProtocolKind::T: return "T";
    case ProtocolKind::D2: return "D2";
    case ProtocolKind::KB: return "KB";
    case ProtocolKind::Purity: return "purity";
    }
    return "?";
}

ProtocolKind parse_protocol_kind(const std::string& text) {
    if (text == "purity") return ProtocolKind::Purity;
    return protocol_for(parse_invariant_kind(text));
}

ProtocolKind protocol_for(InvariantKind kind) {
    switch (kind) {
    case InvariantKind::R: return ProtocolKind::R;
    case InvariantKind::T: return ProtocolKind::T;
    case InvariantKind::D2: return ProtocolKind::D2;
    case InvariantKind::KB: return ProtocolKind::KB;
    }
    throw std::logic_error("unknown invariant kind");
}

int num_experiments(ProtocolKind kind) {
    return (kind == ProtocolKind::R || kind == ProtocolKind::Purity) ? 1 : 2;
}

void ProtocolParams::validate() const {
    if (num_unitaries < 2) throw std::invalid_argument("N_U must be >= 2");
    if (num_shots < 2) throw std::invalid_argument("N_M must be >= 2");
    partition.validate();
    if (partition.interval_size() > kMaxRdmSites) throw std::invalid_argument("interval too large");
    switch (kind) {
    case ProtocolKind::R:
    case ProtocolKind::T:
        if (partition.num_segments() != 2 || partition.segments[0].length != partition.segments[1].length) {
            throw std::invalid_argument("protocol " + to_string(kind) + " needs two equal segments");
        }
        break;
    case ProtocolKind::D2:
    case ProtocolKind::KB:
        if (partition.num_segments() != 3) {
            throw std::invalid_argument("protocol " + to_string(kind) + " needs three segments");
        }
        break;
    case ProtocolKind::Purity: break;
    }
}

// ------------------------------------------------------------- unitaries --

Matrix2c sample_cue(Rng& rng) {
    std::normal_distribution<double> gauss;
    Matrix2c z;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double re = gauss(rng);
            z(i, j) = Complex(re, gauss(rng));
        }
    }
    Eigen::HouseholderQR<Matrix2c> qr(z);
    Matrix2c q = qr.householderQ();
    const Matrix2c r = qr.matrixQR();
    for (int k = 0; k < 2; ++k) {
        const Complex d = r(k, k);
        q.col(k) *= d / std::abs(d);
    }
    return q;
}

UnitaryPattern build_pattern(ProtocolKind kind, const PartitionSpec& partition, Rng& rng) {
    partition.validate();
    const int size = partition.interval_size();
    UnitaryPattern p;
    p.kind = kind;
    const Matrix2c one = Matrix2c::Identity();
    switch (kind) {
    case ProtocolKind::R: {
        if (partition.num_segments() != 2 || size % 2 != 0) {
            throw std::invalid_argument("R pattern needs two equal segments");
        }
        std::vector<Matrix2c> half;
        for (int i = 0; i < size / 2; ++i) half.push_back(sample_cue(rng));
        for (int i = 0; i < size; ++i) p.base.push_back(half[std::min(i, size - 1 - i)]);
        p.experiment_1 = p.base;
        break;
    }
    case ProtocolKind::Purity:
        for (int i = 0; i < size; ++i) p.base.push_back(sample_cue(rng));
        p.experiment_1 = p.base;
        break;
    case ProtocolKind::T: {
        if (partition.num_segments() != 2) throw std::invalid_argument("T pattern needs two segments");
        const int n1 = partition.segments[0].length;
        for (int i = 0; i < size; ++i) p.base.push_back(sample_cue(rng));
        for (int i = 0; i < size; ++i) {
            p.experiment_1.push_back(i < n1 ? Matrix2c(p.base[i] * pauli::y()) : p.base[i]);
            p.experiment_2.push_back(i < n1 ? Matrix2c(p.base[i].conjugate()) : p.base[i]);
        }
        break;
    }
    case ProtocolKind::D2:
    case ProtocolKind::KB: {
        if (partition.num_segments() != 3) throw std::invalid_argument("D2/KB pattern needs three segments");
        const int end1 = partition.local_offset(1);
        const int end2 = partition.local_offset(2);
        for (int i = 0; i < size; ++i) p.base.push_back((i >= end1 && i < end2) ? one : sample_cue(rng));
        const bool d2 = kind == ProtocolKind::D2;
        for (int i = 0; i < size; ++i) {
            if (i < end1) {
                p.experiment_1.push_back(p.base[i] * (d2 ? pauli::x() : pauli::y()));
                p.experiment_2.push_back(d2 ? p.base[i] : Matrix2c(p.base[i].conjugate()));
            } else {
                p.experiment_1.push_back(p.base[i]);
                p.experiment_2.push_back(p.base[i]);
            }
        }
        break;
    }
    }
    return p;
}

UnitaryPattern campaign_pattern(const ProtocolParams& params, int index) {
    Rng rng = make_stream(params.master_seed, StreamTag::Pattern, {static_cast<std::uint64_t>(index)});
    return build_pattern(params.kind, params.partition, rng);
}

// ------------------------------------------------------------- campaigns --

std::vector<double> pattern_probabilities(const StateVector& state, const PartitionSpec& partition,
                                          const std::vector<Matrix2c>& gates) {
    const auto sites = partition.sites();
    if (gates.size() != sites.size()) throw std::invalid_argument("one gate per interval site expected");
    std::vector<Complex> amps(state.amplitudes().begin(), state.amplitudes().end());
    for (std::size_t k = 0; k < sites.size(); ++k) kernels::serial::apply_one_site(amps, sites[k], gates[k]);
    return kernels::serial::marginal_probabilities(amps, sites);
}

namespace {

template <typename PerExperiment>
void for_each_experiment(const StateVector& state, const ProtocolParams& params, PerExperiment&& fn) {
    params.validate();
    if (params.partition.num_sites != state.num_sites()) throw std::invalid_argument("partition/state size mismatch");
    const int experiments = num_experiments(params.kind);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t u = 0; u < params.num_unitaries; ++u) {
        const UnitaryPattern pattern = campaign_pattern(params, static_cast<int>(u));
        for (int e = 0; e < experiments; ++e) {
            const auto& gates = e == 0 ? pattern.experiment_1 : pattern.experiment_2;
            fn(static_cast<int>(u), e, pattern_probabilities(state, params.partition, gates));
        }
    }
}

} // namespace

std::vector<MeasurementRecord> run_campaign(const StateVector& state, const ProtocolParams& params) {
    const int experiments = num_experiments(params.kind);
    std::vector<MeasurementRecord> records(static_cast<std::size_t>(params.num_unitaries) * experiments);
    for_each_experiment(state, params, [&](int u, int e, const std::vector<double>& probs) {
        Rng shots = make_stream(params.master_seed, StreamTag::Shots,
                                {static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(e + 1)});
        const auto counts = sample_counts(probs, params.num_shots, shots);
        MeasurementRecord& rec = records[static_cast<std::size_t>(u) * experiments + e];
        rec.unitary_index = u;
        rec.experiment = e + 1;
        for (std::size_t s = 0; s < counts.size(); ++s) {
            if (counts[s] > 0) rec.counts[s] = counts[s];
        }
    });
    return records;
}

CampaignData run_exact_campaign(const StateVector& state, const ProtocolParams& params) {
    CampaignData data{params, true, {}};
    data.distributions.assign(params.num_unitaries, std::vector<std::vector<double>>(num_experiments(params.kind)));
    for_each_experiment(state, params, [&](int u, int e, std::vector<double> probs) {
        data.distributions[u][e] = std::move(probs);
    });
    return data;
}

CampaignData campaign_data(const std::vector<MeasurementRecord>& records, const ProtocolParams& params) {
    params.validate();
    const int experiments = num_experiments(params.kind);
    const std::size_t dim = std::size_t{1} << params.partition.interval_size();
    CampaignData data{params, false, {}};
    data.distributions.assign(params.num_unitaries, std::vector<std::vector<double>>(experiments));
    for (const auto& rec : records) {
        if (rec.unitary_index < 0 || rec.unitary_index >= params.num_unitaries) {
            throw std::invalid_argument("record unitary_index out of range");
        }
        if (rec.experiment < 1 || rec.experiment > experiments) {
            throw std::invalid_argument("record experiment must be 1.." + std::to_string(experiments));
        }
        auto& dist = data.distributions[rec.unitary_index][rec.experiment - 1];
        if (!dist.empty()) throw std::invalid_argument("duplicate record for unitary " + std::to_string(rec.unitary_index));
        dist.assign(dim, 0.0);
        std::int64_t total = 0;
        for (const auto& [s, c] : rec.counts) {
            if (s >= dim || c < 0) throw std::invalid_argument("record outcome out of range");
            dist[s] = static_cast<double>(c);
            total += c;
        }
        if (total != params.num_shots) {
            throw std::invalid_argument("record counts sum to " + std::to_string(total) + ", expected N_M = " +
                                        std::to_string(params.num_shots));
        }
        for (auto& v : dist) v /= static_cast<double>(params.num_shots);
    }
    for (int u = 0; u < params.num_unitaries; ++u) {
        for (int e = 0; e < experiments; ++e) {
            if (data.distributions[u][e].empty()) {
                throw std::invalid_argument("missing record: unitary " + std::to_string(u) + ", experiment " +
                                            std::to_string(e + 1));
            }
        }
    }
    return data;
}

// ------------------------------------------------------------ estimators --

std::vector<double> marginalize(std::span<const double> p, int bits, int offset, int count) {
    if (p.size() != (std::size_t{1} << bits) || offset < 0 || offset + count > bits) {
        throw std::invalid_argument("marginalize: bad bit range");
    }
    std::vector<double> out(std::size_t{1} << count, 0.0);
    const BasisIndex mask = (BasisIndex{1} << count) - 1;
    for (BasisIndex s = 0; s < p.size(); ++s) out[(s >> offset) & mask] += p[s];
    return out;
}

double zr_single(std::span<const double> p, int interval_bits) {
    if (p.size() != (std::size_t{1} << interval_bits)) throw std::invalid_argument("zr_single: size mismatch");
    double acc = 0.0;
    for (BasisIndex s = 0; s < p.size(); ++s) {
        if (p[s] == 0.0) continue;
        const int d = hamming_distance(s, reverse_bits(s, interval_bits));
        if (d % 2 != 0) throw std::logic_error("odd Hamming distance between a string and its reflection");
        acc += std::pow(-0.5, d / 2) * p[s];
    }
    return std::ldexp(acc, interval_bits / 2);
}

double purity_single(std::span<const double> p, int bits, int num_shots) {
    const std::vector<Eigen::Matrix2d> w(bits, hamming_weights());
    const double quad = kernels::parallel::factorized_form(p, w, p);
    const double unbiased = num_shots > 0 ? (num_shots * quad - 1.0) / (num_shots - 1.0) : quad;
    return std::ldexp(unbiased, bits);
}

EstimatorResult estimate_zr(const CampaignData& data) {
    require_kind(data, ProtocolKind::R, "estimate_zr");
    const int bits = data.params.partition.interval_size();
    Rows rows(data.distributions.size());
    for (std::size_t u = 0; u < rows.size(); ++u) {
        const auto& p = data.distributions[u][0];
        rows[u] = {zr_single(p, bits), segment_purity(data, p, 0), segment_purity(data, p, 1)};
    }
    EstimatorResult r = base_result(data, "Z_R");
    const auto seed = bootstrap_seed(data, 1);
    const auto raw = bootstrap(rows, [](const std::vector<double>& m) { return m[0]; }, seed);
    const auto norm = bootstrap(rows, [](const std::vector<double>& m) { return m[0] / std::sqrt(0.5 * (m[1] + m[2])); },
                                seed);
    r.value = raw.value;
    r.std_error = raw.std_error;
    r.normalized = norm.value;
    r.normalized_std_error = norm.std_error;
    for (int k = 0; k < 2; ++k) {
        double acc = 0.0;
        for (const auto& row : rows) acc += row[1 + k];
        r.segment_purities.push_back(acc / static_cast<double>(rows.size()));
    }
    return r;
}

EstimatorResult estimate_zt(const CampaignData& data) {
    require_kind(data, ProtocolKind::T, "estimate_zt");
    const int bits = data.params.partition.interval_size();
    const std::vector<Eigen::Matrix2d> w(bits, hamming_weights());
    return cross_estimate(data, w, bits, "Z_T", 2, 0, 1);
}

namespace {

std::vector<Eigen::Matrix2d> triple_weights(const PartitionSpec& p) {
    std::vector<Eigen::Matrix2d> w;
    w.insert(w.end(), p.segments[0].length, hamming_weights());
    w.insert(w.end(), p.segments[1].length, zz_weights());
    w.insert(w.end(), p.segments[2].length, hamming_weights());
    return w;
}

} // namespace

EstimatorResult estimate_zd2(const CampaignData& data) {
    require_kind(data, ProtocolKind::D2, "estimate_zd2");
    const auto& p = data.params.partition;
    return cross_estimate(data, triple_weights(p), p.segments[0].length + p.segments[2].length, "Z_D2", 3, 0, 2);
}

EstimatorResult estimate_zkb(const CampaignData& data) {
    require_kind(data, ProtocolKind::KB, "estimate_zkb");
    const auto& p = data.params.partition;
    return cross_estimate(data, triple_weights(p), p.segments[0].length + p.segments[2].length, "Z_KB", 4, 0, 2);
}

EstimatorResult estimate_purity(const CampaignData& data, int segment) {
    const auto& part = data.params.partition;
    if (segment < -1 || segment >= part.num_segments()) throw std::invalid_argument("estimate_purity: no such segment");
    const ProtocolKind kind = data.params.kind;
    if ((kind == ProtocolKind::D2 || kind == ProtocolKind::KB) && segment != 0 && segment != 2) {
        throw std::invalid_argument("estimate_purity: segment is not randomized in a " + to_string(kind) + " campaign");
    }
    Rows rows(data.distributions.size());
    for (std::size_t u = 0; u < rows.size(); ++u) rows[u] = {averaged_purity(data, u, segment)};
    EstimatorResult r = base_result(data, "purity");
    const auto s = bootstrap(rows, [](const std::vector<double>& m) { return m[0]; },
                             bootstrap_seed(data, 16 + static_cast<std::uint64_t>(segment + 1)));
    r.value = s.value;
    r.std_error = s.std_error;
    return r;
}

EstimatorResult estimate_invariant(InvariantKind kind, const CampaignData& data) {
    switch (kind) {
    case InvariantKind::R: return estimate_zr(data);
    case InvariantKind::T: return estimate_zt(data);
    case InvariantKind::D2: return estimate_zd2(data);
    case InvariantKind::KB: return estimate_zkb(data);
    }
    throw std::logic_error("unknown invariant kind");
}

EstimatorResult estimate_zr(const std::vector<MeasurementRecord>& records, const ProtocolParams& params) {
    return estimate_zr(campaign_data(records, params));
}
EstimatorResult estimate_zt(const std::vector<MeasurementRecord>& records, const ProtocolParams& params) {
    return estimate_zt(campaign_data(records, params));
}
EstimatorResult estimate_zd2(const std::vector<MeasurementRecord>& records, const ProtocolParams& params) {
    return estimate_zd2(campaign_data(records, params));
}
EstimatorResult estimate_zkb(const std::vector<MeasurementRecord>& records, const ProtocolParams& params) {
    return estimate_zkb(campaign_data(records, params));
}
EstimatorResult estimate_purity(const std::vector<MeasurementRecord>& records, const ProtocolParams& params,
                                int segment) {
    return estimate_purity(campaign_data(records, params), segment);
}

// -------------------------------------------------------------- twirling --

Matrix4c hamming_weight_operator() {
    Matrix4c o = Matrix4c::Zero();
    o.diagonal() << 2.0, -1.0, -1.0, 2.0;
    return o;
}

Matrix4c swap_operator() {
    Matrix4c s = Matrix4c::Zero();
    s(0, 0) = s(3, 3) = 1.0;
    s(1, 2) = s(2, 1) = 1.0;
    return s;
}

Matrix4c transpose_swap_operator() {
    Matrix4c t = Matrix4c::Zero();
    for (int a : {0, 3}) {
        for (int b : {0, 3}) t(a, b) = 1.0;
    }
    return t;
}

TwirlReport twirl_check(TwirlChannel channel, int num_samples, Rng& rng) {
    if (num_samples < 100) throw std::invalid_argument("twirl_check needs at least 100 samples");
    const Matrix4c o = hamming_weight_operator();
    Matrix4c acc = Matrix4c::Zero();
    for (int i = 0; i < num_samples; ++i) {
        const Matrix2c u = sample_cue(rng);
        const Matrix2c second = channel == TwirlChannel::Phi ? u : Matrix2c(u.conjugate());
        const Matrix4c uu = Eigen::kroneckerProduct(u, second).eval();
        acc += uu * o * uu.adjoint();
    }
    TwirlReport r;
    r.channel = channel;
    r.num_samples = num_samples;
    r.estimate = acc / static_cast<double>(num_samples);
    r.target = channel == TwirlChannel::Phi ? swap_operator() : transpose_swap_operator();
    r.frobenius_error = (r.estimate - r.target).norm();
    return r;
}

Matrix4c twirl_closed_form(const Matrix4c& o) {
    const Matrix4c s = swap_operator();
    const Complex tr = o.trace();
    const Complex trs = (s * o).trace();
    return (tr - 0.5 * trs) / 3.0 * Matrix4c::Identity() + (trs - 0.5 * tr) / 3.0 * s;
}

} // namespace rmspt
