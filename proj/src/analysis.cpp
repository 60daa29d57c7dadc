#include "rmspt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "rmspt/rng.hpp"

namespace rmspt {
namespace {

const std::vector<std::string> kAxisNames = {"J_prime_over_J", "delta", "B", "Delta", "N", "n", "N_U", "N_M", "t_F"};

bool integer_axis(const std::string& name) {
    return name == "N" || name == "n" || name == "N_U" || name == "N_M";
}

Cell cell(std::optional<double> v) { return v ? Cell{*v} : Cell{}; }

struct Point {
    HamiltonianSpec spec;
    int n = 2;
    int num_unitaries = 0;
    int num_shots = 0;
    std::optional<double> t_final;
    std::vector<double> axis_values;
};

using SpecKey = std::tuple<int, double, double, double, double, double, double, double>;

SpecKey key_of(const HamiltonianSpec& s) {
    return {s.num_sites, s.exchange, s.exchange_prime, s.anisotropy, s.breaking, s.neel_field, s.pinning, s.neel_weight};
}

struct StateJob {
    HamiltonianSpec spec;
    std::optional<double> t_final;
    std::optional<EigenResult> ground;
    std::optional<StateVector> ramped;
    std::string error;
};

} // namespace

int Table::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::out_of_range("no column named " + name);
    return static_cast<int>(it - columns.begin());
}

double Table::number(std::size_t row, const std::string& name) const {
    const Cell& c = rows.at(row).at(column(name));
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    return NAN;
}

std::string Table::text(std::size_t row, const std::string& name) const {
    const Cell& c = rows.at(row).at(column(name));
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    throw std::invalid_argument("column " + name + " is not text");
}

bool is_sweep_axis(const std::string& name) {
    return std::find(kAxisNames.begin(), kAxisNames.end(), name) != kAxisNames.end();
}

PartitionSpec layout_for(InvariantKind kind, int num_sites, int n) {
    return (kind == InvariantKind::D2 || kind == InvariantKind::KB) ? PartitionSpec::centered_triple(num_sites, n)
                                                                     : PartitionSpec::reflection_pair(num_sites, n);
}

PartitionSpec layout_for(ProtocolKind kind, int num_sites, int n) {
    return (kind == ProtocolKind::D2 || kind == ProtocolKind::KB) ? PartitionSpec::centered_triple(num_sites, n)
                                                                   : PartitionSpec::reflection_pair(num_sites, n);
}

void SweepSpec::validate() const {
    if (axes.empty()) throw std::invalid_argument("sweep needs at least one axis");
    if (kinds.empty()) throw std::invalid_argument("sweep needs at least one invariant kind");
    std::set<std::string> seen;
    for (const auto& axis : axes) {
        if (!is_sweep_axis(axis.name)) throw std::invalid_argument("unknown sweep axis '" + axis.name + "'");
        if (!seen.insert(axis.name).second) throw std::invalid_argument("sweep axis '" + axis.name + "' repeated");
        if (axis.values.empty()) throw std::invalid_argument("sweep axis '" + axis.name + "' has no values");
        for (double v : axis.values) {
            if (!std::isfinite(v)) throw std::invalid_argument("sweep axis '" + axis.name + "' has a non-finite value");
            if (integer_axis(axis.name) && v != std::floor(v)) {
                throw std::invalid_argument("sweep axis '" + axis.name + "' needs integer values");
            }
        }
        auto sorted = axis.values;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw std::invalid_argument("sweep axis '" + axis.name + "' has duplicate values");
        }
    }
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    if (mode == SweepMode::Sampled && (num_unitaries < 2 || num_shots < 2)) {
        throw std::invalid_argument("sampled sweeps need N_U >= 2 and N_M >= 2");
    }
    base.validate();
}

Table run_sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<SweepAxis> axes = spec.axes;
    for (auto& axis : axes) std::sort(axis.values.begin(), axis.values.end());

    // Expand the Cartesian product, first axis slowest.
    std::vector<Point> points;
    std::vector<std::size_t> odometer(axes.size(), 0);
    bool done = false;
    while (!done) {
        Point p;
        p.spec = spec.base;
        p.n = spec.n;
        p.num_unitaries = spec.num_unitaries;
        p.num_shots = spec.num_shots;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const double v = axes[a].values[odometer[a]];
            const auto& name = axes[a].name;
            p.axis_values.push_back(v);
            if (name == "J_prime_over_J") p.spec.exchange_prime = v * spec.base.exchange;
            else if (name == "delta") p.spec.anisotropy = v;
            else if (name == "B") p.spec.breaking = v;
            else if (name == "Delta") p.spec.neel_field = v;
            else if (name == "N") p.spec.num_sites = static_cast<int>(v);
            else if (name == "n") p.n = static_cast<int>(v);
            else if (name == "N_U") p.num_unitaries = static_cast<int>(v);
            else if (name == "N_M") p.num_shots = static_cast<int>(v);
            else if (name == "t_F") p.t_final = v;
        }
        points.push_back(std::move(p));
        // Advance the odometer, last axis fastest.
        std::size_t a = axes.size();
        while (true) {
            if (a == 0) {
                done = true;
                break;
            }
            --a;
            if (++odometer[a] < axes[a].values.size()) break;
            odometer[a] = 0;
        }
    }

    // One solve (and at most one ramp) per distinct Hamiltonian.
    std::map<std::pair<SpecKey, double>, std::size_t> job_index;
    std::vector<StateJob> jobs;
    std::vector<std::size_t> point_job(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto key = std::make_pair(key_of(points[i].spec), points[i].t_final.value_or(-1.0));
        auto [it, inserted] = job_index.emplace(key, jobs.size());
        if (inserted) jobs.push_back({points[i].spec, points[i].t_final, {}, {}, {}});
        point_job[i] = it->second;
    }
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(jobs.size()); ++j) {
        auto& job = jobs[j];
        try {
            job.ground = ground_state(job.spec, spec.solver);
            if (job.t_final) {
                RampSpec ramp = spec.ramp;
                ramp.t_final = *job.t_final;
                ramp.dt = std::min(ramp.dt, ramp.t_final);
                ramp.sample_times.clear();
                job.ramped = adiabatic_evolve(job.spec, ramp).snapshots.back().state;
            }
        } catch (const std::exception& e) {
            job.error = e.what();
        }
    }

    Table table;
    for (const auto& axis : axes) table.columns.push_back(axis.name);
    const std::vector<std::string> tail = {
        "repetition", "kind", "N", "n", "J_prime_over_J", "delta", "B", "delta_p", "source", "energy", "residual",
        "overlap_ground_state", "exact_raw", "exact_normalized", "purity_I1", "purity_I2", "purity_I3", "N_U", "N_M",
        "seed", "estimate_raw", "estimate_raw_std_error", "estimate_normalized", "estimate_normalized_std_error",
        "status", "error"};
    table.columns.insert(table.columns.end(), tail.begin(), tail.end());

    const int reps = spec.mode == SweepMode::Sampled ? spec.repetitions : 1;
    std::vector<std::vector<std::vector<Cell>>> per_point(points.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(points.size()); ++i) {
        const Point& p = points[i];
        const StateJob& job = jobs[point_job[i]];
        for (int rep = 0; rep < reps; ++rep) {
            for (InvariantKind kind : spec.kinds) {
                std::vector<Cell> row;
                for (double v : p.axis_values) row.emplace_back(v);
                row.emplace_back(std::int64_t{rep});
                row.emplace_back(to_string(kind));
                row.emplace_back(std::int64_t{p.spec.num_sites});
                row.emplace_back(std::int64_t{p.n});
                row.emplace_back(p.spec.exchange_prime / p.spec.exchange);
                row.emplace_back(p.spec.anisotropy);
                row.emplace_back(p.spec.breaking);
                row.emplace_back(p.spec.pinning);
                row.emplace_back(std::string(job.t_final ? "ramp" : "ground_state"));
                std::string status = "ok";
                std::string error = job.error;
                std::vector<Cell> values(15);
                if (error.empty()) {
                    try {
                        const StateVector& state = job.t_final ? *job.ramped : job.ground->state;
                        values[0] = job.ground->energy;
                        values[1] = job.ground->residual_norm;
                        if (job.t_final) values[2] = overlap(state, job.ground->state);
                        const auto partition = layout_for(kind, p.spec.num_sites, p.n);
                        const auto exact = exact_invariant(kind, state, partition);
                        values[3] = exact.raw;
                        values[4] = exact.normalized;
                        for (std::size_t k = 0; k < exact.segment_purities.size() && k < 3; ++k) {
                            values[5 + k] = exact.segment_purities[k];
                        }
                        if (spec.mode == SweepMode::Sampled) {
                            ProtocolParams params;
                            params.kind = protocol_for(kind);
                            params.num_unitaries = p.num_unitaries;
                            params.num_shots = p.num_shots;
                            params.partition = partition;
                            params.master_seed =
                                derive_seed(spec.master_seed, StreamTag::Sweep,
                                            {static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(rep),
                                             static_cast<std::uint64_t>(kind)});
                            const auto est =
                                estimate_invariant(kind, campaign_data(run_campaign(state, params), params));
                            values[8] = std::int64_t{p.num_unitaries};
                            values[9] = std::int64_t{p.num_shots};
                            values[10] = std::to_string(params.master_seed);
                            values[11] = est.value;
                            values[12] = est.std_error;
                            values[13] = cell(est.normalized);
                            values[14] = cell(est.normalized_std_error);
                        }
                    } catch (const std::exception& e) {
                        error = e.what();
                    }
                }
                if (!error.empty()) status = "error";
                row.insert(row.end(), values.begin(), values.end());
                row.emplace_back(status);
                row.emplace_back(error);
                per_point[i].push_back(std::move(row));
            }
        }
    }
    for (auto& rows : per_point) {
        for (auto& row : rows) table.rows.push_back(std::move(row));
    }
    return table;
}

// ------------------------------------------------------------------- fit --

std::string to_string(FitStatus status) {
    switch (status) {
    case FitStatus::Ok: return "ok";
    case FitStatus::Converged: return "converged";
    case FitStatus::NotConverging: return "not_converging";
    }
    return "?";
}

CorrelationLengthFit fit_correlation_length(std::vector<std::pair<int, double>> series, int target_sign,
                                            int use_points) {
    if (use_points < 2) throw std::invalid_argument("fit needs at least two points");
    if (static_cast<int>(series.size()) < use_points) {
        throw std::invalid_argument("fit needs at least " + std::to_string(use_points) + " (n, Z) points");
    }
    std::sort(series.begin(), series.end());
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (series[i].first == series[i - 1].first) throw std::invalid_argument("fit: repeated n");
    }
    CorrelationLengthFit fit;
    if (target_sign == 0) target_sign = series.back().second >= 0.0 ? 1 : -1;
    if (target_sign != 1 && target_sign != -1) throw std::invalid_argument("target sign must be +1 or -1");
    fit.quantized_target = target_sign;
    fit.fit_points.assign(series.begin(), series.begin() + use_points);

    std::vector<double> x;
    std::vector<double> y;
    for (const auto& [n, z] : fit.fit_points) {
        if (std::abs(z) >= 1.0) fit.outside_unit_interval = true;
        const double dev = std::abs(z - target_sign);
        if (!(dev > 1e-14)) {
            fit.status = FitStatus::Converged;
            return fit;
        }
        x.push_back(n);
        y.push_back(std::log(dev));
    }
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / m;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (intercept + slope * x[i]);
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / m);
    fit.amplitude = std::exp(intercept);
    if (!(slope < -1e-12)) {
        fit.status = FitStatus::NotConverging;
        return fit;
    }
    fit.lambda = -1.0 / slope;
    fit.status = FitStatus::Ok;
    return fit;
}

// ----------------------------------------------------------- error scans --

std::string to_string(ScanAxis axis) {
    switch (axis) {
    case ScanAxis::NumUnitaries: return "N_U";
    case ScanAxis::NumShots: return "N_M";
    case ScanAxis::SegmentLength: return "n";
    }
    return "?";
}

ScanAxis parse_scan_axis(const std::string& text) {
    if (text == "N_U") return ScanAxis::NumUnitaries;
    if (text == "N_M") return ScanAxis::NumShots;
    if (text == "n") return ScanAxis::SegmentLength;
    throw std::invalid_argument("unknown scan axis '" + text + "' (expected N_U, N_M or n)");
}

Table error_scaling_scan(const StateVector& state, const ProtocolParams& base, ScanAxis axis,
                         const std::vector<int>& values, int repetitions) {
    if (repetitions < 8) throw std::invalid_argument("error scans need repetitions >= 8");
    if (values.empty()) throw std::invalid_argument("error scan needs axis values");
    base.validate();
    const bool is_purity = base.kind == ProtocolKind::Purity;

    Table table;
    table.columns = {"axis", "value", "kind", "N", "n", "N_U", "N_M", "repetitions", "exact", "mean_abs_error",
                     "abs_error_sem", "mean_bootstrap_std_error", "mean_estimate"};
    for (int v : values) {
        ProtocolParams params = base;
        int n = base.partition.segments[0].length;
        switch (axis) {
        case ScanAxis::NumUnitaries: params.num_unitaries = v; break;
        case ScanAxis::NumShots: params.num_shots = v; break;
        case ScanAxis::SegmentLength:
            n = v;
            params.partition = layout_for(base.kind, state.num_sites(), n);
            break;
        }
        params.validate();
        const auto rdm = reduced_density_matrix(state, params.partition);
        const double exact =
            is_purity ? purity(segment_rdm(rdm, 0)) : exact_invariant(parse_invariant_kind(to_string(base.kind)), rdm).raw;

        std::vector<double> errors(repetitions);
        std::vector<double> std_errors(repetitions);
        std::vector<double> estimates(repetitions);
#pragma omp parallel for schedule(dynamic)
        for (int rep = 0; rep < repetitions; ++rep) {
            ProtocolParams p = params;
            p.master_seed = derive_seed(base.master_seed, StreamTag::ErrorScan,
                                        {static_cast<std::uint64_t>(axis), static_cast<std::uint64_t>(v),
                                         static_cast<std::uint64_t>(rep)});
            const auto data = campaign_data(run_campaign(state, p), p);
            const auto est = is_purity ? estimate_purity(data, 0)
                                       : estimate_invariant(parse_invariant_kind(to_string(base.kind)), data);
            estimates[rep] = est.value;
            errors[rep] = std::abs(est.value - exact);
            std_errors[rep] = est.std_error;
        }
        double mean = 0.0, mean_sq = 0.0, mean_se = 0.0, mean_est = 0.0;
        for (int r = 0; r < repetitions; ++r) {
            mean += errors[r];
            mean_sq += errors[r] * errors[r];
            mean_se += std_errors[r];
            mean_est += estimates[r];
        }
        mean /= repetitions;
        mean_sq /= repetitions;
        mean_se /= repetitions;
        mean_est /= repetitions;
        const double sem = std::sqrt(std::max(0.0, mean_sq - mean * mean) / (repetitions - 1));
        table.rows.push_back({to_string(axis), std::int64_t{v}, to_string(base.kind), std::int64_t{state.num_sites()},
                              std::int64_t{n}, std::int64_t{params.num_unitaries}, std::int64_t{params.num_shots},
                              std::int64_t{repetitions}, exact, mean, sem, mean_se, mean_est});
    }
    return table;
}

// ----------------------------------------------------- symmetry breaking --

Table symmetry_breaking_report(const HamiltonianSpec& spec, const std::vector<int>& n_values,
                               const LanczosOptions& solver) {
    if (n_values.empty()) throw std::invalid_argument("symmetry_breaking_report needs n values");
    const auto gs = ground_state(spec, solver);
    Table table;
    table.columns = {"n", "J_prime_over_J", "delta", "B", "ZT_raw", "ZT_normalized", "ZR_raw", "ZR_normalized",
                     "purity_I1", "purity_I2", "energy"};
    for (int n : n_values) {
        const auto rdm = reduced_density_matrix(gs.state, PartitionSpec::reflection_pair(spec.num_sites, n));
        const auto zt = exact_zt(rdm);
        const auto zr = exact_zr(rdm);
        table.rows.push_back({std::int64_t{n}, spec.exchange_prime / spec.exchange, spec.anisotropy, spec.breaking,
                              zt.raw, zt.normalized, zr.raw, zr.normalized, zt.segment_purities[0],
                              zt.segment_purities[1], gs.energy});
    }
    return table;
}

} // namespace rmspt
