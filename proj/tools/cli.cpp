#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>

#include "rmspt/analysis.hpp"
#include "rmspt/config.hpp"
#include "rmspt/dynamics.hpp"
#include "rmspt/groundstate.hpp"
#include "rmspt/protocols.hpp"
#include "rmspt/rdm.hpp"
#include "rmspt/rng.hpp"
#include "rmspt/serialize.hpp"

namespace rmspt::cli {
namespace {

namespace fs = std::filesystem;

constexpr double kTwirlTolerance = 0.05;

struct Context {
    RunConfig config;
    fs::path out_dir;
    std::ostream& out;
    std::ostream& err;
};

Json document(const Context& ctx, const std::string& command) {
    Json doc;
    doc["command"] = command;
    doc["config"] = resolved_config(ctx.config);
    doc["master_seed"] = ctx.config.master_seed ? Json(*ctx.config.master_seed) : Json(nullptr);
    doc["encoding"] = "site k (0-based) is bit k; bit 0 = up (sz = +1)";
    return doc;
}

fs::path write_json(const Context& ctx, const std::string& name, Json doc) {
    stamp_document(doc);
    const fs::path path = ctx.out_dir / name;
    write_text_file(path.string(), doc.dump(2) + "\n");
    return path;
}

fs::path write_table(const Context& ctx, const std::string& name, const Table& table) {
    const fs::path path = ctx.out_dir / name;
    write_text_file(path.string(), to_csv(table));
    return path;
}

EigenResult solve(const Context& ctx, HamiltonianSpec spec) {
    return ground_state(spec, ctx.config.solver);
}

Json ground_state_json(const EigenResult& gs) {
    Json j = to_json(gs);
    j["sz_site0"] = expectation_z(gs.state, 0);
    return j;
}

// ------------------------------------------------------------ commands --

int cmd_ground_state(Context& ctx) {
    const auto gs = solve(ctx, ctx.config.hamiltonian);
    Json doc = document(ctx, "ground-state");
    doc["result"] = ground_state_json(gs);
    const auto path = write_json(ctx, "ground_state.json", doc);
    ctx.out << "E0 = " << format_number(gs.energy) << "  residual = " << format_number(gs.residual_norm) << "  -> "
            << path.string() << "\n";
    return 0;
}

int cmd_invariants(Context& ctx, bool sampled) {
    const auto& cfg = ctx.config;
    if (cfg.protocol.invariants.empty()) throw ConfigError("[protocol] invariants is empty");
    const std::uint64_t seed = sampled ? cfg.require_seed("invariants --sampled") : 0;
    const auto gs = solve(ctx, cfg.hamiltonian);
    Json results = Json::array();
    for (InvariantKind kind : cfg.protocol.invariants) {
        const auto partition = cfg.partition_for(kind, cfg.partition.n);
        const auto exact = exact_invariant(kind, gs.state, partition);
        Json entry = {{"kind", to_string(kind)}, {"partition", to_json(partition)}};
        if (!sampled) {
            entry["exact"] = to_json(exact);
            ctx.out << "Z_" << to_string(kind) << " = " << format_number(exact.raw)
                    << "  normalized = " << format_number(exact.normalized) << "\n";
        } else {
            ProtocolParams params{protocol_for(kind), cfg.protocol.num_unitaries, cfg.protocol.num_shots, partition,
                                  seed};
            auto est = estimate_invariant(kind, campaign_data(run_campaign(gs.state, params), params));
            if (cfg.protocol.exact_reference) {
                est.exact_reference = exact.raw;
                est.exact_normalized_reference = exact.normalized;
            }
            entry["estimate"] = to_json(est);
            ctx.out << "Z_" << to_string(kind) << " ~ " << format_number(est.value) << " +- "
                    << format_number(est.std_error) << "  normalized ~ " << format_number(*est.normalized) << " +- "
                    << format_number(*est.normalized_std_error) << "\n";
        }
        results.push_back(entry);
    }
    Json doc = document(ctx, sampled ? "invariants --sampled" : "invariants --exact");
    doc["mode"] = sampled ? "sampled" : "exact";
    doc["ground_state"] = ground_state_json(gs);
    doc["results"] = results;
    write_json(ctx, "invariants.json", doc);
    return 0;
}

/// Cartesian product of the Hamiltonian-valued axes (everything but n).
std::vector<std::pair<std::vector<std::pair<std::string, double>>, HamiltonianSpec>> hamiltonian_points(
    const RunConfig& cfg) {
    std::vector<std::pair<std::vector<std::pair<std::string, double>>, HamiltonianSpec>> points{{{}, cfg.hamiltonian}};
    for (const auto& axis : cfg.sweep.axes) {
        if (axis.name == "n") continue;
        if (axis.name == "N_U" || axis.name == "N_M" || axis.name == "t_F") {
            throw ConfigError("[sweep] axis " + axis.name + " is not supported by the symmetry_breaking study");
        }
        auto values = axis.values;
        std::sort(values.begin(), values.end());
        std::vector<std::pair<std::vector<std::pair<std::string, double>>, HamiltonianSpec>> next;
        for (const auto& [labels, spec] : points) {
            for (double v : values) {
                auto s = spec;
                if (axis.name == "J_prime_over_J") s.exchange_prime = v * cfg.hamiltonian.exchange;
                else if (axis.name == "delta") s.anisotropy = v;
                else if (axis.name == "B") s.breaking = v;
                else if (axis.name == "Delta") s.neel_field = v;
                else if (axis.name == "N") s.num_sites = static_cast<int>(v);
                auto l = labels;
                l.emplace_back(axis.name, v);
                next.emplace_back(l, s);
            }
        }
        points = std::move(next);
    }
    return points;
}

std::vector<int> n_axis(const RunConfig& cfg, const char* study) {
    for (const auto& axis : cfg.sweep.axes) {
        if (axis.name == "n") {
            std::vector<int> out;
            for (double v : axis.values) out.push_back(static_cast<int>(v));
            std::sort(out.begin(), out.end());
            return out;
        }
    }
    throw ConfigError(std::string("[sweep] the ") + study + " study needs an n axis");
}

int cmd_sweep(Context& ctx) {
    auto& cfg = ctx.config;
    if (cfg.sweep.mode == SweepMode::Sampled) cfg.require_seed("sampled sweeps");
    Json doc = document(ctx, "sweep");

    if (cfg.sweep.study == SweepStudy::SymmetryBreaking) {
        const auto ns = n_axis(cfg, "symmetry_breaking");
        Table combined;
        for (const auto& [labels, spec] : hamiltonian_points(cfg)) {
            Table t = symmetry_breaking_report(spec, ns, cfg.solver);
            if (combined.columns.empty()) combined.columns = t.columns;
            for (auto& row : t.rows) combined.rows.push_back(std::move(row));
        }
        write_table(ctx, "sweep.csv", combined);
        doc["study"] = "symmetry_breaking";
        doc["table"] = to_json(combined);
        write_json(ctx, "sweep.json", doc);
        ctx.out << combined.rows.size() << " rows -> " << (ctx.out_dir / "sweep.csv").string() << "\n";
        return 0;
    }

    const Table table = run_sweep(cfg.sweep_spec());
    write_table(ctx, "sweep.csv", table);
    doc["study"] = cfg.sweep.study == SweepStudy::Grid ? "grid" : "correlation_length";
    doc["rows"] = table.rows.size();
    std::size_t failures = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) failures += table.text(r, "status") != "ok";
    doc["failed_rows"] = failures;

    if (cfg.sweep.study == SweepStudy::CorrelationLength) {
        n_axis(cfg, "correlation_length");
        const bool sampled = cfg.sweep.mode == SweepMode::Sampled;
        const std::string value_col = sampled ? "estimate_normalized" : "exact_normalized";
        // Group rows by every axis except n, plus kind and repetition.
        std::map<std::vector<std::string>, std::vector<std::pair<int, double>>> groups;
        std::map<std::vector<std::string>, std::vector<std::pair<std::string, double>>> group_labels;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            if (table.text(r, "status") != "ok") continue;
            std::vector<std::string> key;
            std::vector<std::pair<std::string, double>> labels;
            for (const auto& axis : cfg.sweep.axes) {
                if (axis.name == "n") continue;
                key.push_back(format_number(table.number(r, axis.name)));
                labels.emplace_back(axis.name, table.number(r, axis.name));
            }
            key.push_back(table.text(r, "kind"));
            key.push_back(format_number(table.number(r, "repetition")));
            groups[key].emplace_back(static_cast<int>(table.number(r, "n")), table.number(r, value_col));
            group_labels[key] = labels;
        }
        Table lambda_table;
        for (const auto& axis : cfg.sweep.axes) {
            if (axis.name != "n") lambda_table.columns.push_back(axis.name);
        }
        for (const char* c : {"kind", "repetition", "lambda", "amplitude", "residual", "quantized_target", "status",
                              "outside_unit_interval"}) {
            lambda_table.columns.push_back(c);
        }
        Json fits = Json::array();
        for (const auto& [key, series] : groups) {
            std::vector<Cell> row;
            for (const auto& [name, v] : group_labels[key]) row.emplace_back(v);
            row.emplace_back(key[key.size() - 2]);
            row.emplace_back(static_cast<std::int64_t>(std::stod(key.back())));
            Json entry = {{"kind", key[key.size() - 2]}};
            for (const auto& [name, v] : group_labels[key]) entry[name] = v;
            try {
                const auto fit = fit_correlation_length(series);
                entry["fit"] = to_json(fit);
                row.emplace_back(fit.lambda);
                row.emplace_back(fit.amplitude);
                row.emplace_back(fit.residual);
                row.emplace_back(std::int64_t{fit.quantized_target});
                row.emplace_back(to_string(fit.status));
                row.emplace_back(std::string(fit.outside_unit_interval ? "true" : "false"));
            } catch (const std::exception& e) {
                entry["error"] = e.what();
                row.resize(lambda_table.columns.size() - 2);
                row.emplace_back(std::string("error"));
                row.emplace_back(std::string(""));
            }
            fits.push_back(entry);
            lambda_table.rows.push_back(std::move(row));
        }
        write_table(ctx, "lambda.csv", lambda_table);
        doc["lambda_fits"] = fits;
    }
    write_json(ctx, "sweep.json", doc);
    ctx.out << table.rows.size() << " rows (" << failures << " failed) -> " << (ctx.out_dir / "sweep.csv").string()
            << "\n";
    return 0;
}

int cmd_adiabatic(Context& ctx, bool sampled) {
    const auto& cfg = ctx.config;
    MonitorMode mode;
    mode.sampled = sampled;
    if (sampled) {
        mode.params.num_unitaries = cfg.protocol.num_unitaries;
        mode.params.num_shots = cfg.protocol.num_shots;
        mode.params.master_seed = cfg.require_seed("adiabatic --sampled");
    }
    HamiltonianSpec target = cfg.hamiltonian;
    target.neel_field = 0.0;
    const auto gs = solve(ctx, target);

    std::vector<double> t_values = cfg.ramp.t_final_values;
    if (t_values.empty()) t_values.push_back(cfg.ramp.spec.t_final);

    Table table;
    table.columns = {"t_F", "time", "n", "kind", "exact_raw", "exact_normalized", "ground_state_normalized",
                     "overlap_ground_state", "estimate_normalized", "estimate_normalized_std_error"};
    Json warnings = Json::array();
    Json reference = Json::array();
    std::map<std::pair<int, InvariantKind>, double> gs_values;
    for (int n : cfg.ramp.n_values) {
        for (InvariantKind kind : cfg.ramp.invariants) {
            const auto v = exact_invariant(kind, gs.state, cfg.partition_for(kind, n));
            gs_values[{n, kind}] = v.normalized;
            Json e = to_json(v);
            e["n"] = n;
            reference.push_back(e);
        }
    }
    for (std::size_t ti = 0; ti < t_values.size(); ++ti) {
        RampSpec ramp = cfg.ramp.spec;
        ramp.t_final = t_values[ti];
        ramp.dt = std::min(ramp.dt, ramp.t_final);
        std::vector<double> times;
        for (double t : ramp.sample_times) {
            if (t <= ramp.t_final) times.push_back(t);
        }
        ramp.sample_times = times;
        const auto evo = adiabatic_evolve(cfg.hamiltonian, ramp);
        for (const auto& w : evo.warnings) {
            warnings.push_back(w);
            ctx.err << "warning: " << w << "\n";
        }
        for (int n : cfg.ramp.n_values) {
            std::map<bool, std::set<InvariantKind>> by_layout;
            for (InvariantKind k : cfg.ramp.invariants) {
                by_layout[k == InvariantKind::D2 || k == InvariantKind::KB].insert(k);
            }
            for (const auto& [triple, kinds] : by_layout) {
                const auto partition = cfg.partition_for(*kinds.begin(), n);
                MonitorMode m = mode;
                if (sampled) {
                    m.params.master_seed = derive_seed(mode.params.master_seed, StreamTag::Monitor,
                                                       {ti, static_cast<std::uint64_t>(n)});
                }
                const auto rows = monitor_invariants(evo.snapshots, partition, kinds, m);
                for (const auto& r : rows) {
                    const auto snap = std::find_if(evo.snapshots.begin(), evo.snapshots.end(),
                                                   [&](const Snapshot& s) { return s.time == r.time; });
                    table.rows.push_back({ramp.t_final, r.time, std::int64_t{n}, to_string(r.kind), r.exact.raw,
                                          r.exact.normalized, gs_values[{n, r.kind}], overlap(snap->state, gs.state),
                                          r.sampled ? Cell{*r.sampled->normalized} : Cell{},
                                          r.sampled ? Cell{*r.sampled->normalized_std_error} : Cell{}});
                }
            }
        }
    }
    write_table(ctx, "adiabatic.csv", table);
    Json doc = document(ctx, sampled ? "adiabatic --sampled" : "adiabatic");
    doc["ground_state"] = ground_state_json(gs);
    doc["ground_state_invariants"] = reference;
    doc["warnings"] = warnings;
    doc["pinning_during_ramp"] = cfg.hamiltonian.pinning != 0.0;
    doc["table"] = to_json(table);
    write_json(ctx, "adiabatic.json", doc);
    ctx.out << table.rows.size() << " rows -> " << (ctx.out_dir / "adiabatic.csv").string() << "\n";
    return 0;
}

StateVector scan_state(const Context& ctx, std::uint64_t seed) {
    if (ctx.config.error_scan.state == "random") {
        Rng rng = make_stream(seed, StreamTag::ErrorScan, {0xffffffffULL});
        return StateVector::random(ctx.config.hamiltonian.num_sites, rng);
    }
    return solve(ctx, ctx.config.hamiltonian).state;
}

int cmd_error_scan(Context& ctx) {
    const auto& cfg = ctx.config;
    const std::uint64_t seed = cfg.require_seed("error-scan");
    if (cfg.error_scan.values.empty()) throw ConfigError("[error_scan] values is required");
    ProtocolParams base{cfg.protocol.kind, cfg.protocol.num_unitaries, cfg.protocol.num_shots,
                        cfg.partition_for(cfg.protocol.kind), seed};
    const auto state = scan_state(ctx, seed);
    const Table table = error_scaling_scan(state, base, cfg.error_scan.axis, cfg.error_scan.values,
                                           cfg.error_scan.repetitions);
    write_table(ctx, "error_scan.csv", table);
    Json doc = document(ctx, "error-scan");
    doc["error_definition"] = "mean over repetitions of |estimate - exact| for the raw quantity";
    doc["table"] = to_json(table);
    write_json(ctx, "error_scan.json", doc);
    ctx.out << table.rows.size() << " rows -> " << (ctx.out_dir / "error_scan.csv").string() << "\n";
    return 0;
}

int cmd_twirl_check(Context& ctx, int samples) {
    const std::uint64_t seed = ctx.config.master_seed.value_or(0);
    Json doc = document(ctx, "twirl-check");
    doc["master_seed"] = seed;
    Json reports = Json::array();
    bool ok = true;
    for (TwirlChannel ch : {TwirlChannel::Phi, TwirlChannel::Psi}) {
        Rng rng = make_stream(seed, StreamTag::Twirl, {static_cast<std::uint64_t>(ch)});
        const auto report = twirl_check(ch, samples, rng);
        Json j = to_json(report);
        j["tolerance"] = kTwirlTolerance;
        j["pass"] = report.frobenius_error <= kTwirlTolerance;
        ok = ok && report.frobenius_error <= kTwirlTolerance;
        reports.push_back(j);
        ctx.out << (ch == TwirlChannel::Phi ? "Phi" : "Psi") << ": |twirl - target|_F = "
                << format_number(report.frobenius_error) << "\n";
    }
    doc["n_samples"] = samples;
    doc["reports"] = reports;
    write_json(ctx, "twirl_check.json", doc);
    return ok ? 0 : 3;
}

int cmd_campaign_export(Context& ctx) {
    const auto& cfg = ctx.config;
    const std::uint64_t seed = cfg.require_seed("campaign-export");
    ProtocolParams params{cfg.protocol.kind, cfg.protocol.num_unitaries, cfg.protocol.num_shots,
                          cfg.partition_for(cfg.protocol.kind), seed};
    params.validate();
    const auto gs = solve(ctx, cfg.hamiltonian);
    const auto records = run_campaign(gs.state, params);
    std::ostringstream lines;
    write_records_jsonl(lines, records);
    write_text_file((ctx.out_dir / "records.jsonl").string(), lines.str());

    Json doc = document(ctx, "campaign-export");
    doc["params"] = to_json(params);
    doc["records_file"] = "records.jsonl";
    doc["num_records"] = records.size();
    doc["ground_state"] = ground_state_json(gs);
    if (params.kind != ProtocolKind::Purity) {
        const auto kind = parse_invariant_kind(to_string(params.kind));
        doc["exact_reference"] = to_json(exact_invariant(kind, gs.state, params.partition));
    } else {
        const auto rdm = reduced_density_matrix(gs.state, params.partition);
        Json pur = Json::array();
        for (int k = 0; k < params.partition.num_segments(); ++k) pur.push_back(purity(segment_rdm(rdm, k)));
        doc["exact_reference"] = {{"segment_purities", pur}, {"interval_purity", purity(rdm)}};
    }
    write_json(ctx, "campaign.json", doc);
    ctx.out << records.size() << " records -> " << (ctx.out_dir / "records.jsonl").string() << "\n";
    return 0;
}

int cmd_campaign_analyze(Context& ctx, const std::string& in_dir) {
    const fs::path dir = in_dir.empty() ? ctx.out_dir : fs::path(in_dir);
    const Json meta = Json::parse(read_text_file((dir / "campaign.json").string()));
    const auto params = protocol_params_from_json(meta.at("params"));
    std::ifstream lines(dir / meta.value("records_file", std::string("records.jsonl")));
    if (!lines) throw std::runtime_error("cannot read records in " + dir.string());
    const auto data = campaign_data(read_records_jsonl(lines), params);

    Json estimates = Json::array();
    if (params.kind == ProtocolKind::Purity) {
        for (int k = -1; k < params.partition.num_segments(); ++k) {
            Json e = to_json(estimate_purity(data, k));
            e["segment"] = k < 0 ? Json("interval") : Json("I" + std::to_string(k + 1));
            estimates.push_back(e);
        }
    } else {
        auto est = estimate_invariant(parse_invariant_kind(to_string(params.kind)), data);
        if (meta.contains("exact_reference")) {
            est.exact_reference = meta["exact_reference"].at("raw").get<double>();
            est.exact_normalized_reference = meta["exact_reference"].at("normalized").get<double>();
        }
        ctx.out << est.quantity << " ~ " << format_number(est.value) << " +- " << format_number(est.std_error)
                << "\n";
        estimates.push_back(to_json(est));
    }
    Json doc;
    doc["command"] = "campaign-analyze";
    doc["campaign"] = meta.at("config");
    doc["master_seed"] = params.master_seed;
    doc["params"] = to_json(params);
    doc["source_payload_hash"] = meta.value("payload_hash", std::string());
    doc["estimates"] = estimates;
    write_json(ctx, "campaign_analysis.json", doc);
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Randomized-measurement protocols for topological invariants of spin chains", "rmspt"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    int jobs = 0;
    std::string out_dir;
    app.add_option("--config", config_path, "Run configuration file");
    app.add_option("--seed", seed, "Master seed (overrides [run] master_seed)");
    app.add_option("--jobs", jobs, "Worker threads (default: all cores)")->check(CLI::Range(1, 4096));
    app.add_option("--out", out_dir, "Output directory (overrides [run] out)");

    auto* gs = app.add_subcommand("ground-state", "Lanczos ground state of the configured chain");
    auto* inv = app.add_subcommand("invariants", "Invariants of the ground state");
    bool exact = false;
    bool sampled = false;
    auto* exact_flag = inv->add_flag("--exact", exact, "Direct contraction of the reduced density matrix");
    inv->add_flag("--sampled", sampled, "Simulated randomized-measurement campaign")->excludes(exact_flag);
    auto* sweep = app.add_subcommand("sweep", "Parameter sweep ([sweep] section)");
    auto* adia = app.add_subcommand("adiabatic", "Adiabatic ramp from the Neel state ([ramp] section)");
    bool adia_sampled = false;
    adia->add_flag("--sampled", adia_sampled, "Also estimate the invariants from simulated campaigns");
    auto* scan = app.add_subcommand("error-scan", "Statistical error versus N_U, N_M or n ([error_scan] section)");
    auto* twirl = app.add_subcommand("twirl-check", "Monte Carlo check of the twirling identities");
    std::optional<int> twirl_samples;
    twirl->add_option("n_samples", twirl_samples, "CUE samples per channel")->check(CLI::Range(100, 100'000'000));
    auto* exp = app.add_subcommand("campaign-export", "Simulate a campaign and write its measurement records");
    auto* ana = app.add_subcommand("campaign-analyze", "Estimate invariants from exported records");
    std::string in_dir;
    ana->add_option("--in", in_dir, "Directory holding campaign.json and records.jsonl (default: --out)");

    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    if (inv->parsed() && !exact && !sampled) {
        err << "error: invariants needs --exact or --sampled\n";
        return 2;
    }

    try {
        RunConfig config;
        if (!config_path.empty()) {
            config = load_config(config_path);
        } else if (!twirl->parsed() && !ana->parsed()) {
            throw ConfigError("--config is required for this command");
        }
        if (seed) config.master_seed = *seed;
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (jobs > 0) config.jobs = jobs;
        if (config.jobs > 0) omp_set_num_threads(config.jobs);

        Context ctx{config, fs::path(config.out_dir), out, err};
        fs::create_directories(ctx.out_dir);

        if (gs->parsed()) return cmd_ground_state(ctx);
        if (inv->parsed()) return cmd_invariants(ctx, sampled);
        if (sweep->parsed()) return cmd_sweep(ctx);
        if (adia->parsed()) return cmd_adiabatic(ctx, adia_sampled);
        if (scan->parsed()) return cmd_error_scan(ctx);
        if (twirl->parsed()) return cmd_twirl_check(ctx, twirl_samples.value_or(config.twirl_samples));
        if (exp->parsed()) return cmd_campaign_export(ctx);
        if (ana->parsed()) return cmd_campaign_analyze(ctx, in_dir);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace rmspt::cli
