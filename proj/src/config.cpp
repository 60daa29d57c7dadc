#include "rmspt/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace rmspt {
namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Field {
    std::string section;
    std::string key;
    std::string value;

    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("[" + section + "] " + key + " = '" + value + "': " + why);
    }

    std::int64_t as_int() const {
        const std::string v = trim(value);
        std::int64_t out = 0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) fail("expected an integer");
        return out;
    }

    std::uint64_t as_uint64() const {
        const std::string v = trim(value);
        std::uint64_t out = 0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) fail("expected a non-negative integer");
        return out;
    }

    int as_int_in(std::int64_t lo, std::int64_t hi) const {
        const auto v = as_int();
        if (v < lo || v > hi) fail("must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return static_cast<int>(v);
    }

    double as_double() const { return parse_double(trim(value)); }

    double parse_double(const std::string& v) const {
        double out = 0.0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
            fail("expected a finite number");
        }
        return out;
    }

    bool as_bool() const {
        const std::string v = trim(value);
        if (v == "true" || v == "yes" || v == "1") return true;
        if (v == "false" || v == "no" || v == "0") return false;
        fail("expected true or false");
    }

    std::vector<std::string> as_list() const {
        std::vector<std::string> out;
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) fail("empty list entry");
            out.push_back(item);
        }
        if (out.empty()) fail("expected a comma-separated list");
        return out;
    }

    std::vector<double> as_doubles() const {
        std::vector<double> out;
        for (const auto& item : as_list()) out.push_back(parse_double(item));
        return out;
    }

    std::vector<int> as_ints(int lo) const {
        std::vector<int> out;
        for (const auto& item : as_list()) {
            Field f{section, key, item};
            out.push_back(f.as_int_in(lo, 1 << 30));
        }
        return out;
    }

    std::vector<InvariantKind> as_kinds() const {
        std::vector<InvariantKind> out;
        for (const auto& item : as_list()) {
            try {
                out.push_back(parse_invariant_kind(item));
            } catch (const std::invalid_argument& e) {
                fail(e.what());
            }
        }
        return out;
    }
};

using Handler = std::function<void(const Field&)>;

std::map<std::string, Handler> hamiltonian_keys(RunConfig& c) {
    auto& h = c.hamiltonian;
    return {
        {"N", [&h](const Field& f) { h.num_sites = f.as_int_in(2, kMaxHamiltonianSites); }},
        {"J", [&h](const Field& f) { h.exchange = f.as_double(); }},
        {"J_prime", [&h](const Field& f) { h.exchange_prime = f.as_double(); }},
        {"delta", [&h](const Field& f) { h.anisotropy = f.as_double(); }},
        {"B", [&h](const Field& f) { h.breaking = f.as_double(); }},
        {"Delta", [&h](const Field& f) { h.neel_field = f.as_double(); }},
        {"delta_p", [&h](const Field& f) { h.pinning = f.as_double(); }},
        {"neel_weight", [&h](const Field& f) { h.neel_weight = f.as_double(); }},
    };
}

std::map<std::string, Handler> partition_keys(RunConfig& c) {
    return {
        {"layout",
         [&c](const Field& f) {
             const auto v = trim(f.value);
             if (v != "pair" && v != "triple") f.fail("expected pair or triple");
             c.partition.layout = v;
         }},
        {"n", [&c](const Field& f) { c.partition.n = f.as_int_in(1, 8); }},
    };
}

std::map<std::string, Handler> protocol_keys(RunConfig& c) {
    auto& p = c.protocol;
    return {
        {"kind",
         [&p](const Field& f) {
             try {
                 p.kind = parse_protocol_kind(trim(f.value));
             } catch (const std::invalid_argument& e) {
                 f.fail(e.what());
             }
         }},
        {"invariants", [&p](const Field& f) { p.invariants = f.as_kinds(); }},
        {"N_U", [&p](const Field& f) { p.num_unitaries = f.as_int_in(2, 10'000'000); }},
        {"N_M", [&p](const Field& f) { p.num_shots = f.as_int_in(2, 100'000'000); }},
        {"exact_reference", [&p](const Field& f) { p.exact_reference = f.as_bool(); }},
    };
}

std::map<std::string, Handler> solver_keys(RunConfig& c) {
    auto& s = c.solver;
    return {
        {"tol",
         [&s](const Field& f) {
             s.tol = f.as_double();
             if (!(s.tol > 0.0)) f.fail("must be positive");
         }},
        {"max_iter", [&s](const Field& f) { s.max_iter = f.as_int_in(1, 10'000'000); }},
        {"krylov_dim", [&s](const Field& f) { s.krylov_dim = f.as_int_in(2, 2000); }},
        {"seed", [&s](const Field& f) { s.seed = f.as_uint64(); }},
    };
}

std::map<std::string, Handler> ramp_keys(RunConfig& c) {
    auto& r = c.ramp;
    return {
        {"t_F", [&r](const Field& f) { r.spec.t_final = f.as_double(); }},
        {"dt", [&r](const Field& f) { r.spec.dt = f.as_double(); }},
        {"Delta", [&r](const Field& f) { r.spec.neel_field = f.as_double(); }},
        {"exponent", [&r](const Field& f) { r.spec.ramp_exponent = f.as_int_in(1, 64); }},
        {"sample_times", [&r](const Field& f) { r.spec.sample_times = f.as_doubles(); }},
        {"t_F_values", [&r](const Field& f) { r.t_final_values = f.as_doubles(); }},
        {"n_values", [&r](const Field& f) { r.n_values = f.as_ints(1); }},
        {"invariants", [&r](const Field& f) { r.invariants = f.as_kinds(); }},
    };
}

std::map<std::string, Handler> error_scan_keys(RunConfig& c) {
    auto& e = c.error_scan;
    return {
        {"axis",
         [&e](const Field& f) {
             try {
                 e.axis = parse_scan_axis(trim(f.value));
             } catch (const std::invalid_argument& ex) {
                 f.fail(ex.what());
             }
         }},
        {"values", [&e](const Field& f) { e.values = f.as_ints(1); }},
        {"repetitions", [&e](const Field& f) { e.repetitions = f.as_int_in(8, 1'000'000); }},
        {"state",
         [&e](const Field& f) {
             const auto v = trim(f.value);
             if (v != "ground_state" && v != "random") f.fail("expected ground_state or random");
             e.state = v;
         }},
    };
}

std::map<std::string, Handler> twirl_keys(RunConfig& c) {
    return {{"samples", [&c](const Field& f) { c.twirl_samples = f.as_int_in(100, 100'000'000); }}};
}

std::map<std::string, Handler> run_keys(RunConfig& c) {
    return {
        {"master_seed", [&c](const Field& f) { c.master_seed = f.as_uint64(); }},
        {"out", [&c](const Field& f) { c.out_dir = trim(f.value); }},
        {"jobs", [&c](const Field& f) { c.jobs = f.as_int_in(1, 4096); }},
    };
}

void apply_sweep_key(RunConfig& c, const Field& f) {
    auto& s = c.sweep;
    if (f.key == "study") {
        const auto v = trim(f.value);
        if (v == "grid") s.study = SweepStudy::Grid;
        else if (v == "correlation_length") s.study = SweepStudy::CorrelationLength;
        else if (v == "symmetry_breaking") s.study = SweepStudy::SymmetryBreaking;
        else f.fail("expected grid, correlation_length or symmetry_breaking");
    } else if (f.key == "kinds") {
        s.kinds = f.as_kinds();
    } else if (f.key == "mode") {
        const auto v = trim(f.value);
        if (v == "exact") s.mode = SweepMode::Exact;
        else if (v == "sampled") s.mode = SweepMode::Sampled;
        else f.fail("expected exact or sampled");
    } else if (f.key == "repetitions") {
        s.repetitions = f.as_int_in(1, 1'000'000);
    } else if (is_sweep_axis(f.key)) {
        s.axes.push_back({f.key, f.as_doubles()});
    } else {
        throw ConfigError("unknown key '" + f.key + "' in [sweep]");
    }
}

std::string unknown_section(const std::string& name) { return "unknown section [" + name + "]"; }

} // namespace

PartitionSpec RunConfig::partition_for(InvariantKind kind, int n) const {
    const std::string layout = partition.layout.empty()
                                   ? ((kind == InvariantKind::D2 || kind == InvariantKind::KB) ? "triple" : "pair")
                                   : partition.layout;
    const bool wants_triple = kind == InvariantKind::D2 || kind == InvariantKind::KB;
    if ((layout == "triple") != wants_triple) {
        throw ConfigError("[partition] layout = " + layout + " does not fit invariant " + to_string(kind));
    }
    try {
        return layout == "triple" ? PartitionSpec::centered_triple(hamiltonian.num_sites, n)
                                  : PartitionSpec::reflection_pair(hamiltonian.num_sites, n);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[partition] ") + e.what());
    }
}

PartitionSpec RunConfig::partition_for(ProtocolKind kind) const {
    if (kind == ProtocolKind::Purity) return partition_for(InvariantKind::R, partition.n);
    return partition_for(parse_invariant_kind(to_string(kind)), partition.n);
}

std::uint64_t RunConfig::require_seed(const std::string& purpose) const {
    if (!master_seed) throw ConfigError("[run] master_seed is required for " + purpose + " (or pass --seed)");
    return *master_seed;
}

SweepSpec RunConfig::sweep_spec() const {
    SweepSpec s;
    s.base = hamiltonian;
    s.axes = sweep.axes;
    s.kinds = std::set<InvariantKind>(sweep.kinds.begin(), sweep.kinds.end());
    s.n = partition.n;
    s.mode = sweep.mode;
    s.num_unitaries = protocol.num_unitaries;
    s.num_shots = protocol.num_shots;
    s.repetitions = sweep.repetitions;
    s.master_seed = master_seed.value_or(0);
    s.solver = solver;
    s.ramp = ramp.spec;
    return s;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    RunConfig c;
    c.source = source;
    std::map<std::string, std::function<std::map<std::string, Handler>(RunConfig&)>> sections = {
        {"hamiltonian", hamiltonian_keys}, {"partition", partition_keys}, {"protocol", protocol_keys},
        {"solver", solver_keys},           {"ramp", ramp_keys},           {"error_scan", error_scan_keys},
        {"twirl", twirl_keys},             {"run", run_keys},
    };
    for (const auto& [name, body] : tree) {
        if (body.empty() && !body.data().empty()) throw ConfigError("key '" + name + "' outside any section");
        if (name == "sweep") {
            for (const auto& [key, value] : body) apply_sweep_key(c, Field{name, key, value.data()});
            continue;
        }
        const auto it = sections.find(name);
        if (it == sections.end()) throw ConfigError(unknown_section(name));
        auto handlers = it->second(c);
        for (const auto& [key, value] : body) {
            const auto h = handlers.find(key);
            if (h == handlers.end()) throw ConfigError("unknown key '" + key + "' in [" + name + "]");
            h->second(Field{name, key, value.data()});
        }
    }

    try {
        c.hamiltonian.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[hamiltonian] ") + e.what());
    }
    try {
        c.ramp.spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[ramp] ") + e.what());
    }
    for (double t : c.ramp.t_final_values) {
        if (!(t > 0.0)) throw ConfigError("[ramp] t_F_values must be positive");
    }
    if (c.protocol.invariants.empty() && c.protocol.kind != ProtocolKind::Purity) {
        c.protocol.invariants = {parse_invariant_kind(to_string(c.protocol.kind))};
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text, path);
}

Json resolved_config(const RunConfig& c) {
    auto kinds = [](const std::vector<InvariantKind>& ks) {
        Json out = Json::array();
        for (auto k : ks) out.push_back(to_string(k));
        return out;
    };
    Json axes = Json::array();
    for (const auto& a : c.sweep.axes) axes.push_back({{"name", a.name}, {"values", a.values}});
    const char* study = c.sweep.study == SweepStudy::Grid                ? "grid"
                        : c.sweep.study == SweepStudy::CorrelationLength ? "correlation_length"
                                                                         : "symmetry_breaking";
    return {
        {"source", c.source},
        {"hamiltonian", to_json(c.hamiltonian)},
        {"partition", {{"layout", c.partition.layout.empty() ? "auto" : c.partition.layout}, {"n", c.partition.n}}},
        {"protocol",
         {{"kind", to_string(c.protocol.kind)},
          {"invariants", kinds(c.protocol.invariants)},
          {"N_U", c.protocol.num_unitaries},
          {"N_M", c.protocol.num_shots},
          {"exact_reference", c.protocol.exact_reference}}},
        {"solver",
         {{"tol", c.solver.tol},
          {"max_iter", c.solver.max_iter},
          {"krylov_dim", c.solver.krylov_dim},
          {"seed", c.solver.seed}}},
        {"ramp",
         {{"spec", to_json(c.ramp.spec)},
          {"t_F_values", c.ramp.t_final_values},
          {"n_values", c.ramp.n_values},
          {"invariants", kinds(c.ramp.invariants)},
          {"pinning_during_ramp", c.hamiltonian.pinning != 0.0}}},
        {"sweep",
         {{"study", study},
          {"axes", axes},
          {"kinds", kinds(c.sweep.kinds)},
          {"mode", c.sweep.mode == SweepMode::Exact ? "exact" : "sampled"},
          {"repetitions", c.sweep.repetitions}}},
        {"error_scan",
         {{"axis", to_string(c.error_scan.axis)},
          {"values", c.error_scan.values},
          {"repetitions", c.error_scan.repetitions},
          {"state", c.error_scan.state}}},
        {"twirl", {{"samples", c.twirl_samples}}},
        {"run",
         {{"master_seed", c.master_seed ? Json(*c.master_seed) : Json(nullptr)}}},
    };
}

} // namespace rmspt
