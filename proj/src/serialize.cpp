#include "rmspt/serialize.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace rmspt {
namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string cell_text(const Cell& c) {
    if (std::holds_alternative<std::monostate>(c)) return "";
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    return csv_escape(std::get<std::string>(c));
}

Json cell_json(const Cell& c) {
    if (std::holds_alternative<std::monostate>(c)) return nullptr;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
    if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? Json(*d) : Json(nullptr);
    return std::get<std::string>(c);
}

} // namespace

Json to_json(const HamiltonianSpec& s) {
    return {{"N", s.num_sites},     {"J", s.exchange},    {"J_prime", s.exchange_prime}, {"delta", s.anisotropy},
            {"B", s.breaking},      {"Delta", s.neel_field}, {"delta_p", s.pinning},     {"neel_weight", s.neel_weight}};
}

Json to_json(const PartitionSpec& p) {
    Json segs = Json::array();
    for (const auto& seg : p.segments) segs.push_back({{"begin", seg.begin}, {"length", seg.length}});
    return {{"N", p.num_sites}, {"segments", segs}, {"sites_zero_based", p.sites()}};
}

PartitionSpec partition_from_json(const Json& j) {
    PartitionSpec p;
    p.num_sites = j.at("N").get<int>();
    for (const auto& seg : j.at("segments")) {
        p.segments.push_back({seg.at("begin").get<int>(), seg.at("length").get<int>()});
    }
    p.validate();
    return p;
}

Json to_json(const ProtocolParams& p) {
    return {{"kind", to_string(p.kind)},
            {"N_U", p.num_unitaries},
            {"N_M", p.num_shots},
            {"partition", to_json(p.partition)},
            {"master_seed", p.master_seed}};
}

ProtocolParams protocol_params_from_json(const Json& j) {
    ProtocolParams p;
    p.kind = parse_protocol_kind(j.at("kind").get<std::string>());
    p.num_unitaries = j.at("N_U").get<int>();
    p.num_shots = j.at("N_M").get<int>();
    p.partition = partition_from_json(j.at("partition"));
    p.master_seed = j.at("master_seed").get<std::uint64_t>();
    p.validate();
    return p;
}

Json to_json(const InvariantValue& v) {
    Json purities = Json::object();
    for (std::size_t k = 0; k < v.segment_purities.size(); ++k) {
        purities["I" + std::to_string(k + 1)] = v.segment_purities[k];
    }
    return {{"kind", to_string(v.kind)},
            {"raw", v.raw},
            {"normalized", v.normalized},
            {"purities", purities},
            {"normalizing_purity", v.normalizing_purity},
            {"imaginary_residual", v.imaginary_residual}};
}

Json to_json(const EstimatorResult& r) {
    Json purities = Json::object();
    for (std::size_t k = 0; k < r.segment_purities.size(); ++k) {
        purities["I" + std::to_string(k + 1)] = optional_number(r.segment_purities[k]);
    }
    return {{"quantity", r.quantity},
            {"kind", to_string(r.kind)},
            {"value", r.value},
            {"std_error", r.std_error},
            {"normalized", optional_number(r.normalized)},
            {"normalized_std_error", optional_number(r.normalized_std_error)},
            {"estimated_purities", purities},
            {"N_U", r.num_unitaries},
            {"N_M", r.num_shots},
            {"master_seed", r.master_seed},
            {"exact_reference", optional_number(r.exact_reference)},
            {"exact_normalized_reference", optional_number(r.exact_normalized_reference)}};
}

Json to_json(const TwirlReport& r) {
    auto matrix = [](const Matrix4c& m) {
        Json rows = Json::array();
        for (int i = 0; i < 4; ++i) {
            Json row = Json::array();
            for (int k = 0; k < 4; ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
            rows.push_back(row);
        }
        return rows;
    };
    return {{"channel", r.channel == TwirlChannel::Phi ? "Phi" : "Psi"},
            {"n_samples", r.num_samples},
            {"frobenius_error", r.frobenius_error},
            {"estimate_re_im", matrix(r.estimate)},
            {"target_re_im", matrix(r.target)}};
}

Json to_json(const CorrelationLengthFit& f) {
    Json pts = Json::array();
    for (const auto& [n, z] : f.fit_points) pts.push_back({{"n", n}, {"Z", z}});
    return {{"lambda", f.lambda},
            {"amplitude", f.amplitude},
            {"fit_points", pts},
            {"quantized_target", f.quantized_target},
            {"residual", f.residual},
            {"status", to_string(f.status)},
            {"outside_unit_interval", f.outside_unit_interval}};
}

Json to_json(const RampSpec& r) {
    return {{"t_F", r.t_final},
            {"dt", r.dt},
            {"Delta", r.neel_field},
            {"exponent", r.ramp_exponent},
            {"sample_times", r.sample_times}};
}

Json to_json(const EigenResult& r) {
    return {{"energy", r.energy},
            {"residual_norm", r.residual_norm},
            {"iterations", r.iterations},
            {"restarts", r.restarts},
            {"N", r.state.num_sites()}};
}

Json to_json(const Table& t) {
    Json rows = Json::array();
    for (const auto& row : t.rows) {
        Json obj = Json::object();
        for (std::size_t c = 0; c < row.size(); ++c) obj[t.columns[c]] = cell_json(row[c]);
        rows.push_back(obj);
    }
    return {{"columns", t.columns}, {"rows", rows}};
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const Table& table) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        out << (c ? "," : "") << csv_escape(table.columns[c]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << cell_text(row[c]);
        out << '\n';
    }
}

std::string to_csv(const Table& table) {
    std::ostringstream out;
    write_csv(out, table);
    return out.str();
}

void write_records_jsonl(std::ostream& out, const std::vector<MeasurementRecord>& records) {
    for (const auto& rec : records) {
        for (const auto& [bits, count] : rec.counts) {
            out << Json{{"unitary_index", rec.unitary_index},
                        {"experiment", rec.experiment},
                        {"bitstring", bits},
                        {"count", count}}
                       .dump()
                << '\n';
        }
    }
}

std::vector<MeasurementRecord> read_records_jsonl(std::istream& in) {
    std::vector<MeasurementRecord> records;
    std::map<std::pair<int, int>, std::size_t> index;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw std::runtime_error("records line " + std::to_string(line_no) + ": " + e.what());
        }
        const int u = j.at("unitary_index").get<int>();
        const int e = j.at("experiment").get<int>();
        const auto bits = j.at("bitstring").get<BasisIndex>();
        const auto count = j.at("count").get<std::int64_t>();
        auto [it, inserted] = index.emplace(std::make_pair(u, e), records.size());
        if (inserted) records.push_back({u, e, {}});
        records[it->second].counts[bits] += count;
    }
    return records;
}

std::string payload_hash(const Json& doc) {
    Json copy = doc;
    copy.erase("timestamp");
    copy.erase("payload_hash");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : copy.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

void stamp_document(Json& doc) {
    doc["payload_hash"] = payload_hash(doc);
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream ts;
    ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    doc["timestamp"] = ts.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace rmspt
