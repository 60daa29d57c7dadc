#pragma once

// JSON and CSV forms of the library types. Documents are nlohmann::json
// objects, so keys come out sorted and stable across runs.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmspt/analysis.hpp"
#include "rmspt/dynamics.hpp"
#include "rmspt/groundstate.hpp"
#include "rmspt/hamiltonian.hpp"
#include "rmspt/partition.hpp"
#include "rmspt/protocols.hpp"
#include "rmspt/rdm.hpp"

namespace rmspt {

using Json = nlohmann::json;

Json to_json(const HamiltonianSpec& spec);
Json to_json(const PartitionSpec& partition);
Json to_json(const ProtocolParams& params);
Json to_json(const InvariantValue& value);
Json to_json(const EstimatorResult& result);
Json to_json(const TwirlReport& report);
Json to_json(const CorrelationLengthFit& fit);
Json to_json(const RampSpec& ramp);
/// Energy, residual and iteration counts; the state itself is not written.
Json to_json(const EigenResult& result);
Json to_json(const Table& table);

PartitionSpec partition_from_json(const Json& j);
ProtocolParams protocol_params_from_json(const Json& j);

/// RFC 4180-style CSV, comma separated, LF line endings, header row first.
void write_csv(std::ostream& out, const Table& table);
std::string to_csv(const Table& table);
std::string format_number(double v);

/// One JSON object per outcome: unitary_index, experiment, bitstring, count.
void write_records_jsonl(std::ostream& out, const std::vector<MeasurementRecord>& records);
std::vector<MeasurementRecord> read_records_jsonl(std::istream& in);

/// FNV-1a (64-bit) of the document with "timestamp" and "payload_hash" removed.
std::string payload_hash(const Json& doc);
/// Adds the hash and a UTC timestamp; the timestamp never enters the hash.
void stamp_document(Json& doc);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace rmspt
