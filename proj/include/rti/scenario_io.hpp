// Scenario file ingestion and result emission: strict-schema JSON in,
// stats.json / detections.csv / error JSON out. Parsing rejects unknown keys
// and reports the JSON path of the first offending field.
#pragma once

#include <string>
#include <string_view>

#include "rti/engine.hpp"
#include "rti/errors.hpp"
#include "rti/relativistic_gate.hpp"

namespace rti {

// Parses scenario JSON. Channel amplitudes come out normalized; seed falls
// back to kDefaultSeed when the file omits it. Throws SimError(SchemaError)
// with the offending path, NormalizationError when all amplitudes vanish,
// and the usual validation errors.
Scenario parse_scenario(std::string_view text);

// Inverse of parse_scenario up to normalization: parse(serialize(s)) == s
// for any s that came out of parse_scenario.
std::string serialize_scenario(const Scenario& s);

// Reads and parses a scenario file. Throws SimError(IoError) on filesystem
// trouble.
Scenario load_scenario_file(const std::string& path);

// stats.json body: pure run statistics, no environment echo, so equal-seed
// runs serialize byte-identically whatever the thread count.
std::string stats_json(const EnsembleStats& stats);

// detections.csv body. One row per transaction and per null measurement, in
// run order: run,tick,channel,absorber_id,is_null.
std::string detections_csv(const EnsembleResult& result);

// Machine-readable error envelopes for stderr.
std::string error_json(const SimError& err);
std::string rejection_json(const GateRejection& rejection);

// Writes text to a file, creating parent directories. Throws
// SimError(IoError).
void write_file(const std::string& path, std::string_view content);

} // namespace rti
