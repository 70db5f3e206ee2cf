#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "beamsurfer/engine.hpp"
#include "beamsurfer/metrics.hpp"

namespace beamsurfer {

nlohmann::json to_json(const TraceRecord& record);
TraceRecord trace_record_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const TransitionRecord& record);
TransitionRecord transition_record_from_json(const nlohmann::json& doc);

void write_trace_jsonl(std::span<const TraceRecord> records, std::ostream& out);
void write_trace_csv(std::span<const TraceRecord> records, std::ostream& out);
void write_transitions_jsonl(std::span<const TransitionRecord> records, std::ostream& out);

// Throws std::runtime_error with the line number on malformed input.
std::vector<TraceRecord> read_trace_jsonl(std::istream& in);
std::vector<TransitionRecord> read_transitions_jsonl(std::istream& in);

void write_cdf_csv(std::span<const CdfPoint> cdf, std::ostream& out);

// Per-policy statistics recomputed from trace files alone.
nlohmann::json summarize(std::span<const TraceRecord> records, std::span<const TransitionRecord> transitions);

} // namespace beamsurfer
