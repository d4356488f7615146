#pragma once

#include <string>

#include "psc/core/types.hpp"

namespace psc {

/// Checks every TokenTrace invariant and returns the trace unchanged.
///
/// Throws SchemaError for probabilities outside (0, 1] or non-finite values,
/// OffsetError for out-of-range, reversed, overlapping or unordered spans and
/// ReconstructionError when token texts disagree with the source bytes they claim.
TokenTrace validate_trace(TokenTrace trace);

/// Parses one JSONL trace record and validates it.
TokenTrace parse_trace_record(const std::string& json_line);

/// Serializes a trace as one compact JSON object (no trailing newline).
std::string serialize_trace(const TokenTrace& trace);

/// Sum of token span lengths; equals the covered byte length of a valid trace.
std::size_t covered_bytes(const TokenTrace& trace) noexcept;

}  // namespace psc
