#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "psc/core/types.hpp"

namespace psc::smells {

/// One record of the diagnostics bridge schema.
struct DiagnosticsRecord {
    std::string sample_id;
    std::vector<SmellDiagnostic> smells;
    std::optional<std::string> linter_version;
};

/// Parses a JSON document holding one record, an array of records, or JSONL.
std::vector<DiagnosticsRecord> parse_diagnostics(const std::string& text);

/// Reads a diagnostics file; results are validated and sorted per record.
std::vector<SmellDiagnostic> ingest_diagnostics(const std::filesystem::path& path);

std::string to_json(const DiagnosticsRecord& record, int indent = -1);

}  // namespace psc::smells
