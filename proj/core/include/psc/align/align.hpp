#pragma once

#include <cstddef>
#include <string_view>

#include "psc/core/types.hpp"

namespace psc {

enum class Coverage { exact, line, file_tail };

std::string_view to_string(Coverage c) noexcept;

/// Inclusive token index range (i, j) a smell is scored over.
struct TokenSpan {
    std::size_t i = 0;
    std::size_t j = 0;
    Coverage coverage = Coverage::exact;

    std::size_t length() const noexcept { return j - i + 1; }
    friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

/// Byte range [begin, end) a diagnostic refers to in `source`.
struct ByteSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Byte range of a diagnostic: exact when end fields are present, otherwise
/// the flagged line including its newline.
ByteSpan diagnostic_bytes(const SmellDiagnostic& diag, std::string_view source);

/// Maps a diagnostic to the smallest token span covering its byte range.
///
/// Missing-final-newline and trailing-newlines diagnostics map to the last
/// token with a source span. Zero-width tokens never anchor a span.
/// Throws UnalignableError when no token intersects the range and
/// PreconditionError when sample ids differ.
TokenSpan align(const SmellDiagnostic& diag, const TokenTrace& trace);

/// True when the span starts at or after the trace's generated_from offset.
/// Throws MissingSegmentError when the trace has no generated segment.
bool in_generated_segment(const TokenSpan& span, const TokenTrace& trace);

}  // namespace psc
