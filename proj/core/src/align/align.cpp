#include "psc/align/align.hpp"

#include <algorithm>

#include "psc/errors.hpp"
#include "psc/python/lexer.hpp"

namespace psc {

std::string_view to_string(Coverage c) noexcept {
    switch (c) {
        case Coverage::exact:
            return "exact";
        case Coverage::line:
            return "line";
        case Coverage::file_tail:
            return "file_tail";
    }
    return "?";
}

namespace {

bool file_tail_rule(std::string_view rule) { return rule == "C0304" || rule == "C0305"; }

std::size_t clamp_offset(const python::LineIndex& li, int line, int col) {
    std::size_t start = li.line_start(line);
    std::size_t end = li.line_end(line);
    return std::min(start + static_cast<std::size_t>(std::max(col, 0)), end);
}

}  // namespace

ByteSpan diagnostic_bytes(const SmellDiagnostic& diag, std::string_view source) {
    python::LineIndex li(source);
    if (diag.has_end()) {
        std::size_t b0 = clamp_offset(li, diag.start_line, diag.start_col);
        std::size_t b1 = clamp_offset(li, *diag.end_line, *diag.end_col);
        if (b1 <= b0) b1 = std::min(b0 + 1, source.size());
        return {b0, b1};
    }
    int last = diag.end_line.value_or(diag.start_line);
    return {li.line_start(diag.start_line), li.line_end(std::max(last, diag.start_line))};
}

TokenSpan align(const SmellDiagnostic& diag, const TokenTrace& trace) {
    if (!diag.sample_id.empty() && !trace.sample_id.empty() && diag.sample_id != trace.sample_id) {
        throw PreconditionError("diagnostic for '" + diag.sample_id + "' aligned to trace '" + trace.sample_id + "'");
    }
    const auto& toks = trace.tokens;
    if (file_tail_rule(diag.rule_id)) {
        for (std::size_t k = toks.size(); k-- > 0;) {
            if (!toks[k].zero_width()) return {k, k, Coverage::file_tail};
        }
        throw UnalignableError("trace has no spanned tokens");
    }
    python::LineIndex li(trace.source);
    int lines = std::max(li.line_count(), 1);
    if (diag.start_line < 1 || diag.start_line > lines) {
        throw UnalignableError("line " + std::to_string(diag.start_line) + " outside source");
    }
    ByteSpan bytes = diagnostic_bytes(diag, trace.source);
    std::size_t i = toks.size();
    std::size_t j = toks.size();
    for (std::size_t k = 0; k < toks.size(); ++k) {
        const auto& t = toks[k];
        if (t.zero_width()) continue;
        if (t.byte_end > bytes.begin && t.byte_start < bytes.end) {
            if (i == toks.size()) i = k;
            j = k;
        }
    }
    if (i == toks.size()) {
        throw UnalignableError("no token intersects bytes [" + std::to_string(bytes.begin) + ", " +
                               std::to_string(bytes.end) + ") of '" + trace.sample_id + "'");
    }
    return {i, j, diag.has_end() ? Coverage::exact : Coverage::line};
}

bool in_generated_segment(const TokenSpan& span, const TokenTrace& trace) {
    if (!trace.generated_from) throw MissingSegmentError("trace '" + trace.sample_id + "' has no generated segment");
    if (span.i >= trace.tokens.size()) throw PreconditionError("span outside trace");
    return trace.tokens[span.i].byte_start >= *trace.generated_from;
}

}  // namespace psc
