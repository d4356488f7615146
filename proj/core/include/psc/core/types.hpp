#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace psc {

/// One decoded token with its source span and natural-log probability.
struct TokenRecord {
    std::string text;
    std::size_t byte_start = 0;  // inclusive
    std::size_t byte_end = 0;    // exclusive
    double logprob = 0.0;        // ln P(token | prefix), always <= 0

    double prob() const noexcept { return std::exp(logprob); }
    bool zero_width() const noexcept { return byte_start == byte_end; }

    friend bool operator==(const TokenRecord&, const TokenRecord&) = default;
};

/// Scored token sequence for one code sample.
///
/// Tokens are ordered, non-overlapping and contiguous over the part of
/// `source` they cover. Special tokens without a source span have
/// byte_start == byte_end and never anchor a smell.
struct TokenTrace {
    std::string sample_id;
    std::string source;
    std::vector<TokenRecord> tokens;
    std::optional<std::size_t> generated_from;  // byte offset where model text begins
    std::map<std::string, std::string> meta;

    std::size_t size() const noexcept { return tokens.size(); }

    friend bool operator==(const TokenTrace&, const TokenTrace&) = default;
};

/// One detected smell instance. Lines are 1-based, columns 0-based bytes.
struct SmellDiagnostic {
    std::string sample_id;
    std::string rule_id;
    std::string symbol;
    int start_line = 1;
    int start_col = 0;
    std::optional<int> end_line;
    std::optional<int> end_col;
    std::string message;

    bool has_end() const noexcept { return end_line.has_value() && end_col.has_value(); }

    friend bool operator==(const SmellDiagnostic&, const SmellDiagnostic&) = default;
};

/// Canonical diagnostic order: (start_line, start_col, rule_id), then the rest for stability.
bool diagnostic_less(const SmellDiagnostic& a, const SmellDiagnostic& b);
void sort_diagnostics(std::vector<SmellDiagnostic>& diags);

enum class SeverityLabel { low, high };

std::string_view to_string(SeverityLabel s) noexcept;

}  // namespace psc
