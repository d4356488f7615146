#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace psc::python {

/// Maps between byte offsets and (1-based line, 0-based byte column) positions.
class LineIndex {
public:
    explicit LineIndex(std::string_view source);

    /// Number of physical lines; a trailing newline does not open an extra line.
    int line_count() const noexcept { return static_cast<int>(starts_.size()) - (ends_with_newline_ ? 1 : 0); }
    std::size_t line_start(int line) const;
    /// Byte offset one past the line's newline (or end of source for the last line).
    std::size_t line_end(int line) const;
    std::size_t offset(int line, int col) const;
    int line_of(std::size_t offset) const;
    int col_of(std::size_t offset) const;
    std::size_t source_size() const noexcept { return size_; }

private:
    std::vector<std::size_t> starts_;
    std::size_t size_ = 0;
    bool ends_with_newline_ = false;
};

enum class TokenKind {
    name,
    number,
    string,
    op,
    newline,   // end of a logical line
    nl,        // non-logical line break (blank line, comment line, inside brackets)
    comment,
    indent,
    dedent,
    end_marker,
};

/// A lexical token. Positions are byte offsets into the source.
struct Token {
    TokenKind kind;
    std::size_t begin = 0;
    std::size_t end = 0;
    int line = 1;      // line of `begin`
    int col = 0;       // byte column of `begin`
    int end_line = 1;  // line of the last byte (multi-line strings span several)
    std::string_view text;  // view into the tokenized source

    bool is_op(std::string_view s) const noexcept { return kind == TokenKind::op && text == s; }
    bool is_name(std::string_view s) const noexcept { return kind == TokenKind::name && text == s; }
};

/// Tokenizes Python 3 source losslessly: every non-whitespace byte belongs to
/// exactly one token. Throws ParseError on unterminated strings, bad
/// dedents and unbalanced brackets.
std::vector<Token> tokenize(std::string_view source);

bool is_keyword(std::string_view word) noexcept;
bool is_soft_keyword(std::string_view word) noexcept;

/// Name bound in `builtins` (used to avoid capturing builtins when renaming).
bool is_builtin_name(std::string_view word) noexcept;

/// True for string tokens carrying an f/F prefix.
bool is_fstring(std::string_view token_text) noexcept;

}  // namespace psc::python
