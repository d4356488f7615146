#include "psc/python/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>

#include "psc/errors.hpp"

namespace psc::python {

LineIndex::LineIndex(std::string_view source) : size_(source.size()) {
    starts_.push_back(0);
    for (std::size_t i = 0; i < source.size(); ++i) {
        if (source[i] == '\n') starts_.push_back(i + 1);
    }
    ends_with_newline_ = !source.empty() && source.back() == '\n';
    if (source.empty()) ends_with_newline_ = false;
}

std::size_t LineIndex::line_start(int line) const {
    if (line < 1) return 0;
    auto idx = static_cast<std::size_t>(line - 1);
    if (idx >= starts_.size()) return size_;
    return starts_[idx];
}

std::size_t LineIndex::line_end(int line) const {
    if (line < 1) return 0;
    auto idx = static_cast<std::size_t>(line);
    if (idx >= starts_.size()) return size_;
    return starts_[idx];
}

std::size_t LineIndex::offset(int line, int col) const {
    return std::min(line_start(line) + static_cast<std::size_t>(std::max(col, 0)), size_);
}

int LineIndex::line_of(std::size_t offset) const {
    auto it = std::upper_bound(starts_.begin(), starts_.end(), offset);
    return static_cast<int>(it - starts_.begin());
}

int LineIndex::col_of(std::size_t offset) const {
    return static_cast<int>(offset - line_start(line_of(offset)));
}

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",       "assert", "async", "await", "break",
    "class", "continue", "def",   "del",      "elif",     "else",   "except", "finally", "for",
    "from",  "global", "if",      "import",   "in",       "is",     "lambda", "nonlocal", "not",
    "or",    "pass",   "raise",   "return",   "try",      "while",  "with",   "yield"};

constexpr std::array<std::string_view, 49> kOperators = {
    "**=", "//=", ">>=", "<<=", "...", "->", ":=", "**", "//", "<<", ">>", "<=", ">=", "==", "!=",
    "+=",  "-=",  "*=",  "/=",  "%=",  "&=", "|=", "^=", "@=", "+",  "-",  "*",  "/",  "%",  "@",
    "&",   "|",   "^",   "~",   "<",   ">",  "(",  ")",  "[",  "]",  "{",  "}",  ",",  ":",  ".",
    ";",   "=",   "!",   "`"};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src), lines_(src) {}

    std::vector<Token> run() {
        indents_.push_back(0);
        bool at_line_start = true;
        while (pos_ < src_.size()) {
            if (at_line_start && depth_ == 0 && !continuation_) {
                if (!line_prologue()) {
                    at_line_start = true;
                    continue;
                }
            }
            at_line_start = false;
            continuation_ = false;
            if (pos_ >= src_.size()) break;
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\f') {
                ++pos_;
                continue;
            }
            if (c == '\r' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
                ++pos_;
                continue;
            }
            if (c == '\\') {
                std::size_t nx = pos_ + 1;
                if (nx < src_.size() && src_[nx] == '\r') ++nx;
                if (nx < src_.size() && src_[nx] == '\n') {
                    pos_ = nx + 1;
                    continuation_ = true;
                    at_line_start = true;
                    continue;
                }
                if (nx >= src_.size()) {
                    fail("unexpected EOF after line continuation", pos_);
                }
                fail("unexpected character after line continuation", pos_);
            }
            if (c == '\n') {
                emit(depth_ > 0 || !logical_open_ ? TokenKind::nl : TokenKind::newline, pos_, pos_ + 1);
                logical_open_ = false;
                ++pos_;
                at_line_start = true;
                continue;
            }
            if (c == '#') {
                std::size_t e = src_.find('\n', pos_);
                if (e == std::string_view::npos) e = src_.size();
                if (e > pos_ && src_[e - 1] == '\r') --e;
                emit(TokenKind::comment, pos_, e);
                pos_ = e;
                continue;
            }
            logical_open_ = true;
            if (lex_string()) continue;
            unsigned char uc = static_cast<unsigned char>(c);
            if (std::isdigit(uc) || (c == '.' && pos_ + 1 < src_.size() &&
                                     std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
                lex_number();
                continue;
            }
            if (ident_start(uc)) {
                std::size_t b = pos_;
                while (pos_ < src_.size() && ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
                emit(TokenKind::name, b, pos_);
                continue;
            }
            lex_operator();
        }
        if (depth_ > 0) fail(std::string("'") + src_[open_.back()] + "' was never closed", open_.back());
        if (continuation_) fail("unexpected EOF after line continuation", src_.size());
        if (logical_open_) {
            emit(TokenKind::newline, src_.size(), src_.size());
            logical_open_ = false;
        }
        while (indents_.size() > 1) {
            indents_.pop_back();
            emit(TokenKind::dedent, src_.size(), src_.size());
        }
        emit(TokenKind::end_marker, src_.size(), src_.size());
        return std::move(out_);
    }

private:
    [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
        throw ParseError(msg, lines_.line_of(at), lines_.col_of(at));
    }

    void emit(TokenKind kind, std::size_t b, std::size_t e) {
        Token t;
        t.kind = kind;
        t.begin = b;
        t.end = e;
        t.line = lines_.line_of(b);
        t.col = lines_.col_of(b);
        t.end_line = e > b ? lines_.line_of(e - 1) : t.line;
        t.text = src_.substr(b, e - b);
        out_.push_back(t);
    }

    // Handles indentation at the start of a physical line. Returns false when the
    // line was blank or comment-only and has been fully consumed.
    bool line_prologue() {
        std::size_t b = pos_;
        int width = 0;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ') {
                ++width;
            } else if (c == '\t') {
                width = (width / 8 + 1) * 8;
            } else if (c == '\f') {
                width = 0;
            } else {
                break;
            }
            ++pos_;
        }
        if (pos_ >= src_.size()) return false;
        char c = src_[pos_];
        if (c == '#' || c == '\n' || (c == '\r' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n')) {
            if (c == '#') {
                std::size_t e = src_.find('\n', pos_);
                if (e == std::string_view::npos) e = src_.size();
                std::size_t ce = (e > pos_ && src_[e - 1] == '\r') ? e - 1 : e;
                emit(TokenKind::comment, pos_, ce);
                pos_ = e;
            } else if (c == '\r') {
                ++pos_;
            }
            if (pos_ < src_.size()) {
                emit(TokenKind::nl, pos_, pos_ + 1);
                ++pos_;
            }
            return false;
        }
        if (c == '\\') return true;  // continuation on an otherwise blank line
        if (width > indents_.back()) {
            indents_.push_back(width);
            emit(TokenKind::indent, b, pos_);
        } else {
            while (width < indents_.back()) {
                indents_.pop_back();
                emit(TokenKind::dedent, pos_, pos_);
            }
            if (width != indents_.back()) fail("unindent does not match any outer indentation level", pos_);
        }
        return true;
    }

    bool lex_string() {
        std::size_t b = pos_;
        std::size_t p = pos_;
        while (p < src_.size() && p - b < 2 && std::strchr("rRbBuUfF", src_[p]) != nullptr) ++p;
        if (p >= src_.size() || (src_[p] != '\'' && src_[p] != '"')) return false;
        if (p > b) {
            std::string prefix;
            for (std::size_t i = b; i < p; ++i) prefix += static_cast<char>(std::tolower(src_[i]));
            static constexpr std::array<std::string_view, 8> ok = {"r", "u", "f", "b", "br", "rb", "fr", "rf"};
            if (std::find(ok.begin(), ok.end(), prefix) == ok.end()) return false;
        }
        char q = src_[p];
        bool triple = p + 2 < src_.size() && src_[p + 1] == q && src_[p + 2] == q;
        std::size_t i = p + (triple ? 3 : 1);
        while (true) {
            if (i >= src_.size()) fail(triple ? "unterminated triple-quoted string" : "unterminated string", b);
            char c = src_[i];
            if (c == '\\') {
                i += 2;
                continue;
            }
            if (!triple && c == '\n') fail("unterminated string literal", b);
            if (c == q) {
                if (!triple) {
                    ++i;
                    break;
                }
                if (i + 2 < src_.size() && src_[i + 1] == q && src_[i + 2] == q) {
                    i += 3;
                    break;
                }
            }
            ++i;
        }
        pos_ = i;
        emit(TokenKind::string, b, i);
        return true;
    }

    void lex_number() {
        std::size_t b = pos_;
        auto digits = [&](auto pred) {
            while (pos_ < src_.size() && (pred(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
        };
        auto is_dec = [](unsigned char c) { return std::isdigit(c) != 0; };
        if (src_[pos_] == '0' && pos_ + 1 < src_.size() && std::strchr("xXoObB", src_[pos_ + 1]) != nullptr) {
            pos_ += 2;
            digits([](unsigned char c) { return std::isxdigit(c) != 0; });
        } else {
            digits(is_dec);
            if (pos_ < src_.size() && src_[pos_] == '.') {
                ++pos_;
                digits(is_dec);
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                std::size_t save = pos_;
                ++pos_;
                if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
                if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    digits(is_dec);
                } else {
                    pos_ = save;
                }
            }
            if (pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J')) ++pos_;
        }
        emit(TokenKind::number, b, pos_);
    }

    void lex_operator() {
        for (auto op : kOperators) {
            if (src_.substr(pos_, op.size()) == op) {
                if (op == "(" || op == "[" || op == "{") {
                    ++depth_;
                    open_.push_back(pos_);
                } else if (op == ")" || op == "]" || op == "}") {
                    if (depth_ == 0) fail("unmatched '" + std::string(op) + "'", pos_);
                    char want = src_[open_.back()] == '(' ? ')' : src_[open_.back()] == '[' ? ']' : '}';
                    if (op[0] != want) {
                        fail("closing parenthesis '" + std::string(op) + "' does not match opening parenthesis '" +
                                 src_[open_.back()] + "'",
                             pos_);
                    }
                    --depth_;
                    open_.pop_back();
                } else if (op == "!" || op == "`") {
                    fail("invalid syntax", pos_);
                }
                emit(TokenKind::op, pos_, pos_ + op.size());
                pos_ += op.size();
                return;
            }
        }
        fail(std::string("invalid character '") + src_[pos_] + "'", pos_);
    }

    std::string_view src_;
    LineIndex lines_;
    std::size_t pos_ = 0;
    int depth_ = 0;
    std::vector<std::size_t> open_;  // offsets of unclosed brackets
    bool continuation_ = false;
    bool logical_open_ = false;
    std::vector<int> indents_;
    std::vector<Token> out_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

bool is_keyword(std::string_view word) noexcept {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

bool is_soft_keyword(std::string_view word) noexcept {
    return word == "match" || word == "case" || word == "_" || word == "type";
}

bool is_builtin_name(std::string_view word) noexcept {
    static constexpr std::array<std::string_view, 72> builtins = {
        "abs",       "all",        "any",        "ascii",     "bin",          "bool",        "breakpoint",
        "bytearray", "bytes",      "callable",   "chr",       "classmethod",  "compile",     "complex",
        "delattr",   "dict",       "dir",        "divmod",    "enumerate",    "eval",        "exec",
        "filter",    "float",      "format",     "frozenset", "getattr",      "globals",     "hasattr",
        "hash",      "help",       "hex",        "id",        "input",        "int",         "isinstance",
        "issubclass", "iter",      "len",        "list",      "locals",       "map",         "max",
        "memoryview", "min",       "next",       "object",    "oct",          "open",        "ord",
        "pow",       "print",      "property",   "range",     "repr",         "reversed",    "round",
        "set",       "setattr",    "slice",      "sorted",    "staticmethod", "str",         "sum",
        "super",     "tuple",      "type",       "vars",      "zip",          "Exception",   "ValueError",
        "TypeError", "KeyError"};
    return std::find(builtins.begin(), builtins.end(), word) != builtins.end();
}

bool is_fstring(std::string_view token_text) noexcept {
    for (char c : token_text) {
        if (c == '\'' || c == '"') return false;
        if (c == 'f' || c == 'F') return true;
    }
    return false;
}

}  // namespace psc::python
