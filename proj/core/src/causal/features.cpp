#include "psc/causal/features.hpp"

#include <cctype>
#include <set>

#include "psc/errors.hpp"
#include "psc/python/lexer.hpp"
#include "psc/python/parser.hpp"
#include "psc/util/csv.hpp"

namespace psc::causal {

std::string_view to_string(PosTag t) noexcept {
    switch (t) {
        case PosTag::noun:
            return "noun";
        case PosTag::proper_noun:
            return "proper_noun";
        case PosTag::verb:
            return "verb";
        case PosTag::adjective:
            return "adjective";
        case PosTag::numeral:
            return "numeral";
        case PosTag::interjection:
            return "interjection";
    }
    return "?";
}

namespace {

const std::set<std::string>& verbs() {
    static const std::set<std::string> v = {
        "add",     "append", "apply",   "build",  "calculate", "call",    "check",   "clear",  "close",  "compute",
        "convert", "copy",   "count",   "create", "delete",    "do",      "encode",  "decode", "find",   "format",
        "get",     "handle", "init",    "insert", "is",        "load",    "make",    "merge",  "open",   "parse",
        "print",   "process", "put",    "read",   "remove",    "render",  "reset",   "return", "run",    "save",
        "scale",   "send",   "set",     "sort",   "split",     "start",   "stop",    "update", "use",    "validate",
        "write",   "raise",  "has",     "can",    "should",    "fetch",   "filter",  "map",    "reduce", "search",
    };
    return v;
}

const std::set<std::string>& adjectives() {
    static const std::set<std::string> a = {
        "active", "average", "bad",  "best",  "big",   "current", "default", "empty", "final",   "first",
        "full",   "good",    "high", "large", "last",  "local",   "long",    "low",   "max",     "maximum",
        "min",    "minimum", "new",  "next",  "old",   "positive", "negative", "previous", "raw", "safe",
        "short",  "small",   "total", "valid", "invalid", "even",  "odd",     "unique", "public", "private",
    };
    return a;
}

const std::set<std::string>& interjections() {
    static const std::set<std::string> i = {"oh", "oops", "hey", "wow", "hello", "hi", "ok", "okay", "yes", "ouch", "hmm"};
    return i;
}

const std::set<std::string>& number_words() {
    static const std::set<std::string> n = {"zero", "one",   "two", "three", "four",    "five",   "six",
                                            "seven", "eight", "nine", "ten",  "hundred", "thousand"};
    return n;
}

struct Word {
    std::string lower;
    bool capitalized = false;
};

void split_identifier(std::string_view name, std::vector<Word>& out) {
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        Word w;
        w.capitalized = std::isupper(static_cast<unsigned char>(cur[0])) != 0;
        for (char& c : cur) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        w.lower = std::move(cur);
        out.push_back(std::move(w));
        cur.clear();
    };
    for (std::size_t i = 0; i < name.size(); ++i) {
        char c = name[i];
        if (!std::isalpha(static_cast<unsigned char>(c))) {
            flush();
            continue;
        }
        bool upper = std::isupper(static_cast<unsigned char>(c)) != 0;
        if (upper && !cur.empty() && std::islower(static_cast<unsigned char>(cur.back()))) flush();
        cur += c;
    }
    flush();
}

void prose_words(std::string_view text, std::vector<Word>& out) {
    std::string cur;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        char c = i < text.size() ? text[i] : ' ';
        if (std::isalpha(static_cast<unsigned char>(c))) {
            cur += c;
            continue;
        }
        if (!cur.empty()) split_identifier(cur, out);
        cur.clear();
    }
}

PosTag tag_word(const Word& w) {
    if (number_words().count(w.lower)) return PosTag::numeral;
    if (interjections().count(w.lower)) return PosTag::interjection;
    if (verbs().count(w.lower)) return PosTag::verb;
    if (adjectives().count(w.lower)) return PosTag::adjective;
    if (w.capitalized) return PosTag::proper_noun;
    return PosTag::noun;
}

}  // namespace

FeatureVector extract_features(std::string_view snippet, const std::optional<PosCounts>& pos_override) {
    FeatureVector f;
    for (auto t : kAllPosTags) f.pos_counts[t] = 0;
    for (char c : snippet) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') ++f.whitespace_count;
    }
    bool in_line = false;
    for (char c : snippet) {
        if (c == '\n') {
            if (in_line) ++f.loc;
            in_line = false;
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            in_line = true;
        }
    }
    if (in_line) ++f.loc;
    if (f.loc == 0) {
        if (pos_override) f.pos_counts = *pos_override;
        return f;
    }

    std::vector<python::Token> tokens;
    bool lexed = true;
    try {
        tokens = python::tokenize(snippet);
    } catch (const ParseError&) {
        lexed = false;
        f.syntax_errors = 1;
    }
    std::vector<Word> words;
    int numerals = 0;
    if (lexed) {
        for (const auto& t : tokens) {
            switch (t.kind) {
                case python::TokenKind::name:
                    ++f.token_count;
                    if (!python::is_keyword(t.text)) {
                        ++f.identifiers;
                        split_identifier(t.text, words);
                    }
                    break;
                case python::TokenKind::number:
                    ++f.token_count;
                    ++numerals;
                    break;
                case python::TokenKind::string:
                    ++f.token_count;
                    prose_words(t.text.substr(t.text.find_first_of("'\"")), words);
                    break;
                case python::TokenKind::op:
                    ++f.token_count;
                    break;
                case python::TokenKind::comment:
                    prose_words(t.text, words);
                    break;
                default:
                    break;
            }
        }
    } else {
        prose_words(snippet, words);
    }
    if (lexed) {
        try {
            python::Tree tree = python::parse(std::string(snippet));
            f.ast_nodes = static_cast<int>(tree.node_count());
            f.ast_height = tree.height(tree.root());
        } catch (const ParseError&) {
            f.syntax_errors = 1;
        }
    }
    std::set<std::string> vocab;
    for (const auto& w : words) {
        vocab.insert(w.lower);
        ++f.pos_counts[tag_word(w)];
    }
    f.pos_counts[PosTag::numeral] += numerals;
    f.word_count = static_cast<int>(words.size());
    f.vocab_size = static_cast<int>(vocab.size());
    if (pos_override) f.pos_counts = *pos_override;
    return f;
}

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n = {"loc",         "token_count",   "ast_nodes",        "identifiers", "ast_height",
                                      "syntax_errors", "whitespace_count", "word_count", "vocab_size"};
        for (auto t : kAllPosTags) n.push_back("pos_" + std::string(to_string(t)));
        return n;
    }();
    return names;
}

std::vector<double> feature_values(const FeatureVector& f) {
    std::vector<double> v = {double(f.loc),           double(f.token_count),      double(f.ast_nodes),
                             double(f.identifiers),   double(f.ast_height),       double(f.syntax_errors),
                             double(f.whitespace_count), double(f.word_count),    double(f.vocab_size)};
    for (auto t : kAllPosTags) {
        auto it = f.pos_counts.find(t);
        v.push_back(it == f.pos_counts.end() ? 0.0 : double(it->second));
    }
    return v;
}

std::map<std::string, PosCounts> parse_pos_annotations(const std::string& csv_text) {
    auto t = util::parse_csv(csv_text);
    std::size_t sid = t.column("sample_id");
    std::map<std::string, PosCounts> out;
    for (const auto& row : t.rows) {
        PosCounts c;
        for (auto tag : kAllPosTags) {
            std::string name(to_string(tag));
            c[tag] = t.has_column(name) ? static_cast<int>(util::parse_int(row[t.column(name)], name)) : 0;
        }
        out[row[sid]] = std::move(c);
    }
    return out;
}

}  // namespace psc::causal
