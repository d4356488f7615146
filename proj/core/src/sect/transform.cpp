#include "psc/sect/transform.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <random>
#include <set>

#include "psc/errors.hpp"
#include "psc/python/analysis.hpp"
#include "psc/python/parser.hpp"
#include "psc/util/random.hpp"

namespace psc::sect {

using namespace psc::python;

std::string_view to_string(TransformKind k) noexcept {
    switch (k) {
        case TransformKind::Add2Equal:
            return "Add2Equal";
        case TransformKind::SwitchEqualExp:
            return "SwitchEqualExp";
        case TransformKind::InfixDividing:
            return "InfixDividing";
        case TransformKind::SwitchRelation:
            return "SwitchRelation";
        case TransformKind::RenameVariable1:
            return "RenameVariable1";
        case TransformKind::RenameVariable2:
            return "RenameVariable2";
    }
    return "?";
}

std::optional<TransformKind> parse_kind(std::string_view name) noexcept {
    for (auto k : kAllKinds) {
        if (to_string(k) == name) return k;
    }
    if (name == "RenameVariable-1") return TransformKind::RenameVariable1;
    if (name == "RenameVariable-2") return TransformKind::RenameVariable2;
    return std::nullopt;
}

std::string_view to_string(SiteSelector s) noexcept {
    switch (s) {
        case SiteSelector::all:
            return "all";
        case SiteSelector::first:
            return "first";
        case SiteSelector::seeded_random:
            return "seeded_random";
    }
    return "?";
}

std::optional<SiteSelector> parse_selector(std::string_view name) noexcept {
    for (auto s : {SiteSelector::all, SiteSelector::first, SiteSelector::seeded_random}) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Substitute providers

namespace {

std::vector<std::string> split_words(const std::string& name) {
    std::vector<std::string> words;
    std::string cur;
    for (std::size_t i = 0; i < name.size(); ++i) {
        char c = name[i];
        if (c == '_') {
            if (!cur.empty()) words.push_back(std::move(cur));
            cur.clear();
            continue;
        }
        bool upper = std::isupper(static_cast<unsigned char>(c)) != 0;
        bool prev_lower = !cur.empty() && !std::isupper(static_cast<unsigned char>(cur.back()));
        if (upper && prev_lower) {
            words.push_back(std::move(cur));
            cur.clear();
        }
        cur += c;
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
}

std::string my_camel(const std::string& name) {
    std::string out = "my";
    for (auto w : split_words(name)) {
        for (auto& ch : w) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
        out += w;
    }
    return out == "my" ? "myVar" : out;
}

const std::map<std::string, std::string>& substitute_table() {
    static const std::map<std::string, std::string> table = {
        {"arr", "array"},    {"buf", "buffer"}, {"cnt", "count"},    {"i", "index"},   {"idx", "index"},
        {"lst", "items"},    {"msg", "message"}, {"n", "num"},       {"num", "number"}, {"number", "myNumber"},
        {"res", "result"},   {"ret", "result"}, {"s", "text"},       {"tmp", "temp"},  {"val", "value"},
        {"x", "value"},      {"d", "mapping"},  {"k", "key"},        {"v", "value"},   {"acc", "accumulator"},
    };
    return table;
}

}  // namespace

std::vector<std::string> TableSubstituteProvider::substitutes(const std::string& name, std::string_view) const {
    std::vector<std::string> out;
    auto it = substitute_table().find(name);
    if (it != substitute_table().end()) out.push_back(it->second);
    auto camel = my_camel(name);
    if (out.empty() || out.front() != camel) out.push_back(camel);
    return out;
}

// ---------------------------------------------------------------------------
// Transformer

namespace {

struct Edit {
    ByteRange range;
    std::string replacement;
};

struct Site {
    ByteRange extent;
    std::vector<Edit> edits;
};

bool is_fstring_constant(const Tree& t, NodeId id) {
    const Node& n = t.node(id);
    if (n.kind != NodeKind::Constant || const_kind(n) != ConstKind::string) return false;
    for (const auto& tok : t.tokens()) {
        if (tok.kind == TokenKind::string && n.range.contains({tok.begin, tok.end}) && is_fstring(tok.text)) return true;
    }
    return false;
}

bool is_pure(const Tree& t, NodeId id) {
    const Node& n = t.node(id);
    switch (n.kind) {
        case NodeKind::Name:
            return true;
        case NodeKind::Constant:
            return !is_fstring_constant(t, id);
        case NodeKind::Attribute:
            return is_pure(t, n.children[0]) && t.node(n.children[0]).kind != NodeKind::Constant;
        case NodeKind::UnaryOp:
            return (n.value == "-" || n.value == "+") && t.node(n.children[0]).kind == NodeKind::Constant;
        default:
            return false;
    }
}

bool is_name_chain(const Tree& t, NodeId id) {
    const Node& n = t.node(id);
    if (n.kind == NodeKind::Name) return true;
    return n.kind == NodeKind::Attribute && is_name_chain(t, n.children[0]);
}

bool tighter_than_additive(const Tree& t, NodeId id) {
    const Node& n = t.node(id);
    if (n.paren_depth > 0) return true;
    switch (n.kind) {
        case NodeKind::Name:
        case NodeKind::Constant:
        case NodeKind::Call:
        case NodeKind::Attribute:
        case NodeKind::Subscript:
        case NodeKind::List:
        case NodeKind::Dict:
        case NodeKind::Set:
        case NodeKind::ListComp:
        case NodeKind::SetComp:
        case NodeKind::DictComp:
        case NodeKind::GeneratorExp:
        case NodeKind::Await:
            return true;
        case NodeKind::Tuple:
            return (n.flags & kTupleParens) != 0;
        case NodeKind::BinOp:
            return n.value == "*" || n.value == "/" || n.value == "//" || n.value == "%" || n.value == "@" ||
                   n.value == "**";
        case NodeKind::UnaryOp:
            return n.value != "not";
        default:
            return false;
    }
}

std::string_view strip_parens(std::string_view text, int depth) {
    for (int d = 0; d < depth; ++d) {
        auto b = text.find_first_not_of(" \t");
        auto e = text.find_last_not_of(" \t");
        if (b == std::string_view::npos || text[b] != '(' || text[e] != ')') break;
        std::string_view inner = text.substr(b + 1, e - b - 1);
        auto ib = inner.find_first_not_of(" \t");
        auto ie = inner.find_last_not_of(" \t");
        if (ib == std::string_view::npos) break;
        inner = inner.substr(ib, ie - ib + 1);
        if (inner.find('\n') != std::string_view::npos || inner.find('#') != std::string_view::npos) break;
        text = inner;
    }
    return text;
}

const char* mirror(std::string_view op) {
    if (op == "<") return ">";
    if (op == ">") return "<";
    if (op == "<=") return ">=";
    if (op == ">=") return "<=";
    return nullptr;
}

class Transformer {
public:
    Transformer(const Tree& tree, TransformKind kind, const TransformOptions& opts)
        : t_(tree), src_(tree.source()), kind_(kind), opts_(opts), idents_(identifiers(tree)) {}

    TransformResult run() {
        TransformResult res;
        res.record.kind = kind_;
        switch (kind_) {
            case TransformKind::Add2Equal:
            case TransformKind::SwitchEqualExp:
            case TransformKind::SwitchRelation:
            case TransformKind::InfixDividing:
                expression_sites();
                break;
            case TransformKind::RenameVariable1:
            case TransformKind::RenameVariable2:
                return rename();
        }
        auto chosen = select(candidates_);
        // Temp names are allocated in source order over the chosen sites.
        if (kind_ == TransformKind::InfixDividing) {
            for (auto* s : chosen) finalize_infix(*s);
        }
        return apply(chosen);
    }

private:
    std::vector<Site*> select(std::vector<Site>& sites) {
        std::vector<Site*> out;
        if (sites.empty()) return out;
        switch (opts_.selector) {
            case SiteSelector::all:
                for (auto& s : sites) out.push_back(&s);
                break;
            case SiteSelector::first:
                out.push_back(&sites.front());
                break;
            case SiteSelector::seeded_random: {
                std::mt19937_64 rng(opts_.seed);
                out.push_back(&sites[static_cast<std::size_t>(util::uniform_below(rng, sites.size()))]);
                break;
            }
        }
        return out;
    }

    TransformResult apply(const std::vector<Site*>& chosen) {
        TransformResult res;
        res.record.kind = kind_;
        std::vector<Edit> edits;
        for (auto* s : chosen) {
            for (auto& e : s->edits) {
                edits.push_back(e);
                res.record.applied_sites.push_back(e.range.begin == e.range.end ? s->extent : e.range);
            }
        }
        std::sort(res.record.applied_sites.begin(), res.record.applied_sites.end(),
                  [](const ByteRange& a, const ByteRange& b) { return a.begin < b.begin; });
        res.record.applied_sites.erase(
            std::unique(res.record.applied_sites.begin(), res.record.applied_sites.end()),
            res.record.applied_sites.end());
        // Insertions cover their whole statement; drop nested duplicates.
        std::vector<ByteRange> merged;
        for (const auto& r : res.record.applied_sites) {
            if (!merged.empty() && merged.back().contains(r)) continue;
            merged.push_back(r);
        }
        res.record.applied_sites = std::move(merged);
        std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) {
            if (a.range.begin != b.range.begin) return a.range.begin > b.range.begin;
            return a.range.end > b.range.end;
        });
        res.output = src_;
        for (const auto& e : edits) res.output.replace(e.range.begin, e.range.end - e.range.begin, e.replacement);
        return res;
    }

    std::string text(NodeId id) const { return std::string(t_.text(id)); }
    std::string slice(std::size_t b, std::size_t e) const { return src_.substr(b, e - b); }

    void expression_sites() {
        std::vector<ByteRange> taken;
        t_.walk(t_.root(), [&](NodeId id) {
            std::optional<Site> site;
            switch (kind_) {
                case TransformKind::Add2Equal:
                    site = add2equal(id);
                    break;
                case TransformKind::SwitchEqualExp:
                    site = switch_compare(id, true);
                    break;
                case TransformKind::SwitchRelation:
                    site = switch_compare(id, false);
                    break;
                case TransformKind::InfixDividing:
                    site = infix_dividing(id);
                    break;
                default:
                    break;
            }
            if (!site) return true;
            for (const auto& r : taken) {
                if (r.overlaps(site->extent)) return true;
            }
            taken.push_back(site->extent);
            candidates_.push_back(std::move(*site));
            return true;
        });
    }

    bool simple_target(NodeId id) const {
        const Node& n = t_.node(id);
        if (n.kind == NodeKind::Name) return n.paren_depth == 0;
        if (n.kind == NodeKind::Attribute) return is_name_chain(t_, id);
        if (n.kind == NodeKind::Subscript) {
            NodeId idx = n.children[1];
            return is_name_chain(t_, n.children[0]) &&
                   (t_.node(idx).kind == NodeKind::Name || (t_.node(idx).kind == NodeKind::Constant && is_pure(t_, idx)) ||
                    (t_.node(idx).kind == NodeKind::UnaryOp && is_pure(t_, idx)));
        }
        return false;
    }

    std::optional<Site> add2equal(NodeId id) const {
        const Node& n = t_.node(id);
        if (n.kind != NodeKind::AugAssign || (n.value != "+=" && n.value != "-=")) return std::nullopt;
        NodeId target = n.children[0];
        NodeId value = n.children[1];
        if (!simple_target(target)) return std::nullopt;
        std::string tt = text(target);
        std::string vt = text(value);
        if (!tighter_than_additive(t_, value)) vt = "(" + vt + ")";
        Site s;
        s.extent = n.range;
        s.edits.push_back({n.range, tt + " = " + tt + " " + n.value.substr(0, 1) + " " + vt});
        return s;
    }

    std::optional<Site> switch_compare(NodeId id, bool equality) const {
        const Node& n = t_.node(id);
        if (n.kind != NodeKind::Compare || n.ops.size() != 1) return std::nullopt;
        const std::string& op = n.ops[0];
        std::string new_op;
        if (equality) {
            if (op != "==" && op != "!=") return std::nullopt;
            new_op = op;
        } else {
            const char* m = mirror(op);
            if (!m) return std::nullopt;
            new_op = m;
        }
        NodeId left = n.children[0];
        NodeId right = n.children[1];
        if (!is_pure(t_, left) && !is_pure(t_, right)) return std::nullopt;
        const Node& ln = t_.node(left);
        const Node& rn = t_.node(right);
        ByteRange opr = n.op_ranges[0];
        Site s;
        s.extent = {ln.range.begin, rn.range.end};
        s.edits.push_back({s.extent, text(right) + slice(ln.range.end, opr.begin) + new_op +
                                         slice(opr.end, rn.range.begin) + text(left)});
        return s;
    }

    bool starts_own_line(NodeId stmt) const {
        const Node& n = t_.node(stmt);
        const Node& parent = t_.node(n.parent);
        if (parent.kind == NodeKind::Block && (parent.flags & kInlineSuite)) return false;
        std::size_t ls = t_.lines().line_start(t_.line(stmt));
        for (std::size_t k = ls; k < n.range.begin; ++k) {
            if (src_[k] != ' ' && src_[k] != '\t') return false;
        }
        return true;
    }

    std::optional<Site> infix_dividing(NodeId id) {
        const Node& n = t_.node(id);
        NodeId value = kNoNode;
        if (n.kind == NodeKind::Assign) value = n.children.back();
        if (n.kind == NodeKind::Return) value = n.children[0];
        if (value == kNoNode || t_.node(value).kind != NodeKind::BinOp) return std::nullopt;
        if (!t_.is_statement(id) || !starts_own_line(id)) return std::nullopt;
        const Node& v = t_.node(value);
        NodeId left = v.children[0];
        NodeId right = v.children[1];
        NodeId child = kNoNode;
        if (t_.node(right).kind == NodeKind::BinOp && is_pure(t_, left)) {
            child = right;
        } else if (t_.node(left).kind == NodeKind::BinOp) {
            child = left;
        }
        if (child == kNoNode) return std::nullopt;
        Site s;
        s.extent = n.range;
        pending_infix_.emplace(n.range.begin, std::make_pair(id, child));
        return s;
    }

    std::string fresh_temp() {
        std::string name = "temp";
        for (int k = 2; idents_.count(name) || is_keyword(name) || is_builtin_name(name); ++k) {
            name = "temp_" + std::to_string(k);
        }
        idents_.insert(name);
        return name;
    }

    void finalize_infix(Site& s) {
        auto [stmt, child] = pending_infix_.at(s.extent.begin);
        const Node& n = t_.node(stmt);
        const Node& c = t_.node(child);
        std::string name = fresh_temp();
        std::size_t ls = t_.lines().line_start(t_.line(stmt));
        std::string indent = slice(ls, n.range.begin);
        std::string expr(strip_parens(t_.text(child), c.paren_depth));
        s.edits.push_back({{n.range.begin, n.range.begin}, name + " = " + expr + "\n" + indent});
        s.edits.push_back({c.range, name});
    }

    // -- renaming -----------------------------------------------------------------
    struct RenameSite {
        std::string name;
        std::vector<ByteRange> occurrences;
        std::size_t first = 0;
    };

    static bool uses_dynamic_scope(const Tree& t, NodeId from) {
        bool found = false;
        t.walk(from, [&](NodeId id) {
            const Node& n = t.node(id);
            if (n.kind == NodeKind::Name &&
                (n.value == "locals" || n.value == "eval" || n.value == "exec" || n.value == "vars" ||
                 n.value == "globals")) {
                found = true;
            }
            return !found;
        });
        return found;
    }

    std::set<std::string> fstring_names() const {
        std::set<std::string> out;
        for (std::size_t i = 0; i < t_.node_count(); ++i) {
            auto id = static_cast<NodeId>(i);
            if (!is_fstring_constant(t_, id)) continue;
            for (const auto& name : loaded_names(t_, id)) out.insert(name);
        }
        return out;
    }

    ByteRange name_span(NodeId id) const {
        const Node& n = t_.node(id);
        if (n.name_range.end > n.name_range.begin) return n.name_range;
        return n.range;
    }

    void rename_candidates(NodeId scope, const std::set<std::string>& fnames, std::vector<RenameSite>& out) const {
        NodeId body = scope == t_.root() ? scope : body_of(t_, scope);
        if (uses_dynamic_scope(t_, scope == t_.root() ? scope : body)) return;
        auto bindings = scope_bindings(t_, scope);
        std::set<std::string> excluded;
        for (const auto& b : bindings) {
            if (b.via != Binding::Via::assign) excluded.insert(b.name);
        }
        // Names bound or redeclared in nested scopes cannot be renamed safely.
        std::set<std::string> nested_bound;
        std::set<std::string> nested_global;
        t_.walk(body, [&](NodeId id) {
            if (id == body) return true;
            const Node& n = t_.node(id);
            if (!opens_scope(n.kind)) return true;
            for (const auto& b : scope_bindings(t_, id)) nested_bound.insert(b.name);
            if (n.kind != NodeKind::ListComp && n.kind != NodeKind::SetComp && n.kind != NodeKind::DictComp &&
                n.kind != NodeKind::GeneratorExp) {
                t_.walk(body_of(t_, id), [&](NodeId d) {
                    const Node& dn = t_.node(d);
                    if (dn.kind == NodeKind::Global) {
                        for (NodeId c : dn.children) nested_global.insert(t_.node(c).value);
                    }
                    return true;
                });
            }
            return true;
        });
        std::set<std::string> done;
        for (const auto& b : bindings) {
            if (b.via != Binding::Via::assign || done.count(b.name)) continue;
            done.insert(b.name);
            const std::string& name = b.name;
            if (excluded.count(name) || nested_bound.count(name) || fnames.count(name)) continue;
            if (name.size() > 4 && name.rfind("__", 0) == 0 && name.substr(name.size() - 2) == "__") continue;
            if (scope != t_.root() && nested_global.count(name)) continue;
            RenameSite site;
            site.name = name;
            site.first = t_.node(b.node).range.begin;
            t_.walk(body, [&](NodeId id) {
                const Node& n = t_.node(id);
                if (n.kind == NodeKind::Name && n.value == name) site.occurrences.push_back(name_span(id));
                return true;
            });
            std::sort(site.occurrences.begin(), site.occurrences.end(),
                      [](const ByteRange& a, const ByteRange& c) { return a.begin < c.begin; });
            if (!site.occurrences.empty()) site.first = std::min(site.first, site.occurrences.front().begin);
            out.push_back(std::move(site));
        }
    }

    std::vector<std::string> new_names(const std::string& name) const {
        if (kind_ == TransformKind::RenameVariable1) return {name.substr(0, 1)};
        TableSubstituteProvider table;
        const SubstituteProvider& p = opts_.provider ? *opts_.provider : table;
        return p.substitutes(name, src_);
    }

    bool usable(const std::string& candidate) const {
        if (candidate.empty() || idents_.count(candidate)) return false;
        if (is_keyword(candidate) || is_soft_keyword(candidate) || is_builtin_name(candidate)) return false;
        if (std::isdigit(static_cast<unsigned char>(candidate[0]))) return false;
        return std::all_of(candidate.begin(), candidate.end(), [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || static_cast<unsigned char>(c) >= 0x80;
        });
    }

    TransformResult rename() {
        auto fnames = fstring_names();
        std::vector<RenameSite> sites;
        rename_candidates(t_.root(), fnames, sites);
        t_.walk(t_.root(), [&](NodeId id) {
            if (t_.node(id).kind == NodeKind::FunctionDef) rename_candidates(id, fnames, sites);
            return true;
        });
        // A name equal to its replacement is not a site.
        std::vector<RenameSite> real;
        for (auto& s : sites) {
            auto names = new_names(s.name);
            if (names.size() == 1 && names[0] == s.name) continue;
            real.push_back(std::move(s));
        }
        std::stable_sort(real.begin(), real.end(),
                         [](const RenameSite& a, const RenameSite& b) { return a.first < b.first; });

        std::vector<RenameSite*> chosen;
        if (!real.empty()) {
            switch (opts_.selector) {
                case SiteSelector::all:
                    for (auto& s : real) chosen.push_back(&s);
                    break;
                case SiteSelector::first:
                    chosen.push_back(&real.front());
                    break;
                case SiteSelector::seeded_random: {
                    std::mt19937_64 rng(opts_.seed);
                    chosen.push_back(&real[static_cast<std::size_t>(util::uniform_below(rng, real.size()))]);
                    break;
                }
            }
        }
        std::vector<Site> applied;
        for (auto* s : chosen) {
            std::string replacement;
            for (const auto& cand : new_names(s->name)) {
                if (cand != s->name && usable(cand)) {
                    replacement = cand;
                    break;
                }
            }
            if (replacement.empty()) {
                if (opts_.selector == SiteSelector::all) continue;
                throw RenameCollisionError("cannot rename '" + s->name + "': replacement already bound");
            }
            idents_.insert(replacement);
            Site site;
            site.extent = {s->occurrences.front().begin, s->occurrences.back().end};
            for (const auto& r : s->occurrences) site.edits.push_back({r, replacement});
            applied.push_back(std::move(site));
        }
        std::vector<Site*> ptrs;
        for (auto& s : applied) ptrs.push_back(&s);
        return apply(ptrs);
    }

    const Tree& t_;
    const std::string& src_;
    TransformKind kind_;
    const TransformOptions& opts_;
    std::set<std::string> idents_;
    std::vector<Site> candidates_;
    std::map<std::size_t, std::pair<NodeId, NodeId>> pending_infix_;
};

}  // namespace

TransformResult transform(std::string_view snippet, TransformKind kind, const TransformOptions& options) {
    Tree tree = parse(std::string(snippet));
    TransformResult res = Transformer(tree, kind, options).run();
    if (!res.record.applied_sites.empty()) (void)parse(res.output);
    return res;
}

}  // namespace psc::sect
