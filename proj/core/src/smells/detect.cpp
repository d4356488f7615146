#include "psc/smells/detect.hpp"

#include <algorithm>
#include <map>
#include <regex>

#include "psc/errors.hpp"
#include "psc/python/analysis.hpp"
#include "psc/python/parser.hpp"

namespace psc::smells {

using namespace psc::python;

const std::vector<RuleInfo>& implemented_rules() {
    static const std::vector<RuleInfo> rules = {
        {"C0103", "invalid-name"},
        {"C0301", "line-too-long"},
        {"C0303", "trailing-whitespace"},
        {"C0304", "missing-final-newline"},
        {"C0305", "trailing-newlines"},
        {"C0321", "multiple-statements"},
        {"C0415", "import-outside-toplevel"},
        {"R1705", "no-else-return"},
        {"W0102", "dangerous-default-value"},
        {"W0611", "unused-import"},
        {"W0612", "unused-variable"},
        {"W0613", "unused-argument"},
        {"W0719", "broad-exception-raised"},
    };
    return rules;
}

std::string_view symbol_of(std::string_view rule_id) noexcept {
    if (rule_id == kSyntaxErrorRule) return "syntax-error";
    for (const auto& r : implemented_rules()) {
        if (r.id == rule_id) return r.symbol;
    }
    return {};
}

RuleSet RuleSet::all() {
    RuleSet rs;
    for (const auto& r : implemented_rules()) rs.rules.insert(std::string(r.id));
    return rs;
}

RuleSet RuleSet::of(const std::vector<std::string>& ids) {
    RuleSet rs;
    for (const auto& id : ids) {
        if (symbol_of(id).empty() || id == kSyntaxErrorRule) throw PreconditionError("rule not implemented: " + id);
        rs.rules.insert(id);
    }
    return rs;
}

namespace {

const std::regex& snake_rgx() {
    static const std::regex r(R"(([^\W\dA-Z][^\WA-Z]*|_[^\WA-Z]*|__[^\WA-Z\d_][^\WA-Z]+__))");
    return r;
}
const std::regex& const_rgx() {
    static const std::regex r(R"(([^\W\da-z][^\Wa-z]*|__.*__))");
    return r;
}
const std::regex& class_rgx() {
    static const std::regex r(R"([^\W\da-z][^\W_]*)");
    return r;
}
const std::regex& dummy_rgx() {
    static const std::regex r(R"(_+$|(_[a-zA-Z0-9_]*[a-zA-Z0-9]+?$)|dummy|^ignored_|^unused_)");
    return r;
}
const std::regex& ignored_arg_rgx() {
    static const std::regex r(R"(_.*|^ignored_|^unused_)");
    return r;
}
const std::regex& url_line_rgx() {
    static const std::regex r(R"(^\s*(# )?<?https?://\S+>?$)");
    return r;
}

bool good_name(const std::string& n) {
    return n == "i" || n == "j" || n == "k" || n == "ex" || n == "Run" || n == "_";
}
bool disallowed_name(const std::string& n) {
    return n == "foo" || n == "bar" || n == "baz" || n == "toto" || n == "tutu" || n == "tata";
}

std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s) {
        if ((c & 0xC0) != 0x80) ++n;
    }
    return n;
}

std::string_view rstrip(std::string_view s, std::string_view chars = " \t\r\n\v\f") {
    auto pos = s.find_last_not_of(chars);
    return pos == std::string_view::npos ? std::string_view{} : s.substr(0, pos + 1);
}

class Detector {
public:
    Detector(const Tree& tree, const RuleSet& rules, const std::string& sample_id)
        : t_(tree), rules_(rules), sample_id_(sample_id) {}

    std::vector<SmellDiagnostic> run() {
        if (lexical_rules_enabled()) lexical();
        if (rules_.enabled("C0321")) multiple_statements();
        if (rules_.enabled("C0103")) naming();
        if (rules_.enabled("C0415") || rules_.enabled("W0611")) imports();
        if (rules_.enabled("W0102") || rules_.enabled("W0612") || rules_.enabled("W0613")) functions();
        if (rules_.enabled("W0719") || rules_.enabled("R1705")) statements_pass();
        sort_diagnostics(out_);
        return std::move(out_);
    }

private:
    bool lexical_rules_enabled() const {
        return rules_.enabled("C0301") || rules_.enabled("C0303") || rules_.enabled("C0304") ||
               rules_.enabled("C0305");
    }

    void emit(std::string_view rule, std::size_t begin, std::optional<std::size_t> end, std::string message) {
        SmellDiagnostic d;
        d.sample_id = sample_id_;
        d.rule_id = std::string(rule);
        d.symbol = std::string(symbol_of(rule));
        d.start_line = t_.lines().line_of(begin);
        d.start_col = t_.lines().col_of(begin);
        if (end) {
            d.end_line = t_.lines().line_of(*end);
            d.end_col = t_.lines().col_of(*end);
        }
        d.message = std::move(message);
        out_.push_back(std::move(d));
    }

    void emit_at_line(std::string_view rule, int line, int col, std::string message) {
        SmellDiagnostic d;
        d.sample_id = sample_id_;
        d.rule_id = std::string(rule);
        d.symbol = std::string(symbol_of(rule));
        d.start_line = line;
        d.start_col = col;
        d.message = std::move(message);
        out_.push_back(std::move(d));
    }

    // Header span of a def/class: keyword through the name.
    std::pair<std::size_t, std::size_t> header(NodeId def) const {
        const Node& n = t_.node(def);
        return {n.range.begin, n.name_range.end};
    }

    // -- lexical ---------------------------------------------------------------
    void lexical() {
        const std::string& src = t_.source();
        const LineIndex& li = t_.lines();
        int nlines = li.line_count();
        // Lines whose first starting token is a string, and lines that begin inside a string.
        std::vector<char> string_first(static_cast<std::size_t>(nlines) + 2, 0);
        std::vector<char> seen(static_cast<std::size_t>(nlines) + 2, 0);
        std::vector<char> inside_string(static_cast<std::size_t>(nlines) + 2, 0);
        for (const auto& tok : t_.tokens()) {
            if (tok.kind == TokenKind::indent || tok.kind == TokenKind::dedent || tok.kind == TokenKind::end_marker) {
                continue;
            }
            auto l = static_cast<std::size_t>(tok.line);
            if (l < seen.size() && !seen[l]) {
                seen[l] = 1;
                if (tok.kind == TokenKind::string) string_first[l] = 1;
            }
            if (tok.kind == TokenKind::string) {
                for (int k = tok.line + 1; k <= tok.end_line && k <= nlines; ++k) inside_string[static_cast<std::size_t>(k)] = 1;
            }
        }
        for (int line = 1; line <= nlines; ++line) {
            std::size_t b = li.line_start(line);
            std::size_t e = li.line_end(line);
            std::string_view text(src.data() + b, e - b);
            bool terminated = !text.empty() && text.back() == '\n';
            std::string_view stripped = rstrip(text);
            if (rules_.enabled("C0301")) {
                auto len = utf8_length(stripped);
                if (len > static_cast<std::size_t>(rules_.max_line_length) &&
                    !std::regex_search(std::string(stripped), url_line_rgx())) {
                    emit_at_line("C0301", line, 0,
                                 "Line too long (" + std::to_string(len) + "/" +
                                     std::to_string(rules_.max_line_length) + ")");
                }
            }
            if (rules_.enabled("C0303") && terminated && !string_first[static_cast<std::size_t>(line)] &&
                !inside_string[static_cast<std::size_t>(line)]) {
                std::string_view tail = text.substr(stripped.size());
                if (tail != "\n" && tail != "\r\n") {
                    emit_at_line("C0303", line, static_cast<int>(stripped.size()), "Trailing whitespace");
                }
            }
        }
        if (src.empty()) return;
        if (rules_.enabled("C0304") && src.back() != '\n') {
            emit_at_line("C0304", nlines, 0, "Final newline missing");
        }
        if (rules_.enabled("C0305") && src.size() >= 2 && src.compare(src.size() - 2, 2, "\n\n") == 0) {
            int count = static_cast<int>(std::count(src.begin(), src.end(), '\n'));
            emit_at_line("C0305", count, 0, "Trailing newlines");
        }
    }

    // -- multiple statements -------------------------------------------------------
    void multiple_statements() {
        std::map<int, bool> flagged;
        for (NodeId s : statements(t_)) {
            const Node& n = t_.node(s);
            NodeId parent = n.parent;
            int prev_line = 0;
            const Node& pn = t_.node(parent);
            if (pn.kind == NodeKind::Module || pn.kind == NodeKind::Block) {
                auto it = std::find(pn.children.begin(), pn.children.end(), s);
                if (it != pn.children.begin()) {
                    prev_line = t_.line(*(it - 1));
                } else if (pn.kind == NodeKind::Block) {
                    prev_line = t_.line(pn.parent);
                }
            } else {
                prev_line = t_.line(parent);
            }
            int line = t_.line(s);
            if (prev_line != line || flagged[line]) continue;
            if (n.kind == NodeKind::With) continue;
            if (n.kind == NodeKind::ExprStmt) {
                const Node& v = t_.node(n.children[0]);
                if (v.kind == NodeKind::Constant && const_kind(v) == ConstKind::ellipsis) continue;
            }
            emit("C0321", n.range.begin, n.range.end, "More than one statement on a single line");
            flagged[line] = true;
        }
    }

    // -- naming --------------------------------------------------------------------
    void check_name(std::string_view kind, const std::regex& rgx, std::string_view style, const std::string& name,
                    std::size_t begin, std::size_t end) {
        if (good_name(name) || disallowed_name(name)) return;
        if (std::regex_match(name, rgx)) return;
        emit("C0103", begin, end,
             std::string(kind) + " name \"" + name + "\" doesn't conform to " + std::string(style) + " naming style");
    }

    bool is_const_value(NodeId v, const std::map<std::string, bool>& const_names) const {
        const Node& n = t_.node(v);
        switch (n.kind) {
            case NodeKind::Constant: {
                if (const_kind(n) != ConstKind::string) return true;
                for (const auto& tok : t_.tokens()) {
                    if (tok.kind == TokenKind::string && n.range.contains({tok.begin, tok.end}) && is_fstring(tok.text)) {
                        return false;
                    }
                }
                return true;
            }
            case NodeKind::UnaryOp:
                return n.value != "not" && is_const_value(n.children[0], const_names);
            case NodeKind::BinOp:
                return is_const_value(n.children[0], const_names) && is_const_value(n.children[1], const_names);
            case NodeKind::Name: {
                auto it = const_names.find(n.value);
                return it != const_names.end() && it->second;
            }
            default:
                return false;
        }
    }

    void naming() {
        NodeId root = t_.root();
        // Module-level single-name assignments, in order: which names currently hold constants.
        std::map<std::string, int> module_assign_count;
        std::set<std::string> module_classes;
        for (const auto& b : scope_bindings(t_, root)) {
            if (b.via == Binding::Via::assign) ++module_assign_count[b.name];
            if (b.via == Binding::Via::cls) module_classes.insert(b.name);
        }
        std::map<std::string, bool> const_names;

        std::vector<NodeId> order;
        t_.walk(root, [&](NodeId id) {
            order.push_back(id);
            return true;
        });
        for (NodeId id : order) {
            const Node& n = t_.node(id);
            switch (n.kind) {
                case NodeKind::FunctionDef: {
                    auto [b, e] = header(id);
                    bool method = t_.node(n.parent).kind == NodeKind::Block &&
                                  t_.node(t_.node(n.parent).parent).kind == NodeKind::ClassDef;
                    check_name(method ? "Method" : "Function", snake_rgx(), "snake_case", n.value, b, e);
                    const Node& ps = t_.node(n.children[1]);
                    bool has_posonly = std::any_of(ps.children.begin(), ps.children.end(), [&](NodeId p) {
                        return param_kind(t_.node(p)) == ParamKind::positional_only_marker;
                    });
                    bool before_marker = has_posonly;
                    for (NodeId p : ps.children) {
                        const Node& pn = t_.node(p);
                        auto k = param_kind(pn);
                        if (k == ParamKind::positional_only_marker) {
                            before_marker = false;
                            continue;
                        }
                        if (k == ParamKind::positional && !before_marker) {
                            check_name("Argument", snake_rgx(), "snake_case", pn.value, pn.name_range.begin,
                                       pn.name_range.end);
                        }
                    }
                    if (method) instance_attributes(id);
                    break;
                }
                case NodeKind::ClassDef: {
                    auto [b, e] = header(id);
                    check_name("Class", class_rgx(), "PascalCase", n.value, b, e);
                    break;
                }
                case NodeKind::Name:
                    if (name_context(t_, id) == NameContext::store) check_assigned_name(id, const_names, module_assign_count, module_classes);
                    break;
                case NodeKind::ExceptHandler:
                    if (!n.alt.empty()) {
                        NodeId scope = scope_of(t_, id);
                        if (t_.node(scope).kind == NodeKind::FunctionDef && !declared_outer(t_, scope).count(n.alt)) {
                            check_name("Variable", snake_rgx(), "snake_case", n.alt, n.range.begin,
                                       n.range.begin + 6);
                        }
                    }
                    break;
                default:
                    break;
            }
        }
    }

    void check_assigned_name(NodeId id, std::map<std::string, bool>& const_names,
                             const std::map<std::string, int>& module_assign_count,
                             const std::set<std::string>& module_classes) {
        const Node& n = t_.node(id);
        NodeId parent = n.parent;
        const Node& pn = t_.node(parent);
        if (pn.kind == NodeKind::Comprehension) return;
        // Comprehension variables follow the "any" naming style.
        NodeId up = parent;
        while (up != kNoNode && (t_.node(up).kind == NodeKind::Tuple || t_.node(up).kind == NodeKind::List ||
                                 t_.node(up).kind == NodeKind::Starred)) {
            up = t_.node(up).parent;
        }
        if (up != kNoNode && t_.node(up).kind == NodeKind::Comprehension) return;
        NodeId scope = scope_of(t_, id);
        // Comprehension walrus targets bind in the enclosing frame.
        while (t_.node(scope).kind == NodeKind::ListComp || t_.node(scope).kind == NodeKind::SetComp ||
               t_.node(scope).kind == NodeKind::DictComp || t_.node(scope).kind == NodeKind::GeneratorExp ||
               t_.node(scope).kind == NodeKind::Lambda) {
            scope = scope_of(t_, scope);
        }
        auto sk = t_.node(scope).kind;
        if (sk == NodeKind::FunctionDef) {
            if (declared_outer(t_, scope).count(n.value)) return;
            for (NodeId p : params_of(t_, scope)) {
                if (t_.node(p).value == n.value) return;
            }
            check_name("Variable", snake_rgx(), "snake_case", n.value, n.range.begin, n.range.end);
            return;
        }
        if (sk != NodeKind::Module) return;
        if (pn.kind != NodeKind::Assign) return;
        NodeId value = pn.children.back();
        if (module_classes.count(t_.node(value).value) && t_.node(value).kind == NodeKind::Name) {
            check_name("Class", class_rgx(), "PascalCase", n.value, n.range.begin, n.range.end);
            return;
        }
        bool is_const = is_const_value(value, const_names);
        auto cnt = module_assign_count.find(n.value);
        const_names[n.value] = is_const && cnt != module_assign_count.end() && cnt->second == 1;
        if (is_const) check_name("Constant", const_rgx(), "UPPER_CASE", n.value, n.range.begin, n.range.end);
    }

    void instance_attributes(NodeId method) {
        auto params = params_of(t_, method);
        if (params.empty()) return;
        const Node& first = t_.node(params.front());
        if (param_kind(first) != ParamKind::positional) return;
        const std::string& self_name = first.value;
        t_.walk(body_of(t_, method), [&](NodeId id) {
            const Node& n = t_.node(id);
            if (n.kind == NodeKind::FunctionDef || n.kind == NodeKind::ClassDef || n.kind == NodeKind::Lambda) return false;
            if (n.kind != NodeKind::Attribute) return true;
            const Node& obj = t_.node(n.children[0]);
            if (obj.kind != NodeKind::Name || obj.value != self_name) return true;
            if (!is_attr_store(id)) return true;
            if (seen_attrs_.insert(std::to_string(t_.node(t_.node(method).parent).parent) + ":" + n.value).second) {
                check_name("Attribute", snake_rgx(), "snake_case", n.value, n.range.begin, n.range.end);
            }
            return true;
        });
    }

    bool is_attr_store(NodeId attr) const {
        NodeId child = attr;
        NodeId p = t_.node(attr).parent;
        while (p != kNoNode && (t_.node(p).kind == NodeKind::Tuple || t_.node(p).kind == NodeKind::List ||
                                t_.node(p).kind == NodeKind::Starred)) {
            child = p;
            p = t_.node(p).parent;
        }
        if (p == kNoNode) return false;
        const Node& pn = t_.node(p);
        auto idx = static_cast<std::size_t>(std::find(pn.children.begin(), pn.children.end(), child) - pn.children.begin());
        switch (pn.kind) {
            case NodeKind::Assign:
                return idx + 1 < pn.children.size();
            case NodeKind::AugAssign:
            case NodeKind::AnnAssign:
            case NodeKind::For:
                return idx == 0;
            case NodeKind::WithItem:
                return idx == 1;
            default:
                return false;
        }
    }

    // -- imports -----------------------------------------------------------------------
    void imports() {
        auto module_loads = loaded_names(t_, t_.root());
        auto module_dels = deleted_names(t_.root());
        t_.walk(t_.root(), [&](NodeId id) {
            const Node& n = t_.node(id);
            if (n.kind != NodeKind::Import && n.kind != NodeKind::ImportFrom) return true;
            NodeId scope = scope_of(t_, id);
            bool toplevel = t_.node(scope).kind == NodeKind::Module;
            if (!toplevel && rules_.enabled("C0415")) {
                std::string names;
                for (NodeId a : n.children) {
                    if (!names.empty()) names += ", ";
                    names += n.kind == NodeKind::ImportFrom ? n.value + "." + t_.node(a).value : t_.node(a).value;
                }
                emit("C0415", n.range.begin, n.range.end, "Import outside toplevel (" + names + ")");
            }
            if (!rules_.enabled("W0611")) return false;
            if (n.kind == NodeKind::ImportFrom && n.value == "__future__") return false;
            if (n.flags & kStarImport) return false;
            std::multiset<std::string> scope_loads;
            std::multiset<std::string> scope_dels;
            if (!toplevel) {
                scope_loads = loaded_names(t_, scope);
                scope_dels = deleted_names(scope);
            }
            const auto& loads = toplevel ? module_loads : scope_loads;
            const auto& dels = toplevel ? module_dels : scope_dels;
            for (NodeId a : n.children) {
                const Node& an = t_.node(a);
                std::string bound = !an.alt.empty() ? an.alt
                                    : n.kind == NodeKind::Import ? an.value.substr(0, an.value.find('.'))
                                                                 : an.value;
                if (loads.count(bound) || dels.count(bound)) continue;
                std::string msg;
                if (n.kind == NodeKind::Import) {
                    msg = "Unused import " + an.value + (an.alt.empty() ? "" : " as " + an.alt);
                } else {
                    msg = "Unused " + an.value + (an.alt.empty() ? "" : " imported as " + an.alt) + " imported from " + n.value;
                    if (!an.alt.empty()) msg = "Unused " + an.value + " imported from " + n.value + " as " + an.alt;
                }
                emit("W0611", n.range.begin, n.range.end, msg);
            }
            return false;
        });
    }

    std::multiset<std::string> deleted_names(NodeId from) const {
        std::multiset<std::string> out;
        t_.walk(from, [&](NodeId id) {
            if (t_.node(id).kind == NodeKind::Name && name_context(t_, id) == NameContext::del) out.insert(t_.node(id).value);
            return true;
        });
        return out;
    }

    // -- function-level rules ----------------------------------------------------------------
    void functions() {
        t_.walk(t_.root(), [&](NodeId id) {
            if (t_.node(id).kind == NodeKind::FunctionDef) function(id);
            return true;
        });
    }

    static bool is_mutable_default(const Tree& t, NodeId v) {
        const Node& n = t.node(v);
        switch (n.kind) {
            case NodeKind::List:
            case NodeKind::Dict:
            case NodeKind::Set:
            case NodeKind::ListComp:
            case NodeKind::DictComp:
            case NodeKind::SetComp:
                return true;
            case NodeKind::Call: {
                const Node& f = t.node(n.children[0]);
                return f.kind == NodeKind::Name && (f.value == "list" || f.value == "dict" || f.value == "set");
            }
            default:
                return false;
        }
    }

    void function(NodeId fn) {
        const Node& n = t_.node(fn);
        auto [hb, he] = header(fn);
        if (rules_.enabled("W0102")) {
            for (NodeId p : params_of(t_, fn)) {
                NodeId def = t_.node(p).children[1];
                if (def != kNoNode && is_mutable_default(t_, def)) {
                    emit("W0102", hb, he, "Dangerous default value " + std::string(t_.text(def)) + " as argument");
                }
            }
        }
        NodeId body = body_of(t_, fn);
        auto loads = loaded_names(t_, body);
        auto dels = deleted_names(body);
        auto used = [&](const std::string& name) { return loads.count(name) > 0 || dels.count(name) > 0; };
        if (rules_.enabled("W0612")) {
            std::set<std::string> reported;
            std::set<std::string> params;
            for (NodeId p : params_of(t_, fn)) params.insert(t_.node(p).value);
            for (const auto& b : scope_bindings(t_, fn)) {
                if (b.via == Binding::Via::param || b.via == Binding::Via::import) continue;
                if (params.count(b.name) || used(b.name) || reported.count(b.name)) continue;
                if (std::regex_search(b.name, dummy_rgx())) continue;
                reported.insert(b.name);
                const Node& bn = t_.node(b.node);
                std::string msg = "Unused variable '" + b.name + "'";
                switch (b.via) {
                    case Binding::Via::def:
                    case Binding::Via::cls: {
                        auto [db, de] = header(b.node);
                        emit("W0612", db, de, msg);
                        break;
                    }
                    case Binding::Via::except:
                        emit("W0612", bn.range.begin, bn.range.end, msg);
                        break;
                    default:
                        emit("W0612", bn.range.begin, bn.range.end, msg);
                        break;
                }
            }
        }
        if (rules_.enabled("W0613")) unused_arguments(fn, used);
        (void)n;
    }

    template <class Used>
    void unused_arguments(NodeId fn, const Used& used) {
        const Node& n = t_.node(fn);
        const Node& body = t_.node(body_of(t_, fn));
        if (body.children.size() == 1 && t_.node(body.children[0]).kind == NodeKind::Raise) return;
        bool method = t_.node(n.parent).kind == NodeKind::Block &&
                      t_.node(t_.node(n.parent).parent).kind == NodeKind::ClassDef;
        bool is_static = false;
        for (NodeId d : t_.node(n.children[0]).children) {
            const Node& dn = t_.node(d);
            if (dn.kind == NodeKind::Name && dn.value == "staticmethod") is_static = true;
        }
        auto params = params_of(t_, fn);
        for (std::size_t i = 0; i < params.size(); ++i) {
            const Node& p = t_.node(params[i]);
            if (i == 0 && method && !is_static) continue;
            if (used(p.value) || std::regex_match(p.value, ignored_arg_rgx()) ||
                std::regex_search(p.value, std::regex("^ignored_|^unused_"))) {
                continue;
            }
            std::string msg = "Unused argument '" + p.value + "'";
            auto k = param_kind(p);
            if (k == ParamKind::var_args || k == ParamKind::var_kwargs) {
                emit_at_line("W0613", t_.line(fn), t_.col(fn), msg);
            } else {
                emit("W0613", p.name_range.begin, p.name_range.end, msg);
            }
        }
    }

    // -- statement rules ----------------------------------------------------------------------
    void statements_pass() {
        t_.walk(t_.root(), [&](NodeId id) {
            const Node& n = t_.node(id);
            if (n.kind == NodeKind::Raise && rules_.enabled("W0719")) broad_raise(id);
            if (n.kind == NodeKind::If && rules_.enabled("R1705")) else_return(id);
            if (n.kind == NodeKind::Try && rules_.enabled("R1705")) try_else_return(id);
            return true;
        });
    }

    void broad_raise(NodeId id) {
        const Node& n = t_.node(id);
        NodeId exc = n.children[0];
        if (exc == kNoNode) return;
        const Node* e = &t_.node(exc);
        if (e->kind == NodeKind::Call) e = &t_.node(e->children[0]);
        if (e->kind == NodeKind::Name && (e->value == "Exception" || e->value == "BaseException")) {
            emit("W0719", n.range.begin, n.range.end, "Raising too general exception: " + e->value);
        }
    }

    void else_return(NodeId id) {
        const Node& n = t_.node(id);
        if (n.flags & kElif) return;
        NodeId orelse = n.children[2];
        if (orelse == kNoNode) return;
        const Node& body = t_.node(n.children[1]);
        bool returns = std::any_of(body.children.begin(), body.children.end(),
                                   [&](NodeId s) { return t_.node(s).kind == NodeKind::Return; });
        if (!returns) return;
        bool elif = t_.node(orelse).kind == NodeKind::If;
        emit("R1705", n.range.begin, n.range.end,
             elif ? "Unnecessary \"elif\" after \"return\", remove the leading \"el\" from \"elif\""
                  : "Unnecessary \"else\" after \"return\", remove the \"else\" and de-indent the code inside it");
    }

    bool has_return(NodeId block) const {
        const auto& ch = t_.node(block).children;
        return std::any_of(ch.begin(), ch.end(), [&](NodeId s) { return t_.node(s).kind == NodeKind::Return; });
    }

    void try_else_return(NodeId id) {
        const Node& n = t_.node(id);
        if (n.children[2] == kNoNode || n.children[3] != kNoNode) return;
        const auto& handlers = t_.node(n.children[1]).children;
        if (handlers.empty()) return;
        for (NodeId h : handlers) {
            if (!has_return(t_.node(h).children[1])) return;
        }
        emit("R1705", n.range.begin, n.range.end,
             "Unnecessary \"else\" after \"return\", remove the \"else\" and de-indent the code inside it");
    }

    const Tree& t_;
    const RuleSet& rules_;
    const std::string& sample_id_;
    std::vector<SmellDiagnostic> out_;
    std::set<std::string> seen_attrs_;
};

}  // namespace

std::vector<SmellDiagnostic> detect(std::string_view snippet, const RuleSet& rules, const std::string& sample_id) {
    try {
        Tree tree = parse(std::string(snippet));
        return Detector(tree, rules, sample_id).run();
    } catch (const ParseError& e) {
        SmellDiagnostic d;
        d.sample_id = sample_id;
        d.rule_id = std::string(kSyntaxErrorRule);
        d.symbol = "syntax-error";
        d.start_line = std::max(1, e.line());
        d.start_col = std::max(0, e.col());
        d.message = e.what();
        return {d};
    }
}

}  // namespace psc::smells
