#include "psc/python/analysis.hpp"

#include "psc/errors.hpp"
#include "psc/python/parser.hpp"

namespace psc::python {

namespace {

std::size_t child_index(const Node& parent, NodeId child) {
    for (std::size_t i = 0; i < parent.children.size(); ++i) {
        if (parent.children[i] == child) return i;
    }
    return parent.children.size();
}

std::string alias_binding(const Tree& tree, NodeId alias) {
    const Node& a = tree.node(alias);
    if (!a.alt.empty()) return a.alt;
    if (tree.node(a.parent).kind == NodeKind::Import) {
        auto dot = a.value.find('.');
        return a.value.substr(0, dot);
    }
    return a.value;
}

}  // namespace

NameContext name_context(const Tree& tree, NodeId name) {
    NodeId child = name;
    NodeId p = tree.node(name).parent;
    while (p != kNoNode) {
        auto k = tree.node(p).kind;
        if (k == NodeKind::Tuple || k == NodeKind::List || k == NodeKind::Starred) {
            child = p;
            p = tree.node(p).parent;
            continue;
        }
        break;
    }
    if (p == kNoNode) return NameContext::load;
    const Node& pn = tree.node(p);
    std::size_t idx = child_index(pn, child);
    switch (pn.kind) {
        case NodeKind::Assign:
            return idx + 1 < pn.children.size() ? NameContext::store : NameContext::load;
        case NodeKind::AugAssign:
            return idx == 0 ? NameContext::aug : NameContext::load;
        case NodeKind::AnnAssign:
        case NodeKind::For:
        case NodeKind::Comprehension:
        case NodeKind::NamedExpr:
            return idx == 0 ? NameContext::store : NameContext::load;
        case NodeKind::WithItem:
            return idx == 1 ? NameContext::store : NameContext::load;
        case NodeKind::Del:
            return NameContext::del;
        case NodeKind::Global:
        case NodeKind::Nonlocal:
            return NameContext::declare;
        default:
            return NameContext::load;
    }
}

bool opens_scope(NodeKind k) noexcept {
    switch (k) {
        case NodeKind::Module:
        case NodeKind::FunctionDef:
        case NodeKind::ClassDef:
        case NodeKind::Lambda:
        case NodeKind::ListComp:
        case NodeKind::SetComp:
        case NodeKind::DictComp:
        case NodeKind::GeneratorExp:
            return true;
        default:
            return false;
    }
}

NodeId scope_of(const Tree& tree, NodeId id) {
    NodeId cur = tree.node(id).parent;
    while (cur != kNoNode && !opens_scope(tree.node(cur).kind)) cur = tree.node(cur).parent;
    return cur == kNoNode ? tree.root() : cur;
}

NodeId body_of(const Tree& tree, NodeId def) {
    const Node& n = tree.node(def);
    if (n.kind == NodeKind::FunctionDef) return n.children[3];
    if (n.kind == NodeKind::ClassDef) return n.children[2];
    if (n.kind == NodeKind::Lambda) return n.children[1];
    return def;
}

ParamKind param_kind(const Node& param) noexcept { return static_cast<ParamKind>(param.flags); }
ConstKind const_kind(const Node& constant) noexcept { return static_cast<ConstKind>(constant.flags); }

std::vector<NodeId> params_of(const Tree& tree, NodeId def) {
    std::vector<NodeId> out;
    const Node& n = tree.node(def);
    NodeId ps = n.kind == NodeKind::FunctionDef ? n.children[1] : n.children[0];
    for (NodeId p : tree.node(ps).children) {
        auto k = param_kind(tree.node(p));
        if (k != ParamKind::kw_only_marker && k != ParamKind::positional_only_marker) out.push_back(p);
    }
    return out;
}

std::set<std::string> declared_outer(const Tree& tree, NodeId scope) {
    std::set<std::string> out;
    tree.walk(body_of(tree, scope), [&](NodeId id) {
        const Node& n = tree.node(id);
        if (id != scope && opens_scope(n.kind) && id != body_of(tree, scope)) return false;
        if (n.kind == NodeKind::Global || n.kind == NodeKind::Nonlocal) {
            for (NodeId c : n.children) out.insert(tree.node(c).value);
        }
        return true;
    });
    return out;
}

std::vector<Binding> scope_bindings(const Tree& tree, NodeId scope) {
    std::vector<Binding> out;
    const Node& sn = tree.node(scope);
    if (sn.kind == NodeKind::FunctionDef || sn.kind == NodeKind::Lambda) {
        for (NodeId p : params_of(tree, scope)) out.push_back({tree.node(p).value, p, Binding::Via::param});
    }
    auto outer = declared_outer(tree, scope);
    NodeId body = body_of(tree, scope);
    auto visit = [&](NodeId id) {
        const Node& n = tree.node(id);
        switch (n.kind) {
            case NodeKind::FunctionDef:
                if (id == scope) return true;
                out.push_back({n.value, id, Binding::Via::def});
                return false;
            case NodeKind::ClassDef:
                if (id == scope) return true;
                out.push_back({n.value, id, Binding::Via::cls});
                return false;
            case NodeKind::Lambda:
            case NodeKind::ListComp:
            case NodeKind::SetComp:
            case NodeKind::DictComp:
            case NodeKind::GeneratorExp:
                if (id == scope) return true;
                return false;
            case NodeKind::Name: {
                auto ctx = name_context(tree, id);
                if (ctx == NameContext::store && !outer.count(n.value)) {
                    out.push_back({n.value, id, Binding::Via::assign});
                }
                return true;
            }
            case NodeKind::ExceptHandler:
                if (!n.alt.empty() && !outer.count(n.alt)) out.push_back({n.alt, id, Binding::Via::except});
                return true;
            case NodeKind::Alias:
                if (n.value != "*") out.push_back({alias_binding(tree, id), id, Binding::Via::import});
                return true;
            default:
                return true;
        }
    };
    if (sn.kind == NodeKind::ListComp || sn.kind == NodeKind::SetComp || sn.kind == NodeKind::DictComp ||
        sn.kind == NodeKind::GeneratorExp) {
        for (NodeId c : sn.children) {
            if (c != kNoNode && tree.node(c).kind == NodeKind::Comprehension) {
                tree.walk(tree.node(c).children[0], visit);
            }
        }
        return out;
    }
    tree.walk(body, visit);
    return out;
}

std::vector<std::string> fstring_expressions(std::string_view text) {
    std::vector<std::string> out;
    std::size_t q = text.find_first_of("'\"");
    if (q == std::string_view::npos) return out;
    char quote = text[q];
    std::size_t qlen = text.compare(q, 3, std::string(3, quote)) == 0 ? 3 : 1;
    std::string_view body = text.substr(q + qlen, text.size() - q - 2 * qlen);
    std::size_t i = 0;
    while (i < body.size()) {
        char c = body[i];
        if (c == '{' && i + 1 < body.size() && body[i + 1] == '{') {
            i += 2;
            continue;
        }
        if (c != '{') {
            ++i;
            continue;
        }
        // Scan one replacement field; nested fields in the format spec are collected too.
        std::size_t start = ++i;
        int depth = 0;
        char in_str = 0;
        std::size_t expr_end = std::string_view::npos;
        int braces = 1;
        while (i < body.size() && braces > 0) {
            char d = body[i];
            if (in_str) {
                if (d == in_str) in_str = 0;
            } else if (d == '\'' || d == '"') {
                in_str = d;
            } else if (d == '(' || d == '[') {
                ++depth;
            } else if (d == ')' || d == ']') {
                --depth;
            } else if (d == '{') {
                if (expr_end == std::string_view::npos) {
                    ++depth;
                } else {
                    auto nested = fstring_expressions("f'" + std::string(body.substr(i, body.find('}', i) + 1 - i)) + "'");
                    out.insert(out.end(), nested.begin(), nested.end());
                    i = body.find('}', i);
                }
            } else if (d == '}') {
                if (depth > 0 && expr_end == std::string_view::npos) {
                    --depth;
                } else {
                    --braces;
                    if (expr_end == std::string_view::npos) expr_end = i;
                    break;
                }
            } else if (depth == 0 && expr_end == std::string_view::npos) {
                bool bang = d == '!' && (i + 1 >= body.size() || body[i + 1] != '=');
                bool colon = d == ':';
                bool debug = d == '=' && i + 1 < body.size() && (body[i + 1] == '}' || body[i + 1] == '!' || body[i + 1] == ':') &&
                             i > 0 && std::string_view("=!<>").find(body[i - 1]) == std::string_view::npos;
                if (bang || colon || debug) expr_end = i;
            }
            ++i;
        }
        if (expr_end != std::string_view::npos && expr_end > start) {
            out.emplace_back(body.substr(start, expr_end - start));
        }
        ++i;
    }
    return out;
}

namespace {

void collect_fstring_loads(std::string_view constant_text, std::multiset<std::string>& out) {
    std::vector<Token> toks;
    try {
        toks = tokenize(constant_text);
    } catch (const Error&) {
        return;
    }
    for (const auto& t : toks) {
        if (t.kind != TokenKind::string || !is_fstring(t.text)) continue;
        for (const auto& expr : fstring_expressions(t.text)) {
            try {
                Tree sub = parse("(" + expr + ")\n");
                auto names = loaded_names(sub, sub.root());
                out.insert(names.begin(), names.end());
            } catch (const Error&) {
            }
        }
    }
}

}  // namespace

std::multiset<std::string> loaded_names(const Tree& tree, NodeId from) {
    std::multiset<std::string> out;
    tree.walk(from, [&](NodeId id) {
        const Node& n = tree.node(id);
        if (n.kind == NodeKind::Name) {
            auto ctx = name_context(tree, id);
            if (ctx == NameContext::load || ctx == NameContext::aug) out.insert(n.value);
        } else if (n.kind == NodeKind::Constant && const_kind(n) == ConstKind::string) {
            collect_fstring_loads(tree.text(id), out);
        }
        return true;
    });
    return out;
}

std::set<std::string> identifiers(const Tree& tree) {
    std::set<std::string> out;
    for (std::size_t i = 0; i < tree.node_count(); ++i) {
        const Node& n = tree.node(static_cast<NodeId>(i));
        switch (n.kind) {
            case NodeKind::Name:
            case NodeKind::Attribute:
            case NodeKind::FunctionDef:
            case NodeKind::ClassDef:
            case NodeKind::Param:
            case NodeKind::Keyword:
                if (!n.value.empty()) out.insert(n.value);
                break;
            case NodeKind::Alias: {
                std::size_t start = 0;
                while (start <= n.value.size()) {
                    auto dot = n.value.find('.', start);
                    out.insert(n.value.substr(start, dot - start));
                    if (dot == std::string::npos) break;
                    start = dot + 1;
                }
                if (!n.alt.empty()) out.insert(n.alt);
                break;
            }
            case NodeKind::ExceptHandler:
                if (!n.alt.empty()) out.insert(n.alt);
                break;
            default:
                break;
        }
    }
    return out;
}

std::vector<NodeId> statements(const Tree& tree) {
    std::vector<NodeId> out;
    tree.walk(tree.root(), [&](NodeId id) {
        if (tree.is_statement(id)) {
            out.push_back(id);
        } else {
            const Node& n = tree.node(id);
            if (n.kind == NodeKind::If && (n.flags & kElif)) out.push_back(id);
        }
        return true;
    });
    return out;
}

}  // namespace psc::python
