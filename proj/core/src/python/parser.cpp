#include "psc/python/parser.hpp"

#include <array>
#include <utility>

#include "psc/errors.hpp"

namespace psc::python {

// ---------------------------------------------------------------------------
// Tree

Tree::Tree(std::unique_ptr<std::string> source, std::vector<Token> tokens, std::vector<Node> nodes, NodeId root)
    : source_(std::move(source)), tokens_(std::move(tokens)), nodes_(std::move(nodes)), root_(root),
      lines_(*source_) {}

bool Tree::is_statement(NodeId id) const {
    const Node& n = node(id);
    if (n.parent == kNoNode) return false;
    auto pk = node(n.parent).kind;
    return pk == NodeKind::Module || pk == NodeKind::Block;
}

NodeId Tree::enclosing_scope(NodeId id) const {
    NodeId cur = node(id).parent;
    while (cur != kNoNode) {
        auto k = node(cur).kind;
        if (k == NodeKind::FunctionDef || k == NodeKind::Lambda || k == NodeKind::ClassDef ||
            k == NodeKind::Module) {
            return cur;
        }
        cur = node(cur).parent;
    }
    return root_;
}

void Tree::walk(NodeId from, const std::function<bool(NodeId)>& visit) const {
    if (from == kNoNode) return;
    std::vector<NodeId> stack{from};
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        if (!visit(id)) continue;
        const auto& ch = node(id).children;
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) {
            if (*it != kNoNode) stack.push_back(*it);
        }
    }
}

int Tree::height(NodeId from) const {
    if (from == kNoNode) return 0;
    int best = 0;
    for (NodeId c : node(from).children) {
        if (c != kNoNode) best = std::max(best, height(c));
    }
    return best + 1;
}

std::string_view to_string(NodeKind k) noexcept {
    static constexpr std::array<std::string_view, 60> names = {
        "Module", "Block", "FunctionDef", "ClassDef", "Decorators", "Parameters", "Param", "Arguments",
        "Return", "Assign", "AugAssign", "AnnAssign", "ExprStmt", "Pass", "Break", "Continue", "Raise",
        "Global", "Nonlocal", "Del", "Assert", "Import", "ImportFrom", "Alias",
        "If", "While", "For", "Try", "Handlers", "ExceptHandler", "With", "WithItem",
        "BinOp", "UnaryOp", "BoolOp", "Compare", "Call", "Keyword", "Attribute", "Subscript", "Slice",
        "Tuple", "List", "Set", "Dict", "ListComp", "SetComp", "DictComp", "GeneratorExp", "Comprehension",
        "IfExp", "Lambda", "Starred", "NamedExpr", "Await", "Yield", "YieldFrom", "Name", "Constant"};
    auto i = static_cast<std::size_t>(k);
    return i < names.size() ? names[i] : "?";
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
    Parser(std::string_view src, const std::vector<Token>& all) : src_(src), lines_(src) {
        for (const auto& t : all) {
            if (t.kind != TokenKind::comment && t.kind != TokenKind::nl) toks_.push_back(t);
        }
    }

    NodeId parse_module() {
        NodeId mod = make(NodeKind::Module, 0);
        while (!at(TokenKind::end_marker)) {
            if (at(TokenKind::newline)) {
                ++i_;
                continue;
            }
            if (at(TokenKind::indent)) fail("unexpected indent");
            parse_statement(mod);
        }
        nodes_[mod].range = {0, src_.size()};
        return mod;
    }

    std::vector<Node> take_nodes() {
        link_parents();
        return std::move(nodes_);
    }

private:
    // -- token helpers ------------------------------------------------------
    const Token& cur() const { return toks_[i_]; }
    const Token& peek(std::size_t k = 1) const {
        return toks_[std::min(i_ + k, toks_.size() - 1)];
    }
    bool at(TokenKind k) const { return cur().kind == k; }
    bool at_op(std::string_view s) const { return cur().is_op(s); }
    bool at_kw(std::string_view s) const { return cur().is_name(s); }
    bool accept_op(std::string_view s) {
        if (!at_op(s)) return false;
        ++i_;
        return true;
    }
    bool accept_kw(std::string_view s) {
        if (!at_kw(s)) return false;
        ++i_;
        return true;
    }
    const Token& expect_op(std::string_view s) {
        if (!at_op(s)) fail("expected '" + std::string(s) + "'");
        return toks_[i_++];
    }
    const Token& expect_kw(std::string_view s) {
        if (!at_kw(s)) fail("expected '" + std::string(s) + "'");
        return toks_[i_++];
    }
    const Token& expect_name() {
        if (!at(TokenKind::name) || is_keyword(cur().text)) fail("expected identifier");
        return toks_[i_++];
    }
    std::size_t prev_end() const { return i_ > 0 ? toks_[i_ - 1].end : 0; }

    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = cur();
        std::string what = msg;
        if (t.kind == TokenKind::end_marker) {
            what += " at end of input";
        } else if (!t.text.empty() && t.kind != TokenKind::newline) {
            what += " near '" + std::string(t.text) + "'";
        }
        throw ParseError(what, t.line, t.col);
    }

    // -- node helpers -------------------------------------------------------
    NodeId make(NodeKind k, std::size_t begin) {
        Node n;
        n.kind = k;
        n.range = {begin, begin};
        nodes_.push_back(std::move(n));
        return static_cast<NodeId>(nodes_.size() - 1);
    }
    Node& at_node(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }
    void finish(NodeId id) { at_node(id).range.end = prev_end(); }
    void add(NodeId parent, NodeId child) { at_node(parent).children.push_back(child); }

    void link_parents() {
        for (std::size_t p = 0; p < nodes_.size(); ++p) {
            for (NodeId c : nodes_[p].children) {
                if (c != kNoNode) nodes_[static_cast<std::size_t>(c)].parent = static_cast<NodeId>(p);
            }
        }
    }

    // -- statements -----------------------------------------------------------
    void parse_statement(NodeId container) {
        if (at(TokenKind::name)) {
            auto w = cur().text;
            if (w == "if") return add(container, parse_if(false));
            if (w == "while") return add(container, parse_while());
            if (w == "for") return add(container, parse_for(cur().begin, 0));
            if (w == "try") return add(container, parse_try());
            if (w == "with") return add(container, parse_with(cur().begin, 0));
            if (w == "def") return add(container, parse_funcdef(cur().begin, make_decorators(cur().begin), 0));
            if (w == "class") return add(container, parse_classdef(make_decorators(cur().begin)));
            if (w == "async" && peek().kind == TokenKind::name) {
                std::size_t b = cur().begin;
                auto nx = peek().text;
                if (nx == "def") {
                    ++i_;
                    return add(container, parse_funcdef(b, make_decorators(b), kAsync));
                }
                if (nx == "for") {
                    ++i_;
                    return add(container, parse_for(b, kAsync));
                }
                if (nx == "with") {
                    ++i_;
                    return add(container, parse_with(b, kAsync));
                }
            }
        }
        if (at_op("@")) return add(container, parse_decorated());
        parse_simple_statements(container);
    }

    void parse_simple_statements(NodeId container) {
        while (true) {
            add(container, parse_small_statement());
            if (accept_op(";")) {
                if (at(TokenKind::newline)) break;
                continue;
            }
            break;
        }
        if (!at(TokenKind::newline)) fail("invalid syntax");
        ++i_;
    }

    NodeId simple(NodeKind k) {
        NodeId n = make(k, cur().begin);
        at_node(n).name_range = {cur().begin, cur().end};
        ++i_;
        return n;
    }

    NodeId parse_small_statement() {
        if (at(TokenKind::name)) {
            auto w = cur().text;
            if (w == "pass") {
                NodeId n = simple(NodeKind::Pass);
                finish(n);
                return n;
            }
            if (w == "break") {
                NodeId n = simple(NodeKind::Break);
                finish(n);
                return n;
            }
            if (w == "continue") {
                NodeId n = simple(NodeKind::Continue);
                finish(n);
                return n;
            }
            if (w == "return") {
                NodeId n = simple(NodeKind::Return);
                add(n, at_statement_end() ? kNoNode : parse_testlist_star_expr());
                finish(n);
                return n;
            }
            if (w == "raise") {
                NodeId n = simple(NodeKind::Raise);
                NodeId exc = kNoNode;
                NodeId cause = kNoNode;
                if (!at_statement_end()) {
                    exc = parse_test();
                    if (accept_kw("from")) cause = parse_test();
                }
                add(n, exc);
                add(n, cause);
                finish(n);
                return n;
            }
            if (w == "global" || w == "nonlocal") {
                NodeId n = simple(w == "global" ? NodeKind::Global : NodeKind::Nonlocal);
                do {
                    const Token& t = expect_name();
                    NodeId nm = make(NodeKind::Name, t.begin);
                    at_node(nm).value = std::string(t.text);
                    at_node(nm).range.end = t.end;
                    add(n, nm);
                } while (accept_op(","));
                finish(n);
                return n;
            }
            if (w == "del") {
                NodeId n = simple(NodeKind::Del);
                NodeId targets = parse_exprlist();
                check_target(targets, "delete");
                add(n, targets);
                finish(n);
                return n;
            }
            if (w == "assert") {
                NodeId n = simple(NodeKind::Assert);
                add(n, parse_test());
                add(n, accept_op(",") ? parse_test() : kNoNode);
                finish(n);
                return n;
            }
            if (w == "import") return parse_import();
            if (w == "from") return parse_from_import();
        }
        return parse_expr_statement();
    }

    bool at_statement_end() const { return at(TokenKind::newline) || at_op(";") || at(TokenKind::end_marker); }

    NodeId parse_import() {
        NodeId n = simple(NodeKind::Import);
        do {
            add(n, parse_alias(true));
        } while (accept_op(","));
        finish(n);
        return n;
    }

    NodeId parse_alias(bool dotted) {
        std::size_t b = cur().begin;
        NodeId a = make(NodeKind::Alias, b);
        std::string name(expect_name().text);
        if (dotted) {
            while (at_op(".")) {
                ++i_;
                name += ".";
                name += expect_name().text;
            }
        }
        at_node(a).name_range = {b, prev_end()};
        at_node(a).value = std::move(name);
        if (accept_kw("as")) at_node(a).alt = std::string(expect_name().text);
        finish(a);
        return a;
    }

    NodeId parse_from_import() {
        NodeId n = simple(NodeKind::ImportFrom);
        std::string module;
        while (at_op(".") || at_op("...")) {
            module += cur().text;
            ++i_;
        }
        if (!at_kw("import")) {
            module += expect_name().text;
            while (at_op(".")) {
                ++i_;
                module += ".";
                module += expect_name().text;
            }
        }
        if (module.empty()) fail("expected module name");
        at_node(n).value = module;
        expect_kw("import");
        if (at_op("*")) {
            NodeId a = make(NodeKind::Alias, cur().begin);
            at_node(a).value = "*";
            ++i_;
            finish(a);
            at_node(a).name_range = at_node(a).range;
            at_node(n).flags |= kStarImport;
            add(n, a);
        } else if (accept_op("(")) {
            do {
                if (at_op(")")) break;
                add(n, parse_alias(false));
            } while (accept_op(","));
            expect_op(")");
        } else {
            do {
                add(n, parse_alias(false));
            } while (accept_op(","));
        }
        finish(n);
        return n;
    }

    NodeId parse_expr_statement() {
        std::size_t b = cur().begin;
        if (at_kw("yield")) {
            NodeId n = make(NodeKind::ExprStmt, b);
            add(n, parse_yield());
            finish(n);
            return n;
        }
        NodeId first = parse_testlist_star_expr();
        if (at_op(":")) {
            ++i_;
            check_target(first, "annotate");
            NodeId n = make(NodeKind::AnnAssign, b);
            add(n, first);
            add(n, parse_test());
            NodeId value = kNoNode;
            if (accept_op("=")) value = at_kw("yield") ? parse_yield() : parse_testlist_star_expr();
            add(n, value);
            finish(n);
            return n;
        }
        static constexpr std::array<std::string_view, 13> aug = {"+=", "-=", "*=", "/=", "//=", "%=", "@=",
                                                                 "&=", "|=", "^=", ">>=", "<<=", "**="};
        for (auto op : aug) {
            if (at_op(op)) {
                NodeId n = make(NodeKind::AugAssign, b);
                at_node(n).value = std::string(op);
                at_node(n).op_ranges.push_back({cur().begin, cur().end});
                ++i_;
                auto tk = at_node(first).kind;
                if (tk != NodeKind::Name && tk != NodeKind::Attribute && tk != NodeKind::Subscript) {
                    fail("illegal expression for augmented assignment");
                }
                add(n, first);
                add(n, at_kw("yield") ? parse_yield() : parse_testlist());
                finish(n);
                return n;
            }
        }
        if (at_op("=")) {
            NodeId n = make(NodeKind::Assign, b);
            NodeId last = first;
            while (accept_op("=")) {
                check_target(last, "assign to");
                add(n, last);
                last = at_kw("yield") ? parse_yield() : parse_testlist_star_expr();
            }
            add(n, last);
            finish(n);
            return n;
        }
        NodeId n = make(NodeKind::ExprStmt, b);
        add(n, first);
        finish(n);
        return n;
    }

    void check_target(NodeId id, const char* what) {
        const Node& n = at_node(id);
        switch (n.kind) {
            case NodeKind::Name:
            case NodeKind::Attribute:
            case NodeKind::Subscript:
                return;
            case NodeKind::Starred:
                if (n.value == "*") return check_target(n.children[0], what);
                break;
            case NodeKind::Tuple:
            case NodeKind::List: {
                auto kids = n.children;
                for (NodeId c : kids) check_target(c, what);
                return;
            }
            default:
                break;
        }
        throw ParseError(std::string("cannot ") + what + " " + std::string(to_string(n.kind)),
                         lines_.line_of(n.range.begin), lines_.col_of(n.range.begin));
    }

    // -- compound statements ----------------------------------------------------
    NodeId parse_block(std::size_t header_line) {
        expect_op(":");
        NodeId blk = make(NodeKind::Block, cur().begin);
        if (at(TokenKind::newline)) {
            ++i_;
            if (!at(TokenKind::indent)) fail("expected an indented block");
            ++i_;
            at_node(blk).range.begin = cur().begin;
            while (!at(TokenKind::dedent) && !at(TokenKind::end_marker)) {
                parse_statement(blk);
            }
            if (at(TokenKind::dedent)) ++i_;
        } else {
            at_node(blk).flags |= kInlineSuite;
            parse_simple_statements(blk);
        }
        (void)header_line;
        const auto& ch = at_node(blk).children;
        at_node(blk).range.end = ch.empty() ? at_node(blk).range.begin : at_node(ch.back()).range.end;
        return blk;
    }

    void close_compound(NodeId n) {
        NodeId last = kNoNode;
        for (auto it = at_node(n).children.rbegin(); it != at_node(n).children.rend(); ++it) {
            if (*it != kNoNode) {
                last = *it;
                break;
            }
        }
        if (last != kNoNode) at_node(n).range.end = at_node(last).range.end;
    }

    NodeId parse_if(bool elif) {
        NodeId n = make(NodeKind::If, cur().begin);
        at_node(n).name_range = {cur().begin, cur().end};
        if (elif) at_node(n).flags |= kElif;
        ++i_;
        add(n, parse_namedexpr_test());
        add(n, parse_block(cur().line));
        if (at_kw("elif")) {
            add(n, parse_if(true));
        } else if (at_kw("else")) {
            ++i_;
            add(n, parse_block(cur().line));
        } else {
            add(n, kNoNode);
        }
        close_compound(n);
        return n;
    }

    NodeId parse_while() {
        NodeId n = simple(NodeKind::While);
        add(n, parse_namedexpr_test());
        add(n, parse_block(cur().line));
        add(n, accept_kw("else") ? parse_block(cur().line) : kNoNode);
        close_compound(n);
        return n;
    }

    NodeId parse_for(std::size_t begin, std::uint32_t flags) {
        NodeId n = make(NodeKind::For, begin);
        at_node(n).flags |= flags;
        at_node(n).name_range = {cur().begin, cur().end};
        expect_kw("for");
        NodeId target = parse_exprlist();
        check_target(target, "assign to");
        add(n, target);
        expect_kw("in");
        add(n, parse_testlist());
        add(n, parse_block(cur().line));
        add(n, accept_kw("else") ? parse_block(cur().line) : kNoNode);
        close_compound(n);
        return n;
    }

    NodeId parse_try() {
        NodeId n = simple(NodeKind::Try);
        add(n, parse_block(cur().line));
        NodeId handlers = make(NodeKind::Handlers, cur().begin);
        while (at_kw("except")) {
            NodeId h = simple(NodeKind::ExceptHandler);
            NodeId type = kNoNode;
            if (!at_op(":")) {
                type = parse_test();
                if (accept_kw("as")) {
                    at_node(h).alt = std::string(expect_name().text);
                } else if (at_op(",")) {
                    // `except A, B:` is a py2 form; treat the tuple form only when parenthesized.
                    fail("multiple exception types must be parenthesized");
                }
            }
            add(h, type);
            add(h, parse_block(cur().line));
            close_compound(h);
            add(handlers, h);
        }
        const auto& hs = at_node(handlers).children;
        if (!hs.empty()) {
            at_node(handlers).range = {at_node(hs.front()).range.begin, at_node(hs.back()).range.end};
        }
        add(n, handlers);
        NodeId orelse = kNoNode;
        if (at_kw("else")) {
            if (at_node(handlers).children.empty()) fail("else without except");
            ++i_;
            orelse = parse_block(cur().line);
        }
        add(n, orelse);
        NodeId fin = kNoNode;
        if (accept_kw("finally")) fin = parse_block(cur().line);
        add(n, fin);
        if (at_node(handlers).children.empty() && fin == kNoNode) fail("expected 'except' or 'finally' block");
        close_compound(n);
        return n;
    }

    NodeId parse_with(std::size_t begin, std::uint32_t flags) {
        NodeId n = make(NodeKind::With, begin);
        at_node(n).flags |= flags;
        at_node(n).name_range = {cur().begin, cur().end};
        expect_kw("with");
        bool parens = false;
        // Parenthesized with-items (3.9+): `with (a as b, c):`
        if (at_op("(")) {
            std::size_t save = i_;
            if (try_parenthesized_with_items(n)) {
                parens = true;
            } else {
                i_ = save;
                at_node(n).children.clear();
            }
        }
        if (!parens) {
            do {
                add(n, parse_with_item());
            } while (accept_op(","));
        }
        add(n, parse_block(cur().line));
        close_compound(n);
        return n;
    }

    bool try_parenthesized_with_items(NodeId n) {
        // Only commit if the matching ')' is followed directly by ':'
        int depth = 0;
        std::size_t j = i_;
        for (; j < toks_.size(); ++j) {
            if (toks_[j].is_op("(") || toks_[j].is_op("[") || toks_[j].is_op("{")) ++depth;
            if (toks_[j].is_op(")") || toks_[j].is_op("]") || toks_[j].is_op("}")) {
                if (--depth == 0) break;
            }
        }
        if (j + 1 >= toks_.size() || !toks_[j + 1].is_op(":")) return false;
        bool has_as = false;
        depth = 0;
        for (std::size_t k = i_; k < j; ++k) {
            if (toks_[k].is_op("(") || toks_[k].is_op("[") || toks_[k].is_op("{")) ++depth;
            if (toks_[k].is_op(")") || toks_[k].is_op("]") || toks_[k].is_op("}")) --depth;
            if (depth == 1 && toks_[k].is_name("as")) has_as = true;
        }
        if (!has_as) return false;
        ++i_;
        do {
            if (at_op(")")) break;
            add(n, parse_with_item());
        } while (accept_op(","));
        expect_op(")");
        return true;
    }

    NodeId parse_with_item() {
        NodeId item = make(NodeKind::WithItem, cur().begin);
        add(item, parse_test());
        NodeId target = kNoNode;
        if (accept_kw("as")) {
            target = parse_expr();
            check_target(target, "assign to");
        }
        add(item, target);
        finish(item);
        return item;
    }

    NodeId make_decorators(std::size_t begin) {
        NodeId d = make(NodeKind::Decorators, begin);
        return d;
    }

    NodeId parse_decorated() {
        std::size_t b = cur().begin;
        NodeId decs = make_decorators(b);
        while (accept_op("@")) {
            add(decs, parse_namedexpr_test());
            if (!at(TokenKind::newline)) fail("expected newline after decorator");
            ++i_;
        }
        finish(decs);
        if (at_kw("def")) return parse_funcdef(b, decs, 0);
        if (at_kw("class")) return parse_classdef(decs);
        if (at_kw("async") && peek().is_name("def")) {
            ++i_;
            return parse_funcdef(b, decs, kAsync);
        }
        fail("expected function or class after decorator");
    }

    NodeId parse_funcdef(std::size_t begin, NodeId decorators, std::uint32_t flags) {
        std::size_t def_begin = cur().begin;
        expect_kw("def");
        const Token& name = expect_name();
        NodeId n = make(NodeKind::FunctionDef, def_begin);
        (void)begin;
        at_node(n).flags |= flags;
        at_node(n).value = std::string(name.text);
        at_node(n).name_range = {name.begin, name.end};
        add(n, decorators);
        expect_op("(");
        add(n, parse_parameters(")", true));
        expect_op(")");
        add(n, accept_op("->") ? parse_test() : kNoNode);
        add(n, parse_block(cur().line));
        close_compound(n);
        return n;
    }

    NodeId parse_classdef(NodeId decorators) {
        NodeId n = simple(NodeKind::ClassDef);
        const Token& name = expect_name();
        at_node(n).value = std::string(name.text);
        at_node(n).name_range = {name.begin, name.end};
        add(n, decorators);
        NodeId bases = kNoNode;
        if (at_op("(")) {
            bases = make(NodeKind::Arguments, cur().begin);
            ++i_;
            parse_arglist(bases);
            expect_op(")");
            finish(bases);
        }
        add(n, bases);
        add(n, parse_block(cur().line));
        close_compound(n);
        return n;
    }

    NodeId parse_parameters(std::string_view closer, bool annotations) {
        NodeId ps = make(NodeKind::Parameters, cur().begin);
        bool seen_star = false;
        while (!at_op(closer)) {
            std::size_t b = cur().begin;
            NodeId p = make(NodeKind::Param, b);
            ParamKind kind = seen_star ? ParamKind::keyword_only : ParamKind::positional;
            if (accept_op("/")) {
                kind = ParamKind::positional_only_marker;
            } else if (accept_op("**")) {
                kind = ParamKind::var_kwargs;
            } else if (accept_op("*")) {
                seen_star = true;
                kind = (at_op(",") || at_op(closer)) ? ParamKind::kw_only_marker : ParamKind::var_args;
            }
            NodeId annotation = kNoNode;
            NodeId def = kNoNode;
            if (kind != ParamKind::positional_only_marker && kind != ParamKind::kw_only_marker) {
                const Token& nm = expect_name();
                at_node(p).value = std::string(nm.text);
                at_node(p).name_range = {nm.begin, nm.end};
                if (annotations && accept_op(":")) annotation = parse_test();
                if (kind != ParamKind::var_args && kind != ParamKind::var_kwargs && accept_op("=")) {
                    def = parse_test();
                }
            }
            at_node(p).flags = static_cast<std::uint32_t>(kind);
            add(p, annotation);
            add(p, def);
            finish(p);
            add(ps, p);
            if (!accept_op(",")) break;
        }
        finish(ps);
        if (at_node(ps).children.empty()) at_node(ps).range.end = at_node(ps).range.begin;
        return ps;
    }

    // -- expressions ------------------------------------------------------------
    NodeId parse_testlist_star_expr() { return parse_sequence(true, true); }
    NodeId parse_testlist() { return parse_sequence(false, true); }
    NodeId parse_exprlist() { return parse_sequence(true, false); }

    bool at_sequence_end() const {
        if (at_statement_end()) return true;
        static constexpr std::array<std::string_view, 10> enders = {")", "]", "}", "=", ":", "+=", "-=", "in", ";", "."};
        for (auto e : enders) {
            if (at_op(e)) return true;
        }
        if (cur().kind == TokenKind::op) {
            auto t = cur().text;
            if (t.size() >= 2 && t.back() == '=' && t != "==" && t != "<=" && t != ">=" && t != "!=") return true;
        }
        return at_kw("in") || at_kw("for") || at_kw("if");
    }

    // Comma-separated list; a single item without trailing comma is returned bare.
    NodeId parse_sequence(bool allow_star, bool full_test) {
        std::size_t b = cur().begin;
        auto item = [&]() -> NodeId {
            if (allow_star && at_op("*")) return parse_star_expr();
            return full_test ? parse_test() : parse_expr();
        };
        NodeId first = item();
        if (!at_op(",")) return first;
        NodeId tup = make(NodeKind::Tuple, b);
        add(tup, first);
        while (accept_op(",")) {
            if (at_sequence_end()) break;
            add(tup, item());
        }
        finish(tup);
        return tup;
    }

    NodeId parse_star_expr() {
        NodeId n = make(NodeKind::Starred, cur().begin);
        at_node(n).value = "*";
        expect_op("*");
        add(n, parse_expr());
        finish(n);
        return n;
    }

    NodeId parse_namedexpr_test() {
        if (at(TokenKind::name) && !is_keyword(cur().text) && peek().is_op(":=")) {
            std::size_t b = cur().begin;
            NodeId target = parse_atom_name();
            ++i_;
            NodeId n = make(NodeKind::NamedExpr, b);
            add(n, target);
            add(n, parse_test());
            finish(n);
            return n;
        }
        return parse_test();
    }

    NodeId parse_test() {
        if (at_kw("lambda")) return parse_lambda(false);
        std::size_t b = cur().begin;
        NodeId body = parse_or_test();
        if (at_kw("if")) {
            // Conditional expression; `else` is mandatory.
            std::size_t save = i_;
            ++i_;
            NodeId test = parse_or_test();
            if (!at_kw("else")) {
                i_ = save;
                fail("expected 'else' after 'if' expression");
            }
            ++i_;
            NodeId orelse = parse_test();
            NodeId n = make(NodeKind::IfExp, b);
            add(n, body);
            add(n, test);
            add(n, orelse);
            finish(n);
            return n;
        }
        return body;
    }

    NodeId parse_test_nocond() {
        if (at_kw("lambda")) return parse_lambda(true);
        return parse_or_test();
    }

    NodeId parse_lambda(bool nocond) {
        NodeId n = simple(NodeKind::Lambda);
        add(n, parse_parameters(":", false));
        expect_op(":");
        add(n, nocond ? parse_test_nocond() : parse_test());
        finish(n);
        return n;
    }

    NodeId parse_boolop(std::string_view kw, NodeId (Parser::*next)()) {
        std::size_t b = cur().begin;
        NodeId first = (this->*next)();
        if (!at_kw(kw)) return first;
        NodeId n = make(NodeKind::BoolOp, b);
        at_node(n).value = std::string(kw);
        add(n, first);
        while (at_kw(kw)) {
            at_node(n).op_ranges.push_back({cur().begin, cur().end});
            ++i_;
            add(n, (this->*next)());
        }
        finish(n);
        return n;
    }

    NodeId parse_or_test() { return parse_boolop("or", &Parser::parse_and_test); }
    NodeId parse_and_test() { return parse_boolop("and", &Parser::parse_not_test); }

    NodeId parse_not_test() {
        if (at_kw("not")) {
            NodeId n = make(NodeKind::UnaryOp, cur().begin);
            at_node(n).value = "not";
            at_node(n).op_ranges.push_back({cur().begin, cur().end});
            ++i_;
            add(n, parse_not_test());
            finish(n);
            return n;
        }
        return parse_comparison();
    }

    bool at_comp_op(std::string& op, std::size_t& width) const {
        static constexpr std::array<std::string_view, 6> ops = {"<", ">", "==", ">=", "<=", "!="};
        for (auto o : ops) {
            if (at_op(o)) {
                op = std::string(o);
                width = 1;
                return true;
            }
        }
        if (at_kw("in")) {
            op = "in";
            width = 1;
            return true;
        }
        if (at_kw("not") && peek().is_name("in")) {
            op = "not in";
            width = 2;
            return true;
        }
        if (at_kw("is")) {
            if (peek().is_name("not")) {
                op = "is not";
                width = 2;
            } else {
                op = "is";
                width = 1;
            }
            return true;
        }
        return false;
    }

    NodeId parse_comparison() {
        std::size_t b = cur().begin;
        NodeId left = parse_expr();
        std::string op;
        std::size_t width = 0;
        if (!at_comp_op(op, width)) return left;
        NodeId n = make(NodeKind::Compare, b);
        add(n, left);
        while (at_comp_op(op, width)) {
            std::size_t ob = cur().begin;
            i_ += width;
            at_node(n).ops.push_back(op);
            at_node(n).op_ranges.push_back({ob, prev_end()});
            add(n, parse_expr());
        }
        finish(n);
        return n;
    }

    NodeId parse_binary(std::initializer_list<std::string_view> ops, NodeId (Parser::*next)()) {
        std::size_t b = cur().begin;
        NodeId left = (this->*next)();
        while (true) {
            std::string_view matched;
            for (auto o : ops) {
                if (at_op(o)) {
                    matched = o;
                    break;
                }
            }
            if (matched.empty()) return left;
            NodeId n = make(NodeKind::BinOp, b);
            at_node(n).value = std::string(matched);
            at_node(n).op_ranges.push_back({cur().begin, cur().end});
            ++i_;
            add(n, left);
            add(n, (this->*next)());
            finish(n);
            left = n;
        }
    }

    NodeId parse_expr() { return parse_binary({"|"}, &Parser::parse_xor); }
    NodeId parse_xor() { return parse_binary({"^"}, &Parser::parse_and); }
    NodeId parse_and() { return parse_binary({"&"}, &Parser::parse_shift); }
    NodeId parse_shift() { return parse_binary({"<<", ">>"}, &Parser::parse_arith); }
    NodeId parse_arith() { return parse_binary({"+", "-"}, &Parser::parse_term); }
    NodeId parse_term() { return parse_binary({"*", "@", "/", "%", "//"}, &Parser::parse_factor); }

    NodeId parse_factor() {
        if (at_op("+") || at_op("-") || at_op("~")) {
            NodeId n = make(NodeKind::UnaryOp, cur().begin);
            at_node(n).value = std::string(cur().text);
            at_node(n).op_ranges.push_back({cur().begin, cur().end});
            ++i_;
            add(n, parse_factor());
            finish(n);
            return n;
        }
        return parse_power();
    }

    NodeId parse_power() {
        std::size_t b = cur().begin;
        NodeId base = parse_await_primary();
        if (!at_op("**")) return base;
        NodeId n = make(NodeKind::BinOp, b);
        at_node(n).value = "**";
        at_node(n).op_ranges.push_back({cur().begin, cur().end});
        ++i_;
        add(n, base);
        add(n, parse_factor());
        finish(n);
        return n;
    }

    NodeId parse_await_primary() {
        if (at_kw("await")) {
            NodeId n = simple(NodeKind::Await);
            add(n, parse_primary());
            finish(n);
            return n;
        }
        return parse_primary();
    }

    NodeId parse_primary() {
        std::size_t b = cur().begin;
        NodeId node = parse_atom();
        while (true) {
            if (at_op("(")) {
                ++i_;
                NodeId call = make(NodeKind::Call, b);
                add(call, node);
                parse_arglist(call);
                expect_op(")");
                finish(call);
                node = call;
            } else if (at_op("[")) {
                ++i_;
                NodeId sub = make(NodeKind::Subscript, b);
                add(sub, node);
                add(sub, parse_subscript_list());
                expect_op("]");
                finish(sub);
                node = sub;
            } else if (at_op(".")) {
                ++i_;
                const Token& nm = expect_name();
                NodeId attr = make(NodeKind::Attribute, b);
                at_node(attr).value = std::string(nm.text);
                at_node(attr).name_range = {nm.begin, nm.end};
                add(attr, node);
                finish(attr);
                node = attr;
            } else {
                return node;
            }
        }
    }

    void parse_arglist(NodeId call) {
        bool first = true;
        while (!at_op(")")) {
            std::size_t b = cur().begin;
            if (at_op("*") || at_op("**")) {
                NodeId st = make(NodeKind::Starred, b);
                at_node(st).value = std::string(cur().text);
                ++i_;
                add(st, parse_test());
                finish(st);
                if (at_node(st).value == "**") {
                    NodeId kw = make(NodeKind::Keyword, b);
                    add(kw, at_node(st).children[0]);
                    finish(kw);
                    add(call, kw);
                } else {
                    add(call, st);
                }
            } else if (at(TokenKind::name) && !is_keyword(cur().text) && peek().is_op("=")) {
                const Token& nm = cur();
                NodeId kw = make(NodeKind::Keyword, b);
                at_node(kw).value = std::string(nm.text);
                at_node(kw).name_range = {nm.begin, nm.end};
                i_ += 2;
                add(kw, parse_test());
                finish(kw);
                add(call, kw);
            } else {
                NodeId arg = parse_namedexpr_test();
                if (at_kw("for") || at_kw("async")) {
                    // Bare generator argument: f(x for x in y)
                    NodeId gen = make(NodeKind::GeneratorExp, b);
                    add(gen, arg);
                    parse_comp_for(gen);
                    finish(gen);
                    arg = gen;
                    if (!first || !at_op(")")) {
                        if (!at_op(")")) fail("generator expression must be parenthesized");
                    }
                }
                add(call, arg);
            }
            first = false;
            if (!accept_op(",")) break;
        }
    }

    NodeId parse_subscript_list() {
        std::size_t b = cur().begin;
        NodeId first = parse_subscript();
        if (!at_op(",")) return first;
        NodeId tup = make(NodeKind::Tuple, b);
        add(tup, first);
        while (accept_op(",")) {
            if (at_op("]")) break;
            add(tup, parse_subscript());
        }
        finish(tup);
        return tup;
    }

    NodeId parse_subscript() {
        std::size_t b = cur().begin;
        NodeId lower = kNoNode;
        if (!at_op(":")) {
            lower = at_op("*") ? parse_star_expr() : parse_namedexpr_test();
            if (!at_op(":")) return lower;
        }
        NodeId sl = make(NodeKind::Slice, b);
        expect_op(":");
        NodeId upper = (at_op(":") || at_op("]") || at_op(",")) ? kNoNode : parse_test();
        NodeId step = kNoNode;
        if (accept_op(":")) step = (at_op("]") || at_op(",")) ? kNoNode : parse_test();
        add(sl, lower);
        add(sl, upper);
        add(sl, step);
        finish(sl);
        return sl;
    }

    NodeId parse_atom_name() {
        const Token& t = cur();
        NodeId n = make(NodeKind::Name, t.begin);
        at_node(n).value = std::string(t.text);
        at_node(n).name_range = {t.begin, t.end};
        ++i_;
        finish(n);
        return n;
    }

    NodeId constant(ConstKind k) {
        NodeId n = make(NodeKind::Constant, cur().begin);
        at_node(n).flags = static_cast<std::uint32_t>(k);
        ++i_;
        finish(n);
        at_node(n).value = std::string(src_.substr(at_node(n).range.begin, at_node(n).range.end - at_node(n).range.begin));
        return n;
    }

    NodeId parse_atom() {
        const Token& t = cur();
        switch (t.kind) {
            case TokenKind::number:
                return constant(ConstKind::number);
            case TokenKind::string: {
                NodeId n = make(NodeKind::Constant, t.begin);
                at_node(n).flags = static_cast<std::uint32_t>(ConstKind::string);
                while (at(TokenKind::string)) ++i_;
                finish(n);
                at_node(n).value =
                    std::string(src_.substr(at_node(n).range.begin, at_node(n).range.end - at_node(n).range.begin));
                return n;
            }
            case TokenKind::name: {
                if (t.text == "True") return constant(ConstKind::true_);
                if (t.text == "False") return constant(ConstKind::false_);
                if (t.text == "None") return constant(ConstKind::none);
                if (t.text == "yield") fail("'yield' must be parenthesized here");
                if (is_keyword(t.text)) fail("invalid syntax");
                return parse_atom_name();
            }
            case TokenKind::op: {
                if (t.text == "...") return constant(ConstKind::ellipsis);
                if (t.text == "(") return parse_paren();
                if (t.text == "[") return parse_list();
                if (t.text == "{") return parse_brace();
                break;
            }
            default:
                break;
        }
        fail("invalid syntax");
    }

    NodeId parse_yield() {
        std::size_t b = cur().begin;
        expect_kw("yield");
        if (accept_kw("from")) {
            NodeId n = make(NodeKind::YieldFrom, b);
            add(n, parse_test());
            finish(n);
            return n;
        }
        NodeId n = make(NodeKind::Yield, b);
        bool empty = at_statement_end() || at_op(")") || at_op("]") || at_op("}") || at_op("=");
        add(n, empty ? kNoNode : parse_testlist_star_expr());
        finish(n);
        return n;
    }

    NodeId wrap_parens(NodeId inner, std::size_t open, std::size_t close_end) {
        Node& n = at_node(inner);
        n.range = {open, close_end};
        n.paren_depth += 1;
        return inner;
    }

    NodeId parse_paren() {
        std::size_t open = cur().begin;
        ++i_;
        if (at_op(")")) {
            NodeId tup = make(NodeKind::Tuple, open);
            ++i_;
            finish(tup);
            at_node(tup).flags |= kTupleParens;
            return tup;
        }
        if (at_kw("yield")) {
            NodeId y = parse_yield();
            expect_op(")");
            return wrap_parens(y, open, prev_end());
        }
        std::size_t b = cur().begin;
        NodeId first = at_op("*") ? parse_star_expr() : parse_namedexpr_test();
        if (at_kw("for") || at_kw("async")) {
            NodeId gen = make(NodeKind::GeneratorExp, open);
            add(gen, first);
            parse_comp_for(gen);
            expect_op(")");
            finish(gen);
            return gen;
        }
        if (at_op(",")) {
            NodeId tup = make(NodeKind::Tuple, b);
            add(tup, first);
            while (accept_op(",")) {
                if (at_op(")")) break;
                add(tup, at_op("*") ? parse_star_expr() : parse_namedexpr_test());
            }
            expect_op(")");
            at_node(tup).range = {open, prev_end()};
            at_node(tup).flags |= kTupleParens;
            return tup;
        }
        expect_op(")");
        return wrap_parens(first, open, prev_end());
    }

    NodeId parse_list() {
        std::size_t open = cur().begin;
        ++i_;
        NodeId lst = make(NodeKind::List, open);
        if (accept_op("]")) {
            finish(lst);
            return lst;
        }
        NodeId first = at_op("*") ? parse_star_expr() : parse_namedexpr_test();
        if (at_kw("for") || at_kw("async")) {
            at_node(lst).kind = NodeKind::ListComp;
            add(lst, first);
            parse_comp_for(lst);
            expect_op("]");
            finish(lst);
            return lst;
        }
        add(lst, first);
        while (accept_op(",")) {
            if (at_op("]")) break;
            add(lst, at_op("*") ? parse_star_expr() : parse_namedexpr_test());
        }
        expect_op("]");
        finish(lst);
        return lst;
    }

    NodeId parse_brace() {
        std::size_t open = cur().begin;
        ++i_;
        if (accept_op("}")) {
            NodeId d = make(NodeKind::Dict, open);
            finish(d);
            return d;
        }
        auto dict_entry = [&](NodeId d) {
            if (accept_op("**")) {
                add(d, kNoNode);
                add(d, parse_expr());
                return;
            }
            add(d, parse_test());
            expect_op(":");
            add(d, parse_test());
        };
        if (at_op("**")) {
            NodeId d = make(NodeKind::Dict, open);
            dict_entry(d);
            while (accept_op(",")) {
                if (at_op("}")) break;
                dict_entry(d);
            }
            expect_op("}");
            finish(d);
            return d;
        }
        NodeId first = at_op("*") ? parse_star_expr() : parse_namedexpr_test();
        if (accept_op(":")) {
            NodeId value = parse_test();
            if (at_kw("for") || at_kw("async")) {
                NodeId dc = make(NodeKind::DictComp, open);
                add(dc, first);
                add(dc, value);
                parse_comp_for(dc);
                expect_op("}");
                finish(dc);
                return dc;
            }
            NodeId d = make(NodeKind::Dict, open);
            add(d, first);
            add(d, value);
            while (accept_op(",")) {
                if (at_op("}")) break;
                dict_entry(d);
            }
            expect_op("}");
            finish(d);
            return d;
        }
        if (at_kw("for") || at_kw("async")) {
            NodeId sc = make(NodeKind::SetComp, open);
            add(sc, first);
            parse_comp_for(sc);
            expect_op("}");
            finish(sc);
            return sc;
        }
        NodeId s = make(NodeKind::Set, open);
        add(s, first);
        while (accept_op(",")) {
            if (at_op("}")) break;
            add(s, at_op("*") ? parse_star_expr() : parse_namedexpr_test());
        }
        expect_op("}");
        finish(s);
        return s;
    }

    void parse_comp_for(NodeId owner) {
        while (at_kw("for") || (at_kw("async") && peek().is_name("for"))) {
            NodeId c = make(NodeKind::Comprehension, cur().begin);
            if (accept_kw("async")) at_node(c).flags |= kAsync;
            expect_kw("for");
            NodeId target = parse_exprlist();
            check_target(target, "assign to");
            add(c, target);
            expect_kw("in");
            add(c, parse_or_test());
            while (at_kw("if")) {
                ++i_;
                add(c, parse_test_nocond());
            }
            finish(c);
            add(owner, c);
        }
    }

    std::string_view src_;
    LineIndex lines_;
    std::vector<Token> toks_;
    std::size_t i_ = 0;
    std::vector<Node> nodes_;
};

}  // namespace

Tree parse(std::string source) {
    auto owned = std::make_unique<std::string>(std::move(source));
    std::vector<Token> tokens = tokenize(*owned);
    Parser p(*owned, tokens);
    NodeId root = p.parse_module();
    auto nodes = p.take_nodes();
    return Tree(std::move(owned), std::move(tokens), std::move(nodes), root);
}

bool parses(std::string_view source) noexcept {
    try {
        (void)parse(std::string(source));
        return true;
    } catch (const Error&) {
        return false;
    } catch (...) {
        return false;
    }
}

}  // namespace psc::python
