#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "psc/python/lexer.hpp"

namespace psc::python {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

// Child layout per kind ("?" marks a slot that may hold kNoNode):
//   Module            stmts...
//   Block             stmts...                      (indented or inline suite)
//   FunctionDef       [Decorators, Parameters, returns?, Block]   value = name
//   ClassDef          [Decorators, bases?(Arguments), Block]       value = name
//   Decorators        exprs...
//   Parameters        Param...
//   Param             [annotation?, default?]       value = name, flags = ParamKind
//   Arguments         call arguments...             (class bases)
//   Return            [value?]
//   Assign            targets..., value             (value is the last child)
//   AugAssign         [target, value]               value = operator ("+=")
//   AnnAssign         [target, annotation, value?]
//   ExprStmt          [expr]
//   Raise             [exc?, cause?]
//   Global/Nonlocal   Name...
//   Del               targets...
//   Assert            [test, msg?]
//   Import            Alias...
//   ImportFrom        Alias...                      value = module (leading dots kept)
//   Alias             value = dotted name, alt = asname
//   If                [test, Block, orelse?]        orelse is an If (flags=kElif) or a Block
//   While             [test, Block, else?]
//   For               [target, iter, Block, else?]
//   Try               [Block, Handlers, else?, finally?]
//   Handlers          ExceptHandler...
//   ExceptHandler     [type?, Block]                alt = bound name
//   With              WithItem..., Block
//   WithItem          [context, target?]
//   BinOp             [left, right]                 value = operator
//   UnaryOp           [operand]                     value = operator
//   BoolOp            operands...                   value = "and"/"or"
//   Compare           [left, comparators...]        ops / op_ranges per comparator
//   Call              [func, args...]               args are exprs, Starred or Keyword
//   Keyword           [value]                       value = name ("" for **)
//   Attribute         [object]                      value = attribute name
//   Subscript         [object, index]
//   Slice             [lower?, upper?, step?]
//   Tuple/List/Set    elts...
//   Dict              key?, value, key?, value ...  (kNoNode key marks **mapping)
//   ListComp/SetComp/GeneratorExp  [elt, Comprehension...]
//   DictComp          [key, value, Comprehension...]
//   Comprehension     [target, iter, ifs...]
//   IfExp             [body, test, orelse]
//   Lambda            [Parameters, body]
//   Starred           [value]                       value = "*" or "**"
//   NamedExpr         [target, value]
//   Await/YieldFrom   [value]
//   Yield             [value?]
//   Name              value = identifier
//   Constant          value = literal source text, flags = ConstKind
enum class NodeKind : std::uint8_t {
    Module, Block, FunctionDef, ClassDef, Decorators, Parameters, Param, Arguments,
    Return, Assign, AugAssign, AnnAssign, ExprStmt, Pass, Break, Continue, Raise,
    Global, Nonlocal, Del, Assert, Import, ImportFrom, Alias,
    If, While, For, Try, Handlers, ExceptHandler, With, WithItem,
    BinOp, UnaryOp, BoolOp, Compare, Call, Keyword, Attribute, Subscript, Slice,
    Tuple, List, Set, Dict, ListComp, SetComp, DictComp, GeneratorExp, Comprehension,
    IfExp, Lambda, Starred, NamedExpr, Await, Yield, YieldFrom, Name, Constant,
};

std::string_view to_string(NodeKind k) noexcept;

enum class ParamKind : std::uint8_t { positional, positional_only_marker, var_args, kw_only_marker, keyword_only, var_kwargs };
enum class ConstKind : std::uint8_t { number, string, true_, false_, none, ellipsis };

struct ByteRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool contains(const ByteRange& o) const noexcept { return begin <= o.begin && o.end <= end; }
    bool overlaps(const ByteRange& o) const noexcept { return begin < o.end && o.begin < end; }
    friend bool operator==(const ByteRange&, const ByteRange&) = default;
};

struct Node {
    NodeKind kind{};
    ByteRange range;       // includes enclosing parentheses of parenthesized expressions
    ByteRange name_range;  // identifier of defs/params/aliases/attributes, keyword of statements
    std::string value;
    std::string alt;
    std::uint32_t flags = 0;
    int paren_depth = 0;
    NodeId parent = kNoNode;
    std::vector<NodeId> children;
    std::vector<std::string> ops;       // Compare only
    std::vector<ByteRange> op_ranges;   // Compare and BinOp/BoolOp operators
};

inline constexpr std::uint32_t kElif = 1u << 0;
inline constexpr std::uint32_t kAsync = 1u << 1;
inline constexpr std::uint32_t kInlineSuite = 1u << 2;  // Block on the header's line
inline constexpr std::uint32_t kTupleParens = 1u << 3;
inline constexpr std::uint32_t kStarImport = 1u << 4;

/// Concrete syntax tree: an arena of nodes plus the token stream and source
/// they were built from. Node byte ranges index into `source()`.
class Tree {
public:
    Tree(std::unique_ptr<std::string> source, std::vector<Token> tokens, std::vector<Node> nodes, NodeId root);
    Tree(const Tree&) = delete;
    Tree& operator=(const Tree&) = delete;
    Tree(Tree&&) = default;
    Tree& operator=(Tree&&) = default;

    const std::string& source() const noexcept { return *source_; }
    const std::vector<Token>& tokens() const noexcept { return tokens_; }
    const LineIndex& lines() const noexcept { return lines_; }
    NodeId root() const noexcept { return root_; }
    const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
    std::size_t node_count() const noexcept { return nodes_.size(); }

    std::string_view text(const ByteRange& r) const {
        return std::string_view(*source_).substr(r.begin, r.end - r.begin);
    }
    std::string_view text(NodeId id) const { return text(node(id).range); }

    int line(NodeId id) const { return lines_.line_of(node(id).range.begin); }
    int col(NodeId id) const { return lines_.col_of(node(id).range.begin); }

    /// Statement nodes are the children of Module and Block.
    bool is_statement(NodeId id) const;
    /// Nearest enclosing FunctionDef/Lambda/ClassDef/Module.
    NodeId enclosing_scope(NodeId id) const;

    /// Pre-order traversal; returning false from the visitor skips a subtree.
    void walk(NodeId from, const std::function<bool(NodeId)>& visit) const;
    int height(NodeId from) const;

private:
    std::unique_ptr<std::string> source_;  // stable address for token views
    std::vector<Token> tokens_;
    std::vector<Node> nodes_;
    NodeId root_;
    LineIndex lines_;
};

}  // namespace psc::python
