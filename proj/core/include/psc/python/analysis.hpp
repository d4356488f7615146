#pragma once

#include <set>
#include <string>
#include <vector>

#include "psc/python/ast.hpp"

namespace psc::python {

enum class NameContext { load, store, aug, del, declare };

/// How a Name node is used: read, bound, augmented, deleted or declared global/nonlocal.
NameContext name_context(const Tree& tree, NodeId name);

/// FunctionDef, Lambda, ClassDef, comprehensions and Module open a scope.
bool opens_scope(NodeKind k) noexcept;

/// Nearest scope-opening ancestor, including comprehensions.
NodeId scope_of(const Tree& tree, NodeId id);

/// A name bound directly in a function scope.
struct Binding {
    std::string name;
    NodeId node = kNoNode;  // Name, Param, Alias, ExceptHandler, FunctionDef or ClassDef
    enum class Via { assign, param, import, except, def, cls } via = Via::assign;
};

/// Bindings of `scope` in source order, not descending into nested scopes.
/// Names declared global or nonlocal in the scope are omitted.
std::vector<Binding> scope_bindings(const Tree& tree, NodeId scope);

/// Names declared `global` or `nonlocal` directly in `scope`.
std::set<std::string> declared_outer(const Tree& tree, NodeId scope);

/// Source text of each replacement-field expression in an f-string token.
std::vector<std::string> fstring_expressions(std::string_view token_text);

/// Names read (load or augmented) anywhere under `from`, nested scopes and
/// f-string replacement fields included.
std::multiset<std::string> loaded_names(const Tree& tree, NodeId from);

/// Every identifier spelled anywhere in the tree (names, attributes, params,
/// defs, aliases, keywords, handler targets).
std::set<std::string> identifiers(const Tree& tree);

/// Body block of a FunctionDef / ClassDef.
NodeId body_of(const Tree& tree, NodeId def);

/// Parameters of a FunctionDef or Lambda, in order, markers excluded.
std::vector<NodeId> params_of(const Tree& tree, NodeId def);

ParamKind param_kind(const Node& param) noexcept;
ConstKind const_kind(const Node& constant) noexcept;

/// Statement nodes in source order: children of Module/Block plus elif branches.
std::vector<NodeId> statements(const Tree& tree);

}  // namespace psc::python
