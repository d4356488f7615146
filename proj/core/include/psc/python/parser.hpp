#pragma once

#include <string>
#include <string_view>

#include "psc/python/ast.hpp"

namespace psc::python {

/// Parses Python 3 source (statement grammar up to 3.10 without `match`) into a
/// lossless concrete syntax tree. Throws ParseError on invalid syntax.
Tree parse(std::string source);

/// True when `source` parses.
bool parses(std::string_view source) noexcept;

}  // namespace psc::python
