#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "ecgra/common.hpp"

namespace ecgra {

/// Environment for manifest expressions: problem dimensions, loop variables
/// and memory-region base addresses.
using ExprEnv = std::map<std::string, int64_t>;

/// Evaluate an integer expression: + - * / % (floor), unary -, parentheses,
/// and the functions min(a,b), max(a,b), ceil_div(a,b), lt(a,b) -> 0/1.
/// Unknown identifiers raise ParseError.
int64_t eval_expr(const std::string& text, const ExprEnv& env);

} // namespace ecgra
