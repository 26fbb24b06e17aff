#pragma once

#include <stdexcept>
#include <string>

#include "easytime/ast.hpp"

namespace easytime {

/// Canonical source text. Agents, declarations and measuring places are
/// separated by blank lines; statements are indented two spaces.
/// Throws std::invalid_argument for trees the grammar cannot derive
/// (a Seq under a guard, or a left-nested Seq).
std::string pretty_print(const Program& program);

std::string print_aexpr(const AExpr& a);
std::string print_bexpr(const BExpr& b);
/// One statement per line, each terminated by `;`, no indentation.
std::string print_stmt(const Stmt& s);

}  // namespace easytime
