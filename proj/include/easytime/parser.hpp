#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "easytime/ast.hpp"
#include "easytime/diagnostics.hpp"

namespace easytime {

struct ParseResult {
  std::optional<Program> program;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program.has_value(); }
};

/// Recursive descent over the concrete grammar with one token of lookahead.
/// Recovers at `;` and `}` so several syntax errors are reported per run.
ParseResult parse(std::string_view source);

}  // namespace easytime
