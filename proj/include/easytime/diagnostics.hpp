#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace easytime {

/// 1-based source range; end is one past the last character.
struct SourceSpan {
  int line = 0;
  int column = 0;
  int endLine = 0;
  int endColumn = 0;
};

enum class Severity { Error, Warning };

/// Stable diagnostic codes. Tests and tooling match on these, not on message text.
namespace diag {
inline constexpr std::string_view kLexError = "L001";
inline constexpr std::string_view kSyntaxError = "P001";
inline constexpr std::string_view kBadNumber = "P002";
inline constexpr std::string_view kUndeclaredVariable = "E001";
inline constexpr std::string_view kDuplicateVariable = "E002";
inline constexpr std::string_view kDuplicateAgent = "E003";
inline constexpr std::string_view kUnknownAgent = "E004";
inline constexpr std::string_view kDuplicateMeasuringPlace = "E005";
}  // namespace diag

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  SourceSpan span;
  /// Token classes the parser would have accepted; empty for non-syntax diagnostics.
  std::vector<std::string> expected;
};

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// `file:line:col: error[E001]: message`
std::string format_diagnostic(const Diagnostic& d, std::string_view file = "<input>");

}  // namespace easytime
