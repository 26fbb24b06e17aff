#include "easytime/diagnostics.hpp"

#include <algorithm>
#include <sstream>

namespace easytime {

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string format_diagnostic(const Diagnostic& d, std::string_view file) {
  std::ostringstream out;
  out << file << ':' << d.span.line << ':' << d.span.column << ": "
      << (d.severity == Severity::Error ? "error" : "warning") << '[' << d.code << "]: " << d.message;
  return out.str();
}

}  // namespace easytime
