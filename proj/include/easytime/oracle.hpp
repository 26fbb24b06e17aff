#pragma once

// Direct interpreter over the AST, independent of code generation and the VM.
// Used as the reference when checking compiled code.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "easytime/ast.hpp"
#include "easytime/semantics.hpp"

namespace easytime {

using OracleRow = std::map<std::string, std::int64_t>;

class MissingVariable : public std::runtime_error {
 public:
  explicit MissingVariable(const std::string& name)
      : std::runtime_error("oracle: variable not in row: " + name), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// dec x: x -= 1;  upd x: x = eventTime;  x := a;  guards apply the body iff true;
/// sequences run left then right.
OracleRow oracle_exec(const Stmt& stmt, const AgentTable& agents, std::int64_t agent, OracleRow row,
                      std::int64_t eventTime);

bool oracle_eval(const BExpr& b, const OracleRow& row);
std::int64_t oracle_eval(const AExpr& a, const OracleRow& row);

}  // namespace easytime
