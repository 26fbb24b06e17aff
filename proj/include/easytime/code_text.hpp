#pragma once

// Canonical text of compiled code, e.g.
//
//   (WAIT i FETCH accessfile("abc.res") STORE TRANS1, 2)
//
// one parenthesised block per measuring place, blocks separated by a blank
// line. This is the on-disk program (pgm.txt) format.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "easytime/instr.hpp"

namespace easytime {

class CodeFormatError : public std::runtime_error {
 public:
  CodeFormatError(std::size_t position, const std::string& message)
      : std::runtime_error("code text offset " + std::to_string(position) + ": " + message), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

std::string serialize_instrs(const InstrSeq& code);
std::string serialize_block(const MpCode& block);
std::string serialize_code(const CompiledUnit& unit);

/// Inverse of serialize_code; any whitespace layout is accepted.
CompiledUnit parse_code(std::string_view text);

/// Collapses whitespace runs to one space and trims both ends.
std::string normalize_whitespace(std::string_view text);

}  // namespace easytime
