#include "easytime/code_text.hpp"

#include <cctype>
#include <charconv>
#include <set>

namespace easytime {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string render(const Instr& i) {
  return std::visit(overloaded{
                        [](const op::Push& p) { return "PUSH " + std::to_string(p.value); },
                        [](const op::True&) -> std::string { return "TRUE"; },
                        [](const op::False&) -> std::string { return "FALSE"; },
                        [](const op::Eq&) -> std::string { return "EQ"; },
                        [](const op::Neq&) -> std::string { return "NEQ"; },
                        [](const op::Dec&) -> std::string { return "DEC"; },
                        [](const op::Wait&) -> std::string { return "WAIT i"; },
                        [](const op::Fetch& f) { return "FETCH " + f.var; },
                        [](const op::FetchSrc& f) { return "FETCH " + to_string(f.source); },
                        [](const op::Store& s) { return "STORE " + s.var; },
                        [](const op::Noop&) -> std::string { return "NOOP"; },
                        [](const op::Branch& b) {
                          return "BRANCH( " + serialize_instrs(b.thenCode) + ", " + serialize_instrs(b.elseCode) + ")";
                        },
                    },
                    i.op);
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
bool is_word_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class CodeParser {
 public:
  explicit CodeParser(std::string_view text) : s_(text) {}

  CompiledUnit unit() {
    CompiledUnit out;
    std::set<std::int64_t> ids;
    skip_ws();
    while (pos_ < s_.size()) {
      const std::size_t start = pos_;
      MpCode block = this->block();
      if (!ids.insert(block.mpId).second)
        throw CodeFormatError(start, "duplicate measuring place " + std::to_string(block.mpId));
      out.units.push_back(std::move(block));
      skip_ws();
    }
    return out;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw CodeFormatError(pos_, msg); }

  bool peek_char(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  void expect_char(char c) {
    if (!peek_char(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string word() {
    skip_ws();
    if (pos_ >= s_.size() || !is_word_start(s_[pos_])) fail("expected a name");
    const std::size_t start = pos_;
    while (pos_ < s_.size() && is_word_char(s_[pos_])) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  std::int64_t integer() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < s_.size() && s_[pos_] == '-') ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc{} || ptr != s_.data() + pos_) {
      pos_ = start;
      fail("expected an integer");
    }
    return v;
  }

  MpCode block() {
    expect_char('(');
    MpCode out;
    out.code = sequence();
    if (out.code.empty() || !std::holds_alternative<op::Wait>(out.code.front().op))
      fail("a measuring-place block must start with WAIT i");
    expect_char(',');
    out.mpId = integer();
    expect_char(')');
    return out;
  }

  // Instructions up to (not including) ',' or ')'.
  InstrSeq sequence() {
    InstrSeq out;
    while (!peek_char(',') && !peek_char(')')) {
      if (pos_ >= s_.size()) fail("unexpected end of code text");
      out.push_back(instr());
    }
    return out;
  }

  Instr instr() {
    const std::string w = word();
    if (w == "PUSH") return code::push(integer());
    if (w == "TRUE") return code::truth();
    if (w == "FALSE") return code::falsity();
    if (w == "EQ") return code::eq();
    if (w == "NEQ") return code::neq();
    if (w == "DEC") return code::dec();
    if (w == "NOOP") return code::noop();
    if (w == "WAIT") {
      if (word() != "i") fail("expected 'i' after WAIT");
      return code::wait();
    }
    if (w == "STORE") return code::store(word());
    if (w == "FETCH") {
      const std::string target = word();
      if (target == "accessfile" && peek_char('(')) {
        ++pos_;
        expect_char('"');
        const std::size_t start = pos_;
        while (pos_ < s_.size() && s_[pos_] != '"') ++pos_;
        if (pos_ >= s_.size()) fail("unterminated file name");
        std::string path(s_.substr(start, pos_ - start));
        ++pos_;
        expect_char(')');
        return code::accessfile(std::move(path));
      }
      if (target == "connect" && peek_char('(')) {
        ++pos_;
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && s_[pos_] != ')' && !is_space(s_[pos_])) ++pos_;
        std::string ip(s_.substr(start, pos_ - start));
        if (ip.empty()) fail("empty connect() address");
        expect_char(')');
        return code::connect(std::move(ip));
      }
      return code::fetch(target);
    }
    if (w == "BRANCH") {
      expect_char('(');
      InstrSeq thenCode = sequence();
      expect_char(',');
      InstrSeq elseCode = sequence();
      expect_char(')');
      return code::branch(std::move(thenCode), std::move(elseCode));
    }
    pos_ -= w.size();
    fail("unknown instruction '" + w + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_instrs(const InstrSeq& code) {
  std::string out;
  for (const auto& i : code) {
    if (!out.empty()) out += ' ';
    out += render(i);
  }
  return out;
}

std::string serialize_block(const MpCode& block) {
  return "(" + serialize_instrs(block.code) + ", " + std::to_string(block.mpId) + ")";
}

std::string serialize_code(const CompiledUnit& unit) {
  std::string out;
  for (std::size_t i = 0; i < unit.units.size(); ++i) {
    if (i) out += "\n\n";
    out += serialize_block(unit.units[i]);
  }
  return out;
}

CompiledUnit parse_code(std::string_view text) { return CodeParser(text).unit(); }

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  bool pendingSpace = false;
  for (char c : text) {
    if (is_space(c)) {
      pendingSpace = !out.empty();
      continue;
    }
    if (pendingSpace) out += ' ';
    pendingSpace = false;
    out += c;
  }
  return out;
}

}  // namespace easytime
