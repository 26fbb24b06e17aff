#include "easytime/store.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "easytime/code_text.hpp"

namespace easytime {

namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto at = line.find(sep, start);
    if (at == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, at - start));
    start = at + 1;
  }
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = end + 1;
  }
  return out;
}

std::int64_t parse_int(std::string_view field, int line, const char* what) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size())
    throw StoreError(StoreError::Kind::Format, std::string(what) + ": not an integer: '" + std::string(field) + "'",
                     line);
  return v;
}

void check_field(std::string_view field, const char* what) {
  if (field.find_first_of(",\n\r") != std::string_view::npos)
    throw StoreError(StoreError::Kind::Format, std::string(what) + " may not contain commas or line breaks: '" +
                                                   std::string(field) + "'");
}

}  // namespace

ResultsDatabase create_db(const InitialState& state, std::span<const Runner> runners) {
  RunnerRegistry registry({runners.begin(), runners.end()});  // validates ids and tags
  ResultsDatabase db(state.names());
  std::vector<std::int64_t> initial;
  for (const auto& b : state.bindings()) initial.push_back(b.second);
  for (const auto& r : runners) db.insert_row(r.id, initial);
  return db;
}

std::vector<RankedResult> rank_results(const ResultsDatabase& db, const RunnerRegistry& runners,
                                       std::string_view sortVar, bool dnfWhenZero) {
  const auto col = db.column_index(sortVar);
  if (!col) throw StoreError(StoreError::Kind::UnknownColumn, "unknown column " + std::string(sortVar));

  std::vector<RankedResult> finishers;
  std::vector<RankedResult> dnf;
  for (const auto& row : db.rows()) {
    RankedResult r;
    r.id = row.id;
    if (const auto* runner = runners.by_id(row.id)) {
      r.lastName = runner->lastName;
      r.firstName = runner->firstName;
    }
    const auto value = row.cells[*col];
    if (dnfWhenZero && value == 0) {
      dnf.push_back(std::move(r));
    } else {
      r.sortKey = value;
      finishers.push_back(std::move(r));
    }
  }

  std::sort(finishers.begin(), finishers.end(), [](const RankedResult& a, const RankedResult& b) {
    return a.sortKey != b.sortKey ? *a.sortKey < *b.sortKey : a.id < b.id;
  });
  for (std::size_t i = 0; i < finishers.size(); ++i) {
    const bool tied = i > 0 && finishers[i].sortKey == finishers[i - 1].sortKey;
    finishers[i].rank = tied ? *finishers[i - 1].rank : static_cast<int>(i + 1);
  }
  std::sort(dnf.begin(), dnf.end(), [](const RankedResult& a, const RankedResult& b) { return a.id < b.id; });
  finishers.insert(finishers.end(), std::make_move_iterator(dnf.begin()), std::make_move_iterator(dnf.end()));
  return finishers;
}

std::optional<ColumnDiff> parse_column_diff(std::string_view spec) {
  const auto dash = spec.find('-');
  if (dash == std::string_view::npos || dash == 0 || dash + 1 >= spec.size()) return std::nullopt;
  if (spec.find('-', dash + 1) != std::string_view::npos) return std::nullopt;
  return ColumnDiff{std::string(spec.substr(0, dash)), std::string(spec.substr(dash + 1))};
}

std::optional<std::int64_t> diff_value(const ResultsDatabase& db, std::int64_t id, const ColumnDiff& diff,
                                       bool dnfWhenZero) {
  for (const auto* col : {&diff.minuend, &diff.subtrahend})
    if (!db.has_column(*col)) throw StoreError(StoreError::Kind::UnknownColumn, "unknown column " + *col);
  const auto a = db.get(id, diff.minuend);
  const auto b = db.get(id, diff.subtrahend);
  if (!a || !b) return std::nullopt;
  if (dnfWhenZero && (*a == 0 || *b == 0)) return std::nullopt;
  return *a - *b;
}

std::string format_runners_csv(std::span<const Runner> runners) {
  std::ostringstream out;
  out << "Id,RFID,LastName,FirstName\n";
  for (const auto& r : runners) {
    check_field(r.rfid, "RFID");
    check_field(r.lastName, "LastName");
    check_field(r.firstName, "FirstName");
    out << r.id << ',' << r.rfid << ',' << r.lastName << ',' << r.firstName << '\n';
  }
  return out.str();
}

std::vector<Runner> parse_runners_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != "Id,RFID,LastName,FirstName")
    throw StoreError(StoreError::Kind::Format, "runners file must start with header Id,RFID,LastName,FirstName", 1);
  std::vector<Runner> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const int lineNo = static_cast<int>(i + 1);
    if (lines[i].empty()) continue;
    const auto fields = split(lines[i], ',');
    if (fields.size() != 4)
      throw StoreError(StoreError::Kind::Format, "expected 4 fields, got " + std::to_string(fields.size()), lineNo);
    out.push_back(Runner{parse_int(fields[0], lineNo, "Id"), std::string(fields[1]), std::string(fields[2]),
                         std::string(fields[3])});
  }
  RunnerRegistry check(out);  // duplicate ids / tags
  return out;
}

std::string format_results_csv(const ResultsDatabase& db) {
  std::ostringstream out;
  const auto cols = db.columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& row : db.rows()) {
    out << row.id;
    for (auto v : row.cells) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

ResultsDatabase parse_results_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw StoreError(StoreError::Kind::Format, "results file is empty", 1);
  const auto header = split(lines[0], ',');
  if (header.empty() || header[0] != "Id")
    throw StoreError(StoreError::Kind::Format, "results header must start with Id", 1);
  std::vector<std::string> vars;
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (header[i].empty()) throw StoreError(StoreError::Kind::Format, "empty column name", 1);
    vars.emplace_back(header[i]);
  }
  ResultsDatabase db(vars);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const int lineNo = static_cast<int>(i + 1);
    if (lines[i].empty()) continue;
    const auto fields = split(lines[i], ',');
    if (fields.size() != header.size())
      throw StoreError(StoreError::Kind::Format,
                       "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()),
                       lineNo);
    std::vector<std::int64_t> cells;
    for (std::size_t f = 1; f < fields.size(); ++f) cells.push_back(parse_int(fields[f], lineNo, "cell"));
    try {
      db.insert_row(parse_int(fields[0], lineNo, "Id"), std::move(cells));
    } catch (const StoreError& e) {
      throw StoreError(e.kind(), e.what(), lineNo);
    }
  }
  return db;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError(StoreError::Kind::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw StoreError(StoreError::Kind::Io, "read failed: " + path.string());
  return buf.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError(StoreError::Kind::Io, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw StoreError(StoreError::Kind::Io, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw StoreError(StoreError::Kind::Io, "cannot replace " + path.string() + ": " + ec.message());
}

void save_runners(const fs::path& path, std::span<const Runner> runners) {
  write_file(path, format_runners_csv(runners));
}

std::vector<Runner> load_runners(const fs::path& path) { return parse_runners_csv(read_file(path)); }

void save_results(const fs::path& path, const ResultsDatabase& db) { write_file(path, format_results_csv(db)); }

ResultsDatabase load_results(const fs::path& path) { return parse_results_csv(read_file(path)); }

void save_code(const fs::path& path, const CompiledUnit& unit) { write_file(path, serialize_code(unit) + "\n"); }

CompiledUnit load_code(const fs::path& path) {
  const auto text = read_file(path);
  try {
    return parse_code(text);
  } catch (const CodeFormatError& e) {
    throw StoreError(StoreError::Kind::Format, path.string() + ": " + e.what());
  }
}

void DataDir::ensure() const {
  std::error_code ec;
  fs::create_directories(archive(), ec);
  if (ec) throw StoreError(StoreError::Kind::Io, "cannot create " + archive().string() + ": " + ec.message());
}

}  // namespace easytime
