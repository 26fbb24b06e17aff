#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace easytime {

class StoreError : public std::runtime_error {
 public:
  enum class Kind { DuplicateRunnerId, DuplicateRfid, UnknownColumn, UnknownRow, Io, Format };

  StoreError(Kind kind, const std::string& what, int line = 0)
      : std::runtime_error(what), kind_(kind), line_(line) {}

  Kind kind() const { return kind_; }
  /// 1-based line for Format errors, 0 otherwise.
  int line() const { return line_; }

 private:
  Kind kind_;
  int line_;
};

struct Runner {
  std::int64_t id = 0;
  /// Tag number; unique and unrelated to the starting number. May be empty.
  std::string rfid;
  std::string lastName;
  std::string firstName;

  bool operator==(const Runner&) const = default;
};

/// Competitor registry with lookups by starting number and by RFID tag.
class RunnerRegistry {
 public:
  RunnerRegistry() = default;
  /// Throws StoreError on duplicate ids or duplicate non-empty tags.
  explicit RunnerRegistry(std::vector<Runner> runners);

  const std::vector<Runner>& runners() const { return runners_; }
  const Runner* by_id(std::int64_t id) const;
  const Runner* by_rfid(std::string_view tag) const;
  std::size_t size() const { return runners_.size(); }

 private:
  std::vector<Runner> runners_;
  std::unordered_map<std::int64_t, std::size_t> byId_;
  std::unordered_map<std::string, std::size_t> byRfid_;
};

/// One row per competitor: Id plus one integer cell per declared variable.
class ResultsDatabase {
 public:
  struct Row {
    std::int64_t id = 0;
    std::vector<std::int64_t> cells;

    bool operator==(const Row&) const = default;
  };

  ResultsDatabase() = default;
  explicit ResultsDatabase(std::vector<std::string> variables);

  const std::vector<std::string>& variables() const { return variables_; }
  /// "Id" followed by the variables.
  std::vector<std::string> columns() const;
  std::optional<std::size_t> column_index(std::string_view var) const;
  bool has_column(std::string_view var) const { return column_index(var).has_value(); }

  /// Throws StoreError(DuplicateRunnerId) if the id exists, or Format if the
  /// cell count does not match the variables.
  void insert_row(std::int64_t id, std::vector<std::int64_t> cells);

  const std::vector<Row>& rows() const { return rows_; }
  const Row* find_row(std::int64_t id) const;
  Row* find_row(std::int64_t id);

  /// select var from db where Id = id
  std::optional<std::int64_t> get(std::int64_t id, std::string_view var) const;
  /// update db set var = value where Id = id; throws StoreError on a missing row or column.
  void set(std::int64_t id, std::string_view var, std::int64_t value);

  bool operator==(const ResultsDatabase& other) const {
    return variables_ == other.variables_ && rows_ == other.rows_;
  }

 private:
  std::vector<std::string> variables_;
  std::vector<Row> rows_;
  std::unordered_map<std::int64_t, std::size_t> index_;
};

}  // namespace easytime
