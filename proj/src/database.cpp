#include "easytime/database.hpp"

namespace easytime {

RunnerRegistry::RunnerRegistry(std::vector<Runner> runners) : runners_(std::move(runners)) {
  for (std::size_t i = 0; i < runners_.size(); ++i) {
    const auto& r = runners_[i];
    if (!byId_.emplace(r.id, i).second)
      throw StoreError(StoreError::Kind::DuplicateRunnerId, "duplicate runner id " + std::to_string(r.id));
    if (!r.rfid.empty() && !byRfid_.emplace(r.rfid, i).second)
      throw StoreError(StoreError::Kind::DuplicateRfid, "duplicate RFID tag " + r.rfid);
  }
}

const Runner* RunnerRegistry::by_id(std::int64_t id) const {
  auto it = byId_.find(id);
  return it == byId_.end() ? nullptr : &runners_[it->second];
}

const Runner* RunnerRegistry::by_rfid(std::string_view tag) const {
  auto it = byRfid_.find(std::string(tag));
  return it == byRfid_.end() ? nullptr : &runners_[it->second];
}

ResultsDatabase::ResultsDatabase(std::vector<std::string> variables) : variables_(std::move(variables)) {}

std::vector<std::string> ResultsDatabase::columns() const {
  std::vector<std::string> out{"Id"};
  out.insert(out.end(), variables_.begin(), variables_.end());
  return out;
}

std::optional<std::size_t> ResultsDatabase::column_index(std::string_view var) const {
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i] == var) return i;
  return std::nullopt;
}

void ResultsDatabase::insert_row(std::int64_t id, std::vector<std::int64_t> cells) {
  if (cells.size() != variables_.size())
    throw StoreError(StoreError::Kind::Format, "row " + std::to_string(id) + " has " + std::to_string(cells.size()) +
                                                  " cells, expected " + std::to_string(variables_.size()));
  if (!index_.emplace(id, rows_.size()).second)
    throw StoreError(StoreError::Kind::DuplicateRunnerId, "duplicate row id " + std::to_string(id));
  rows_.push_back(Row{id, std::move(cells)});
}

const ResultsDatabase::Row* ResultsDatabase::find_row(std::int64_t id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &rows_[it->second];
}

ResultsDatabase::Row* ResultsDatabase::find_row(std::int64_t id) {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &rows_[it->second];
}

std::optional<std::int64_t> ResultsDatabase::get(std::int64_t id, std::string_view var) const {
  const auto* row = find_row(id);
  const auto col = column_index(var);
  if (!row || !col) return std::nullopt;
  return row->cells[*col];
}

void ResultsDatabase::set(std::int64_t id, std::string_view var, std::int64_t value) {
  auto* row = find_row(id);
  if (!row) throw StoreError(StoreError::Kind::UnknownRow, "no row with Id=" + std::to_string(id));
  const auto col = column_index(var);
  if (!col) throw StoreError(StoreError::Kind::UnknownColumn, "unknown column " + std::string(var));
  row->cells[*col] = value;
}

}  // namespace easytime
