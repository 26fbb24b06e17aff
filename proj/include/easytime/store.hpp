#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "easytime/database.hpp"
#include "easytime/instr.hpp"
#include "easytime/semantics.hpp"

namespace easytime {

/// One row per runner, every variable cell set to its initial value.
ResultsDatabase create_db(const InitialState& state, std::span<const Runner> runners);

struct RankedResult {
  std::int64_t id = 0;
  std::string lastName;
  std::string firstName;
  /// Empty for DNF rows.
  std::optional<std::int64_t> sortKey;
  std::optional<int> rank;

  bool dnf() const { return !rank.has_value(); }
};

/// Ascending by `sortVar` with competition ranking for ties (1, 1, 3);
/// equal keys are ordered by Id. With `dnfWhenZero`, rows whose value is
/// still 0 are listed last without a rank.
std::vector<RankedResult> rank_results(const ResultsDatabase& db, const RunnerRegistry& runners,
                                       std::string_view sortVar, bool dnfWhenZero);

/// Report-time difference of two stored timestamps, e.g. "TRANS1-SWIM".
struct ColumnDiff {
  std::string minuend;
  std::string subtrahend;

  std::string label() const { return minuend + "-" + subtrahend; }
};

std::optional<ColumnDiff> parse_column_diff(std::string_view spec);
/// Empty if the row is missing, or (with `dnfWhenZero`) either operand is 0.
/// Throws StoreError(UnknownColumn) for unknown columns.
std::optional<std::int64_t> diff_value(const ResultsDatabase& db, std::int64_t id, const ColumnDiff& diff,
                                       bool dnfWhenZero);

// Flat-file persistence: UTF-8, LF, comma-separated, no quoting.

std::string format_runners_csv(std::span<const Runner> runners);
std::vector<Runner> parse_runners_csv(std::string_view text);
std::string format_results_csv(const ResultsDatabase& db);
ResultsDatabase parse_results_csv(std::string_view text);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames it into place.
void write_file(const std::filesystem::path& path, std::string_view contents);

void save_runners(const std::filesystem::path& path, std::span<const Runner> runners);
std::vector<Runner> load_runners(const std::filesystem::path& path);
void save_results(const std::filesystem::path& path, const ResultsDatabase& db);
ResultsDatabase load_results(const std::filesystem::path& path);
void save_code(const std::filesystem::path& path, const CompiledUnit& unit);
CompiledUnit load_code(const std::filesystem::path& path);

/// data/{runners.csv,results.csv,pgm.txt,archive/}
struct DataDir {
  std::filesystem::path root;

  std::filesystem::path runners() const { return root / "runners.csv"; }
  std::filesystem::path results() const { return root / "results.csv"; }
  std::filesystem::path pgm() const { return root / "pgm.txt"; }
  std::filesystem::path archive() const { return root / "archive"; }

  /// Creates root and archive/ if missing.
  void ensure() const;
};

}  // namespace easytime
