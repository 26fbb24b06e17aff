#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace easytime::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCompile = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

struct CliConfig {
  std::filesystem::path dataDir = "data";
  /// Port 0 binds an ephemeral port; the listening line reports it.
  std::optional<std::uint16_t> tcpPort;
  std::optional<std::uint16_t> httpPort;
  /// -1 quiet, 0 warnings and skipped events, 1 every event.
  int verbosity = 0;
  bool porcelain = false;
};

/// Entry point for the `easytime` command. The data directory defaults to
/// $EASYTIME_DATA_DIR, then ./data.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace easytime::cli
