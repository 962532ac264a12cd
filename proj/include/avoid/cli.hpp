#pragma once

// Command-line front end: one flat config per run, resolved from defaults, an
// optional config file and flags, executed into a JSON envelope (and CSV for
// the tabular commands).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace avoid::cli {

inline constexpr std::string_view kVersion = "1.0.0";

enum class ParamType { text, integer, real, flag };

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::text;
  nlohmann::json fallback;  // null when required
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<ParamSpec> params;
  bool tabular = false;  // emits CSV as well as JSON
};

const std::vector<CommandSpec>& commands();
const CommandSpec& command_spec(std::string_view name);

/// A fully resolved run: every parameter of the command present and typed.
struct RunConfig {
  std::string command;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;

  /// Flat document {"command", "seed", <params>}.
  nlohmann::json to_json() const;
  /// Accepts a flat config or an artifact envelope holding one under "config".
  static RunConfig from_json(const nlohmann::json& j);
};

/// Fills defaults, rejects unknown or missing parameters and coerces types.
RunConfig resolve(RunConfig config);

struct Artifact {
  /// {version, config, seed, wall_clock_s, result}; keys sorted.
  nlohmann::json document;
  /// Non-empty for tabular commands.
  std::string csv;
};

/// Executes a resolved config. `threads` caps workers and never changes output.
Artifact run(const RunConfig& config, int threads);

/// The envelope without its wall-clock field.
nlohmann::json payload(const nlohmann::json& document);

/// Writes through a temporary file in the target directory and renames it.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Thread count from AVOID_THREADS, or 1 when unset.
int default_threads();

/// Full command-line entry point; returns the process exit code (0 success,
/// 2 refused input, 1 internal error).
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace avoid::cli
