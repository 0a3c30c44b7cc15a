#ifndef COOPALLOC_CLI_HPP
#define COOPALLOC_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace coopalloc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

inline constexpr std::uint64_t kDefaultSeed = 1;

struct Alloc {
  double per1 = 0.0;
  double per2 = 0.0;
  double target1 = 0.0;
  double target2 = 0.0;
  int k = 10;
  double per_floor = 0.0;
};

struct Run {
  std::optional<std::filesystem::path> trace_path;
};
struct SweepRelays {};
struct SweepRatio {};

struct Command {
  std::variant<Alloc, Run, SweepRelays, SweepRatio> action;
  std::optional<std::filesystem::path> config_path;
  std::optional<std::filesystem::path> out_path;  // standard output when absent
  std::optional<std::uint64_t> seed;              // overrides the config seed
  std::optional<unsigned> threads;
};

class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& message, std::string usage)
      : std::runtime_error(message), usage_(std::move(usage)) {}
  const std::string& usage() const { return usage_; }

 private:
  std::string usage_;
};

/// Help requests are reported as HelpRequested so callers can exit 0.
class HelpRequested : public std::runtime_error {
 public:
  explicit HelpRequested(std::string text) : std::runtime_error("help"), text_(std::move(text)) {}
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

/// args excludes the program name. Throws UsageError or HelpRequested.
Command parse_args(const std::vector<std::string>& args);

/// Writes the one-shot allocation report for `cmd`.
void cmd_alloc(const Alloc& cmd, std::ostream& out);

/// Full dispatch. Returns 0 on success, 1 on runtime or config errors and
/// 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coopalloc::cli

#endif  // COOPALLOC_CLI_HPP
