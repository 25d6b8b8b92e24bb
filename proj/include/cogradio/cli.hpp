#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cogradio {

enum class Subcommand { Solve, Sweep, ValidateCdf, ValidateFig2, AuditCollision };
enum class OutputFormat { Csv, Json };

struct CliInvocation {
  Subcommand subcommand = Subcommand::Solve;
  std::string config_path;
  std::string output_path;
  std::optional<std::uint64_t> seed_override;
  OutputFormat format = OutputFormat::Csv;  // defaults to json for a .json output path
};

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kPointFailed = 1;
inline constexpr int kUsage = 2;
inline constexpr int kIo = 3;
}  // namespace exit_code

/// Carries the process exit status for usage (2) and I/O (3) failures.
class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

/// Throws CliError. The config file must exist and be readable.
CliInvocation parse_args(int argc, const char* const* argv);

/// Runs the invocation and writes its output file. Diagnostics go to `log`.
int run(const CliInvocation& invocation, std::ostream& log);

/// parse_args + run with every failure mapped to its exit status.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cogradio
