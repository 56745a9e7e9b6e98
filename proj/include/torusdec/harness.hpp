#ifndef TORUSDEC_HARNESS_HPP_
#define TORUSDEC_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "torusdec/error.hpp"
#include "torusdec/io.hpp"

namespace torusdec::harness {

// Exit codes: 0 success, 2 validation, 3 hypothesis failed, 4 extraction
// failed, 5 internal assertion.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitHypothesis = 3;
inline constexpr int kExitExtraction = 4;
inline constexpr int kExitInternal = 5;

// A configuration problem tied to one key.
class ConfigError : public InvalidInput {
 public:
  ConfigError(std::string key, const std::string& message)
      : InvalidInput("config key '" + key + "': " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

const std::vector<std::string>& experiments();

struct RunResult {
  io::Json report;
  std::string summary_csv;
};

// Runs one experiment on a flat config object. Relative file paths in the
// config resolve against base_dir. The seed argument overrides "seed".
RunResult execute(const std::string& experiment, const io::Json& config,
                  std::optional<std::uint64_t> seed = std::nullopt,
                  const std::filesystem::path& base_dir = ".");

int exit_code_for(const std::exception& e);
// {"error": kind, "key": key-or-null, "message": text, "exit_code": code}
std::string error_json(const std::exception& e);

// Loads the config, executes, writes report.json and summary.csv into out_dir.
// Errors go to err as one JSON line; the return value is the exit code.
int run(const std::string& experiment, const std::string& config_path, const std::string& out_dir,
        std::optional<std::uint64_t> seed, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace torusdec::harness

#endif  // TORUSDEC_HARNESS_HPP_
