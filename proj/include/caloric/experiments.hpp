#pragma once

#include "caloric/errors.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace caloric::experiments {

/// Invalid configuration, located by JSON pointer and 1-based source line (0 when unknown).
class ConfigError : public Error {
  public:
    ConfigError(const std::string& what, std::string pointer, std::size_t line);
    const std::string& pointer() const noexcept { return pointer_; }
    std::size_t line() const noexcept { return line_; }

  private:
    std::string pointer_;
    std::size_t line_;
};

/// JSON pointer of every value in `text` mapped to the line where the value starts.
std::map<std::string, std::size_t> line_index(const std::string& text);

struct KindInfo {
    std::string name;
    std::string description;
};
const std::vector<KindInfo>& kinds();

struct Gate {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct ExperimentResult {
    std::string name;
    std::string kind;
    std::vector<Gate> gates;
    std::vector<std::string> artifacts;
    /// Set when the experiment stopped on a numerical error.
    std::string error;

    bool passed() const noexcept;
};

struct RunReport {
    std::filesystem::path output_dir;
    std::vector<ExperimentResult> results;

    bool passed() const noexcept;
    /// 0 when every gate passes, 1 otherwise.
    int exit_code() const noexcept { return passed() ? 0 : 1; }
};

/// Parses and checks every experiment without running it. Throws ConfigError.
void validate(const std::string& text);

struct RunOptions {
    /// Takes precedence over the config's output_dir.
    std::optional<std::filesystem::path> output_dir;
    /// Receives one progress line per experiment when set.
    std::ostream* log = nullptr;
};

/// Validates, then runs every experiment, writing artifacts and summary.json.
/// Throws ConfigError for an invalid config; numerical errors become failed results.
RunReport run(const std::string& text, const RunOptions& options = {});

std::string read_file(const std::filesystem::path& path);

}  // namespace caloric::experiments
