#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace libwrap {

namespace fs = std::filesystem;

struct ProcessResult {
    int exit_code = -1;  // 128 + signal number when killed by a signal
    std::string out;
    std::string err;

    bool ok() const noexcept { return exit_code == 0; }
};

struct RunOptions {
    std::optional<fs::path> cwd;
    // Added to (or overriding) the inherited environment.
    std::map<std::string, std::string> env;
    // When false the child inherits stdout/stderr and out/err stay empty.
    bool capture = true;
};

// Runs argv[0] (looked up on PATH) without a shell and waits for it.
// Throws libwrap::Error only if the process cannot be started at all; a
// missing executable is reported as exit status 127 with a message in err.
ProcessResult run_process(std::span<const std::string> argv, const RunOptions& options = {});

// Renders argv as a single POSIX-shell-safe command line.
std::string format_command(std::span<const std::string> argv);

// Splits a flag string the way a POSIX shell would split words: whitespace
// separated, with single/double quotes and backslash escapes.
std::vector<std::string> split_words(const std::string& text);

// File helpers.
std::string read_file(const fs::path& path);
// Writes to a sibling temporary and renames it over `path`.
void write_file_atomic(const fs::path& path, const std::string& contents);

// Creates a fresh, uniquely named directory under the system temp dir.
fs::path make_temp_dir(const std::string& prefix);

}  // namespace libwrap
