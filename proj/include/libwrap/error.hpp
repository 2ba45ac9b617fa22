#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

namespace libwrap {

// Base class of every error the toolkit reports. Messages are complete
// sentences intended to be shown to the user as-is.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid user input: bad config values, malformed filter files, unknown
// wrapper names. The CLI maps these to exit status 1 unless they are
// command-line usage problems (UsageError).
class ValidationError : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

// Declaration scanning failure at a known source position.
class ParseError : public Error {
public:
    ParseError(std::string file, int line, std::string token, const std::string& message)
        : Error(file + ":" + std::to_string(line) + ": " + message +
                (token.empty() ? std::string{} : " (at '" + token + "')")),
          file_(std::move(file)), line_(line), token_(std::move(token)) {}

    const std::string& file() const noexcept { return file_; }
    int line() const noexcept { return line_; }
    const std::string& token() const noexcept { return token_; }

private:
    std::string file_;
    int line_;
    std::string token_;
};

// A subprocess-driven step failed. Carries the exact command line and the
// tool's diagnostic output so the user can reproduce it.
class CommandError : public Error {
public:
    CommandError(const std::string& what, std::string command, std::string diagnostics)
        : Error(what + "\n  command: " + command +
                (diagnostics.empty() ? std::string{} : "\n" + diagnostics)),
          command_(std::move(command)), diagnostics_(std::move(diagnostics)) {}

    const std::string& command() const noexcept { return command_; }
    const std::string& diagnostics() const noexcept { return diagnostics_; }

private:
    std::string command_;
    std::string diagnostics_;
};

}  // namespace libwrap
