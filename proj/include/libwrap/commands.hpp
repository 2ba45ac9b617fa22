#pragma once

#include "libwrap/config.hpp"
#include "libwrap/error.hpp"
#include "libwrap/symbols.hpp"
#include "libwrap/toolchain.hpp"
#include "libwrap/wrapgen.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace libwrap {

namespace fs = std::filesystem;

enum ExitStatus { exit_success = 0, exit_failure = 1, exit_usage = 2 };

// What every command needs from its surroundings.
struct CommandEnv {
    std::ostream* out;
    std::ostream* err;
    Toolchain toolchain;
    fs::path monitor_library;            // measurement runtime linked into wrappers
    fs::path default_prefix;             // install tree used when the config names none
    std::vector<fs::path> search_path;   // extra places to look for installed wrappers

    // $LIBWRAP_MONITOR, $LIBWRAP_PREFIX and $LIBWRAP_PATH override the built-in defaults.
    static CommandEnv from_environment(std::ostream& out, std::ostream& err);
};

// A failed workflow step: what was attempted, the subprocess (if any), its
// diagnostics and what to do next.
class StageError : public Error {
public:
    StageError(std::string stage, std::string command, std::string diagnostics, std::string next_action);

    const std::string& stage() const { return stage_; }
    const std::string& command() const { return command_; }
    const std::string& diagnostics() const { return diagnostics_; }
    const std::string& next_action() const { return next_action_; }

private:
    std::string stage_;
    std::string command_;
    std::string diagnostics_;
    std::string next_action_;
};

enum class Method { linktime, runtime };
enum class Linkage { static_archive, shared_object };

struct Variant {
    Method method;
    Linkage linkage;

    auto operator<=>(const Variant&) const = default;
};

const std::vector<Variant>& all_variants();
// "linktime-static", "runtime-shared", ...
std::string to_string(Variant variant);
std::string to_string(Method method);
// lib<name>_wrap_<method>.a / .so
std::string variant_library_name(const std::string& wrapper, Variant variant);

struct InstalledWrapper {
    std::string name;
    fs::path path;
    WrapperConfig config;
    std::map<Variant, fs::path> variants;
    fs::path manifest;
};

// Reads an install directory (`<prefix>/<name>`); nullopt when it holds no wrapper.
std::optional<InstalledWrapper> read_installed(const fs::path& dir);

// Wrappers below each root. A root may be an install prefix or a wrapper
// directory itself. Earlier roots shadow later ones; result sorted by name.
std::vector<InstalledWrapper> find_installed(const std::vector<fs::path>& roots);
// $LIBWRAP_PATH entries first, then the default prefix.
std::vector<fs::path> wrapper_search_roots(const CommandEnv& env);

// `[method:]name` as given to `link --libwrap=`. Method is linktime,
// runtime, or one of the four variant names.
struct WrapRequest {
    std::string name;
    std::optional<Method> method;
    std::optional<Linkage> linkage;
};

WrapRequest parse_wrap_request(const std::string& text);

// Picks the library for a request; the default method is linktime, the
// default linkage shared (falling back to static).
Variant select_variant(const WrapRequest& request, const InstalledWrapper& wrapper);

// Inserts each wrapper's flags and library before the first argument that
// matches one of its target `libs` (or at the end), plus the measurement
// runtime once. Nothing else in `command` moves.
std::vector<std::string> rewrite_link_command(const std::vector<std::string>& command,
                                              const std::vector<std::pair<WrapRequest, InstalledWrapper>>& wrappers,
                                              const fs::path& monitor_library);

struct InitRequest {
    fs::path dest;
    bool update = false;
    std::optional<std::string> name;
    ConfigUpdate changes;  // everything else given on the command line
};

struct BuildOutputs {
    WrapPlan plan;
    std::vector<ScanWarning> warnings;
    std::map<Variant, fs::path> libraries;
};

enum class CheckMode { probe, symbols };

struct CheckOptions {
    CheckMode mode = CheckMode::probe;
    unsigned jobs = 0;
    bool apply = false;  // append the suggestion to the filter file
};

struct ReportOptions {
    bool flat = false;
};

// Each command prints to env.out/env.err and throws Error (exit 1) or
// UsageError (exit 2) on failure.
WorkingDir cmd_init(const InitRequest& request, CommandEnv& env);
BuildOutputs cmd_build(const fs::path& root, CommandEnv& env);
SymbolReport cmd_check(const fs::path& root, const CheckOptions& options, CommandEnv& env);
InstalledWrapper cmd_install(const fs::path& root, const std::optional<fs::path>& prefix, CommandEnv& env);
void cmd_installcheck(const fs::path& root, const std::optional<fs::path>& prefix, CommandEnv& env);
// Returns the exit status of the rewritten command.
int cmd_link(const std::vector<std::string>& wrap_requests, const std::vector<std::string>& command,
             CommandEnv& env);
void cmd_info(const std::optional<std::string>& name, CommandEnv& env);
void cmd_report(const std::vector<fs::path>& profiles, const ReportOptions& options, CommandEnv& env);

// Full command-line front end: parses `args` (without the program name),
// runs the subcommand and maps failures to exit statuses.
int run_cli(const std::vector<std::string>& args, CommandEnv& env);

}  // namespace libwrap
