#include "libwrap/commands.hpp"

#include "libwrap/process.hpp"

#include <CLI11.hpp>

#include <ostream>

namespace libwrap {

namespace {

// "--cppflags '-I/opt/x -DY'" may be repeated; each value is split like a shell would.
std::vector<std::string> split_all(const std::vector<std::string>& values) {
    std::vector<std::string> out;
    for (const auto& v : values) {
        auto words = split_words(v);
        out.insert(out.end(), words.begin(), words.end());
    }
    return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, CommandEnv& env) {
    CLI::App app{"Generate and use wrappers that measure every call into a C library.", "libwrap"};
    app.require_subcommand(1);
    bool print_commands = false;
    app.add_flag("--print-commands", print_commands, "Show every subprocess before running it");

    // init
    auto* init = app.add_subcommand("init", "Create a wrapper working directory (or update its settings)");
    std::string init_dir;
    std::string name;
    std::string display_name;
    std::vector<std::string> cppflags;
    std::vector<std::string> ldflags;
    std::vector<std::string> libs;
    std::string language;
    std::vector<std::string> mappings;
    std::vector<std::string> void_functions;
    std::string prefix_setting;
    bool update = false;
    init->add_option("--name", name, "Wrapper name, used for library and manifest names");
    init->add_option("--display-name", display_name, "Human readable name");
    init->add_option("--cppflags", cppflags, "Preprocessor flags (repeatable)")->allow_extra_args(false);
    init->add_option("--ldflags", ldflags, "Linker flags (repeatable)")->allow_extra_args(false);
    init->add_option("--libs", libs, "Target libraries, e.g. -lfftw3 (repeatable)")->allow_extra_args(false);
    init->add_option("-x", language, "Language of the library headers (only c)");
    init->add_option("--ellipsis-mapping", mappings, "variadic:v-version, e.g. printf:vprintf (repeatable)")
        ->allow_extra_args(false);
    init->add_option("--variadic-is-void", void_functions, "Function declared f() that takes no arguments (repeatable)")
        ->allow_extra_args(false);
    init->add_option("--prefix", prefix_setting, "Install prefix for this wrapper");
    init->add_flag("--update", update, "Merge the given settings into an existing working directory");
    init->add_option("dir", init_dir, "Working directory")->required();

    std::string dir = ".";
    std::string prefix;

    auto* build = app.add_subcommand("build", "Analyze the headers and build the four wrapper libraries");
    build->add_option("dir", dir, "Working directory");

    auto* check = app.add_subcommand("check", "Find declared functions the target library does not define");
    bool symbols_mode = false;
    bool apply = false;
    unsigned jobs = 0;
    check->add_option("dir", dir, "Working directory");
    check->add_flag("--symbols", symbols_mode, "Read symbol tables instead of compiling a probe per function");
    check->add_option("-j,--jobs", jobs, "Concurrent probes (default: number of CPUs)");
    check->add_flag("--apply", apply, "Append the suggested exclusions to the filter file");

    auto* install = app.add_subcommand("install", "Install the built wrapper");
    install->add_option("dir", dir, "Working directory");
    install->add_option("--prefix", prefix, "Install prefix");

    auto* installcheck = app.add_subcommand("installcheck", "Link and run the example with both wrapping methods");
    installcheck->add_option("dir", dir, "Working directory");
    installcheck->add_option("--prefix", prefix, "Install prefix");

    auto* link = app.add_subcommand("link", "Run a link command with wrappers activated");
    std::vector<std::string> requests;
    link->add_option("--libwrap", requests, "[method:]name of an installed wrapper (repeatable)")
        ->allow_extra_args(false);
    link->prefix_command();

    auto* info = app.add_subcommand("info", "List installed wrappers or show one in detail");
    std::string info_name;
    info->add_option("name", info_name, "Wrapper name");

    auto* report = app.add_subcommand("report", "Print the call tree of one or more profiles");
    std::vector<std::string> profiles;
    bool flat = false;
    report->add_option("profiles", profiles, "Profile files written by wrapped programs")->required();
    report->add_flag("--flat", flat, "Per-region totals sorted by exclusive time");

    std::vector<std::string> argv{"libwrap"};
    argv.insert(argv.end(), args.begin(), args.end());
    // `link [options] -- command...`: the separator is optional, the command starts at the first positional.
    if (argv.size() > 1 && argv[1] == "link") {
        for (std::size_t i = 2; i < argv.size(); ++i) {
            if (argv[i] == "--") {
                argv.erase(argv.begin() + static_cast<std::ptrdiff_t>(i));
                break;
            }
            if (!argv[i].starts_with("-")) break;
            if (argv[i] == "--libwrap") ++i;
        }
    }
    std::vector<const char*> cargv;
    for (const auto& a : argv) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, *env.out, *env.err);
        return code == 0 ? exit_success : exit_usage;
    }

    if (print_commands) env.toolchain.trace = env.err;
    auto opt_prefix = [&]() -> std::optional<fs::path> {
        if (prefix.empty()) return std::nullopt;
        return fs::path(prefix);
    };

    try {
        if (*init) {
            InitRequest request;
            request.dest = init_dir;
            request.update = update;
            if (!name.empty()) request.name = name;
            if (!display_name.empty()) request.changes.display_name = display_name;
            if (!language.empty()) request.changes.language = parse_language(language);
            request.changes.preprocessor_flags = split_all(cppflags);
            request.changes.linker_flags = split_all(ldflags);
            request.changes.libs = split_all(libs);
            for (const auto& m : mappings) {
                auto colon = m.find(':');
                if (colon == std::string::npos || colon == 0 || colon + 1 == m.size()) {
                    throw UsageError("--ellipsis-mapping expects variadic:v-version, got '" + m + "'");
                }
                request.changes.ellipsis_mappings[m.substr(0, colon)] = m.substr(colon + 1);
            }
            request.changes.variadic_is_void.insert(void_functions.begin(), void_functions.end());
            if (!prefix_setting.empty()) request.changes.install_prefix = fs::path(prefix_setting);
            cmd_init(request, env);
        } else if (*build) {
            cmd_build(dir, env);
        } else if (*check) {
            CheckOptions options;
            options.mode = symbols_mode ? CheckMode::symbols : CheckMode::probe;
            options.jobs = jobs;
            options.apply = apply;
            cmd_check(dir, options, env);
        } else if (*install) {
            cmd_install(dir, opt_prefix(), env);
        } else if (*installcheck) {
            cmd_installcheck(dir, opt_prefix(), env);
        } else if (*link) {
            std::vector<std::string> command = link->remaining();
            if (!command.empty() && command.front() == "--") command.erase(command.begin());
            return cmd_link(requests, command, env);
        } else if (*info) {
            cmd_info(info_name.empty() ? std::nullopt : std::optional<std::string>(info_name), env);
        } else if (*report) {
            ReportOptions options;
            options.flat = flat;
            cmd_report(std::vector<fs::path>(profiles.begin(), profiles.end()), options, env);
        }
    } catch (const UsageError& e) {
        *env.err << "libwrap: " << e.what() << "\n";
        return exit_usage;
    } catch (const Error& e) {
        *env.err << "libwrap: error: " << e.what() << "\n";
        return exit_failure;
    } catch (const std::exception& e) {
        *env.err << "libwrap: error: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_success;
}

}  // namespace libwrap
