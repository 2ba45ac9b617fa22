#include "libwrap/commands.hpp"

#include "libwrap/declscan.hpp"
#include "libwrap/filter.hpp"
#include "libwrap/process.hpp"
#include "libwrap/profile.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <set>
#include <sstream>

#ifndef LIBWRAP_DEFAULT_MONITOR
#define LIBWRAP_DEFAULT_MONITOR ""
#endif
#ifndef LIBWRAP_DEFAULT_PREFIX
#define LIBWRAP_DEFAULT_PREFIX "/usr/local/lib/libwrap"
#endif

namespace libwrap {

namespace {

const char* const scratch_dir_name = ".libwrap";
const char* const call_all_source_name = "libwrap_call_all.c";
const char* const missing_list_name = "missing.txt";
const char* const resolvable_list_name = "resolvable_without_target.txt";

std::string with_next(const std::string& stage, const std::string& command, const std::string& diagnostics,
                      const std::string& next_action) {
    std::string text = stage + " failed";
    if (!command.empty()) text += "\n  command: " + command;
    if (!diagnostics.empty()) {
        text += "\n";
        std::istringstream lines(diagnostics);
        for (std::string line; std::getline(lines, line);) text += "  | " + line + "\n";
        text.pop_back();
    }
    if (!next_action.empty()) text += "\n  next: " + next_action;
    return text;
}

std::vector<std::string> concat(std::initializer_list<std::vector<std::string>> parts) {
    std::vector<std::string> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::string lines_of(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) out += item + "\n";
    return out;
}

// Runs a toolchain command for a stage, turning failure into a StageError.
void run_stage_command(const CommandEnv& env, const std::string& stage, const std::vector<std::string>& cmd,
                       const fs::path& cwd, const std::string& next_action) {
    RunOptions options;
    options.cwd = cwd;
    ProcessResult r = env.toolchain.run(cmd, options);
    if (!r.ok()) throw StageError(stage, format_command(cmd), r.err + r.out, next_action);
}

fs::path scratch(const WorkingDir& dir) {
    fs::path p = dir.root / scratch_dir_name;
    fs::create_directories(p);
    return p;
}

std::vector<std::string> user_compile_flags(const WorkingDir& dir, const WrapperConfig& config) {
    return concat({config.preprocessor_flags, {"-I" + dir.root.string()}});
}

struct Analysis {
    WorkingDir dir;
    WrapperConfig config;
    std::vector<FunctionDecl> decls;
    PlanResult plan;
};

struct StageLabel {
    int number;  // 0: not part of a numbered pipeline
    std::string text;
};

void announce(const CommandEnv& env, const StageLabel& label) {
    if (label.number > 0) {
        *env.out << "[" << label.number << "/6] " << label.text << "\n";
    } else {
        *env.out << label.text << "\n";
    }
}

// Preprocess, parse, filter: shared by build and check.
Analysis analyze(const fs::path& root, CommandEnv& env, bool numbered) {
    Analysis a{open_working_dir(root), {}, {}, {}};
    a.dir.root = fs::absolute(a.dir.root).lexically_normal();
    a.dir = WorkingDir::at(a.dir.root);
    a.config = load_config(a.dir);

    StageLabel pre{numbered ? 2 : 0, "preprocess the umbrella header"};
    announce(env, pre);
    std::string source;
    try {
        source = preprocess(a.config, a.dir.header_aggregate, env.toolchain, a.dir.root);
    } catch (const CommandError& e) {
        throw StageError(pre.text, e.command(), e.diagnostics(),
                         "fix the #include lines in " + a.dir.header_aggregate.string() +
                             " or the preprocessor flags (libwrap init --update --cppflags ...)");
    }

    StageLabel parse{numbered ? 3 : 0, "parse the declarations"};
    announce(env, parse);
    try {
        a.decls = parse_declarations(source, a.dir.root);
    } catch (const ParseError& e) {
        throw StageError(parse.text, "", e.what(),
                         "remove the offending header from " + a.dir.header_aggregate.string() +
                             " or guard it with a macro");
    }

    StageLabel filter{numbered ? 4 : 0, "apply the filter"};
    announce(env, filter);
    FilterSet set;
    try {
        set.rules = parse_filter(read_file(a.dir.filter_file));
    } catch (const ValidationError& e) {
        throw StageError(filter.text, "", a.dir.filter_file.string() + ": " + e.what(), "correct the filter file");
    }
    set.default_include_dirs = include_dirs_from_flags(a.config.preprocessor_flags, a.dir.root);
    try {
        a.plan = build_plan(a.decls, set, a.config);
    } catch (const Error& e) {
        throw StageError(filter.text, "", e.what(), "correct the mappings with libwrap init --update");
    }
    for (const auto& w : a.plan.warnings) *env.err << format_warning(w) << "\n";
    *env.out << "  " << a.decls.size() << " declarations, " << a.plan.plan.functions.size() << " to wrap\n";
    return a;
}

std::vector<std::string> wrap_flags_from_manifest(const fs::path& manifest) {
    std::vector<std::string> flags;
    for (const auto& name : parse_wrap_manifest(read_file(manifest))) flags.push_back("-Wl,--wrap=" + name);
    return flags;
}

fs::path install_prefix(const std::optional<fs::path>& requested, const WrapperConfig& config,
                        const CommandEnv& env) {
    if (requested) return fs::absolute(*requested);
    if (!config.install_prefix.empty()) return fs::absolute(config.install_prefix);
    return env.default_prefix;
}

void require_monitor(const CommandEnv& env) {
    if (env.monitor_library.empty() || !fs::exists(env.monitor_library)) {
        throw Error("the measurement runtime library was not found at '" + env.monitor_library.string() +
                    "'; set LIBWRAP_MONITOR to its path");
    }
}

std::string available_variants(const InstalledWrapper& w) {
    std::vector<std::string> names;
    for (const auto& [v, path] : w.variants) names.push_back(to_string(v));
    if (names.empty()) return "none";
    std::string out;
    for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
    return out;
}

// "1 function is" / "3 functions are"
std::string count_of(std::size_t n, const std::string& noun) {
    return std::to_string(n) + " " + noun + (n == 1 ? " is" : "s are");
}

// What a plain C link provides without any -l: the C library's dynamic symbols.
std::set<std::string> default_link_symbols(const Toolchain& toolchain, const fs::path& cwd) {
    RunOptions options;
    options.cwd = cwd;
    ProcessResult r = toolchain.run(toolchain.compile_command({"-print-file-name=libc.so.6"}), options);
    std::string path = r.out.substr(0, r.out.find('\n'));
    if (!r.ok() || path.empty() || !fs::path(path).is_absolute() || !fs::exists(path)) return {};
    return read_symbols(path).defined;
}

std::string installed_names(const std::vector<InstalledWrapper>& all) {
    if (all.empty()) return "no wrappers installed";
    std::string out = "installed wrappers: ";
    for (std::size_t i = 0; i < all.size(); ++i) out += (i ? ", " : "") + all[i].name;
    return out;
}

}  // namespace

StageError::StageError(std::string stage, std::string command, std::string diagnostics, std::string next_action)
    : Error(with_next(stage, command, diagnostics, next_action)),
      stage_(std::move(stage)),
      command_(std::move(command)),
      diagnostics_(std::move(diagnostics)),
      next_action_(std::move(next_action)) {}

CommandEnv CommandEnv::from_environment(std::ostream& out, std::ostream& err) {
    CommandEnv env{&out, &err, Toolchain::from_environment(), LIBWRAP_DEFAULT_MONITOR, LIBWRAP_DEFAULT_PREFIX, {}};
    if (const char* m = std::getenv("LIBWRAP_MONITOR"); m != nullptr && *m != '\0') env.monitor_library = m;
    if (const char* p = std::getenv("LIBWRAP_PREFIX"); p != nullptr && *p != '\0') env.default_prefix = p;
    if (const char* path = std::getenv("LIBWRAP_PATH"); path != nullptr) {
        std::string list = path;
        std::size_t start = 0;
        while (start <= list.size()) {
            std::size_t end = list.find(':', start);
            if (end == std::string::npos) end = list.size();
            if (end > start) env.search_path.emplace_back(list.substr(start, end - start));
            start = end + 1;
        }
    }
    return env;
}

const std::vector<Variant>& all_variants() {
    static const std::vector<Variant> variants{
        {Method::linktime, Linkage::static_archive},
        {Method::linktime, Linkage::shared_object},
        {Method::runtime, Linkage::static_archive},
        {Method::runtime, Linkage::shared_object},
    };
    return variants;
}

std::string to_string(Method method) { return method == Method::linktime ? "linktime" : "runtime"; }

std::string to_string(Variant variant) {
    return to_string(variant.method) + (variant.linkage == Linkage::static_archive ? "-static" : "-shared");
}

std::string variant_library_name(const std::string& wrapper, Variant variant) {
    return "lib" + wrapper + "_wrap_" + to_string(variant.method) +
           (variant.linkage == Linkage::static_archive ? ".a" : ".so");
}

std::optional<InstalledWrapper> read_installed(const fs::path& dir) {
    WorkingDir layout = WorkingDir::at(dir);
    if (!fs::is_regular_file(layout.config_file)) return std::nullopt;
    InstalledWrapper w;
    w.path = fs::absolute(dir).lexically_normal();
    w.config = load_config(layout);
    w.name = w.config.name;
    w.manifest = w.path / manifest_name(w.name);
    for (Variant v : all_variants()) {
        fs::path lib = w.path / variant_library_name(w.name, v);
        if (fs::is_regular_file(lib)) w.variants.emplace(v, lib);
    }
    if (w.variants.empty()) return std::nullopt;
    return w;
}

std::vector<InstalledWrapper> find_installed(const std::vector<fs::path>& roots) {
    std::map<std::string, InstalledWrapper> found;
    for (const auto& root : roots) {
        std::error_code ec;
        if (!fs::is_directory(root, ec)) continue;
        if (auto w = read_installed(root)) {
            found.emplace(w->name, std::move(*w));
            continue;
        }
        std::vector<fs::path> dirs;
        for (const auto& entry : fs::directory_iterator(root, ec)) {
            if (entry.is_directory()) dirs.push_back(entry.path());
        }
        std::sort(dirs.begin(), dirs.end());
        for (const auto& d : dirs) {
            if (auto w = read_installed(d)) found.emplace(w->name, std::move(*w));
        }
    }
    std::vector<InstalledWrapper> out;
    for (auto& [name, w] : found) out.push_back(std::move(w));
    return out;
}

std::vector<fs::path> wrapper_search_roots(const CommandEnv& env) {
    std::vector<fs::path> roots = env.search_path;
    roots.push_back(env.default_prefix);
    return roots;
}

WrapRequest parse_wrap_request(const std::string& text) {
    WrapRequest r;
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        r.name = text;
    } else {
        std::string method = text.substr(0, colon);
        r.name = text.substr(colon + 1);
        bool matched = false;
        for (Variant v : all_variants()) {
            if (method == to_string(v)) {
                r.method = v.method;
                r.linkage = v.linkage;
                matched = true;
            }
        }
        if (method == "linktime" || method == "runtime") {
            r.method = method == "linktime" ? Method::linktime : Method::runtime;
            matched = true;
        }
        if (!matched) {
            throw UsageError("unknown wrapping method '" + method +
                             "' (expected linktime, runtime or one of linktime-static, linktime-shared, "
                             "runtime-static, runtime-shared)");
        }
    }
    if (!is_valid_wrapper_name(r.name)) throw UsageError("invalid wrapper name '" + r.name + "'");
    return r;
}

Variant select_variant(const WrapRequest& request, const InstalledWrapper& wrapper) {
    Method method = request.method.value_or(Method::linktime);
    std::vector<Linkage> order = request.linkage ? std::vector<Linkage>{*request.linkage}
                                                 : std::vector<Linkage>{Linkage::shared_object, Linkage::static_archive};
    for (Linkage l : order) {
        Variant v{method, l};
        if (wrapper.variants.contains(v)) return v;
    }
    std::string wanted = request.linkage ? to_string(Variant{method, *request.linkage}) : to_string(method);
    throw Error("wrapper '" + wrapper.name + "' has no " + wanted + " library; available variants: " +
                available_variants(wrapper));
}

std::vector<std::string> rewrite_link_command(const std::vector<std::string>& command,
                                              const std::vector<std::pair<WrapRequest, InstalledWrapper>>& wrappers,
                                              const fs::path& monitor_library) {
    // Insertions keyed by the index they go in front of (size() = append).
    std::map<std::size_t, std::vector<std::string>> inserts;
    bool monitor_added = false;
    for (const auto& [request, wrapper] : wrappers) {
        Variant v = select_variant(request, wrapper);
        const fs::path& lib = wrapper.variants.at(v);
        std::vector<std::string> tokens;
        if (v.method == Method::linktime) {
            if (!fs::exists(wrapper.manifest)) {
                throw Error("wrapper '" + wrapper.name + "' has no wrap manifest at " + wrapper.manifest.string());
            }
            tokens = wrap_flags_from_manifest(wrapper.manifest);
        }
        tokens.push_back(lib.string());
        if (v.linkage == Linkage::shared_object) tokens.push_back("-Wl,-rpath," + lib.parent_path().string());
        if (!monitor_added && !monitor_library.empty()) {
            tokens.push_back(monitor_library.string());
            tokens.push_back("-Wl,-rpath," + monitor_library.parent_path().string());
            monitor_added = true;
        }
        if (v.method == Method::runtime) tokens.push_back("-ldl");

        std::size_t anchor = command.size();
        for (std::size_t i = 1; i < command.size(); ++i) {
            const auto& libs = wrapper.config.libs;
            if (std::find(libs.begin(), libs.end(), command[i]) != libs.end() &&
                !(command[i].starts_with("-L"))) {
                anchor = i;
                break;
            }
        }
        auto& slot = inserts[anchor];
        slot.insert(slot.end(), tokens.begin(), tokens.end());
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i <= command.size(); ++i) {
        if (auto it = inserts.find(i); it != inserts.end()) out.insert(out.end(), it->second.begin(), it->second.end());
        if (i < command.size()) out.push_back(command[i]);
    }
    return out;
}

WorkingDir cmd_init(const InitRequest& request, CommandEnv& env) {
    if (request.update) {
        if (request.name) {
            throw UsageError("--name cannot be changed with --update (it names every generated file)");
        }
        WorkingDir dir = open_working_dir(request.dest);
        WrapperConfig merged = update_config(dir, request.changes);
        *env.out << "Updated " << dir.config_file.string() << "\n\n" << serialize(merged);
        return dir;
    }
    if (!request.name) throw UsageError("--name is required");
    WrapperConfig config = merge(WrapperConfig{*request.name, {}, Language::c, {}, {}, {}, {}, {}, {}},
                                 request.changes);
    if (!request.changes.display_name) config.display_name = config.name;
    WorkingDir dir = init_working_dir(config, request.dest);
    *env.out << "Created the working directory for the " << config.display_name << " wrapper in "
             << dir.root.string() << "\n\n"
             << next_steps_text(dir);
    return dir;
}

BuildOutputs cmd_build(const fs::path& root, CommandEnv& env) {
    WorkingDir dir = open_working_dir(root);
    dir = WorkingDir::at(fs::absolute(dir.root).lexically_normal());
    WrapperConfig config = load_config(dir);
    fs::path work = scratch(dir);
    const std::string check_hint = "run `libwrap check " + dir.root.string() + "` and append the suggested exclusions to " +
                                   dir.filter_file.string();

    StageLabel example{1, "build the example program against the target library"};
    announce(env, example);
    run_stage_command(env, example.text,
                      env.toolchain.compile_command(concat({user_compile_flags(dir, config),
                                                            {dir.example_source.string(), "-o",
                                                             (work / "example").string()},
                                                            config.linker_flags, config.libs})),
                      dir.root,
                      "the provided example is wrong: fix " + dir.example_source.string() +
                          " or the compile and link flags (libwrap init --update --cppflags/--ldflags/--libs)");

    Analysis a = analyze(dir.root, env, true);
    const WrapPlan& plan = a.plan.plan;
    if (plan.functions.empty()) {
        throw StageError("apply the filter", "", "nothing to wrap: no declared function passed the filter",
                         "add the target library's include directory with -I or add FILES: INCLUDE rules to " +
                             dir.filter_file.string());
    }

    StageLabel call_all{5, "link a program calling every wrapped function against the target library"};
    announce(env, call_all);
    fs::path call_all_source = dir.generated(call_all_source_name);
    write_file_atomic(call_all_source, generate_call_all_example(plan));
    run_stage_command(env, call_all.text,
                      env.toolchain.compile_command(concat({user_compile_flags(dir, config),
                                                            {call_all_source.string(), "-o",
                                                             (work / "call_all").string()},
                                                            config.linker_flags, config.libs})),
                      dir.root,
                      "some declared functions are not defined by the target library; " + check_hint);

    StageLabel variants{6, "generate and compile the wrapper libraries"};
    announce(env, variants);
    require_monitor(env);
    BuildOutputs outputs{plan, a.plan.warnings, {}};
    for (Variant v : all_variants()) fs::remove(dir.generated(variant_library_name(config.name, v)));

    fs::path linktime_source = dir.generated(linktime_source_name(config.name));
    fs::path runtime_source = dir.generated(runtime_source_name(config.name));
    fs::path manifest = dir.generated(manifest_name(config.name));
    write_file_atomic(linktime_source, generate_linktime_source(plan));
    write_file_atomic(runtime_source, generate_runtime_source(plan));
    write_file_atomic(manifest, generate_wrap_manifest(plan));

    const std::string compile_hint = "the generated wrapper does not compile with these flags; check the warnings "
                                     "above or exclude the affected functions in " + dir.filter_file.string();
    std::vector<std::string> monitor{env.monitor_library.string(),
                                     "-Wl,-rpath," + env.monitor_library.parent_path().string()};
    for (Method method : {Method::linktime, Method::runtime}) {
        const fs::path& source = method == Method::linktime ? linktime_source : runtime_source;
        fs::path object = work / ("wrap_" + to_string(method) + ".o");
        run_stage_command(env, variants.text,
                          env.toolchain.compile_command(concat({{"-c", "-fPIC", "-O2"}, user_compile_flags(dir, config),
                                                                {source.string(), "-o", object.string()}})),
                          dir.root, compile_hint);

        Variant st{method, Linkage::static_archive};
        fs::path archive = dir.generated(variant_library_name(config.name, st));
        run_stage_command(env, variants.text, concat({env.toolchain.ar, {"rcs", archive.string(), object.string()}}),
                          dir.root, compile_hint);
        outputs.libraries.emplace(st, archive);

        Variant sh{method, Linkage::shared_object};
        fs::path shared = dir.generated(variant_library_name(config.name, sh));
        std::vector<std::string> link{"-shared", "-Wl,-soname," + shared.filename().string(), "-o", shared.string(),
                                      object.string()};
        if (method == Method::linktime) {
            // __real_F must bind to the target's F inside the shared wrapper.
            link = concat({link, generate_wrap_flags(plan), config.linker_flags, config.libs, monitor});
        } else {
            link = concat({link, config.linker_flags, {"-Wl,--no-as-needed"}, config.libs, monitor, {"-ldl"}});
        }
        run_stage_command(env, variants.text, env.toolchain.compile_command(link), dir.root, compile_hint);
        outputs.libraries.emplace(sh, shared);
    }

    *env.out << "\nBuilt the " << config.display_name << " wrapper (" << plan.functions.size() << " functions):\n";
    for (const auto& [v, path] : outputs.libraries) *env.out << "  " << to_string(v) << ": " << path.string() << "\n";
    *env.out << "  wrap manifest: " << manifest.string() << "\n"
             << "Next: libwrap install " << dir.root.string() << "\n";
    return outputs;
}

SymbolReport cmd_check(const fs::path& root, const CheckOptions& options, CommandEnv& env) {
    Analysis a = analyze(root, env, false);
    const auto& candidates = a.plan.plan.functions;
    SymbolReport report;
    if (options.mode == CheckMode::probe) {
        *env.out << "Probing " << candidates.size() << " functions with and without the target library\n";
        ProbeOptions probe;
        probe.work_dir = scratch(a.dir) / "probes";
        fs::remove_all(probe.work_dir);
        probe.jobs = options.jobs;
        probe.progress = env.out;
        try {
            report = probe_check(candidates, a.config, env.toolchain, probe);
        } catch (const CommandError& e) {
            throw StageError("probe the declared functions", e.command(), e.diagnostics(),
                             "make sure the compiler ($CC) can build a trivial program");
        }
    } else {
        *env.out << "Comparing " << candidates.size() << " functions with the target library's symbol tables\n";
        std::vector<SymbolTable> tables;
        for (const auto& file : resolve_library_files(a.config)) tables.push_back(read_symbols(file));
        if (tables.empty()) throw Error("the configuration lists no target libraries (libs)");
        report = reconcile(candidates, tables, default_link_symbols(env.toolchain, a.dir.root));
    }

    write_file_atomic(a.dir.generated(missing_list_name), lines_of(report.missing));
    write_file_atomic(a.dir.generated(resolvable_list_name), lines_of(report.resolvable_without_target));

    if (report.clean()) {
        *env.out << "The wrapper is consistent: every declared function is defined by the target library.\n";
        return report;
    }
    *env.out << count_of(report.missing.size(), "function") << " missing from the target library ("
             << missing_list_name << ")\n";
    for (const auto& n : report.missing) *env.out << "  " << n << "\n";
    *env.out << count_of(report.resolvable_without_target.size(), "function")
             << " resolvable without the target library (" << resolvable_list_name << ")\n";
    for (const auto& n : report.resolvable_without_target) *env.out << "  " << n << "\n";
    std::string fragment = suggest_exclusions(report);
    if (options.apply) {
        std::string filter = read_file(a.dir.filter_file);
        if (!filter.empty() && filter.back() != '\n') filter += '\n';
        write_file_atomic(a.dir.filter_file, filter + fragment);
        *env.out << "Appended the exclusions to " << a.dir.filter_file.string() << "\n";
    } else {
        *env.out << "Append these lines to " << a.dir.filter_file.string() << " and run libwrap build again:\n"
                 << fragment;
    }
    return report;
}

InstalledWrapper cmd_install(const fs::path& root, const std::optional<fs::path>& prefix, CommandEnv& env) {
    WorkingDir dir = open_working_dir(root);
    dir = WorkingDir::at(fs::absolute(dir.root).lexically_normal());
    WrapperConfig config = load_config(dir);
    fs::path manifest = dir.generated(manifest_name(config.name));
    std::vector<fs::path> libs;
    for (Variant v : all_variants()) {
        fs::path lib = dir.generated(variant_library_name(config.name, v));
        if (fs::exists(lib)) libs.push_back(lib);
    }
    if (libs.empty() || !fs::exists(manifest)) {
        throw Error("nothing to install in " + dir.root.string() + ": run `libwrap build " + dir.root.string() +
                    "` first");
    }
    fs::path dest = install_prefix(prefix, config, env) / config.name;
    fs::create_directories(dest);
    for (Variant v : all_variants()) fs::remove(dest / variant_library_name(config.name, v));
    auto copy = [&](const fs::path& from) {
        fs::copy_file(from, dest / from.filename(), fs::copy_options::overwrite_existing);
    };
    for (const auto& lib : libs) copy(lib);
    copy(manifest);
    copy(dir.config_file);
    copy(dir.header_aggregate);
    auto installed = read_installed(dest);
    if (!installed) throw Error("installation in " + dest.string() + " is incomplete");
    *env.out << "Installed the " << config.display_name << " wrapper to " << dest.string() << "\n"
             << "Next: libwrap installcheck " << dir.root.string() << "\n";
    return *installed;
}

void cmd_installcheck(const fs::path& root, const std::optional<fs::path>& prefix, CommandEnv& env) {
    WorkingDir dir = open_working_dir(root);
    dir = WorkingDir::at(fs::absolute(dir.root).lexically_normal());
    WrapperConfig config = load_config(dir);
    fs::path dest = install_prefix(prefix, config, env) / config.name;

    std::vector<std::string> missing;
    for (const fs::path& f : {dest / WorkingDir::at(dest).config_file.filename(), dest / manifest_name(config.name)}) {
        if (!fs::exists(f)) missing.push_back(f.string());
    }
    for (Variant v : all_variants()) {
        if (fs::exists(dir.generated(variant_library_name(config.name, v))) &&
            !fs::exists(dest / variant_library_name(config.name, v))) {
            missing.push_back((dest / variant_library_name(config.name, v)).string());
        }
    }
    std::optional<InstalledWrapper> installed = read_installed(dest);
    if (!installed || !missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += "\n  " + m;
        if (missing.empty()) list = "\n  no wrapper libraries in " + dest.string();
        throw Error("the " + config.name + " wrapper is not installed; missing:" + list +
                    "\nrun `libwrap install " + dir.root.string() + "` first");
    }

    fs::path work = scratch(dir) / "installcheck";
    fs::create_directories(work);
    std::map<Method, std::map<std::string, std::uint64_t>> counts;
    std::map<Method, fs::path> executables;
    std::map<Method, fs::path> profiles;
    for (Method method : {Method::linktime, Method::runtime}) {
        WrapRequest request{config.name, method, std::nullopt};
        Variant v = select_variant(request, *installed);
        std::string label = "installcheck (" + to_string(v) + ")";
        fs::path exe = work / ("example_" + to_string(method));
        std::vector<std::string> cmd = env.toolchain.compile_command(
            concat({user_compile_flags(dir, config), {dir.example_source.string(), "-o", exe.string()},
                    config.linker_flags, config.libs}));
        cmd = rewrite_link_command(cmd, {{request, *installed}}, env.monitor_library);
        run_stage_command(env, label + ": link the example", cmd, dir.root,
                          "check that the installed wrapper matches the working directory (libwrap build, install)");

        fs::path profile = work / ("profile_" + to_string(method) + ".json");
        fs::remove(profile);
        RunOptions run;
        run.cwd = dir.root;
        run.env["LIBWRAP_PROFILE_OUT"] = profile.string();
        ProcessResult r = env.toolchain.run({exe.string()}, run);
        if (!r.ok()) {
            throw StageError(label + ": run the example", exe.string(), r.err,
                             "the example must exit with status 0");
        }
        if (!fs::exists(profile)) {
            throw StageError(label + ": run the example", exe.string(), "no profile was written to " + profile.string(),
                             "make sure the measurement runtime is linked (LIBWRAP_MONITOR)");
        }
        counts[method] = call_counts(load_profile(profile));
        executables[method] = exe;
        profiles[method] = profile;
        std::uint64_t total = 0;
        for (const auto& [n, c] : counts[method]) total += c;
        *env.out << "  " << to_string(v) << ": " << total << (total == 1 ? " call" : " calls") << " recorded in " << profile.string() << "\n";
    }
    if (counts[Method::linktime] != counts[Method::runtime]) {
        throw Error("link-time and runtime wrapping recorded different call counts for the example; compare\n  " +
                    profiles[Method::linktime].string() + "\n  " + profiles[Method::runtime].string());
    }

    fs::path runtime_shared = dest / variant_library_name(config.name, {Method::runtime, Linkage::shared_object});
    *env.out << "\nBoth wrapping methods work. To use the wrapper:\n"
             << "  link time: libwrap link --libwrap=linktime:" << config.name << " <link command>\n"
             << "  runtime:   libwrap link --libwrap=runtime:" << config.name << " <link command>\n";
    if (fs::exists(runtime_shared)) {
        *env.out << "  or, without relinking: LD_PRELOAD=" << runtime_shared.string() << " <program>\n";
    }
    *env.out << "Each run writes a profile (LIBWRAP_PROFILE_OUT, default libwrap_profile.<pid>.json);\n"
             << "inspect it with: libwrap report " << profiles[Method::linktime].string() << "\n";
}

int cmd_link(const std::vector<std::string>& wrap_requests, const std::vector<std::string>& command,
             CommandEnv& env) {
    if (wrap_requests.empty()) throw UsageError("link needs at least one --libwrap=[method:]name");
    if (command.empty()) throw UsageError("link needs the compile or link command to run");
    std::vector<InstalledWrapper> all = find_installed(wrapper_search_roots(env));
    std::vector<std::pair<WrapRequest, InstalledWrapper>> chosen;
    for (const auto& text : wrap_requests) {
        WrapRequest r = parse_wrap_request(text);
        auto it = std::find_if(all.begin(), all.end(), [&](const InstalledWrapper& w) { return w.name == r.name; });
        if (it == all.end()) throw Error("unknown wrapper '" + r.name + "'; " + installed_names(all));
        chosen.emplace_back(r, *it);
    }
    require_monitor(env);
    std::vector<std::string> rewritten = rewrite_link_command(command, chosen, env.monitor_library);
    RunOptions options;
    options.capture = false;
    ProcessResult r = env.toolchain.run(rewritten, options);
    if (r.exit_code == 127 && !r.err.empty()) *env.err << r.err;
    return r.exit_code;
}

void cmd_info(const std::optional<std::string>& name, CommandEnv& env) {
    std::vector<InstalledWrapper> all = find_installed(wrapper_search_roots(env));
    if (!name) {
        if (all.empty()) {
            *env.out << "no wrappers installed\n";
            return;
        }
        std::size_t width = 4;
        std::size_t variants_width = 8;
        for (const auto& w : all) {
            width = std::max(width, w.name.size());
            variants_width = std::max(variants_width, available_variants(w).size());
        }
        auto row = [&](const std::string& n, const std::string& variants, const std::string& path) {
            *env.out << n << std::string(width - n.size() + 2, ' ') << variants
                     << std::string(variants_width - variants.size() + 2, ' ') << path << "\n";
        };
        row("name", "variants", "path");
        for (const auto& w : all) row(w.name, available_variants(w), w.path.string());
        return;
    }
    auto it = std::find_if(all.begin(), all.end(), [&](const InstalledWrapper& w) { return w.name == *name; });
    if (it == all.end()) throw Error("unknown wrapper '" + *name + "'; " + installed_names(all));
    std::size_t wrapped = fs::exists(it->manifest) ? parse_wrap_manifest(read_file(it->manifest)).size() : 0;
    *env.out << "wrapper: " << it->name << "\n"
             << "path: " << it->path.string() << "\n"
             << "variants: " << available_variants(*it) << "\n"
             << "wrapped functions: " << wrapped << " (" << it->manifest.string() << ")\n\n"
             << serialize(it->config);
}

void cmd_report(const std::vector<fs::path>& files, const ReportOptions& options, CommandEnv& env) {
    if (files.empty()) throw UsageError("report needs at least one profile file");
    std::vector<Profile> profiles;
    for (const auto& f : files) profiles.push_back(load_profile(f));
    Profile merged = merge_profiles(profiles);
    *env.out << (options.flat ? render_flat(merged) : render_tree(merged));
}

}  // namespace libwrap
