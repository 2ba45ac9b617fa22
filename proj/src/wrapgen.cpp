#include "libwrap/wrapgen.hpp"

#include "libwrap/error.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace libwrap {

namespace {

const std::set<std::string> va_list_names = {"va_list", "__gnuc_va_list", "__builtin_va_list"};

bool is_va_list(const TypeExpr& t) {
    return t.kind == TypeExpr::Kind::typedef_ref && va_list_names.contains(t.base);
}

std::string c_string_literal(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

void check_renderable(const TypeExpr& t, const FunctionDecl& fn) {
    if (t.is_leaf() && t.base.find('<') != std::string::npos) {
        throw Error("cannot generate a wrapper for '" + fn.name + "' (" + fn.location.file + ":" +
                    std::to_string(fn.location.line) + "): its signature uses an anonymous type (" + t.base +
                    "); exclude it in the filter");
    }
    for (const auto& child : t.children) check_renderable(child, fn);
}

void check_renderable(const FunctionDecl& fn) {
    check_renderable(fn.return_type, fn);
    for (const auto& p : fn.params) check_renderable(p.type, fn);
}

std::vector<std::string> arg_names(const FunctionDecl& fn) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < fn.params.size(); ++i) names.push_back("libwrap_arg" + std::to_string(i));
    return names;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i != 0) out += sep;
        out += items[i];
    }
    return out;
}

// Same declaration, renamed.
std::string renamed_prototype(const FunctionDecl& fn, const std::string& name, bool as_void) {
    return fn.prototype(name, arg_names(fn), as_void);
}

// Pointer-to-function type of `fn`, declared as `name` (or abstract).
std::string function_pointer(const FunctionDecl& fn, const std::string& name, bool as_void) {
    TypeExpr t = fn.type();
    if (as_void) t.unprototyped = false;
    return TypeExpr::pointer(std::move(t)).declare(name);
}

const char* monitor_prelude =
    "extern int libwrap_region_register(const char *name, const char *file, int line);\n"
    "extern void libwrap_enter(int region);\n"
    "extern void libwrap_exit(int region);\n"
    "\n"
    "/* Shared by link-time and runtime wrappers: names the function a link-time\n"
    " * wrapper is forwarding to, so a runtime wrapper reached through __real_F\n"
    " * does not record the same call twice. */\n"
    "__thread const char *libwrap_forward_guard __attribute__((weak));\n"
    "\n"
    "static int libwrap_region(int *slot, const char *name, const char *file, int line)\n"
    "    __attribute__((unused));\n"
    "static int libwrap_region(int *slot, const char *name, const char *file, int line)\n"
    "{\n"
    "    int id = __atomic_load_n(slot, __ATOMIC_ACQUIRE);\n"
    "    if (id < 0) {\n"
    "        id = libwrap_region_register(name, file, line);\n"
    "        __atomic_store_n(slot, id, __ATOMIC_RELEASE);\n"
    "    }\n"
    "    return id;\n"
    "}\n";

struct WrapperShape {
    const FunctionDecl* fn;
    bool as_void;
    bool returns_value;
    const FunctionDecl* forward_target;  // v-version, for mapped variadics
    std::vector<std::string> args;
};

WrapperShape shape_of(const WrapPlan& plan, const FunctionDecl& fn) {
    WrapperShape s;
    s.fn = &fn;
    s.as_void = plan.variadic_is_void.contains(fn.name);
    s.returns_value = !fn.return_type.is_void();
    s.forward_target = nullptr;
    if (auto it = plan.ellipsis_mappings.find(fn.name); it != plan.ellipsis_mappings.end()) {
        s.forward_target = &plan.forward_targets.at(it->second);
    }
    s.args = arg_names(fn);
    return s;
}

std::string region_line(const FunctionDecl& fn) {
    return "    int libwrap_id = libwrap_region(&libwrap_region_" + fn.name + ", " + c_string_literal(fn.name) +
           ", " + c_string_literal(fn.location.file) + ", " + std::to_string(fn.location.line) + ");\n";
}

// Emits the shared body: enter, forward `call`, exit, return.
void emit_forwarding_body(std::ostream& out, const WrapperShape& s, const std::string& call,
                          const std::string& guard_name) {
    const FunctionDecl& fn = *s.fn;
    out << region_line(fn);
    if (s.forward_target != nullptr) out << "    va_list libwrap_args;\n";
    out << "    libwrap_enter(libwrap_id);\n";
    if (s.forward_target != nullptr) out << "    va_start(libwrap_args, " << s.args.back() << ");\n";
    out << "    libwrap_forward_guard = " << c_string_literal(guard_name) << ";\n";
    out << "    {\n";
    if (s.returns_value) {
        out << "        " << fn.return_type.declare("libwrap_result") << " = " << call << ";\n";
    } else {
        out << "        " << call << ";\n";
    }
    out << "        libwrap_forward_guard = 0;\n";
    if (s.forward_target != nullptr) out << "        va_end(libwrap_args);\n";
    out << "        libwrap_exit(libwrap_id);\n";
    if (s.returns_value) out << "        return libwrap_result;\n";
    out << "    }\n";
}

std::string call_expression(const std::string& callee, std::vector<std::string> args, bool with_va_args) {
    if (with_va_args) args.push_back("libwrap_args");
    return callee + "(" + join(args, ", ") + ")";
}

void emit_header(std::ostream& out, const WrapPlan& plan, const std::string& what) {
    out << "/* " << what << " for the " << plan.wrapper_name << " wrapper.\n"
        << " * Generated by libwrap from the umbrella header; do not edit. */\n";
}

}  // namespace

bool WrapPlan::contains(const std::string& name) const {
    return std::any_of(functions.begin(), functions.end(), [&](const FunctionDecl& f) { return f.name == name; });
}

PlanResult build_plan(std::span<const FunctionDecl> decls, const FilterSet& filter, const WrapperConfig& config) {
    std::unordered_map<std::string, const FunctionDecl*> by_name;
    for (const auto& d : decls) by_name.emplace(d.name, &d);

    for (const auto& [from, to] : config.ellipsis_mappings) {
        auto f = by_name.find(from);
        if (f == by_name.end()) throw Error("ellipsis mapping '" + from + ":" + to + "' names the undeclared function '" + from + "'");
        if (!f->second->variadic) throw Error("ellipsis mapping '" + from + ":" + to + "': '" + from + "' is not variadic");
        auto t = by_name.find(to);
        if (t == by_name.end()) throw Error("ellipsis mapping '" + from + ":" + to + "' names the undeclared function '" + to + "'");
        const FunctionDecl& target = *t->second;
        if (target.params.empty() || !is_va_list(target.params.back().type)) {
            throw Error("ellipsis mapping '" + from + ":" + to + "': the last parameter of '" + to + "' is not a va_list");
        }
        if (target.params.size() != f->second->params.size() + 1 || f->second->params.empty()) {
            throw Error("ellipsis mapping '" + from + ":" + to + "': '" + to + "' must take the fixed parameters of '" +
                        from + "' followed by a va_list");
        }
    }
    for (const auto& name : config.variadic_is_void) {
        if (!by_name.contains(name)) throw Error("variadic-is-void entry '" + name + "' names an undeclared function");
    }

    std::vector<FunctionDecl> selected;
    for (const auto& d : decls) {
        if (decide(filter, d)) selected.push_back(d);
    }

    PlanResult result;
    result.warnings = warn_unwrappable(selected, config);
    std::set<std::string> excluded;
    for (const auto& w : result.warnings) {
        if (w.excludes_function()) excluded.insert(w.function);
    }

    WrapPlan& plan = result.plan;
    plan.wrapper_name = config.name;
    for (auto& d : selected) {
        if (!excluded.contains(d.name)) plan.functions.push_back(std::move(d));
    }
    std::stable_sort(plan.functions.begin(), plan.functions.end(), [](const FunctionDecl& a, const FunctionDecl& b) {
        return std::tie(a.location.file, a.location.line) < std::tie(b.location.file, b.location.line);
    });
    for (const auto& fn : plan.functions) {
        if (auto it = config.ellipsis_mappings.find(fn.name); it != config.ellipsis_mappings.end()) {
            plan.ellipsis_mappings.emplace(it->first, it->second);
            plan.forward_targets.emplace(it->second, *by_name.at(it->second));
        }
        if (config.variadic_is_void.contains(fn.name)) plan.variadic_is_void.insert(fn.name);
    }

    std::vector<std::string> lib_dirs;
    auto collect_dirs = [&](const std::vector<std::string>& flags) {
        for (std::size_t i = 0; i < flags.size(); ++i) {
            if (flags[i] == "-L" && i + 1 < flags.size()) {
                lib_dirs.push_back(flags[++i]);
            } else if (flags[i].starts_with("-L")) {
                lib_dirs.push_back(flags[i].substr(2));
            }
        }
    };
    collect_dirs(config.linker_flags);
    collect_dirs(config.libs);
    for (const auto& lib : config.libs) {
        std::string file;
        if (lib.starts_with("-l:")) {
            file = lib.substr(3);
        } else if (lib.starts_with("-l") && lib.size() > 2) {
            file = "lib" + lib.substr(2) + ".so";
        } else if (!lib.starts_with("-") && lib.find(".so") != std::string::npos) {
            plan.runtime_libraries.push_back(lib);
            continue;
        } else {
            continue;
        }
        for (const auto& dir : lib_dirs) plan.runtime_libraries.push_back((fs::path(dir) / file).string());
        plan.runtime_libraries.push_back(file);
    }
    return result;
}

std::string generate_linktime_source(const WrapPlan& plan) {
    for (const auto& fn : plan.functions) check_renderable(fn);
    std::ostringstream out;
    emit_header(out, plan, "Link-time wrappers");
    out << "#include <stdarg.h>\n"
        << "#include \"libwrap.h\"\n\n"
        << monitor_prelude;

    for (const auto& fn : plan.functions) {
        WrapperShape s = shape_of(plan, fn);
        out << "\n/* " << fn.name << ": " << fn.location.file << ":" << fn.location.line << " */\n";
        out << "static int libwrap_region_" << fn.name << " = -1;\n";

        std::string callee;
        std::string guard = fn.name;
        if (s.forward_target != nullptr) {
            // Go through __real_ only when the v-version is wrapped as well.
            const FunctionDecl& target = *s.forward_target;
            bool target_wrapped = plan.contains(target.name);
            callee = target_wrapped ? "__real_" + target.name : target.name;
            guard = target.name;
            if (target_wrapped) out << renamed_prototype(target, callee, false) << ";\n";
        } else {
            callee = "__real_" + fn.name;
            out << renamed_prototype(fn, callee, s.as_void) << ";\n";
        }
        out << renamed_prototype(fn, "__wrap_" + fn.name, s.as_void) << ";\n";
        out << renamed_prototype(fn, "__wrap_" + fn.name, s.as_void) << "\n{\n";
        emit_forwarding_body(out, s, call_expression(callee, s.args, s.forward_target != nullptr), guard);
        out << "}\n";
    }
    return out.str();
}

std::string generate_runtime_source(const WrapPlan& plan) {
    for (const auto& fn : plan.functions) check_renderable(fn);
    std::ostringstream out;
    emit_header(out, plan, "Runtime wrappers");
    out << "#include <dlfcn.h>\n"
        << "#include <stdarg.h>\n"
        << "#include <stdio.h>\n"
        << "#include <stdlib.h>\n\n"
        << "/* The wrappers below redefine each function with decayed parameter types. */\n"
        << "#if defined(__clang__)\n"
        << "#if defined(__has_warning)\n"
        << "#if __has_warning(\"-Warray-parameter\")\n"
        << "#pragma clang diagnostic ignored \"-Warray-parameter\"\n"
        << "#endif\n"
        << "#endif\n"
        << "#elif defined(__GNUC__) && __GNUC__ >= 11\n"
        << "#pragma GCC diagnostic ignored \"-Warray-parameter\"\n"
        << "#pragma GCC diagnostic ignored \"-Wvla-parameter\"\n"
        << "#endif\n\n"
        << "#include \"libwrap.h\"\n\n"
        << "#ifndef RTLD_NEXT\n"
        << "#define RTLD_NEXT ((void *) -1l)\n"
        << "#endif\n\n"
        << monitor_prelude << "\n"
        << "static const char *const libwrap_target_libraries[] = {\n";
    for (const auto& lib : plan.runtime_libraries) out << "    " << c_string_literal(lib) << ",\n";
    out << "    0\n"
        << "};\n\n"
        << "static int libwrap_is_forward(const char *name) __attribute__((unused));\n"
        << "static int libwrap_is_forward(const char *name)\n"
        << "{\n"
        << "    const char *guard = libwrap_forward_guard;\n"
        << "    if (guard == 0) return 0;\n"
        << "    while (*guard != '\\0' && *guard == *name) {\n"
        << "        ++guard;\n"
        << "        ++name;\n"
        << "    }\n"
        << "    if (*guard != *name) return 0;\n"
        << "    libwrap_forward_guard = 0;\n"
        << "    return 1;\n"
        << "}\n\n"
        << "static void *libwrap_resolve(const char *name) __attribute__((unused));\n"
        << "static void *libwrap_resolve(const char *name)\n"
        << "{\n"
        << "    void *fn = dlsym(RTLD_NEXT, name);\n"
        << "    int i;\n"
        << "    if (fn != 0) return fn;\n"
        << "    for (i = 0; libwrap_target_libraries[i] != 0; ++i) {\n"
        << "        void *handle = dlopen(libwrap_target_libraries[i], RTLD_LAZY | RTLD_LOCAL);\n"
        << "        if (handle == 0) continue;\n"
        << "        fn = dlsym(handle, name);\n"
        << "        if (fn != 0) return fn;\n"
        << "    }\n"
        << "    fprintf(stderr, \"libwrap[" << plan.wrapper_name
        << "]: cannot find the original '%s' in the objects loaded after the wrapper\", name);\n"
        << "    for (i = 0; libwrap_target_libraries[i] != 0; ++i) {\n"
        << "        fprintf(stderr, \"%s %s\", i == 0 ? \" or in:\" : \",\", libwrap_target_libraries[i]);\n"
        << "    }\n"
        << "    fprintf(stderr, \"\\n\");\n"
        << "    abort();\n"
        << "}\n";

    for (const auto& fn : plan.functions) {
        WrapperShape s = shape_of(plan, fn);
        const FunctionDecl& target = s.forward_target != nullptr ? *s.forward_target : fn;
        bool target_as_void = s.forward_target == nullptr && s.as_void;
        std::string slot = "libwrap_real_" + fn.name;

        out << "\n/* " << fn.name << ": " << fn.location.file << ":" << fn.location.line << " */\n";
        out << "static int libwrap_region_" << fn.name << " = -1;\n";
        out << "static " << function_pointer(target, slot, target_as_void) << ";\n";
        out << renamed_prototype(fn, fn.name, s.as_void) << "\n{\n";
        out << "    " << function_pointer(target, "libwrap_fn", target_as_void) << " = __atomic_load_n(&" << slot
            << ", __ATOMIC_ACQUIRE);\n";
        out << "    if (libwrap_fn == 0) {\n"
            << "        libwrap_fn = (" << function_pointer(target, "", target_as_void) << ") libwrap_resolve("
            << c_string_literal(target.name) << ");\n"
            << "        __atomic_store_n(&" << slot << ", libwrap_fn, __ATOMIC_RELEASE);\n"
            << "    }\n";
        std::string call = call_expression("libwrap_fn", s.args, s.forward_target != nullptr);
        out << "    if (libwrap_is_forward(" << c_string_literal(fn.name) << ")) {\n";
        if (s.forward_target != nullptr) {
            // Unreachable in practice: link-time wrappers never forward to a
            // variadic function itself.
            out << "        va_list libwrap_args;\n"
                << "        va_start(libwrap_args, " << s.args.back() << ");\n"
                << "        {\n";
            if (s.returns_value) {
                out << "            " << fn.return_type.declare("libwrap_result") << " = " << call << ";\n"
                    << "            va_end(libwrap_args);\n"
                    << "            return libwrap_result;\n";
            } else {
                out << "            " << call << ";\n"
                    << "            va_end(libwrap_args);\n"
                    << "            return;\n";
            }
            out << "        }\n";
        } else if (s.returns_value) {
            out << "        return " << call << ";\n";
        } else {
            out << "        " << call << ";\n"
                << "        return;\n";
        }
        out << "    }\n";
        out << "    {\n";
        std::ostringstream body;
        emit_forwarding_body(body, s, call, "");
        // Indent the shared body one level for the nested block.
        std::istringstream lines(body.str());
        for (std::string line; std::getline(lines, line);) {
            // The guard stays clear: nothing below a runtime wrapper is a
            // link-time forward.
            if (line.find("libwrap_forward_guard") != std::string::npos) continue;
            out << "    " << line << "\n";
        }
        out << "    }\n";
        out << "}\n";
    }
    return out.str();
}

std::vector<std::string> generate_wrap_flags(const WrapPlan& plan) {
    std::vector<std::string> flags;
    for (const auto& fn : plan.functions) flags.push_back("-Wl,--wrap=" + fn.name);
    return flags;
}

std::string generate_wrap_manifest(const WrapPlan& plan) {
    std::string out;
    for (const auto& fn : plan.functions) out += fn.name + "\n";
    return out;
}

std::vector<std::string> parse_wrap_manifest(const std::string& text) {
    std::vector<std::string> names;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto last = line.find_last_not_of(" \t\r");
        names.push_back(line.substr(first, last - first + 1));
    }
    return names;
}

std::string generate_call_all_example(const WrapPlan& plan) {
    for (const auto& fn : plan.functions) check_renderable(fn);
    std::ostringstream out;
    emit_header(out, plan, "Link test referencing every wrapped function");
    out << "#include \"libwrap.h\"\n\n"
        << "int main(int argc, char **argv)\n"
        << "{\n"
        << "    (void)argv;\n"
        << "    if (argc < 0) {\n";
    for (const auto& fn : plan.functions) {
        std::vector<std::string> args;
        out << "        {\n";
        for (std::size_t i = 0; i < fn.params.size(); ++i) {
            std::string name = "libwrap_arg" + std::to_string(i);
            out << "            static " << fn.params[i].type.unqualified().declare(name) << ";\n";
            args.push_back(name);
        }
        std::string call = fn.name + "(" + join(args, ", ") + ")";
        if (fn.return_type.is_void()) {
            out << "            " << call << ";\n";
        } else {
            out << "            " << fn.return_type.declare("libwrap_result") << " = " << call << ";\n"
                << "            (void)libwrap_result;\n";
        }
        out << "        }\n";
    }
    out << "    }\n"
        << "    return 0;\n"
        << "}\n";
    return out.str();
}

std::string generate_probe_source(const FunctionDecl& decl) {
    check_renderable(decl);
    // Leaf types the probe must define itself, since it includes no headers.
    std::set<std::string> typedef_names;
    std::set<std::string> tags;
    auto collect = [&](auto&& self, const TypeExpr& t) -> void {
        if (t.kind == TypeExpr::Kind::typedef_ref && t.base != "__builtin_va_list") typedef_names.insert(t.base);
        if (t.kind == TypeExpr::Kind::record_or_enum_ref) tags.insert(t.base);
        for (const auto& c : t.children) self(self, c);
    };
    collect(collect, decl.return_type);
    for (const auto& p : decl.params) collect(collect, p.type);

    std::ostringstream out;
    out << "/* Link probe for " << decl.name << ". */\n";
    int n = 0;
    for (const auto& tag : tags) {
        if (tag.starts_with("enum ")) {
            out << tag << " { libwrap_enumerator_" << n++ << " };\n";
        } else {
            out << tag << " { char libwrap_pad; };\n";
        }
    }
    for (const auto& name : typedef_names) {
        out << "typedef struct libwrap_opaque_" << name << " { char libwrap_pad; } " << name << ";\n";
    }
    out << decl.prototype(decl.name, arg_names(decl), false) << ";\n\n";
    out << "int main(void)\n{\n";
    std::vector<std::string> args;
    for (std::size_t i = 0; i < decl.params.size(); ++i) {
        const TypeExpr& t = decl.params[i].type;
        if (t.kind == TypeExpr::Kind::scalar || t.kind == TypeExpr::Kind::pointer_to ||
            (t.kind == TypeExpr::Kind::record_or_enum_ref && t.base.starts_with("enum "))) {
            args.push_back("0");
        } else {
            std::string name = "libwrap_arg" + std::to_string(i);
            out << "    static " << t.unqualified().declare(name) << ";\n";
            args.push_back(name);
        }
    }
    out << "    " << decl.name << "(" << join(args, ", ") << ");\n";
    out << "    return 0;\n}\n";
    return out.str();
}

std::string linktime_source_name(const std::string& wrapper_name) { return "wrap_" + wrapper_name + "_linktime.c"; }
std::string runtime_source_name(const std::string& wrapper_name) { return "wrap_" + wrapper_name + "_runtime.c"; }
std::string manifest_name(const std::string& wrapper_name) { return wrapper_name + ".wrap"; }

}  // namespace libwrap
