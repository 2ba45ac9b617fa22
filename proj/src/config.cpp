#include "libwrap/config.hpp"

#include "libwrap/error.hpp"
#include "libwrap/process.hpp"

#include <algorithm>
#include <sstream>

namespace libwrap {

namespace {

constexpr std::string_view config_file_name = "libwrap.conf";
constexpr std::string_view header_file_name = "libwrap.h";
constexpr std::string_view example_file_name = "main.c";
constexpr std::string_view filter_file_name = "libwrap.filter";
constexpr std::string_view readme_file_name = "README.md";

std::string_view trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool is_single_line_value(std::string_view value) {
    if (value.find_first_of("\r\n") != std::string_view::npos) return false;
    return trim(value) == value;
}

void check_value(std::string_view field, std::string_view value) {
    if (!is_single_line_value(value)) {
        throw ValidationError("config field '" + std::string(field) +
                              "' must be a single line without surrounding whitespace: '" +
                              std::string(value) + "'");
    }
}

void check_flags(std::string_view field, const std::vector<std::string>& values) {
    for (const auto& v : values) {
        if (v.empty()) throw ValidationError("config field '" + std::string(field) + "' has an empty entry");
        check_value(field, v);
    }
}

std::string scaffold_text(std::string_view kind, const WrapperConfig& config) {
    std::ostringstream out;
    if (kind == header_file_name) {
        out << "/* Umbrella header for the " << config.display_name << " wrapper.\n"
            << " *\n"
            << " * Add one #include line for every header an application normally\n"
            << " * includes from the target library, for example\n"
            << " *\n"
            << " *     #include <mylib.h>\n"
            << " *\n"
            << " * Macros that influence the declared API may be defined here as well.\n"
            << " */\n";
    } else if (kind == example_file_name) {
        out << "/* Example application for the " << config.display_name << " wrapper.\n"
            << " *\n"
            << " * Call a few functions of the target library. `libwrap build` links this\n"
            << " * program against the target library to validate the compile and link\n"
            << " * flags; `libwrap installcheck` links it against the installed wrappers\n"
            << " * and runs it.\n"
            << " */\n"
            << "#include \"libwrap.h\"\n"
            << "\n"
            << "int main(void)\n"
            << "{\n"
            << "    return 0;\n"
            << "}\n";
    } else if (kind == filter_file_name) {
        out << "# Filter for the " << config.name << " wrapper.\n"
            << "#\n"
            << "# Without FILES rules only functions declared in headers below the -I\n"
            << "# directories of the preprocessor flags are wrapped. Rules apply in order\n"
            << "# and the last matching rule of a section wins. Patterns are shell globs.\n"
            << "#\n"
            << "#   FILES:\n"
            << "#   INCLUDE /opt/mylib/include/*\n"
            << "#   EXCLUDE /opt/mylib/include/internal/*\n"
            << "#   FUNCTIONS:\n"
            << "#   EXCLUDE *_debug\n"
            << "#\n"
            << "# `libwrap check` prints FUNCTIONS: EXCLUDE lines that can be appended here.\n";
    }
    return out.str();
}

std::string readme_text(const WorkingDir& dir, const WrapperConfig& config) {
    std::ostringstream out;
    out << "# Library wrapper: " << config.display_name << "\n\n"
        << "This directory holds the working state of the `" << config.name << "` wrapper.\n\n"
        << "Files:\n\n"
        << "- `libwrap.conf`: compile and link settings (edit with `libwrap init --update`)\n"
        << "- `libwrap.h`: umbrella header including the target library headers\n"
        << "- `main.c`: small example program using the target library\n"
        << "- `libwrap.filter`: include/exclude rules selecting the wrapped functions\n\n"
        << "## Next steps\n\n```\n"
        << next_steps_text(dir) << "```\n\n"
        << "## Warnings and errors\n\n"
        << "- *function has an ellipsis argument*: variadic functions cannot be forwarded in C.\n"
        << "  If a v-version exists (like vprintf for printf), add a mapping with\n"
        << "  `libwrap init --update --ellipsis-mapping printf:vprintf`. Otherwise the function\n"
        << "  is left out.\n"
        << "- *function has an unknown argument list*: the header declares `f()` instead of\n"
        << "  `f(void)`. If the function really takes no arguments, add it with\n"
        << "  `libwrap init --update --variadic-is-void f`. Otherwise it is left out.\n"
        << "- *function is inline*: calls that the compiler inlines cannot be intercepted.\n"
        << "  The function is still wrapped if the library exports it.\n"
        << "- *function has internal linkage* or *an assembler symbol name*: the function\n"
        << "  cannot be wrapped by name and is left out.\n"
        << "- *the example program fails to build*: the compile or link flags in\n"
        << "  `libwrap.conf` do not describe how to use the library.\n"
        << "- *the call-everything program fails to link*: some declared functions are not\n"
        << "  defined by the target library. Run `libwrap check` and append its suggested\n"
        << "  exclusions to `libwrap.filter`.\n";
    return out.str();
}

}  // namespace

Language parse_language(std::string_view text) {
    if (text == "c" || text == "C") return Language::c;
    if (text == "c++" || text == "C++" || text == "cxx" || text == "cpp") {
        throw ValidationError("language '" + std::string(text) +
                              "' is not supported: only C libraries can be wrapped");
    }
    throw ValidationError("unknown language '" + std::string(text) + "' (expected 'c')");
}

std::string_view to_string(Language) { return "c"; }

bool is_valid_wrapper_name(std::string_view name) {
    return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '-';
    });
}

bool is_c_identifier(std::string_view name) {
    if (name.empty() || (name[0] >= '0' && name[0] <= '9')) return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}

void validate(const WrapperConfig& config) {
    if (!is_valid_wrapper_name(config.name)) {
        throw ValidationError("invalid wrapper name '" + config.name +
                              "': use only letters, digits, '_' and '-'");
    }
    check_value("display_name", config.display_name);
    check_flags("preprocessor_flags", config.preprocessor_flags);
    check_flags("linker_flags", config.linker_flags);
    check_flags("libs", config.libs);
    check_value("install_prefix", config.install_prefix.string());
    for (const auto& [from, to] : config.ellipsis_mappings) {
        if (!is_c_identifier(from) || !is_c_identifier(to)) {
            throw ValidationError("ellipsis mapping '" + from + ":" + to + "' must name two C functions");
        }
        if (from == to) throw ValidationError("ellipsis mapping '" + from + "' maps a function to itself");
        if (config.variadic_is_void.contains(from)) {
            throw ValidationError("'" + from + "' is both ellipsis-mapped and listed as variadic-is-void");
        }
    }
    for (const auto& name : config.variadic_is_void) {
        if (!is_c_identifier(name)) throw ValidationError("variadic-is-void entry '" + name + "' is not a C identifier");
    }
}

std::string serialize(const WrapperConfig& config) {
    std::ostringstream out;
    out << "# libwrap wrapper configuration\n";
    out << "name = " << config.name << "\n";
    out << "display_name = " << config.display_name << "\n";
    out << "language = " << to_string(config.language) << "\n";
    for (const auto& f : config.preprocessor_flags) out << "preprocessor_flags = " << f << "\n";
    for (const auto& f : config.linker_flags) out << "linker_flags = " << f << "\n";
    for (const auto& f : config.libs) out << "libs = " << f << "\n";
    for (const auto& [from, to] : config.ellipsis_mappings) out << "ellipsis_mapping = " << from << ":" << to << "\n";
    for (const auto& f : config.variadic_is_void) out << "variadic_is_void = " << f << "\n";
    if (!config.install_prefix.empty()) out << "install_prefix = " << config.install_prefix.string() << "\n";
    return out.str();
}

WrapperConfig parse_config(std::string_view text) {
    WrapperConfig config;
    std::set<std::string> seen_scalars;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;

        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        auto scalar = [&](std::string& field) {
            if (!seen_scalars.insert(key).second) {
                throw ValidationError("config line " + std::to_string(line_no) + ": '" + key + "' given twice");
            }
            field = value;
        };

        if (key == "name") {
            scalar(config.name);
        } else if (key == "display_name") {
            scalar(config.display_name);
        } else if (key == "language") {
            std::string lang;
            scalar(lang);
            config.language = parse_language(lang);
        } else if (key == "install_prefix") {
            std::string prefix;
            scalar(prefix);
            config.install_prefix = prefix;
        } else if (key == "preprocessor_flags") {
            config.preprocessor_flags.push_back(value);
        } else if (key == "linker_flags") {
            config.linker_flags.push_back(value);
        } else if (key == "libs") {
            config.libs.push_back(value);
        } else if (key == "ellipsis_mapping") {
            auto colon = value.find(':');
            if (colon == std::string::npos) {
                throw ValidationError("config line " + std::to_string(line_no) +
                                      ": ellipsis_mapping must be 'function:v-function'");
            }
            config.ellipsis_mappings[std::string(trim(std::string_view(value).substr(0, colon)))] =
                std::string(trim(std::string_view(value).substr(colon + 1)));
        } else if (key == "variadic_is_void") {
            config.variadic_is_void.insert(value);
        } else {
            throw ValidationError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (!seen_scalars.contains("display_name")) config.display_name = config.name;
    validate(config);
    return config;
}

WrapperConfig merge(const WrapperConfig& base, const ConfigUpdate& changes) {
    WrapperConfig merged = base;
    if (changes.display_name) merged.display_name = *changes.display_name;
    if (changes.language) merged.language = *changes.language;
    auto append = [](std::vector<std::string>& to, const std::vector<std::string>& from) {
        to.insert(to.end(), from.begin(), from.end());
    };
    append(merged.preprocessor_flags, changes.preprocessor_flags);
    append(merged.linker_flags, changes.linker_flags);
    append(merged.libs, changes.libs);
    for (const auto& [from, to] : changes.ellipsis_mappings) merged.ellipsis_mappings[from] = to;
    merged.variadic_is_void.insert(changes.variadic_is_void.begin(), changes.variadic_is_void.end());
    if (changes.install_prefix) merged.install_prefix = *changes.install_prefix;
    return merged;
}

WorkingDir WorkingDir::at(const fs::path& root) {
    fs::path abs = fs::absolute(root).lexically_normal();
    if (abs.has_filename() == false && abs.has_parent_path()) abs = abs.parent_path();
    return WorkingDir{abs,
                      abs / header_file_name,
                      abs / example_file_name,
                      abs / filter_file_name,
                      abs / config_file_name,
                      abs / readme_file_name};
}

WorkingDir init_working_dir(const WrapperConfig& input, const fs::path& dest) {
    WrapperConfig config = input;
    if (config.display_name.empty()) config.display_name = config.name;
    validate(config);

    if (fs::exists(dest)) {
        if (!fs::is_directory(dest)) {
            throw ValidationError(dest.string() + " exists and is not a directory");
        }
        if (!fs::is_empty(dest)) {
            throw ValidationError(dest.string() +
                                  " is not empty; refusing to initialize over existing files "
                                  "(use --update to change an existing wrapper)");
        }
    }
    fs::create_directories(dest);
    WorkingDir dir = WorkingDir::at(dest);

    write_file_atomic(dir.config_file, serialize(config));
    write_file_atomic(dir.header_aggregate, scaffold_text(header_file_name, config));
    write_file_atomic(dir.example_source, scaffold_text(example_file_name, config));
    write_file_atomic(dir.filter_file, scaffold_text(filter_file_name, config));
    write_file_atomic(dir.readme, readme_text(dir, config));
    return dir;
}

WorkingDir open_working_dir(const fs::path& root) {
    WorkingDir dir = WorkingDir::at(root);
    if (!fs::exists(dir.config_file)) {
        throw ValidationError(dir.root.string() + " is not a wrapper working directory (no " +
                              std::string(config_file_name) + "); run `libwrap init` first");
    }
    return dir;
}

WrapperConfig load_config(const WorkingDir& dir) {
    try {
        return parse_config(read_file(dir.config_file));
    } catch (const ValidationError& e) {
        throw ValidationError(dir.config_file.string() + ": " + e.what());
    }
}

WrapperConfig update_config(const WorkingDir& dir, const ConfigUpdate& changes) {
    WrapperConfig current = load_config(dir);
    WrapperConfig merged = merge(current, changes);
    validate(merged);
    // Nothing changed: keep the file (and any hand edits) as it is.
    if (merged == current) return merged;
    std::string text = serialize(merged);
    if (text != read_file(dir.config_file)) write_file_atomic(dir.config_file, text);
    return merged;
}

std::string next_steps_text(const WorkingDir& dir) {
    std::string root = dir.root.string();
    std::ostringstream out;
    out << "Next steps:\n"
        << "  1. Add #include lines for the target library headers to " << dir.header_aggregate.string() << "\n"
        << "  2. Write a short program using the library in " << dir.example_source.string() << "\n"
        << "  3. Build the wrapper:    libwrap build " << root << "\n"
        << "  4. On a symbol mismatch: libwrap check " << root << "\n"
        << "     and append the suggested exclusions to " << dir.filter_file.string() << "\n"
        << "  5. Install and verify:   libwrap install " << root << "\n"
        << "                           libwrap installcheck " << root << "\n";
    return out.str();
}

}  // namespace libwrap
