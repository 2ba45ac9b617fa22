#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace libwrap {

namespace fs = std::filesystem;

// Only C declarations are supported. C++ headers are rejected up front.
enum class Language { c };

Language parse_language(std::string_view text);
std::string_view to_string(Language language);

// Settings captured at init time and consumed by every later step.
struct WrapperConfig {
    std::string name;
    std::string display_name;
    Language language = Language::c;
    std::vector<std::string> preprocessor_flags;
    std::vector<std::string> linker_flags;
    std::vector<std::string> libs;
    // variadic function -> its va_list taking counterpart (printf -> vprintf)
    std::map<std::string, std::string> ellipsis_mappings;
    // functions declared as f() that really take no arguments
    std::set<std::string> variadic_is_void;
    fs::path install_prefix;

    bool operator==(const WrapperConfig&) const = default;
};

// Throws ValidationError describing the first violated invariant.
void validate(const WrapperConfig& config);

bool is_valid_wrapper_name(std::string_view name);
bool is_c_identifier(std::string_view name);

// `key = value` lines; list keys repeat, mappings are `ellipsis_mapping = from:to`.
std::string serialize(const WrapperConfig& config);
WrapperConfig parse_config(std::string_view text);

// Fields left empty are kept. List and map entries are appended.
struct ConfigUpdate {
    std::optional<std::string> display_name;
    std::optional<Language> language;
    std::vector<std::string> preprocessor_flags;
    std::vector<std::string> linker_flags;
    std::vector<std::string> libs;
    std::map<std::string, std::string> ellipsis_mappings;
    std::set<std::string> variadic_is_void;
    std::optional<fs::path> install_prefix;
};

WrapperConfig merge(const WrapperConfig& base, const ConfigUpdate& changes);

struct WorkingDir {
    fs::path root;
    fs::path header_aggregate;
    fs::path example_source;
    fs::path filter_file;
    fs::path config_file;
    fs::path readme;

    // Layout of a working dir rooted at `root`; does not touch the disk.
    static WorkingDir at(const fs::path& root);

    fs::path generated(std::string_view file) const { return root / file; }
};

// Writes the scaffold. `dest` must be missing or empty.
WorkingDir init_working_dir(const WrapperConfig& config, const fs::path& dest);

// Loads an initialized working dir, throwing if it is not one.
WorkingDir open_working_dir(const fs::path& root);
WrapperConfig load_config(const WorkingDir& dir);

// Merges and persists atomically; on a validation error the file is untouched.
WrapperConfig update_config(const WorkingDir& dir, const ConfigUpdate& changes);

// Printed after init and repeated in the scaffold README.
std::string next_steps_text(const WorkingDir& dir);

}  // namespace libwrap
