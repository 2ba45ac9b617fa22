#pragma once

#include "libwrap/decl.hpp"
#include "libwrap/symbols.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace libwrap {

namespace fs = std::filesystem;

// Shell-style glob: `*` matches any run of characters (including '/'),
// `?` one character, `[...]` a class (`[!...]` / `[^...]` negated, `a-z`
// ranges). A backslash quotes the next character.
bool glob_match(std::string_view pattern, std::string_view text);

enum class FilterAction { include, exclude };
enum class FilterDomain { files, functions };

struct FilterRule {
    FilterAction action;
    FilterDomain domain;
    std::string pattern;

    bool operator==(const FilterRule&) const = default;
};

struct FilterSet {
    std::vector<FilterRule> rules;
    // Headers below these directories are wrapped when no FILES rule matches.
    std::vector<fs::path> default_include_dirs;
};

// Filter file grammar, one item per line:
//   FILES: | FUNCTIONS:        switch the section (FILES is the default)
//   INCLUDE <glob> | EXCLUDE <glob>
//   # comment
std::vector<FilterRule> parse_filter(std::string_view text);

// `-I<dir>` and `-I <dir>` entries, made absolute against `base`.
std::vector<fs::path> include_dirs_from_flags(const std::vector<std::string>& flags, const fs::path& base);

// Last matching rule per section wins; a function is wrapped when both its
// file and its name are accepted.
bool decide(const FilterSet& filter, const FunctionDecl& decl);

// FUNCTIONS: section excluding every name in both report lists. Empty when
// the report is clean.
std::string suggest_exclusions(const SymbolReport& report);

}  // namespace libwrap
