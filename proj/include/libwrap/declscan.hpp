#pragma once

#include "libwrap/config.hpp"
#include "libwrap/decl.hpp"
#include "libwrap/toolchain.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace libwrap {

// Runs `<cc> -E <preprocessor_flags> <header>` in `cwd` and returns the
// expanded translation unit (line markers included). A failing preprocessor
// raises CommandError carrying the command line and compiler diagnostics.
std::string preprocess(const WrapperConfig& config, const fs::path& header_aggregate,
                       const Toolchain& toolchain, const fs::path& cwd);

// Parses preprocessed C into every function declaration it contains, in
// order of first appearance. Relative paths in line markers are resolved
// against `base_dir` (when given) and lexically normalized.
std::vector<FunctionDecl> parse_declarations(std::string_view source, const fs::path& base_dir = {});

enum class WarningKind {
    inline_function,           // kept, but inlined calls are invisible
    internal_linkage,          // excluded
    asm_label,                 // excluded
    variadic_without_mapping,  // excluded
    unknown_arguments,         // excluded
};

struct ScanWarning {
    WarningKind kind;
    std::string function;
    SourceLocation location;
    std::string message;

    bool excludes_function() const { return kind != WarningKind::inline_function; }
};

// One warning per declaration that cannot be wrapped as-is.
std::vector<ScanWarning> warn_unwrappable(std::span<const FunctionDecl> decls, const WrapperConfig& config);

std::string format_warning(const ScanWarning& warning);

}  // namespace libwrap
