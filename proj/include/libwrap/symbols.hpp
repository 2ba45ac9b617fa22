#pragma once

#include "libwrap/config.hpp"
#include "libwrap/decl.hpp"
#include "libwrap/toolchain.hpp"

#include <filesystem>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace libwrap {

namespace fs = std::filesystem;

struct SymbolTable {
    enum class Kind { shared_object, static_archive, object_file };

    fs::path origin;
    Kind kind = Kind::shared_object;
    std::set<std::string> defined;    // global and weak definitions, version suffix stripped
    std::set<std::string> undefined;  // references not satisfied within the file
};

struct SymbolReport {
    std::vector<std::string> missing;                    // sorted, unique
    std::vector<std::string> resolvable_without_target;  // sorted, unique

    bool clean() const { return missing.empty() && resolvable_without_target.empty(); }
    bool operator==(const SymbolReport&) const = default;
};

// Reads the dynamic symbol table of a shared object, or the symbol tables of
// every member of a static archive (relocatable objects are accepted too).
// Host byte order ELF only; anything else is an Error naming the magic bytes.
SymbolTable read_symbols(const fs::path& library);

// "foo@@VERS_1" -> "foo"
std::string strip_symbol_version(const std::string& name);

// Files behind the config's `libs` entries: `-lfoo` is looked up as
// libfoo.so / libfoo.a in the -L directories of linker_flags and libs, then
// in the usual system directories; explicit paths are taken as-is.
// Entries that cannot be found raise an Error.
std::vector<fs::path> resolve_library_files(const WrapperConfig& config);

// Symbol-table mode. `system_symbols` stands in for what links without the
// target library.
SymbolReport reconcile(std::span<const FunctionDecl> candidates, std::span<const SymbolTable> tables,
                       const std::set<std::string>& system_symbols = {});

struct ProbeOptions {
    fs::path work_dir;      // probe scratch space, one subdirectory per candidate
    unsigned jobs = 0;      // 0: hardware concurrency
    std::ostream* progress = nullptr;
    std::size_t notice_threshold = 1000;
};

// Probe mode: compiles and links one tiny caller per candidate, with and
// without the target libraries. Verifies the toolchain first.
SymbolReport probe_check(std::span<const FunctionDecl> candidates, const WrapperConfig& config,
                         const Toolchain& toolchain, const ProbeOptions& options);

}  // namespace libwrap
