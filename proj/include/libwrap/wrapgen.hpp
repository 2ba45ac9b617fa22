#pragma once

#include "libwrap/config.hpp"
#include "libwrap/decl.hpp"
#include "libwrap/declscan.hpp"
#include "libwrap/filter.hpp"

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace libwrap {

// The verified set of functions one wrapper intercepts.
struct WrapPlan {
    std::string wrapper_name;
    std::vector<FunctionDecl> functions;  // ordered by file, then line
    // variadic function -> v-version, restricted to planned functions
    std::map<std::string, std::string> ellipsis_mappings;
    // declarations of the v-versions named above
    std::map<std::string, FunctionDecl> forward_targets;
    std::set<std::string> variadic_is_void;
    // dlopen fallbacks for runtime wrappers, in `libs` order
    std::vector<std::string> runtime_libraries;

    bool contains(const std::string& name) const;
};

struct PlanResult {
    WrapPlan plan;
    std::vector<ScanWarning> warnings;
};

// Filter, drop what cannot be wrapped, validate mappings. A mapping or
// variadic-is-void entry naming an undeclared or unsuitable function is an
// Error.
PlanResult build_plan(std::span<const FunctionDecl> decls, const FilterSet& filter, const WrapperConfig& config);

// All generators are deterministic and throw Error naming the function when
// a signature cannot be written back as C (e.g. an anonymous struct type).

// __wrap_F / __real_F pairs for the linker's --wrap option.
std::string generate_linktime_source(const WrapPlan& plan);

// Functions named F that forward to the next definition found through the
// dynamic loader.
std::string generate_runtime_source(const WrapPlan& plan);

// -Wl,--wrap=F per planned function.
std::vector<std::string> generate_wrap_flags(const WrapPlan& plan);
// One wrapped name per line.
std::string generate_wrap_manifest(const WrapPlan& plan);
std::vector<std::string> parse_wrap_manifest(const std::string& text);

// A program that references every planned function; only ever linked.
std::string generate_call_all_example(const WrapPlan& plan);

// A header-free unit that declares `decl` and calls it once.
std::string generate_probe_source(const FunctionDecl& decl);

std::string linktime_source_name(const std::string& wrapper_name);
std::string runtime_source_name(const std::string& wrapper_name);
std::string manifest_name(const std::string& wrapper_name);

}  // namespace libwrap
