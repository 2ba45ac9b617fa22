#pragma once

#include "libwrap/process.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace libwrap {

// The user's compiler and archiver. Every subprocess the toolkit starts goes
// through run(), so `--print-commands` can show all of them.
struct Toolchain {
    std::vector<std::string> cc{"cc"};
    std::vector<std::string> ar{"ar"};
    std::ostream* trace = nullptr;

    // $CC and $AR (split into words) override the defaults.
    static Toolchain from_environment();

    ProcessResult run(const std::vector<std::string>& argv, const RunOptions& options = {}) const;

    // cc + args
    std::vector<std::string> compile_command(const std::vector<std::string>& args) const;
};

}  // namespace libwrap
