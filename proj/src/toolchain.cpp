#include "libwrap/toolchain.hpp"

#include <cstdlib>
#include <mutex>
#include <ostream>

namespace libwrap {

namespace {
std::mutex trace_mutex;
}

Toolchain Toolchain::from_environment() {
    Toolchain tc;
    if (const char* cc = std::getenv("CC"); cc != nullptr && *cc != '\0') tc.cc = split_words(cc);
    if (const char* ar = std::getenv("AR"); ar != nullptr && *ar != '\0') tc.ar = split_words(ar);
    return tc;
}

ProcessResult Toolchain::run(const std::vector<std::string>& argv, const RunOptions& options) const {
    if (trace != nullptr) {
        std::lock_guard lock(trace_mutex);
        *trace << "+ ";
        if (options.cwd) *trace << "(cd " << format_command(std::vector{options.cwd->string()}) << " && ";
        *trace << format_command(argv);
        if (options.cwd) *trace << ")";
        *trace << "\n";
    }
    return run_process(argv, options);
}

std::vector<std::string> Toolchain::compile_command(const std::vector<std::string>& args) const {
    std::vector<std::string> cmd = cc;
    cmd.insert(cmd.end(), args.begin(), args.end());
    return cmd;
}

}  // namespace libwrap
