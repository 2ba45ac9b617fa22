// Acceptance suite: one PASS/FAIL line per criterion, driven through the
// `libwrap` executable and the stub measurement runtime.

#include "libwrap/declscan.hpp"
#include "libwrap/profile.hpp"

#include "test_support.hpp"

#include <time.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>

using namespace libwrap;
using testsupport::FixtureLibrary;
using testsupport::quote;

namespace {

// Pinned thresholds.
constexpr double count_run_limit_s = 10.0;
constexpr double time_tolerance = 0.20;
constexpr std::uint64_t timed_region_floor_ns = 1'000'000;
constexpr int timing_repetitions = 3;
constexpr double check_limit_s = 30.0;
constexpr double parse_limit_s = 5.0;
constexpr int counting_functions = 251;
constexpr int scripted_calls = 5000;
constexpr int wait_calls = 20;
constexpr long wait_us = 1000;
constexpr int recursion_depth = 100;
constexpr int synthetic_declarations = 13000;

const std::vector<std::string> variants{"linktime-static", "linktime-shared", "runtime-static", "runtime-shared"};

class Failure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw Failure(message);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt_seconds(double s) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.2fs", s);
    return buffer;
}

std::string tail(const std::string& text, std::size_t n = 1500) {
    return text.size() <= n ? text : "..." + text.substr(text.size() - n);
}

// One install prefix shared by every wrapper the suite builds.
class Bench {
public:
    Bench() : root_("libwrap-acceptance"), prefix_(root_ / "prefix") {}

    const fs::path& root() const { return root_.path(); }

    ProcessResult libwrap(const std::vector<std::string>& args) const {
        return testsupport::run_libwrap(args, root(), {{"LIBWRAP_PREFIX", prefix_.string()}});
    }

    ProcessResult libwrap_ok(const std::vector<std::string>& args) const {
        ProcessResult r = libwrap(args);
        require(r.ok(), "libwrap " + (args.empty() ? std::string() : args.front()) + " failed:\n" + tail(r.out) +
                            tail(r.err));
        return r;
    }

    // init + umbrella header + example (+ filter lines), then build and install.
    fs::path wrap(const FixtureLibrary& lib, const std::string& example, const std::string& filter_extra = "",
                  const std::vector<std::string>& init_extra = {}) const {
        fs::path dir = root() / ("w_" + lib.name);
        std::vector<std::string> args = testsupport::init_args_for(lib, lib.name, dir);
        args.insert(args.end() - 1, init_extra.begin(), init_extra.end());
        libwrap_ok(args);
        testsupport::write_text(dir / "libwrap.h", "#include <" + lib.name + ".h>\n");
        testsupport::write_text(WorkingDir::at(dir).example_source, example);
        if (!filter_extra.empty()) {
            testsupport::write_text(dir / "libwrap.filter", read_file(dir / "libwrap.filter") + filter_extra);
        }
        libwrap_ok({"build", dir.string()});
        libwrap_ok({"install", dir.string()});
        return dir;
    }

    // Links `source` against the given libraries through `libwrap link`.
    // `requests` empty: a plain, unwrapped build.
    fs::path link(const std::string& exe_name, const fs::path& source, const std::vector<std::string>& requests,
                  const std::vector<const FixtureLibrary*>& libs, bool static_targets = false) const {
        fs::path exe = root() / exe_name;
        std::vector<std::string> cmd{"cc", "-O1", source.string(), "-o", exe.string()};
        for (const auto* lib : libs) cmd.push_back("-I" + lib->include_dir.string());
        for (const auto* lib : libs) {
            fs::path dir = static_targets ? lib->static_dir : lib->lib_dir;
            cmd.push_back("-L" + dir.string());
            if (!static_targets) cmd.push_back("-Wl,-rpath," + dir.string());
        }
        for (const auto* lib : libs) cmd.push_back("-l" + lib->name);
        if (requests.empty()) {
            testsupport::sh_ok(format_command(cmd));
            return exe;
        }
        std::vector<std::string> args{"link"};
        for (const auto& r : requests) args.push_back("--libwrap=" + r);
        args.push_back("--");
        args.insert(args.end(), cmd.begin(), cmd.end());
        libwrap_ok(args);
        return exe;
    }

    struct Run {
        std::string out;
        Profile profile;
        fs::path counters;
    };

    Run run(const fs::path& exe, const std::string& tag, bool with_counters = false) const {
        fs::path profile = root() / ("profile_" + tag + ".json");
        fs::path counters = root() / ("counters_" + tag + ".txt");
        fs::remove(profile);
        std::string cmd = quote(exe) + (with_counters ? " " + quote(counters) : "");
        ProcessResult r = testsupport::sh(cmd, root(), {{"LIBWRAP_PROFILE_OUT", profile.string()}});
        require(r.ok(), exe.filename().string() + " exited with " + std::to_string(r.exit_code) + ": " + tail(r.err));
        require(fs::exists(profile), exe.filename().string() + " wrote no profile");
        return Run{r.out, load_profile(profile), counters};
    }

private:
    testsupport::TempDir root_;
    fs::path prefix_;
};

std::string describe_count_diff(const std::map<std::string, std::uint64_t>& got,
                                const std::map<std::string, std::uint64_t>& want) {
    std::ostringstream out;
    int shown = 0;
    for (const auto& [name, n] : want) {
        auto it = got.find(name);
        std::uint64_t g = it == got.end() ? 0 : it->second;
        if (g != n && shown++ < 5) out << " " << name << ": " << g << " vs " << n << ";";
    }
    for (const auto& [name, n] : got) {
        if (!want.contains(name) && shown++ < 5) out << " unexpected " << name << ": " << n << ";";
    }
    return out.str();
}

void walk(const std::vector<ProfileNode>& nodes, const std::function<void(const ProfileNode&)>& visit) {
    for (const auto& n : nodes) {
        visit(n);
        walk(n.children, visit);
    }
}

// Per-region inclusive time summed over call paths, minimum over several runs.
std::map<std::string, std::uint64_t> inclusive_by_region(const Profile& p) {
    std::map<std::string, std::uint64_t> out;
    for (const auto& e : flat_profile(p)) out[e.name] = e.incl_ns;
    return out;
}

// The counting fixture, wrapped once, linked in every variant.
struct CountingSetup {
    testsupport::CountingFixture fixture;
    double build_s = 0;
    std::map<std::string, fs::path> executables;
    std::map<std::string, double> link_s;
};

CountingSetup& counting(const Bench& bench) {
    static std::unique_ptr<CountingSetup> setup;
    if (setup) return *setup;
    auto fresh = std::make_unique<CountingSetup>();
    fresh->fixture = testsupport::build_counting_fixture(bench.root(), counting_functions, scripted_calls, wait_calls,
                                                         wait_us);
    auto start = std::chrono::steady_clock::now();
    bench.wrap(fresh->fixture.lib, read_file(fresh->fixture.driver_source), "FUNCTIONS:\nEXCLUDE cnt_counter_*\n");
    fresh->build_s = seconds_since(start);
    for (const auto& v : variants) {
        auto t = std::chrono::steady_clock::now();
        fresh->executables[v] = bench.link("cnt_" + v, fresh->fixture.driver_source, {v + ":cnt"}, {&fresh->fixture.lib});
        fresh->link_s[v] = seconds_since(t);
    }
    setup = std::move(fresh);
    return *setup;
}

struct CountResult {
    bool exact = false;
    std::string detail;
    double seconds = 0;
};

CountResult exact_counts(const Bench& bench, const std::string& variant) {
    CountingSetup& s = counting(bench);
    auto start = std::chrono::steady_clock::now();
    Bench::Run run = bench.run(s.executables.at(variant), "count_" + variant, true);
    auto counters = testsupport::read_counter_dump(run.counters);
    auto counts = call_counts(run.profile);
    CountResult r;
    r.seconds = seconds_since(start) + s.build_s + s.link_s.at(variant);
    std::uint64_t total = 0;
    for (const auto& [n, c] : counters) total += c;
    r.exact = counts == counters && counters.size() == static_cast<std::size_t>(counting_functions);
    r.detail = std::to_string(counters.size()) + " regions, " + std::to_string(total) + " calls";
    if (!r.exact) r.detail += ";" + describe_count_diff(counts, counters);
    return r;
}

struct EquivalenceResult {
    bool ok = false;
    std::string detail;
};

// Same counts, and inclusive times within tolerance on regions above the floor.
EquivalenceResult method_equivalence(const Bench& bench, const std::string& linkage) {
    CountingSetup& s = counting(bench);
    std::map<std::string, std::map<std::string, std::uint64_t>> best;
    std::map<std::string, std::map<std::string, std::uint64_t>> counts;
    // Alternating the methods run by run exposes both to the same machine load.
    for (int i = 0; i < timing_repetitions; ++i) {
        for (const std::string method : {"linktime", "runtime"}) {
            std::string v = method + "-" + linkage;
            Bench::Run run = bench.run(s.executables.at(v), "equiv_" + v + "_" + std::to_string(i));
            auto c = call_counts(run.profile);
            if (i == 0) counts[method] = c;
            if (c != counts[method]) return {false, v + " counts differ between runs"};
            for (const auto& [name, ns] : inclusive_by_region(run.profile)) {
                auto [it, inserted] = best[method].emplace(name, ns);
                if (!inserted) it->second = std::min(it->second, ns);
            }
        }
    }
    if (counts["linktime"] != counts["runtime"]) {
        return {false, "call counts differ:" + describe_count_diff(counts["runtime"], counts["linktime"])};
    }
    int timed = 0;
    double worst = 0;
    std::string worst_name;
    for (const auto& [name, lt] : best["linktime"]) {
        std::uint64_t rt = best["runtime"].at(name);
        if (std::max(lt, rt) <= timed_region_floor_ns) continue;
        ++timed;
        double rel = std::abs(static_cast<double>(lt) - static_cast<double>(rt)) / static_cast<double>(std::max(lt, rt));
        if (rel > worst) {
            worst = rel;
            worst_name = name;
        }
    }
    std::ostringstream detail;
    detail << counts["linktime"].size() << " regions with identical counts; " << timed << " timed region(s) > 1 ms, "
           << "largest inclusive-time difference " << static_cast<int>(worst * 1000) / 10.0 << "%"
           << (worst_name.empty() ? "" : " (" + worst_name + ")");
    return {timed > 0 && worst <= time_tolerance, detail.str()};
}

std::string criterion1(const Bench& bench) {
    CountResult r = exact_counts(bench, "linktime-shared");
    require(r.exact, "profile counts differ from the fixture counters: " + r.detail);
    require(r.seconds < count_run_limit_s,
            "took " + fmt_seconds(r.seconds) + ", limit " + fmt_seconds(count_run_limit_s));
    return r.detail + " (build, link and run " + fmt_seconds(r.seconds) + ")";
}

std::string criterion2(const Bench& bench) {
    EquivalenceResult r = method_equivalence(bench, "shared");
    require(r.ok, r.detail);
    return r.detail;
}

std::string criterion3(const Bench& bench) {
    std::ostringstream header;
    std::ostringstream source;
    source << "#include \"rec20.h\"\n";
    for (int i = 0; i < 20; ++i) {
        header << "int rec20_fn" << i << "(int x);\n";
        if (i % 5 < 3) source << "int rec20_fn" << i << "(int x) { return x + " << i << "; }\n";
    }
    FixtureLibrary lib = testsupport::build_fixture_library(bench.root(), "rec20", header.str(), source.str());
    std::vector<std::string> expected;
    for (int i = 0; i < 20; ++i) {
        if (i % 5 >= 3) expected.push_back("rec20_fn" + std::to_string(i));
    }
    std::sort(expected.begin(), expected.end());

    auto start = std::chrono::steady_clock::now();
    fs::path dir = bench.root() / "w_rec20";
    bench.libwrap_ok(testsupport::init_args_for(lib, "rec20", dir));
    testsupport::write_text(dir / "libwrap.h", "#include <rec20.h>\n");
    testsupport::write_text(WorkingDir::at(dir).example_source, "#include <rec20.h>\nint main(void)\n{\n    return rec20_fn0(0);\n}\n");
    ProcessResult first = bench.libwrap({"build", dir.string()});
    require(!first.ok(), "build succeeded although the library lacks 8 declared functions");

    ProcessResult probe = bench.libwrap_ok({"check", dir.string()});
    std::string probe_missing = read_file(dir / "missing.txt");
    ProcessResult symbols = bench.libwrap_ok({"check", "--symbols", dir.string()});
    std::string symbols_missing = read_file(dir / "missing.txt");
    std::string want;
    for (const auto& n : expected) want += n + "\n";
    require(probe_missing == want, "probe mode reported:\n" + probe_missing);
    require(symbols_missing == probe_missing, "symbol-table mode reported:\n" + symbols_missing);
    require(read_file(dir / "resolvable_without_target.txt").empty(), "unexpected functions resolvable without target");

    // Append the fragment exactly as printed.
    auto at = probe.out.find("FUNCTIONS:\n");
    require(at != std::string::npos, "check printed no filter fragment:\n" + probe.out);
    std::string fragment = probe.out.substr(at);
    testsupport::write_text(dir / "libwrap.filter", read_file(dir / "libwrap.filter") + fragment);
    bench.libwrap_ok({"build", dir.string()});
    ProcessResult again = bench.libwrap_ok({"check", dir.string()});
    require(again.out.find("The wrapper is consistent") != std::string::npos, "check is not clean after the fix");
    std::size_t wrapped = parse_wrap_manifest(read_file(dir / "rec20.wrap")).size();
    require(wrapped == 12, "expected 12 wrapped functions, got " + std::to_string(wrapped));
    double elapsed = seconds_since(start);
    require(elapsed < check_limit_s, "took " + fmt_seconds(elapsed) + ", limit " + fmt_seconds(check_limit_s));
    return "8 missing reported by both modes; build succeeds with 12 wrapped (" + fmt_seconds(elapsed) + ")";
}

std::string criterion4(const Bench& bench) {
    FixtureLibrary lib = testsupport::build_fixture_library(
        bench.root(), "vlog",
        "#include <stdarg.h>\nint logf_style(const char *fmt, ...);\nint vlogf_style(const char *fmt, va_list ap);\n",
        "#include <stdio.h>\n#include \"vlog.h\"\n"
        "int vlogf_style(const char *fmt, va_list ap)\n{\n    int n = printf(\"[log] \");\n"
        "    n += vprintf(fmt, ap);\n    fflush(stdout);\n    return n;\n}\n"
        "int logf_style(const char *fmt, ...)\n{\n    va_list ap;\n    int n;\n    va_start(ap, fmt);\n"
        "    n = vlogf_style(fmt, ap);\n    va_end(ap);\n    return n;\n}\n");
    const std::string driver =
        "#include <stdio.h>\n#include <stdarg.h>\n#include <vlog.h>\n"
        "static int via_v(const char *fmt, ...)\n{\n    va_list ap;\n    int n;\n    va_start(ap, fmt);\n"
        "    n = vlogf_style(fmt, ap);\n    va_end(ap);\n    return n;\n}\n"
        "int main(void)\n{\n    int r = 0;\n"
        "    r += logf_style(\"plain\\n\");\n"
        "    r += logf_style(\"%d %u %ld %lld\\n\", -7, 7u, -70000000000L, 1234567890123LL);\n"
        "    r += logf_style(\"%s|%c|%5.2f|%e|%a\\n\", \"str\", 'q', 3.14159, 1e-300, 0.1);\n"
        "    r += logf_style(\"%x %o %hhd %hd %zu\\n\", 255u, 8u, (signed char)-3, (short)-300, sizeof(long));\n"
        "    r += logf_style(\"%d %d %d %d %d %d %d %d %d %d %f %f %f %f %f %f %f %f %f\\n\", 1, 2, 3, 4, 5, 6, 7, 8, "
        "9, 10, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0);\n"
        "    r += via_v(\"%s %d\\n\", \"direct\", 42);\n"
        "    printf(\"total %d\\n\", r);\n    return 0;\n}\n";

    fs::path dir = bench.root() / "w_vlog";
    bench.libwrap_ok(testsupport::init_args_for(lib, "vlog", dir));
    testsupport::write_text(dir / "libwrap.h", "#include <vlog.h>\n");
    testsupport::write_text(WorkingDir::at(dir).example_source, driver);
    ProcessResult unmapped = bench.libwrap_ok({"build", dir.string()});
    require((unmapped.out + unmapped.err).find("cannot be forwarded in C") != std::string::npos,
            "no variadic warning without the mapping:\n" + tail(unmapped.err));
    auto names = parse_wrap_manifest(read_file(dir / "vlog.wrap"));
    require(names == std::vector<std::string>{"vlogf_style"}, "logf_style was not excluded without the mapping");

    bench.libwrap_ok({"init", "--update", "--ellipsis-mapping", "logf_style:vlogf_style", dir.string()});
    ProcessResult mapped = bench.libwrap_ok({"build", dir.string()});
    require((mapped.out + mapped.err).find("cannot be forwarded") == std::string::npos, "warning despite the mapping");
    names = parse_wrap_manifest(read_file(dir / "vlog.wrap"));
    require(names == (std::vector<std::string>{"logf_style", "vlogf_style"}), "logf_style not wrapped with mapping");
    bench.libwrap_ok({"install", dir.string()});

    fs::path src = bench.root() / "vlog_driver.c";
    testsupport::write_text(src, driver);
    std::string reference = testsupport::sh_ok(quote(bench.link("vlog_plain", src, {}, {&lib})));
    for (const auto& v : variants) {
        Bench::Run run = bench.run(bench.link("vlog_" + v, src, {v + ":vlog"}, {&lib}), "vlog_" + v);
        require(run.out == reference, v + " output differs:\n" + run.out + "expected:\n" + reference);
        auto counts = call_counts(run.profile);
        std::map<std::string, std::uint64_t> want{{"logf_style", 5}, {"vlogf_style", 1}};
        require(counts == want, v + " recorded" + describe_count_diff(counts, want));
    }
    return "warning and exclusion without the mapping; " + std::to_string(reference.size()) +
           " output bytes identical in 4 variants with it";
}

std::string criterion5(const Bench& bench) {
    FixtureLibrary lib = testsupport::build_fixture_library(
        bench.root(), "fid",
        "#include <stddef.h>\n"
        "struct fid_small { int a; float b; };\n"
        "struct fid_big { long a[5]; double d; char tag[13]; };\n"
        "typedef int (*fid_op)(int, int);\n"
        "int fid_int(int a, unsigned b, long long c, signed char d);\n"
        "double fid_double(double x, float y, long double z);\n"
        "float fid_float(float x);\n"
        "long double fid_ldouble(long double x);\n"
        "char *fid_ptr(char *buf, size_t n, const char *src);\n"
        "struct fid_small fid_small_swap(struct fid_small s);\n"
        "struct fid_big fid_big_mix(struct fid_big b, int k);\n"
        "int fid_apply(fid_op op, int a, int b);\n"
        "fid_op fid_pick(int which);\n"
        "void fid_mutate(int *out, size_t n);\n"
        "unsigned long fid_state(void);\n"
        "int fid_many(int a, double b, int c, double d, int e, double f, int g, double h, int i, double j, int k, "
        "double l, int m, double n, int o, double p, int q, double r);\n",
        "#include <string.h>\n#include \"fid.h\"\n"
        "static unsigned long state = 17;\n"
        "static void touch(unsigned long v) { state = state * 1103515245UL + v; }\n"
        "int fid_int(int a, unsigned b, long long c, signed char d) { touch(1); return (int)(a * 31 ^ (int)b) + "
        "(int)(c % 1000) + d; }\n"
        "double fid_double(double x, float y, long double z) { touch(2); return x / 3.0 + y + (double)(z / 7.0L); }\n"
        "float fid_float(float x) { touch(3); return x * 1.1f; }\n"
        "long double fid_ldouble(long double x) { touch(4); return x / 3.0L; }\n"
        "char *fid_ptr(char *buf, size_t n, const char *src) { size_t i; touch(5); for (i = 0; i + 1 < n && "
        "src[i]; ++i) buf[i] = (char)(src[i] ^ 0x20); buf[i] = 0; return buf + i / 2; }\n"
        "struct fid_small fid_small_swap(struct fid_small s) { struct fid_small r; touch(6); r.a = (int)s.b; r.b = "
        "(float)s.a / 3.0f; return r; }\n"
        "struct fid_big fid_big_mix(struct fid_big b, int k) { int i; touch(7); for (i = 0; i < 5; ++i) b.a[i] = "
        "b.a[i] * k - i; b.d = b.d / k; b.tag[0] = 'X'; return b; }\n"
        "int fid_apply(fid_op op, int a, int b) { touch(8); return op(a, b) * 2; }\n"
        "static int op_sub(int a, int b) { return a - b; }\n"
        "static int op_mul(int a, int b) { return a * b; }\n"
        "fid_op fid_pick(int which) { touch(9); return which ? op_mul : op_sub; }\n"
        "void fid_mutate(int *out, size_t n) { size_t i; touch(10); for (i = 0; i < n; ++i) out[i] = out[i] * 3 + "
        "(int)i; }\n"
        "unsigned long fid_state(void) { return state; }\n"
        "int fid_many(int a, double b, int c, double d, int e, double f, int g, double h, int i, double j, int k, "
        "double l, int m, double n, int o, double p, int q, double r) { touch(11); return a + c + e + g + i + k + m "
        "+ o + q + (int)(b * 2 + d * 3 + f * 5 + h * 7 + j * 11 + l * 13 + n * 17 + p * 19 + r * 23); }\n");
    const std::string driver =
        "#include <stdio.h>\n#include <string.h>\n#include <fid.h>\n"
        "static void bits(const char *label, const void *p, size_t n)\n{\n    const unsigned char *b = p;\n"
        "    size_t i;\n    printf(\"%s \", label);\n    for (i = 0; i < n; ++i) printf(\"%02x\", b[i]);\n"
        "    printf(\"\\n\");\n}\n"
        "static int op_add(int a, int b) { return a + b + 1000; }\n"
        "int main(void)\n{\n"
        "    char buf[32];\n    int arr[6] = {1, -2, 3, -4, 5, -6};\n    int r;\n    double d;\n    float f;\n"
        "    long double ld;\n    char *p;\n    struct fid_small s = {7, 2.5f}, s2;\n    struct fid_big b, b2;\n"
        "    fid_op op;\n    size_t i;\n"
        "    memset(&b, 0, sizeof b);\n    for (i = 0; i < 5; ++i) b.a[i] = (long)(i * 1000003);\n"
        "    b.d = 6.02e23;\n    strcpy(b.tag, \"tag-value\");\n"
        "    r = fid_int(-123456, 4000000000u, -9007199254740993LL, (signed char)-128); bits(\"int\", &r, sizeof r);\n"
        "    d = fid_double(0.1, 1e-38f, 1e-4000L); bits(\"double\", &d, sizeof d);\n"
        "    f = fid_float(3.4e38f); bits(\"float\", &f, sizeof f);\n"
        "    ld = fid_ldouble(1.0L); bits(\"ldouble\", &ld, 10);\n"
        "    p = fid_ptr(buf, sizeof buf, \"forwarding fidelity\"); printf(\"ptr %ld %s\\n\", (long)(p - buf), buf);\n"
        "    s2 = fid_small_swap(s); bits(\"small\", &s2, sizeof s2);\n"
        "    b2 = fid_big_mix(b, 3); bits(\"big.a\", b2.a, sizeof b2.a); bits(\"big.d\", &b2.d, sizeof b2.d);\n"
        "    printf(\"big.tag %s\\n\", b2.tag);\n"
        "    r = fid_apply(op_add, 3, 4); bits(\"apply\", &r, sizeof r);\n"
        "    op = fid_pick(1); r = op(6, 7); bits(\"pick1\", &r, sizeof r);\n"
        "    op = fid_pick(0); r = fid_apply(op, 6, 7); bits(\"pick0\", &r, sizeof r);\n"
        "    fid_mutate(arr, 6); bits(\"mutate\", arr, sizeof arr);\n"
        "    r = fid_many(1, 0.5, 2, 0.25, 3, 0.125, 4, 1.5, 5, 2.5, 6, 3.5, 7, 4.5, 8, 5.5, 9, 6.5);\n"
        "    bits(\"many\", &r, sizeof r);\n"
        "    printf(\"state %lu\\n\", fid_state());\n"
        "    return 0;\n}\n";

    bench.wrap(lib, driver);
    fs::path src = bench.root() / "fid_driver.c";
    testsupport::write_text(src, driver);
    std::string reference = testsupport::sh_ok(quote(bench.link("fid_plain", src, {}, {&lib})));
    for (const auto& v : variants) {
        Bench::Run run = bench.run(bench.link("fid_" + v, src, {v + ":fid"}, {&lib}), "fid_" + v);
        require(run.out == reference, v + " differs from the unwrapped run:\n" + run.out + "expected:\n" + reference);
        auto counts = call_counts(run.profile);
        require(counts.size() == 12 && counts.at("fid_pick") == 2 && counts.at("fid_apply") == 2,
                v + " did not intercept every fixture function");
    }
    return "12 functions, " + std::to_string(std::count(reference.begin(), reference.end(), '\n')) +
           " observations bit-identical in 4 variants";
}

// Every node: children's inclusive time fits in the parent's, and the
// exclusive time is exactly the remainder.
std::string algebra_violation(const Profile& p, std::uint64_t resolution_ns) {
    std::string problem;
    walk(p.roots, [&](const ProfileNode& n) {
        std::uint64_t children = 0;
        for (const auto& c : n.children) children += c.incl_ns;
        if (children > n.incl_ns + resolution_ns) {
            problem = p.region(n.region).name + ": children " + std::to_string(children) + "ns > inclusive " +
                      std::to_string(n.incl_ns) + "ns";
        } else if (n.excl_ns != (n.incl_ns > children ? n.incl_ns - children : 0)) {
            problem = p.region(n.region).name + ": exclusive time is not inclusive minus children";
        }
    });
    return problem;
}

std::string criterion6(const Bench& bench) {
    timespec res{};
    clock_getres(CLOCK_MONOTONIC, &res);
    const std::uint64_t resolution_ns = static_cast<std::uint64_t>(res.tv_sec) * 1000000000u +
                                        static_cast<std::uint64_t>(res.tv_nsec);

    // Recursion: the library calls back into the driver, which calls the library again.
    FixtureLibrary rec = testsupport::build_fixture_library(
        bench.root(), "rec",
        "typedef int (*rec_cb)(int depth);\nint rec_walk(int depth, rec_cb cb);\n",
        "#include \"rec.h\"\nint rec_walk(int depth, rec_cb cb)\n{\n    volatile int spin;\n    int i;\n"
        "    for (i = 0; i < 2000; ++i) spin = i;\n    (void)spin;\n    return depth > 1 ? cb(depth - 1) + 1 : 1;\n}\n");
    const std::string rec_driver =
        "#include <stdio.h>\n#include <rec.h>\n"
        "static int again(int depth) { return rec_walk(depth, again); }\n"
        "int main(void)\n{\n    printf(\"%d\\n\", rec_walk(" +
        std::to_string(recursion_depth) + ", again));\n    return 0;\n}\n";
    bench.wrap(rec, rec_driver);
    fs::path rec_src = bench.root() / "rec_driver.c";
    testsupport::write_text(rec_src, rec_driver);
    for (const auto& v : variants) {
        Bench::Run run = bench.run(bench.link("rec_" + v, rec_src, {v + ":rec"}, {&rec}), "rec_" + v);
        require(run.out == std::to_string(recursion_depth) + "\n", v + " recursion result " + run.out);
        int depth = 0;
        const std::vector<ProfileNode>* level = &run.profile.roots;
        while (!level->empty()) {
            require(level->size() == 1 && level->front().count == 1, v + ": unexpected tree shape at depth " +
                                                                         std::to_string(depth));
            ++depth;
            level = &level->front().children;
        }
        require(depth == recursion_depth, v + ": call tree depth " + std::to_string(depth));
        std::string problem = algebra_violation(run.profile, resolution_ns);
        require(problem.empty(), v + ": " + problem);
    }

    // Library to library: libxhi calls libxlo.
    FixtureLibrary lo = testsupport::build_fixture_library(
        bench.root(), "xlo", "int xlo_leaf(int x);\n",
        "#include \"xlo.h\"\nint xlo_leaf(int x)\n{\n    volatile int s = 0;\n    int i;\n"
        "    for (i = 0; i < 5000; ++i) s += i;\n    return x + (s & 1);\n}\n");
    FixtureLibrary hi = testsupport::build_fixture_library(
        bench.root(), "xhi", "int xhi_call(int x);\n",
        "#include \"xhi.h\"\nint xlo_leaf(int x);\nint xhi_call(int x)\n{\n    return xlo_leaf(x) + xlo_leaf(x + 1);\n}\n",
        "-L" + lo.lib_dir.string() + " -Wl,-rpath," + lo.lib_dir.string() + " -lxlo");
    const std::string cross_driver =
        "#include <stdio.h>\n#include <xhi.h>\n#include <xlo.h>\n"
        "int main(void)\n{\n    int i, s = 0;\n    for (i = 0; i < 10; ++i) s += xhi_call(i);\n"
        "    s += xlo_leaf(100);\n    printf(\"%d\\n\", s);\n    return 0;\n}\n";
    bench.wrap(lo, "#include <xlo.h>\nint main(void)\n{\n    return xlo_leaf(0) < 0;\n}\n");
    bench.wrap(hi, "#include <xhi.h>\nint main(void)\n{\n    return xhi_call(0) < 0;\n}\n");
    fs::path cross_src = bench.root() / "cross_driver.c";
    testsupport::write_text(cross_src, cross_driver);
    std::string expected = testsupport::sh_ok(quote(bench.link("cross_plain", cross_src, {}, {&hi, &lo})));

    struct CrossCase {
        std::string label;
        std::vector<std::string> requests;
        bool static_targets;
    };
    for (const CrossCase& c : {CrossCase{"runtime-shared", {"runtime-shared:xhi", "runtime-shared:xlo"}, false},
                               CrossCase{"linktime-static with archives",
                                         {"linktime-static:xhi", "linktime-static:xlo"}, true}}) {
        std::string tag = c.static_targets ? "cross_lts" : "cross_rts";
        Bench::Run run = bench.run(bench.link(tag, cross_src, c.requests, {&hi, &lo}, c.static_targets), tag);
        require(run.out == expected, c.label + ": output differs");
        const Profile& p = run.profile;
        const ProfileNode* hi_node = nullptr;
        const ProfileNode* lo_root = nullptr;
        for (const auto& n : p.roots) {
            if (p.region(n.region).name == "xhi_call") hi_node = &n;
            if (p.region(n.region).name == "xlo_leaf") lo_root = &n;
        }
        require(hi_node != nullptr && hi_node->count == 10, c.label + ": xhi_call not recorded 10 times");
        require(lo_root != nullptr && lo_root->count == 1, c.label + ": direct xlo_leaf call not recorded once");
        require(hi_node->children.size() == 1 && p.region(hi_node->children[0].region).name == "xlo_leaf" &&
                    hi_node->children[0].count == 20,
                c.label + ": library-to-library calls not nested under xhi_call");
        std::string problem = algebra_violation(p, resolution_ns);
        require(problem.empty(), c.label + ": " + problem);
    }
    return "depth-" + std::to_string(recursion_depth) +
           " recursion in 4 variants and library-to-library calls (runtime-shared, linktime-static) balanced; "
           "clock resolution " + std::to_string(resolution_ns) + "ns";
}

std::string criterion7(const Bench& bench) {
    // Shapes cycle through scalars, pointers, records, typedefs, function
    // pointers, arrays, variadics and empty lists.
    std::ostringstream text;
    text << "typedef unsigned long syn_size;\ntypedef struct syn_opaque syn_handle;\n"
            "struct syn_rec { int a; };\nenum syn_kind { SYN_A, SYN_B };\n";
    const char* shapes[] = {
        "int %s(int a, int b);\n",
        "const char *%s(syn_handle *h, syn_size n);\n",
        "void %s(void);\n",
        "struct syn_rec %s(struct syn_rec r, enum syn_kind k);\n",
        "int (*%s(int which))(double, void *);\n",
        "void %s(void (*cb)(int, const char *), void *user);\n",
        "double %s(const double values[], unsigned long long count);\n",
        "int %s(const char *restrict fmt, ...);\n",
        "unsigned short %s(volatile int *const p, char matrix[][4]);\n",
        "static inline int %s(int x) { return x * 2; }\n",
        "extern long double %s(float, signed char, _Bool) __attribute__((pure));\n",
        "syn_handle *%s(syn_handle **out, int (*cmp)(const void *, const void *));\n",
        "int %s();\n",
    };
    const int shape_count = static_cast<int>(sizeof shapes / sizeof shapes[0]);
    char name[32];
    char line[256];
    for (int i = 0; i < synthetic_declarations; ++i) {
        std::snprintf(name, sizeof name, "syn_fn_%05d", i);
        std::snprintf(line, sizeof line, shapes[i % shape_count], name);
        text << line;
    }
    fs::path header = bench.root() / "synthetic.h";
    testsupport::write_text(header, text.str());
    std::string preprocessed = testsupport::sh_ok("cc -E " + quote(header));

    auto start = std::chrono::steady_clock::now();
    std::vector<FunctionDecl> decls = parse_declarations(preprocessed);
    double elapsed = seconds_since(start);
    require(decls.size() == static_cast<std::size_t>(synthetic_declarations),
            "parsed " + std::to_string(decls.size()) + " declarations");
    for (int i = 0; i < synthetic_declarations; i += 997) {
        std::snprintf(name, sizeof name, "syn_fn_%05d", i);
        require(decls[static_cast<std::size_t>(i)].name == name, std::string("declaration order broken at ") + name);
    }
    require(elapsed < parse_limit_s, "took " + fmt_seconds(elapsed) + ", limit " + fmt_seconds(parse_limit_s));
    return std::to_string(decls.size()) + " declarations from " + std::to_string(preprocessed.size() / 1024) +
           " KiB in " + fmt_seconds(elapsed);
}

std::string criterion8(const Bench& bench) {
    CountingSetup& s = counting(bench);
    fs::path dir = bench.root() / "w_cnt";
    for (const auto& v : variants) {
        std::string file = "libcnt_wrap_" + v.substr(0, v.find('-')) + (v.ends_with("static") ? ".a" : ".so");
        require(fs::exists(dir / file), "build did not produce " + file);
    }
    std::ostringstream detail;
    for (const auto& v : variants) {
        CountResult c = exact_counts(bench, v);
        require(c.exact, v + ": " + c.detail);
        require(c.seconds < count_run_limit_s, v + ": took " + fmt_seconds(c.seconds));
    }
    for (const std::string linkage : {"static", "shared"}) {
        EquivalenceResult e = method_equivalence(bench, linkage);
        require(e.ok, linkage + " pair: " + e.detail);
        detail << "; " << linkage << " pair: " << e.detail;
    }
    (void)s;
    return "4 libraries built, exact counts in every variant" + detail.str();
}

}  // namespace

int main() {
    Bench bench;
    const std::vector<std::pair<std::string, std::function<std::string(const Bench&)>>> criteria{
        {"exact-count fidelity", criterion1},   {"method equivalence", criterion2},
        {"symbol reconciliation", criterion3},  {"variadic handling", criterion4},
        {"forwarding fidelity", criterion5},    {"nesting and timing algebra", criterion6},
        {"parser scale", criterion7},           {"four-variant build", criterion8},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& [title, check] = criteria[i];
        std::string verdict = "PASS";
        std::string detail;
        try {
            detail = check(bench);
        } catch (const std::exception& e) {
            verdict = "FAIL";
            detail = e.what();
            ++failures;
        }
        std::cout << verdict << " criterion " << i + 1 << ": " << title << ": " << detail << "\n" << std::flush;
    }
    return failures == 0 ? 0 : 1;
}
