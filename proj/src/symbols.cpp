#include "libwrap/symbols.hpp"

#include "libwrap/error.hpp"
#include "libwrap/wrapgen.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <mutex>
#include <ostream>
#include <thread>

#include <elf.h>

namespace libwrap {

namespace {

std::string hex_bytes(std::string_view data, std::size_t n) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (std::size_t i = 0; i < std::min(n, data.size()); ++i) {
        auto b = static_cast<unsigned char>(data[i]);
        if (!out.empty()) out += ' ';
        out += digits[b >> 4];
        out += digits[b & 0xf];
    }
    return out.empty() ? "<empty file>" : out;
}

template <typename T>
T read_at(std::string_view data, std::size_t offset, const fs::path& origin) {
    if (offset > data.size() || data.size() - offset < sizeof(T)) {
        throw Error(origin.string() + ": truncated ELF data");
    }
    T value;
    std::memcpy(&value, data.data() + offset, sizeof(T));
    return value;
}

struct Elf32Traits {
    using Ehdr = Elf32_Ehdr;
    using Shdr = Elf32_Shdr;
    using Sym = Elf32_Sym;
    static unsigned char bind(const Sym& s) { return ELF32_ST_BIND(s.st_info); }
    static unsigned char type(const Sym& s) { return ELF32_ST_TYPE(s.st_info); }
};

struct Elf64Traits {
    using Ehdr = Elf64_Ehdr;
    using Shdr = Elf64_Shdr;
    using Sym = Elf64_Sym;
    static unsigned char bind(const Sym& s) { return ELF64_ST_BIND(s.st_info); }
    static unsigned char type(const Sym& s) { return ELF64_ST_TYPE(s.st_info); }
};

template <typename Traits>
void collect_elf_symbols(std::string_view data, const fs::path& origin, std::set<std::string>& defined,
                         std::set<std::string>& undefined, bool& is_shared) {
    auto ehdr = read_at<typename Traits::Ehdr>(data, 0, origin);
    is_shared = ehdr.e_type == ET_DYN;
    // Shared objects export through .dynsym; objects only have .symtab.
    unsigned wanted = (ehdr.e_type == ET_DYN || ehdr.e_type == ET_EXEC) ? SHT_DYNSYM : SHT_SYMTAB;

    std::vector<typename Traits::Shdr> sections;
    for (unsigned i = 0; i < ehdr.e_shnum; ++i) {
        sections.push_back(read_at<typename Traits::Shdr>(data, ehdr.e_shoff + i * sizeof(typename Traits::Shdr), origin));
    }
    for (const auto& sec : sections) {
        if (sec.sh_type != wanted) continue;
        if (sec.sh_link >= sections.size()) throw Error(origin.string() + ": bad string table link");
        const auto& strtab = sections[sec.sh_link];
        std::size_t count = sec.sh_entsize == 0 ? 0 : sec.sh_size / sec.sh_entsize;
        for (std::size_t i = 1; i < count; ++i) {
            auto sym = read_at<typename Traits::Sym>(data, sec.sh_offset + i * sec.sh_entsize, origin);
            unsigned char bind = Traits::bind(sym);
            unsigned char type = Traits::type(sym);
            if (bind != STB_GLOBAL && bind != STB_WEAK && bind != STB_GNU_UNIQUE) continue;
            if (type == STT_SECTION || type == STT_FILE) continue;
            std::size_t name_off = strtab.sh_offset + sym.st_name;
            if (sym.st_name >= strtab.sh_size || name_off >= data.size()) continue;
            const char* begin = data.data() + name_off;
            std::size_t max_len = std::min<std::size_t>(data.size() - name_off, strtab.sh_size - sym.st_name);
            std::string name(begin, strnlen(begin, max_len));
            if (name.empty()) continue;
            name = strip_symbol_version(name);
            if (sym.st_shndx == SHN_UNDEF) {
                undefined.insert(name);
            } else {
                defined.insert(name);
            }
        }
    }
}

bool is_elf(std::string_view data) { return data.size() >= 4 && data.substr(0, 4) == "\x7f" "ELF"; }

void collect_elf(std::string_view data, const fs::path& origin, std::set<std::string>& defined,
                 std::set<std::string>& undefined, bool& is_shared) {
    if (data.size() < EI_NIDENT) throw Error(origin.string() + ": truncated ELF header");
    const bool host_little = [] {
        std::uint16_t probe = 1;
        unsigned char first;
        std::memcpy(&first, &probe, 1);
        return first == 1;
    }();
    auto encoding = static_cast<unsigned char>(data[EI_DATA]);
    if ((encoding == ELFDATA2LSB) != host_little) {
        throw Error(origin.string() + ": ELF byte order differs from the host; only host objects are supported");
    }
    switch (static_cast<unsigned char>(data[EI_CLASS])) {
    case ELFCLASS32:
        collect_elf_symbols<Elf32Traits>(data, origin, defined, undefined, is_shared);
        break;
    case ELFCLASS64:
        collect_elf_symbols<Elf64Traits>(data, origin, defined, undefined, is_shared);
        break;
    default:
        throw Error(origin.string() + ": unknown ELF class");
    }
}

void collect_archive(std::string_view data, const fs::path& origin, std::set<std::string>& defined,
                     std::set<std::string>& undefined) {
    constexpr std::size_t header_size = 60;
    std::size_t pos = 8;
    while (pos + header_size <= data.size()) {
        std::string_view header = data.substr(pos, header_size);
        if (header.substr(58, 2) != "`\n") throw Error(origin.string() + ": corrupt archive member header");
        std::string name(header.substr(0, 16));
        std::string size_text(header.substr(48, 10));
        std::size_t size = 0;
        try {
            size = std::stoull(size_text);
        } catch (const std::exception&) {
            throw Error(origin.string() + ": corrupt archive member size");
        }
        pos += header_size;
        if (size > data.size() - pos) throw Error(origin.string() + ": truncated archive member");
        std::string_view member = data.substr(pos, size);
        bool index_member = name.starts_with("/ ") || name.starts_with("// ") || name.starts_with("/SYM64/");
        if (!index_member && is_elf(member)) {
            bool ignored = false;
            collect_elf(member, origin, defined, undefined, ignored);
        }
        pos += size + (size % 2);
    }
}

}  // namespace

std::string strip_symbol_version(const std::string& name) {
    auto at = name.find('@');
    return at == std::string::npos ? name : name.substr(0, at);
}

SymbolTable read_symbols(const fs::path& library) {
    std::string data = read_file(library);
    SymbolTable table;
    table.origin = library;
    if (is_elf(data)) {
        bool is_shared = false;
        collect_elf(data, library, table.defined, table.undefined, is_shared);
        table.kind = is_shared ? SymbolTable::Kind::shared_object : SymbolTable::Kind::object_file;
    } else if (data.starts_with("!<arch>\n")) {
        table.kind = SymbolTable::Kind::static_archive;
        collect_archive(data, library, table.defined, table.undefined);
    } else if (data.starts_with("!<thin>\n")) {
        throw Error(library.string() + ": thin archives are not supported");
    } else {
        throw Error(library.string() + ": not a shared object or static archive (magic bytes: " +
                    hex_bytes(data, 8) + ")");
    }
    for (const auto& name : table.defined) table.undefined.erase(name);
    return table;
}

std::vector<fs::path> resolve_library_files(const WrapperConfig& config) {
    std::vector<fs::path> search;
    std::vector<std::string> names;
    std::vector<fs::path> files;
    auto scan = [&](const std::vector<std::string>& flags, bool collect_libs) {
        for (std::size_t i = 0; i < flags.size(); ++i) {
            const std::string& f = flags[i];
            if (f == "-L" && i + 1 < flags.size()) {
                search.emplace_back(flags[++i]);
            } else if (f.starts_with("-L")) {
                search.emplace_back(f.substr(2));
            } else if (collect_libs && f == "-l" && i + 1 < flags.size()) {
                names.push_back(flags[++i]);
            } else if (collect_libs && f.starts_with("-l")) {
                names.push_back(f.substr(2));
            } else if (collect_libs && !f.starts_with("-")) {
                files.emplace_back(f);
            }
        }
    };
    scan(config.linker_flags, false);
    scan(config.libs, true);
    for (const char* dir : {"/usr/local/lib", "/lib/x86_64-linux-gnu", "/usr/lib/x86_64-linux-gnu", "/lib64",
                            "/usr/lib64", "/lib", "/usr/lib"}) {
        search.emplace_back(dir);
    }
    for (const auto& name : names) {
        std::optional<fs::path> found;
        for (const auto& dir : search) {
            // `-l:libfoo.so.1` names a file directly.
            std::vector<std::string> candidates = name.starts_with(":")
                                                      ? std::vector<std::string>{name.substr(1)}
                                                      : std::vector<std::string>{"lib" + name + ".so", "lib" + name + ".a"};
            for (const auto& file : candidates) {
                if (fs::exists(dir / file)) {
                    found = dir / file;
                    break;
                }
            }
            if (found) break;
        }
        if (!found) throw Error("cannot find the library file for '-l" + name + "' in the -L directories");
        files.push_back(*found);
    }
    for (const auto& f : files) {
        if (!fs::exists(f)) throw Error("library file " + f.string() + " does not exist");
    }
    return files;
}

SymbolReport reconcile(std::span<const FunctionDecl> candidates, std::span<const SymbolTable> tables,
                       const std::set<std::string>& system_symbols) {
    std::set<std::string> missing;
    std::set<std::string> resolvable;
    for (const FunctionDecl& d : candidates) {
        if (system_symbols.contains(d.name)) {
            resolvable.insert(d.name);
            continue;
        }
        bool found = std::any_of(tables.begin(), tables.end(),
                                 [&](const SymbolTable& t) { return t.defined.contains(d.name); });
        if (!found) missing.insert(d.name);
    }
    return SymbolReport{{missing.begin(), missing.end()}, {resolvable.begin(), resolvable.end()}};
}

SymbolReport probe_check(std::span<const FunctionDecl> candidates, const WrapperConfig& config,
                         const Toolchain& toolchain, const ProbeOptions& options) {
    fs::create_directories(options.work_dir);

    auto link_command = [&](const fs::path& source, const fs::path& output, bool with_target) {
        std::vector<std::string> args{"-fno-builtin", "-w", source.string(), "-o", output.string()};
        args.insert(args.end(), config.linker_flags.begin(), config.linker_flags.end());
        if (with_target) args.insert(args.end(), config.libs.begin(), config.libs.end());
        return toolchain.compile_command(args);
    };

    {
        fs::path dir = options.work_dir / "sanity";
        fs::create_directories(dir);
        write_file_atomic(dir / "sanity.c", "int main(void)\n{\n    return 0;\n}\n");
        auto cmd = link_command(dir / "sanity.c", dir / "sanity", false);
        ProcessResult r = toolchain.run(cmd);
        if (!r.ok()) {
            throw CommandError("the toolchain cannot compile and link a trivial program; fix the compiler "
                               "setup before checking symbols",
                               format_command(cmd), r.err);
        }
    }

    if (options.progress != nullptr && candidates.size() > options.notice_threshold) {
        *options.progress << "Checking " << candidates.size() << " functions; this may take some time.\n";
    }

    enum class Outcome { present, missing, resolvable_without_target };
    std::vector<Outcome> outcomes(candidates.size(), Outcome::present);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::mutex progress_mutex;

    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= candidates.size()) return;
            try {
                fs::path dir = options.work_dir / ("probe_" + std::to_string(i));
                fs::create_directories(dir);
                fs::path source = dir / "probe.c";
                write_file_atomic(source, generate_probe_source(candidates[i]));
                if (!toolchain.run(link_command(source, dir / "with_target", true)).ok()) {
                    outcomes[i] = Outcome::missing;
                } else if (toolchain.run(link_command(source, dir / "without_target", false)).ok()) {
                    outcomes[i] = Outcome::resolvable_without_target;
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
            std::size_t finished = ++done;
            if (options.progress != nullptr && candidates.size() > options.notice_threshold &&
                finished % std::max<std::size_t>(1, candidates.size() / 10) == 0) {
                std::lock_guard lock(progress_mutex);
                *options.progress << "  " << finished << "/" << candidates.size() << " checked\n";
            }
        }
    };

    unsigned jobs = options.jobs != 0 ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, candidates.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);

    std::set<std::string> missing;
    std::set<std::string> resolvable;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (outcomes[i] == Outcome::missing) missing.insert(candidates[i].name);
        if (outcomes[i] == Outcome::resolvable_without_target) resolvable.insert(candidates[i].name);
    }
    return SymbolReport{{missing.begin(), missing.end()}, {resolvable.begin(), resolvable.end()}};
}

}  // namespace libwrap
