#include "libwrap/filter.hpp"

#include "libwrap/error.hpp"

#include <algorithm>

namespace libwrap {

namespace {

std::string_view trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Matches the bracket expression starting at pattern[i] == '['. Returns the
// index after the closing ']' or npos when the class is unterminated.
std::size_t match_class(std::string_view pattern, std::size_t i, char c, bool& matched) {
    std::size_t j = i + 1;
    bool negate = false;
    if (j < pattern.size() && (pattern[j] == '!' || pattern[j] == '^')) {
        negate = true;
        ++j;
    }
    bool hit = false;
    bool first = true;
    while (j < pattern.size() && (first || pattern[j] != ']')) {
        first = false;
        char lo = pattern[j];
        if (lo == '\\' && j + 1 < pattern.size()) lo = pattern[++j];
        char hi = lo;
        if (j + 2 < pattern.size() && pattern[j + 1] == '-' && pattern[j + 2] != ']') {
            hi = pattern[j + 2];
            if (hi == '\\' && j + 3 < pattern.size()) {
                hi = pattern[j + 3];
                ++j;
            }
            j += 2;
        }
        if (lo <= c && c <= hi) hit = true;
        ++j;
    }
    if (j >= pattern.size()) return std::string_view::npos;
    matched = hit != negate;
    return j + 1;
}

bool is_under(const fs::path& file, const fs::path& dir) {
    auto f = file.begin();
    for (auto d = dir.begin(); d != dir.end(); ++d) {
        if (d->empty()) continue;  // trailing separator
        if (f == file.end() || *f != *d) return false;
        ++f;
    }
    return f != file.end();
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view text) {
    std::size_t p = 0;
    std::size_t t = 0;
    std::size_t star_p = std::string_view::npos;
    std::size_t star_t = 0;
    while (t < text.size()) {
        if (p < pattern.size()) {
            char pc = pattern[p];
            if (pc == '*') {
                star_p = p++;
                star_t = t;
                continue;
            }
            if (pc == '?') {
                ++p;
                ++t;
                continue;
            }
            if (pc == '[') {
                bool matched = false;
                std::size_t next = match_class(pattern, p, text[t], matched);
                if (next != std::string_view::npos) {
                    if (matched) {
                        p = next;
                        ++t;
                        continue;
                    }
                } else if (text[t] == '[') {
                    ++p;
                    ++t;
                    continue;
                }
            } else {
                if (pc == '\\' && p + 1 < pattern.size()) pc = pattern[p + 1];
                if (pc == text[t]) {
                    p += (pattern[p] == '\\' && p + 1 < pattern.size()) ? 2 : 1;
                    ++t;
                    continue;
                }
            }
        }
        if (star_p == std::string_view::npos) return false;
        p = star_p + 1;
        t = ++star_t;
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

std::vector<FilterRule> parse_filter(std::string_view text) {
    std::vector<FilterRule> rules;
    FilterDomain domain = FilterDomain::files;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;

        if (line == "FILES:") {
            domain = FilterDomain::files;
            continue;
        }
        if (line == "FUNCTIONS:") {
            domain = FilterDomain::functions;
            continue;
        }
        auto space = line.find_first_of(" \t");
        std::string_view keyword = line.substr(0, space);
        std::string_view pattern = space == std::string_view::npos ? std::string_view{} : trim(line.substr(space));
        FilterAction action;
        if (keyword == "INCLUDE") {
            action = FilterAction::include;
        } else if (keyword == "EXCLUDE") {
            action = FilterAction::exclude;
        } else {
            throw ValidationError("filter line " + std::to_string(line_no) + ": unknown keyword '" +
                                  std::string(keyword) + "' (expected INCLUDE, EXCLUDE, FILES: or FUNCTIONS:)");
        }
        if (pattern.empty()) {
            throw ValidationError("filter line " + std::to_string(line_no) + ": " + std::string(keyword) +
                                  " needs a pattern");
        }
        rules.push_back(FilterRule{action, domain, std::string(pattern)});
    }
    return rules;
}

std::vector<fs::path> include_dirs_from_flags(const std::vector<std::string>& flags, const fs::path& base) {
    std::vector<fs::path> dirs;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        std::string dir;
        if (flags[i] == "-I" && i + 1 < flags.size()) {
            dir = flags[++i];
        } else if (flags[i].starts_with("-I") && flags[i].size() > 2) {
            dir = flags[i].substr(2);
        } else {
            continue;
        }
        fs::path p(dir);
        if (p.is_relative()) p = base / p;
        dirs.push_back(p.lexically_normal());
    }
    return dirs;
}

bool decide(const FilterSet& filter, const FunctionDecl& decl) {
    fs::path file = fs::path(decl.location.file).lexically_normal();
    bool file_ok = std::any_of(filter.default_include_dirs.begin(), filter.default_include_dirs.end(),
                               [&](const fs::path& dir) { return is_under(file, dir); });
    bool function_ok = true;
    for (const FilterRule& rule : filter.rules) {
        if (rule.domain == FilterDomain::files) {
            if (glob_match(rule.pattern, file.string())) file_ok = rule.action == FilterAction::include;
        } else if (glob_match(rule.pattern, decl.name)) {
            function_ok = rule.action == FilterAction::include;
        }
    }
    return file_ok && function_ok;
}

std::string suggest_exclusions(const SymbolReport& report) {
    if (report.missing.empty() && report.resolvable_without_target.empty()) return {};
    std::string out = "FUNCTIONS:\n";
    for (const auto& name : report.missing) out += "EXCLUDE " + name + "\n";
    for (const auto& name : report.resolvable_without_target) out += "EXCLUDE " + name + "\n";
    return out;
}

}  // namespace libwrap
