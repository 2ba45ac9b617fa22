#include "libwrap/profile.hpp"

#include "libwrap/error.hpp"
#include "libwrap/process.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>

namespace libwrap {

namespace {

using nlohmann::json;

ProfileNode node_from_json(const json& j, std::size_t region_count) {
    ProfileNode node;
    node.region = j.at("region").get<int>();
    if (node.region < 0 || static_cast<std::size_t>(node.region) >= region_count) {
        throw Error("profile node refers to unknown region " + std::to_string(node.region));
    }
    node.count = j.at("count").get<std::uint64_t>();
    node.incl_ns = j.at("incl_ns").get<std::uint64_t>();
    node.excl_ns = j.at("excl_ns").get<std::uint64_t>();
    if (auto it = j.find("children"); it != j.end()) {
        for (const auto& child : *it) node.children.push_back(node_from_json(child, region_count));
    }
    return node;
}

json node_to_json(const ProfileNode& node) {
    json children = json::array();
    for (const auto& child : node.children) children.push_back(node_to_json(child));
    return json{{"region", node.region},
                {"count", node.count},
                {"incl_ns", node.incl_ns},
                {"excl_ns", node.excl_ns},
                {"children", children}};
}

// Adds `source` (regions from `from`) into `target` (regions of `into`).
void merge_node_list(std::vector<ProfileNode>& target, const std::vector<ProfileNode>& source, const Profile& from,
                     Profile& into, std::map<std::string, int>& ids) {
    for (const auto& node : source) {
        const ProfileRegion& region = from.region(node.region);
        auto [it, inserted] = ids.emplace(region.name, static_cast<int>(into.regions.size()));
        if (inserted) into.regions.push_back(ProfileRegion{it->second, region.name, region.file, region.line});
        int id = it->second;
        auto match = std::find_if(target.begin(), target.end(), [&](const ProfileNode& n) { return n.region == id; });
        if (match == target.end()) {
            target.push_back(ProfileNode{id, 0, 0, 0, {}});
            match = target.end() - 1;
        }
        match->count += node.count;
        match->incl_ns += node.incl_ns;
        match->excl_ns += node.excl_ns;
        merge_node_list(match->children, node.children, from, into, ids);
    }
}

void count_calls(const Profile& profile, const ProfileNode& node, std::map<std::string, std::uint64_t>& counts) {
    counts[profile.region(node.region).name] += node.count;
    for (const auto& child : node.children) count_calls(profile, child, counts);
}

void flatten(const Profile& profile, const ProfileNode& node, std::map<std::string, FlatEntry>& entries,
             std::map<std::string, int>& active) {
    const std::string& name = profile.region(node.region).name;
    FlatEntry& entry = entries[name];
    entry.name = name;
    entry.count += node.count;
    entry.excl_ns += node.excl_ns;
    if (active[name] == 0) entry.incl_ns += node.incl_ns;
    ++active[name];
    for (const auto& child : node.children) flatten(profile, child, entries, active);
    --active[name];
}

std::string seconds(std::uint64_t ns) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.6f", static_cast<double>(ns) / 1e9);
    return buffer;
}

std::string row(std::uint64_t count, std::uint64_t incl, std::uint64_t excl, const std::string& label) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%10llu %12s %12s  ", static_cast<unsigned long long>(count),
                  seconds(incl).c_str(), seconds(excl).c_str());
    return buffer + label + "\n";
}

void render_node(const Profile& profile, const ProfileNode& node, int depth, std::string& out) {
    out += row(node.count, node.incl_ns, node.excl_ns,
               std::string(static_cast<std::size_t>(depth) * 2, ' ') + profile.region(node.region).name);
    for (const auto& child : node.children) render_node(profile, child, depth + 1, out);
}

const char* const table_header = "     calls      incl(s)      excl(s)  region\n";

}  // namespace

Profile parse_profile(std::string_view text) {
    Profile profile;
    try {
        json j = json::parse(text);
        for (const auto& r : j.at("regions")) {
            ProfileRegion region{r.at("id").get<int>(), r.at("name").get<std::string>(),
                                 r.value("file", std::string()), r.value("line", 0)};
            if (region.id != static_cast<int>(profile.regions.size())) {
                throw Error("profile region ids are not dense from 0");
            }
            profile.regions.push_back(std::move(region));
        }
        for (const auto& n : j.at("calltree")) profile.roots.push_back(node_from_json(n, profile.regions.size()));
    } catch (const json::exception& e) {
        throw Error(std::string("malformed profile: ") + e.what());
    }
    return profile;
}

Profile load_profile(const fs::path& path) {
    try {
        return parse_profile(read_file(path));
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::string to_json(const Profile& profile) {
    json regions = json::array();
    for (const auto& r : profile.regions) {
        regions.push_back(json{{"id", r.id}, {"name", r.name}, {"file", r.file}, {"line", r.line}});
    }
    json roots = json::array();
    for (const auto& n : profile.roots) roots.push_back(node_to_json(n));
    return json{{"regions", regions}, {"calltree", roots}}.dump(1) + "\n";
}

Profile merge_profiles(std::span<const Profile> profiles) {
    Profile merged;
    std::map<std::string, int> ids;
    for (const auto& p : profiles) merge_node_list(merged.roots, p.roots, p, merged, ids);
    // Regions that never ran still belong in the table.
    for (const auto& p : profiles) {
        for (const auto& r : p.regions) {
            auto [it, inserted] = ids.emplace(r.name, static_cast<int>(merged.regions.size()));
            if (inserted) merged.regions.push_back(ProfileRegion{it->second, r.name, r.file, r.line});
        }
    }
    return merged;
}

std::map<std::string, std::uint64_t> call_counts(const Profile& profile) {
    std::map<std::string, std::uint64_t> counts;
    for (const auto& root : profile.roots) count_calls(profile, root, counts);
    return counts;
}

std::vector<FlatEntry> flat_profile(const Profile& profile) {
    std::map<std::string, FlatEntry> entries;
    std::map<std::string, int> active;
    for (const auto& root : profile.roots) flatten(profile, root, entries, active);
    std::vector<FlatEntry> flat;
    for (auto& [name, entry] : entries) flat.push_back(std::move(entry));
    std::stable_sort(flat.begin(), flat.end(),
                     [](const FlatEntry& a, const FlatEntry& b) { return a.excl_ns > b.excl_ns; });
    return flat;
}

std::string render_tree(const Profile& profile) {
    std::string out = table_header;
    for (const auto& root : profile.roots) render_node(profile, root, 0, out);
    return out;
}

std::string render_flat(const Profile& profile) {
    std::string out = table_header;
    for (const auto& e : flat_profile(profile)) out += row(e.count, e.incl_ns, e.excl_ns, e.name);
    return out;
}

}  // namespace libwrap
