#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace libwrap {

namespace fs = std::filesystem;

struct ProfileRegion {
    int id = 0;
    std::string name;
    std::string file;
    int line = 0;

    bool operator==(const ProfileRegion&) const = default;
};

// One call path. `region` indexes Profile::regions by id.
struct ProfileNode {
    int region = 0;
    std::uint64_t count = 0;
    std::uint64_t incl_ns = 0;
    std::uint64_t excl_ns = 0;
    std::vector<ProfileNode> children;

    bool operator==(const ProfileNode&) const = default;
};

// Call-path profile as written by the measurement runtime.
struct Profile {
    std::vector<ProfileRegion> regions;  // regions[i].id == i
    std::vector<ProfileNode> roots;

    const ProfileRegion& region(int id) const { return regions.at(static_cast<std::size_t>(id)); }
    bool operator==(const Profile&) const = default;
};

// Throws Error on malformed input.
Profile parse_profile(std::string_view json);
Profile load_profile(const fs::path& path);
std::string to_json(const Profile& profile);

// Regions are matched by name, call paths by the names along them. Counts
// and times add up.
Profile merge_profiles(std::span<const Profile> profiles);

// Total calls per region name over all call paths.
std::map<std::string, std::uint64_t> call_counts(const Profile& profile);

struct FlatEntry {
    std::string name;
    std::uint64_t count = 0;
    std::uint64_t incl_ns = 0;  // outermost activations only, so recursion is not counted twice
    std::uint64_t excl_ns = 0;
};

// Sorted by exclusive time, largest first; ties by name.
std::vector<FlatEntry> flat_profile(const Profile& profile);

// Indented call tree: count, inclusive seconds, exclusive seconds, name.
std::string render_tree(const Profile& profile);
std::string render_flat(const Profile& profile);

}  // namespace libwrap
