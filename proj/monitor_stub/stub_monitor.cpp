// Minimal measurement runtime: exact call counts and monotonic timings per
// call path, written as JSON at process exit.

#include "libwrap/monitor.h"

#include <json.hpp>

#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

namespace {

struct Region {
    std::string name;
    std::string file;
    int line;
};

struct Node {
    int region = -1;
    std::uint64_t count = 0;
    std::uint64_t incl_ns = 0;
    std::vector<std::unique_ptr<Node>> children;

    Node* child(int id) {
        for (auto& c : children) {
            if (c->region == id) return c.get();
        }
        children.push_back(std::make_unique<Node>());
        children.back()->region = id;
        return children.back().get();
    }
};

struct Frame {
    Node* node;
    std::uint64_t start_ns;
};

struct ThreadTree {
    Node root;
    std::vector<Frame> stack;
};

std::uint64_t now_ns() {
    timespec ts;
    clock_gettime(CLOCK_MONOTONIC, &ts);
    return static_cast<std::uint64_t>(ts.tv_sec) * 1000000000u + static_cast<std::uint64_t>(ts.tv_nsec);
}

// Never destroyed: wrappers may still run during static destruction.
struct State {
    std::mutex mutex;
    std::vector<Region> regions;
    std::map<std::tuple<std::string, std::string, int>, int> ids;
    std::vector<ThreadTree*> trees;
    bool verbose = std::getenv("LIBWRAP_VERBOSE") != nullptr;
};

State& state() {
    static State* s = new State;
    return *s;
}

ThreadTree& this_thread_tree() {
    thread_local ThreadTree* tree = [] {
        auto* t = new ThreadTree;
        std::lock_guard lock(state().mutex);
        state().trees.push_back(t);
        return t;
    }();
    return *tree;
}

std::string region_name(int id) {
    std::lock_guard lock(state().mutex);
    if (id < 0 || static_cast<std::size_t>(id) >= state().regions.size()) return "<region " + std::to_string(id) + ">";
    return state().regions[static_cast<std::size_t>(id)].name;
}

[[noreturn]] void fail(const std::string& message) {
    std::fprintf(stderr, "libwrap monitor: %s\n", message.c_str());
    std::abort();
}

struct MergedNode {
    std::uint64_t count = 0;
    std::uint64_t incl_ns = 0;
    std::map<int, MergedNode> children;
};

void merge_into(MergedNode& target, const Node& source) {
    for (const auto& c : source.children) {
        MergedNode& m = target.children[c->region];
        m.count += c->count;
        m.incl_ns += c->incl_ns;
        merge_into(m, *c);
    }
}

nlohmann::json to_json(int region, const MergedNode& node) {
    nlohmann::json children = nlohmann::json::array();
    std::uint64_t children_ns = 0;
    for (const auto& [id, child] : node.children) {
        children.push_back(to_json(id, child));
        children_ns += child.incl_ns;
    }
    std::uint64_t excl = node.incl_ns > children_ns ? node.incl_ns - children_ns : 0;
    return {{"region", region}, {"count", node.count}, {"incl_ns", node.incl_ns}, {"excl_ns", excl},
            {"children", children}};
}

std::string output_path() {
    const char* pattern = std::getenv("LIBWRAP_PROFILE_OUT");
    std::string pid = std::to_string(getpid());
    if (pattern == nullptr || *pattern == '\0') return "libwrap_profile." + pid + ".json";
    std::string path;
    for (const char* p = pattern; *p != '\0'; ++p) {
        if (p[0] == '%' && p[1] == 'p') {
            path += pid;
            ++p;
        } else {
            path += *p;
        }
    }
    return path;
}

struct Banner {
    Banner() {
        if (state().verbose) std::fprintf(stderr, "libwrap monitor: recording (pid %d)\n", static_cast<int>(getpid()));
    }
    ~Banner() { libwrap_flush(); }
} banner;

}  // namespace

extern "C" int libwrap_region_register(const char* name, const char* file, int line) {
    State& s = state();
    std::lock_guard lock(s.mutex);
    std::string n = name != nullptr ? name : "";
    std::string f = file != nullptr ? file : "";
    auto [it, inserted] = s.ids.emplace(std::make_tuple(n, f, line), static_cast<int>(s.regions.size()));
    if (inserted) s.regions.push_back(Region{n, f, line});
    return it->second;
}

extern "C" void libwrap_enter(int region) {
    ThreadTree& tree = this_thread_tree();
    Node* parent = tree.stack.empty() ? &tree.root : tree.stack.back().node;
    tree.stack.push_back(Frame{parent->child(region), now_ns()});
}

extern "C" void libwrap_exit(int region) {
    std::uint64_t end = now_ns();
    ThreadTree& tree = this_thread_tree();
    if (tree.stack.empty()) fail("exit from '" + region_name(region) + "' without a matching enter");
    Frame frame = tree.stack.back();
    if (frame.node->region != region) {
        fail("exit from '" + region_name(region) + "' while '" + region_name(frame.node->region) + "' is open");
    }
    tree.stack.pop_back();
    frame.node->count += 1;
    frame.node->incl_ns += end - frame.start_ns;
}

extern "C" void libwrap_flush(void) {
    State& s = state();
    nlohmann::json doc;
    {
        std::lock_guard lock(s.mutex);
        MergedNode root;
        for (const ThreadTree* tree : s.trees) merge_into(root, tree->root);
        nlohmann::json regions = nlohmann::json::array();
        for (std::size_t i = 0; i < s.regions.size(); ++i) {
            regions.push_back(
                {{"id", i}, {"name", s.regions[i].name}, {"file", s.regions[i].file}, {"line", s.regions[i].line}});
        }
        nlohmann::json calltree = nlohmann::json::array();
        for (const auto& [id, node] : root.children) calltree.push_back(to_json(id, node));
        doc = {{"regions", regions}, {"calltree", calltree}};
    }
    std::string path = output_path();
    std::ofstream out(path, std::ios::trunc);
    out << doc.dump(1) << "\n";
    out.close();
    if (!out) {
        std::fprintf(stderr, "libwrap monitor: cannot write profile to %s\n", path.c_str());
    } else if (s.verbose) {
        std::fprintf(stderr, "libwrap monitor: profile written to %s\n", path.c_str());
    }
}
