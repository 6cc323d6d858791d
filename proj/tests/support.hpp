#pragma once

// Filesystem helpers shared by the tests.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "og/grid_io.hpp"

namespace og::testing {

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& prefix = "og_test") {
        path = std::filesystem::temp_directory_path() /
               (prefix + "_" + std::to_string(std::random_device{}()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ignored;
        std::filesystem::remove_all(path, ignored);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

// FNV-1a over every file name and its bytes, names in sorted order.
inline std::uint64_t tree_hash(const std::filesystem::path& dir) {
    std::vector<std::string> names;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto feed = [&h](std::string_view bytes) {
        for (unsigned char c : bytes) {
            h = (h ^ c) * 0x100000001b3ULL;
        }
    };
    for (const auto& name : names) {
        feed(name);
        feed(std::string_view("\0", 1));
        feed(read_file(dir / name));
    }
    return h;
}

// FNV-1a hashes of the `og synth --seed 7 --objects 3` bundle and of the
// `og gt` outputs for its sem.ogrd, recorded from a verified build.
inline constexpr std::uint64_t kSeed7BundleHash = 0xc7c85909bcdef595ULL;
inline constexpr std::uint64_t kSeed7GtHash = 0x583b0216d0882a6fULL;

}  // namespace og::testing
