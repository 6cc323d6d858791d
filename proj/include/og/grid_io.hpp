#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "og/grid.hpp"

namespace og {

// Payload kind byte of the .ogrd container.
enum class PayloadKind : std::uint8_t {
    labels = 1,
    affinity = 2,
    instances = 3,
    mask = 4,
};

inline constexpr std::uint8_t kOgrdVersion = 1;

// In-memory encoders/decoders for the .ogrd container. Decoders throw
// FormatError naming the offending field and SizeError for oversized dims.
std::string encode(const SemanticGrid& grid);
std::string encode(const AffinityField& field);
std::string encode(const InstanceMap& map);
std::string encode(const LossMask& mask);

SemanticGrid decode_grid(std::string_view bytes);
AffinityField decode_affinity(std::string_view bytes);
InstanceMap decode_instances(std::string_view bytes);
LossMask decode_mask(std::string_view bytes);

// Reads the kind byte without decoding the payload.
PayloadKind peek_kind(std::string_view bytes);

void save_grid(const SemanticGrid& grid, const std::filesystem::path& path);
void save_affinity(const AffinityField& field, const std::filesystem::path& path);
void save_instances(const InstanceMap& map, const std::filesystem::path& path);
void save_mask(const LossMask& mask, const std::filesystem::path& path);

SemanticGrid load_grid(const std::filesystem::path& path);
AffinityField load_affinity(const std::filesystem::path& path);
InstanceMap load_instances(const std::filesystem::path& path);
LossMask load_mask(const std::filesystem::path& path);

// Whole-file helpers. write_file_atomic writes a sibling temp file and renames
// it over path, so a failed write never leaves a partial file behind.
std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace og
