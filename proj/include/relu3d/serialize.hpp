#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "relu3d/net3d.hpp"

namespace relu3d {

inline constexpr std::string_view kNetworkSchema = "relu3d/v1";

// JSON text; weight vectors are written densely or as
// {"n": size, "entries": [[index, value], ...]}, whichever is smaller.
std::string to_document(const Net3D& net);

// Throws FormatError naming the offending path on malformed input.
Net3D from_document(std::string_view text);

void save_network(const Net3D& net, const std::filesystem::path& path);
Net3D load_network(const std::filesystem::path& path);

// Shortest-safe decimal with 17 significant digits.
std::string format_number(double v);

}  // namespace relu3d
