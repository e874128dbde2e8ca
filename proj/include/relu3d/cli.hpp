#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "relu3d/builders.hpp"
#include "relu3d/requests.hpp"

namespace relu3d::cli {

enum ExitCode : int { kPass = 0, kBoundFailure = 1, kUsage = 2 };

// args excludes the program name. Never throws; errors go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Sidecar written next to every network by `build`.
std::filesystem::path report_path(const std::filesystem::path& net_path);
std::string report_to_json(const BuildReport& report, const BuildRequest& req);
// Restores everything but the network, which is passed in.
BuildReport report_from_json(const std::string& text, Net3D net, BuildRequest& req);

}  // namespace relu3d::cli
