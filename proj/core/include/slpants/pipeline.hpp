#pragma once

#include <optional>
#include <string>

#include "slpants/config.hpp"

namespace slpants {

// Process exit codes shared by every command.
inline constexpr int kExitOk = 0;              // all requested work done, thresholds met
inline constexpr int kExitConfig = 1;          // configuration or I/O problem
inline constexpr int kExitNonConvergence = 2;  // a solve did not reach tolerance
inline constexpr int kExitVerification = 3;    // a recorded threshold failed

struct RunOptions {
    std::string out_dir = ".";
    bool quiet = false;
};

// Each command writes `report` (JSON) into out_dir and returns an exit code.
// Configuration, grid, and I/O errors propagate as exceptions; the CLI front
// end maps them to kExitConfig. NonConvergence and threshold violations are
// handled inside and reflected in the code.
int cmd_solve(const RunConfig& cfg, const RunOptions& opt);
int cmd_verify(const RunConfig& cfg, const RunOptions& opt);
int cmd_family(const RunConfig& cfg, const RunOptions& opt);
int cmd_asymptotics(const RunConfig& cfg, const RunOptions& opt);
int cmd_classify(const RunConfig& cfg, const RunOptions& opt);
int cmd_export(const RunConfig& cfg, const RunOptions& opt,
               std::optional<MeshFormat> format_override = std::nullopt);

} // namespace slpants
