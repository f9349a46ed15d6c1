#pragma once

#include "mtphase/config.hpp"
#include "mtphase/errors.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace mtphase {

inline constexpr std::array<std::string_view, 7> kSubcommands{
    "steady-state", "spectrum", "threshold", "transition", "simulate", "phase-diagram", "verify"};

enum ExitCode : int {
    kExitOk = 0,
    kExitVerifyFailed = 1,
    kExitConfig = 2,
    kExitNumerical = 3,
    kExitInternal = 4,
};

/// Config-class errors map to 2, numerical module errors to 3, I/O to 4.
int exit_code_for(ErrorCode code);

struct CommandOptions {
    std::optional<std::filesystem::path> out_dir;  ///< overrides [output] directory
    int workers = 1;
    std::optional<std::uint64_t> seed;             ///< overrides [simulate] seed
};

/// Runs one subcommand, writing CSV outputs plus manifest.txt. Progress and
/// error messages go to `log`. Returns the process exit code.
int run_subcommand(std::string_view name, const RunConfig& config, const CommandOptions& options, std::ostream& log);

}  // namespace mtphase
