#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "pairfeat/error.hpp"

namespace pairfeat {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitPipeline = 4;

/// Exit status for a library error raised after the config was accepted.
int exit_code_for(ErrorCode code) noexcept;

/// Entry point of the pairfeat tool. `args` excludes the program name.
/// Subcommands: detect, features, evaluate, synth.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pairfeat
