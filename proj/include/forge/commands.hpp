#pragma once

#include "forge/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace forge {

/// Exit codes shared by every subcommand: 0 success, 1 hard error,
/// 2 unreadable/empty input or bad configuration.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUnreadable = 2;

struct CommandIO {
    std::filesystem::path input;
    std::filesystem::path output;
    std::filesystem::path stats; // empty -> derived from output
    std::filesystem::path aux;   // pair: reward report path (empty -> derived)
};

int run_clean(const PipelineConfig& config, const CommandIO& io);
int run_mine(const PipelineConfig& config, const CommandIO& io);
int run_perturb(const PipelineConfig& config, const CommandIO& io);
int run_synthesize(const PipelineConfig& config, const CommandIO& io);
int run_pair(const PipelineConfig& config, const CommandIO& io);
int run_score(const PipelineConfig& config, const CommandIO& io, std::ostream& out);
int run_report(const std::vector<std::filesystem::path>& stats_files, std::ostream& out);
int run_validate(const std::string& schema, const std::filesystem::path& input,
                 std::ostream& out);

/// Schema names understood by `forge validate`.
const std::vector<std::string>& known_schemas();

} // namespace forge
