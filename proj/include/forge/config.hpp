#pragma once

#include "forge/alignment.hpp"
#include "forge/chat.hpp"
#include "forge/counterfactual.hpp"
#include "forge/miner.hpp"
#include "forge/synthesis.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace forge {

/// Everything a pipeline run needs, with defaults matching the reference
/// constants (lambda 0.6, K 20, overlap threshold 0.9, G 5, N 5, ORPO
/// lambda 0.1, format reward 0.1).
struct PipelineConfig {
    CleanConfig clean;
    MiningConfig mining;
    SynthesisConfig synthesis;
    ChatEndpoint generator{"mock://echo", "generator", "", 1.0, 3};
    ChatEndpoint verifier{"mock://echo", "verifier", "", 0.0, 3};
    RewardConfig reward;
    RuleSet rules = RuleSet::defaults();
    double lambda_orpo = 0.1;
    int group_size = 5;   // G
    int sample_count = 5; // N sampled trajectories per prompt
    int workers = 0;      // 0 = logical CPUs
    std::uint64_t seed = 0;
};

/// Parses a config document, overlaying the defaults; unknown keys are
/// rejected so typos surface early. A "rules_file" entry loads the rule set
/// from a sibling document.
PipelineConfig parse_pipeline_config(const Json& j,
                                     const std::filesystem::path& base_dir = {});

PipelineConfig load_pipeline_config(const std::filesystem::path& path);

Json pipeline_config_to_json(const PipelineConfig& config);

} // namespace forge
