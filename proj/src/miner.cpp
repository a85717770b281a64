#include "forge/miner.hpp"

#include "forge/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace forge {

HardNegativeSet mine_hard_negatives(const DomTree& tree, int target_id,
                                    const MiningConfig& config,
                                    const CleanConfig& clean_config) {
    std::vector<int> candidates = extract_interactive(tree, clean_config);
    if (std::find(candidates.begin(), candidates.end(), target_id) == candidates.end()) {
        throw TargetNotInteractiveError("target node " + std::to_string(target_id) +
                                        " is not an interactive element");
    }

    HardNegativeSet set;
    set.target_id = target_id;
    for (int candidate : candidates) {
        if (candidate == target_id) continue;
        set.negatives.push_back(hybrid_score(tree, candidate, target_id, config.weights));
    }
    std::stable_sort(set.negatives.begin(), set.negatives.end(),
                     [](const SimilarityScore& a, const SimilarityScore& b) {
                         if (a.s_total != b.s_total) return a.s_total > b.s_total;
                         return a.candidate_id < b.candidate_id;
                     });
    if (static_cast<int>(set.negatives.size()) > config.k) {
        set.negatives.resize(static_cast<std::size_t>(config.k));
    }
    return set;
}

TrainingInstance build_discrimination_instance(const DomTree& tree,
                                               const std::string& instruction,
                                               const std::vector<Action>& history,
                                               const HardNegativeSet& hn, const Action& gold,
                                               const CleanConfig& clean_config,
                                               const std::string& instance_id) {
    if (!gold.element_id || *gold.element_id != hn.target_id) {
        throw MismatchedTargetError("gold action element does not match the mined target");
    }
    TrainingInstance instance;
    instance.instance_id = instance_id;
    instance.kind = SampleKind::Discrimination;
    instance.instruction = instruction;
    instance.history = history;
    instance.label = gold;
    instance.observation = format_observation(tree, instruction, history, clean_config);

    Json negatives = Json::array();
    Json scores = Json::array();
    for (const SimilarityScore& score : hn.negatives) {
        negatives.push_back(score.candidate_id);
        scores.push_back(score.s_total);
    }
    instance.metadata["target"] = hn.target_id;
    instance.metadata["negatives"] = std::move(negatives);
    instance.metadata["negative_scores"] = std::move(scores);
    return instance;
}

} // namespace forge
