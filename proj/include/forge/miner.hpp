#pragma once

#include "forge/instance.hpp"
#include "forge/similarity.hpp"

namespace forge {

struct MiningConfig {
    int k = 20; // hard-negative pool size
    SimilarityWeights weights;
};

/// Candidates ranked against the target, descending by s_total with
/// document-order tie-break; at most k entries and never the target itself.
struct HardNegativeSet {
    int target_id = -1;
    std::vector<SimilarityScore> negatives;
};

/// Scores every interactive element against the target and keeps the top k.
/// A page whose only interactive element is the target yields an empty
/// negative list. Throws TargetNotInteractiveError.
HardNegativeSet mine_hard_negatives(const DomTree& tree, int target_id,
                                    const MiningConfig& config,
                                    const CleanConfig& clean_config = {});

/// Wraps a mined set into a discrimination training instance. All candidates
/// stay in situ in the id-injected observation; the negative ids (and their
/// scores) are recorded in metadata. Throws MismatchedTargetError when the
/// gold action's element is not the mined target.
TrainingInstance build_discrimination_instance(const DomTree& tree,
                                               const std::string& instruction,
                                               const std::vector<Action>& history,
                                               const HardNegativeSet& hn, const Action& gold,
                                               const CleanConfig& clean_config,
                                               const std::string& instance_id);

} // namespace forge
