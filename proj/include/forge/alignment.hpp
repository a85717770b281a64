#pragma once

#include "forge/action.hpp"

#include <optional>
#include <string>
#include <vector>

namespace forge {

/// Token-level probabilities for one sampled sequence. Probabilities are
/// carried in log space; `sequence_prob` is exp of the summed logprobs.
struct SequenceScore {
    std::vector<std::string> tokens;
    std::vector<double> token_logprobs;
    double logprob_sum = 0.0;
    double sequence_prob = 1.0;

    static SequenceScore from_logprobs(std::vector<std::string> tokens,
                                       std::vector<double> logprobs);
};

struct RewardConfig {
    double r_fmt = 0.1;
    double r_opt = 1.0;
    double r_perf = 1.0;
};

/// The gated reward cascade: fmt is earned by parseable output alone; the
/// element gate zeroes every later component when the wrong element is
/// picked; the perfection bonus additionally requires the operation kind to
/// match and the argument F1 to be exactly 1.
struct RewardBreakdown {
    double fmt = 0.0;
    int opt_gate = 0;
    double opt = 0.0;
    double f1 = 0.0;
    double perf = 0.0;
    double total = 0.0;
};

/// Multiset token F1 over lowercased whitespace tokens. Both empty -> 1.0,
/// exactly one empty -> 0.0.
double token_f1(std::string_view predicted, std::string_view gold);

/// Pure aggregation of the cascade from already-computed comparisons; lets
/// callers supply an externally computed argument F1.
RewardBreakdown aggregate_reward(bool format_ok, bool element_match, bool kind_match,
                                 double arg_f1, const RewardConfig& config);

/// Scores a raw model output against the gold action: parse, gate, argument
/// F1, perfection bonus. Malformed output earns a zero breakdown.
RewardBreakdown hierarchical_reward(const std::string& raw_prediction, const Action& gold,
                                    const RewardConfig& config);

/// Same cascade for an already-parsed (hence format-valid) prediction.
RewardBreakdown hierarchical_reward(const Action& predicted, const Action& gold,
                                    const RewardConfig& config);

/// Mean negative log likelihood of a batch. Throws
/// NonPositiveProbabilityError when a sequence probability is not in (0, 1].
double sft_nll(const std::vector<SequenceScore>& scores);

struct ScoredAction {
    Action action;
    SequenceScore score;
};

struct PreferencePair {
    std::string prompt_id;
    ScoredAction winner; // always the ground truth
    ScoredAction loser;  // highest-probability incorrect sample
};

struct OrpoComponents {
    double nll = 0.0;     // -log P(y_w)
    double or_term = 0.0; // -log sigmoid(log odds ratio)
};

/// loss = nll + lambda * or_term with odds g(y) = P / (1 - P), evaluated in
/// log space. Throws DegenerateProbabilityError when either sequence
/// probability is not strictly inside (0, 1).
std::pair<double, OrpoComponents> orpo_loss(const PreferencePair& pair, double lambda_or);

struct GroupSample {
    std::vector<double> rewards;
    int group_size = 5;
};

/// Group-relative advantages (r - mean) / population std; an all-equal group
/// yields all zeros. Throws GroupTooSmallError below two samples.
std::vector<double> grpo_advantages(const GroupSample& group);

/// Winner = ground truth; loser = the incorrect sample (wrong element or
/// wrong operation kind) with the highest sequence probability. Returns
/// nothing when every sample is correct.
std::optional<PreferencePair> build_preference_pairs(const std::string& prompt_id,
                                                     const ScoredAction& gold,
                                                     const std::vector<ScoredAction>& samples);

} // namespace forge
