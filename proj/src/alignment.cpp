#include "forge/alignment.hpp"

#include "forge/error.hpp"
#include "forge/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace forge {
namespace {

// log(1 - exp(x)) for x < 0, stable near both ends.
double log1mexp(double x) {
    if (x >= 0.0) return -std::numeric_limits<double>::infinity();
    if (x > -M_LN2) return std::log(-std::expm1(x));
    return std::log1p(-std::exp(x));
}

// softplus(x) = log(1 + exp(x)) without overflow.
double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

// log odds log(P / (1 - P)) from a log probability.
double log_odds(double logprob) {
    return logprob - log1mexp(logprob);
}

bool element_matches(const Action& predicted, const Action& gold) {
    return predicted.element_id == gold.element_id;
}

} // namespace

SequenceScore SequenceScore::from_logprobs(std::vector<std::string> tokens,
                                           std::vector<double> logprobs) {
    SequenceScore score;
    score.tokens = std::move(tokens);
    score.token_logprobs = std::move(logprobs);
    score.logprob_sum =
        std::accumulate(score.token_logprobs.begin(), score.token_logprobs.end(), 0.0);
    score.sequence_prob = std::exp(score.logprob_sum);
    return score;
}

double token_f1(std::string_view predicted, std::string_view gold) {
    std::vector<std::string> pred_tokens = split_ws(to_lower(predicted));
    std::vector<std::string> gold_tokens = split_ws(to_lower(gold));
    if (pred_tokens.empty() && gold_tokens.empty()) return 1.0;
    if (pred_tokens.empty() || gold_tokens.empty()) return 0.0;

    std::map<std::string, int> gold_counts;
    for (const std::string& token : gold_tokens) ++gold_counts[token];
    int overlap = 0;
    for (const std::string& token : pred_tokens) {
        auto it = gold_counts.find(token);
        if (it != gold_counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    if (overlap == 0) return 0.0;
    const double precision = static_cast<double>(overlap) / pred_tokens.size();
    const double recall = static_cast<double>(overlap) / gold_tokens.size();
    return 2.0 * precision * recall / (precision + recall);
}

RewardBreakdown aggregate_reward(bool format_ok, bool element_match, bool kind_match,
                                 double arg_f1, const RewardConfig& config) {
    RewardBreakdown breakdown;
    if (!format_ok) return breakdown; // total stays 0
    breakdown.fmt = config.r_fmt;
    breakdown.opt_gate = element_match ? 1 : 0;
    if (breakdown.opt_gate == 1) {
        breakdown.opt = config.r_opt;
        breakdown.f1 = arg_f1;
        if (kind_match && arg_f1 == 1.0) breakdown.perf = config.r_perf;
    }
    breakdown.total =
        breakdown.fmt + breakdown.opt_gate * (breakdown.opt + breakdown.f1 + breakdown.perf);
    return breakdown;
}

RewardBreakdown hierarchical_reward(const std::string& raw_prediction, const Action& gold,
                                    const RewardConfig& config) {
    std::optional<Action> predicted = parse_action_output(raw_prediction);
    if (!predicted) return RewardBreakdown{};
    return hierarchical_reward(*predicted, gold, config);
}

RewardBreakdown hierarchical_reward(const Action& predicted, const Action& gold,
                                    const RewardConfig& config) {
    const bool element_match = element_matches(predicted, gold);
    const bool kind_match = predicted.kind == gold.kind;
    const double arg_f1 =
        token_f1(predicted.argument.value_or(""), gold.argument.value_or(""));
    return aggregate_reward(true, element_match, kind_match, arg_f1, config);
}

double sft_nll(const std::vector<SequenceScore>& scores) {
    if (scores.empty()) return 0.0;
    double total = 0.0;
    for (const SequenceScore& score : scores) {
        if (!(score.sequence_prob > 0.0) || score.sequence_prob > 1.0 ||
            !std::isfinite(score.logprob_sum)) {
            throw NonPositiveProbabilityError("sequence probability must be in (0, 1]");
        }
        total += -score.logprob_sum;
    }
    return total / static_cast<double>(scores.size());
}

std::pair<double, OrpoComponents> orpo_loss(const PreferencePair& pair, double lambda_or) {
    auto check = [](const SequenceScore& score) {
        if (!(score.logprob_sum < 0.0) || !std::isfinite(score.logprob_sum) ||
            score.sequence_prob <= 0.0 || score.sequence_prob >= 1.0) {
            throw DegenerateProbabilityError(
                "odds require sequence probabilities strictly inside (0, 1)");
        }
    };
    check(pair.winner.score);
    check(pair.loser.score);

    OrpoComponents components;
    components.nll = -pair.winner.score.logprob_sum;
    const double log_odds_ratio =
        log_odds(pair.winner.score.logprob_sum) - log_odds(pair.loser.score.logprob_sum);
    components.or_term = softplus(-log_odds_ratio); // -log sigmoid(z)
    return {components.nll + lambda_or * components.or_term, components};
}

std::vector<double> grpo_advantages(const GroupSample& group) {
    const std::size_t n = group.rewards.size();
    if (n < 2 || group.group_size < 2) {
        throw GroupTooSmallError("advantage normalization needs at least two samples");
    }
    const bool all_equal =
        std::all_of(group.rewards.begin(), group.rewards.end(),
                    [&](double r) { return r == group.rewards.front(); });
    if (all_equal) return std::vector<double>(n, 0.0);

    const double mean =
        std::accumulate(group.rewards.begin(), group.rewards.end(), 0.0) /
        static_cast<double>(n);
    double variance = 0.0;
    for (double r : group.rewards) variance += (r - mean) * (r - mean);
    variance /= static_cast<double>(n); // population variance
    const double stddev = std::sqrt(variance);

    std::vector<double> advantages;
    advantages.reserve(n);
    for (double r : group.rewards) advantages.push_back((r - mean) / stddev);
    return advantages;
}

std::optional<PreferencePair> build_preference_pairs(const std::string& prompt_id,
                                                     const ScoredAction& gold,
                                                     const std::vector<ScoredAction>& samples) {
    const ScoredAction* loser = nullptr;
    for (const ScoredAction& sample : samples) {
        const bool incorrect = sample.action.element_id != gold.action.element_id ||
                               sample.action.kind != gold.action.kind;
        if (!incorrect) continue;
        if (!loser || sample.score.logprob_sum > loser->score.logprob_sum) {
            loser = &sample;
        }
    }
    if (!loser) return std::nullopt;
    PreferencePair pair;
    pair.prompt_id = prompt_id;
    pair.winner = gold;
    pair.loser = *loser;
    return pair;
}

} // namespace forge
