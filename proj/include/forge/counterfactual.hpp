#pragma once

#include "forge/instance.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace forge {

enum class RuleKind { EntitySwap, ActionMismatch };

std::string_view rule_kind_name(RuleKind kind); // "entity_swap" / "action_mismatch"

/// Regex rewrite over the instruction text. No-op rules (pattern equal to
/// replacement, or a rewrite that leaves the text unchanged) are rejected.
struct PerturbationRule {
    RuleKind kind = RuleKind::EntitySwap;
    std::string pattern;     // ECMAScript regex
    std::string replacement; // may use $1..$n capture references
};

/// The rule file contents: entity-swap rewrites, the verb incompatibility
/// map, and the stopwords stripped from mismatch objects.
struct RuleSet {
    std::vector<PerturbationRule> entity_rules;
    std::map<std::string, std::string> verb_map; // lowercase verb -> replacement verb
    std::set<std::string> stopwords;

    static RuleSet defaults();
    static RuleSet from_json(const Json& j); // throws ConfigError (validates rules)
    Json to_json() const;
};

struct RejectionInstance {
    TrainingInstance base;
    std::string perturbed_instruction;
    RuleKind rule_kind = RuleKind::EntitySwap;
    Action label; // always None
    std::vector<std::string> required_tokens; // the absence set the emission verified
};

/// True when some enabled interactive element's attribute/text token set
/// contains every required token. Elements carrying a `disabled` attribute
/// never satisfy anything.
bool tokens_satisfiable(const DomTree& tree, const std::vector<std::string>& required_tokens,
                        const CleanConfig& clean_config);

/// Rewrites the instruction through the first matching entity rule, then
/// emits a rejection only if the swapped-in entity is absent from the page.
std::optional<RejectionInstance> apply_entity_swap(const TrainingInstance& instance,
                                                   const std::vector<PerturbationRule>& rules,
                                                   const DomTree& tree,
                                                   const CleanConfig& clean_config);

/// Substitutes the first recognized action verb with its incompatible
/// counterpart, then emits a rejection only if no enabled interactive
/// element carries the tokens of the verb's object (the instruction tokens
/// after the verb, minus stopwords).
std::optional<RejectionInstance> apply_action_mismatch(const TrainingInstance& instance,
                                                       const DomTree& tree,
                                                       const RuleSet& rules,
                                                       const CleanConfig& clean_config);

/// Re-runs the absence verifier an emitted instance was built with; used by
/// soundness checks. Returns true when the rejection is still justified.
bool rejection_still_unsatisfiable(const RejectionInstance& rejection, const DomTree& tree,
                                   const CleanConfig& clean_config);

TrainingInstance to_training_instance(const RejectionInstance& rejection,
                                      const std::string& instance_id);

} // namespace forge
