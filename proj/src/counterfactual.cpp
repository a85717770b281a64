#include "forge/counterfactual.hpp"

#include "forge/error.hpp"
#include "forge/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <regex>

namespace forge {
namespace {

bool is_word_edge(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// Lowercases and strips non-alphanumeric characters from both ends so that
// "cart." and "Cart" compare equal.
std::string normalize_token(std::string_view token) {
    std::size_t begin = 0;
    std::size_t end = token.size();
    while (begin < end && !is_word_edge(token[begin])) ++begin;
    while (end > begin && !is_word_edge(token[end - 1])) --end;
    return to_lower(token.substr(begin, end - begin));
}

std::vector<std::string> normalized_tokens(std::string_view text) {
    std::vector<std::string> out;
    for (const std::string& token : split_ws(text)) {
        std::string normalized = normalize_token(token);
        if (!normalized.empty()) out.push_back(std::move(normalized));
    }
    return out;
}

std::set<std::string> element_token_set(const DomTree& tree, const DomNode& node) {
    std::set<std::string> tokens;
    for (const auto& [name, value] : node.attributes) {
        for (const std::string& token : split_ws(value)) {
            std::string normalized = normalize_token(token);
            if (!normalized.empty()) tokens.insert(std::move(normalized));
        }
    }
    for (const std::string& token : split_ws(inner_text(tree, node.node_id))) {
        std::string normalized = normalize_token(token);
        if (!normalized.empty()) tokens.insert(std::move(normalized));
    }
    return tokens;
}

RejectionInstance make_rejection(const TrainingInstance& instance, std::string perturbed,
                                 RuleKind kind, std::vector<std::string> required) {
    RejectionInstance rejection;
    rejection.base = instance;
    rejection.perturbed_instruction = std::move(perturbed);
    rejection.rule_kind = kind;
    rejection.label = Action::none();
    rejection.required_tokens = std::move(required);
    return rejection;
}

void validate_rule(const PerturbationRule& rule) {
    if (rule.pattern.empty()) throw ConfigError("perturbation rule: empty pattern");
    if (rule.pattern == rule.replacement) {
        throw ConfigError("perturbation rule: '" + rule.pattern + "' is a no-op");
    }
    try {
        std::regex re(rule.pattern);
    } catch (const std::regex_error& e) {
        throw ConfigError("perturbation rule: bad pattern '" + rule.pattern + "': " + e.what());
    }
}

} // namespace

std::string_view rule_kind_name(RuleKind kind) {
    return kind == RuleKind::EntitySwap ? "entity_swap" : "action_mismatch";
}

RuleSet RuleSet::defaults() {
    RuleSet rules;
    rules.entity_rules = {
        {RuleKind::EntitySwap, "iPhone 16", "iPhone 17"},
    };
    rules.verb_map = {
        {"click", "type"}, {"type", "select"}, {"select", "type"}, {"add", "click"},
        {"buy", "select"}, {"open", "type"},   {"press", "type"},
    };
    rules.stopwords = {"the",  "a",    "an",  "this", "that",  "these", "those", "my",
                       "your", "our",  "his", "her",  "its",   "their", "me",    "to",
                       "in",   "into", "on",  "at",   "of",    "for",   "with",  "from",
                       "and",  "or",   "it",  "up",   "down",  "out",   "by",    "please"};
    return rules;
}

RuleSet RuleSet::from_json(const Json& j) {
    RuleSet rules;
    if (!j.is_object()) throw ConfigError("rule file: expected an object");
    const Json entity_rules = j.value("entity_rules", Json::array());
    for (const Json& entry : entity_rules) {
        PerturbationRule rule;
        rule.kind = RuleKind::EntitySwap;
        rule.pattern = entry.at("pattern").get<std::string>();
        rule.replacement = entry.at("replacement").get<std::string>();
        validate_rule(rule);
        rules.entity_rules.push_back(std::move(rule));
    }
    const Json verb_map = j.value("verb_map", Json::object());
    for (const auto& [verb, mapped] : verb_map.items()) {
        std::string key = to_lower(verb);
        std::string value = mapped.get<std::string>();
        if (key == to_lower(value)) {
            throw ConfigError("verb map: '" + key + "' maps to itself");
        }
        rules.verb_map[key] = value;
    }
    if (j.contains("stopwords")) {
        for (const Json& word : j["stopwords"]) {
            rules.stopwords.insert(to_lower(word.get<std::string>()));
        }
    } else {
        rules.stopwords = defaults().stopwords;
    }
    return rules;
}

Json RuleSet::to_json() const {
    Json j;
    Json entities = Json::array();
    for (const PerturbationRule& rule : entity_rules) {
        entities.push_back({{"pattern", rule.pattern}, {"replacement", rule.replacement}});
    }
    j["entity_rules"] = std::move(entities);
    Json verbs = Json::object();
    for (const auto& [verb, mapped] : verb_map) verbs[verb] = mapped;
    j["verb_map"] = std::move(verbs);
    j["stopwords"] = std::vector<std::string>(stopwords.begin(), stopwords.end());
    return j;
}

bool tokens_satisfiable(const DomTree& tree, const std::vector<std::string>& required_tokens,
                        const CleanConfig& clean_config) {
    for (int id : extract_interactive(tree, clean_config)) {
        const DomNode& node = tree.node(id);
        if (node.has_attr("disabled")) continue; // stop-condition elements
        std::set<std::string> tokens = element_token_set(tree, node);
        bool all_present = std::all_of(
            required_tokens.begin(), required_tokens.end(),
            [&](const std::string& token) { return tokens.count(token) > 0; });
        if (all_present) return true;
    }
    return false;
}

std::optional<RejectionInstance> apply_entity_swap(const TrainingInstance& instance,
                                                   const std::vector<PerturbationRule>& rules,
                                                   const DomTree& tree,
                                                   const CleanConfig& clean_config) {
    for (const PerturbationRule& rule : rules) {
        if (rule.kind != RuleKind::EntitySwap) continue;
        std::regex re(rule.pattern);
        std::smatch match;
        if (!std::regex_search(instance.instruction, match, re)) continue;

        std::string perturbed = std::regex_replace(instance.instruction, re, rule.replacement);
        if (perturbed == instance.instruction) continue;

        // The swapped-in entity is the expanded replacement of the first match.
        std::vector<std::string> entity_tokens =
            normalized_tokens(match.format(rule.replacement));
        if (entity_tokens.empty()) continue;
        if (tokens_satisfiable(tree, entity_tokens, clean_config)) return std::nullopt;

        return make_rejection(instance, std::move(perturbed), RuleKind::EntitySwap,
                              std::move(entity_tokens));
    }
    return std::nullopt;
}

std::optional<RejectionInstance> apply_action_mismatch(const TrainingInstance& instance,
                                                       const DomTree& tree,
                                                       const RuleSet& rules,
                                                       const CleanConfig& clean_config) {
    std::vector<std::string> tokens = split_ws(instance.instruction);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        std::string lowered = normalize_token(tokens[i]);
        auto it = rules.verb_map.find(lowered);
        if (it == rules.verb_map.end()) continue;

        std::string mapped = it->second;
        if (!mapped.empty() && !tokens[i].empty() &&
            std::isupper(static_cast<unsigned char>(tokens[i][0]))) {
            mapped[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(mapped[0])));
        }
        std::vector<std::string> perturbed_tokens = tokens;
        perturbed_tokens[i] = mapped;
        std::string perturbed;
        for (const std::string& token : perturbed_tokens) {
            if (!perturbed.empty()) perturbed.push_back(' ');
            perturbed += token;
        }
        if (perturbed == instance.instruction) return std::nullopt;

        // Object of the verb: everything after it, minus stopwords.
        std::vector<std::string> object_tokens;
        for (std::size_t k = i + 1; k < tokens.size(); ++k) {
            std::string normalized = normalize_token(tokens[k]);
            if (normalized.empty() || rules.stopwords.count(normalized)) continue;
            object_tokens.push_back(std::move(normalized));
        }
        if (object_tokens.empty()) return std::nullopt;
        if (tokens_satisfiable(tree, object_tokens, clean_config)) return std::nullopt;

        return make_rejection(instance, std::move(perturbed), RuleKind::ActionMismatch,
                              std::move(object_tokens));
    }
    return std::nullopt;
}

bool rejection_still_unsatisfiable(const RejectionInstance& rejection, const DomTree& tree,
                                   const CleanConfig& clean_config) {
    return !tokens_satisfiable(tree, rejection.required_tokens, clean_config);
}

TrainingInstance to_training_instance(const RejectionInstance& rejection,
                                      const std::string& instance_id) {
    TrainingInstance instance = rejection.base;
    instance.instance_id = instance_id;
    instance.kind = SampleKind::Rejection;
    instance.instruction = rejection.perturbed_instruction;
    instance.observation.instruction = rejection.perturbed_instruction;
    instance.label = rejection.label;
    instance.metadata = Json::object();
    instance.metadata["rule_kind"] = std::string(rule_kind_name(rejection.rule_kind));
    instance.metadata["base_instruction"] = rejection.base.instruction;
    instance.metadata["absent_tokens"] = rejection.required_tokens;
    return instance;
}

} // namespace forge
