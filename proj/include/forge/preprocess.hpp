#pragma once

#include "forge/action.hpp"
#include "forge/dom.hpp"

#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace forge {

/// Knobs for the cleaning pipeline. `kept_attributes` lists the semantic
/// attributes retained on every node, in canonical serialization order.
/// `role` and `disabled` are additionally carried through cleaning because
/// interactivity detection and rejection satisfiability depend on them.
struct CleanConfig {
    std::set<std::string> removed_tags = {"script", "style", "svg",     "head",
                                          "meta",   "link",  "noscript"};
    std::vector<std::string> kept_attributes = {"class", "id",          "type",  "name",
                                                "aria-label", "placeholder", "value"};
    int text_token_limit = 50;
    std::set<std::string> interactive_tags = {"a",      "button",   "input",
                                              "select", "textarea", "option"};
};

/// Attributes retained and serialized regardless of kept_attributes.
const std::vector<std::string>& structural_attributes();

/// role attribute values that make a non-interactive tag interactive.
const std::set<std::string>& interactive_roles();

bool is_interactive(const DomNode& node, const CleanConfig& config);

struct CleanResult {
    DomTree tree;
    std::unordered_map<int, int> id_map; // old node_id -> new node_id
};

/// Prompt-oriented cleaning: drops removed-tag subtrees, filters attributes
/// down to kept + structural ones (reordered canonically), truncates each
/// node's text to the first `text_token_limit` whitespace tokens and
/// reassigns node ids sequentially in pre-order.
/// Throws EmptyAfterCleaningError when nothing survives.
DomTree clean_tree(const DomTree& tree, const CleanConfig& config);
CleanResult clean_tree_mapped(const DomTree& tree, const CleanConfig& config);

/// Document-order node ids of every interactive element.
std::vector<int> extract_interactive(const DomTree& tree, const CleanConfig& config);

/// Deterministic serialization of a (cleaned) tree. With `inject_ids` every
/// interactive element is emitted on its own line with `id="<node_id>"` as
/// the first attribute and any source id attribute suppressed; without it
/// the tree round-trips structurally through parse_html with identical ids.
std::string serialize_html(const DomTree& tree, const CleanConfig& config, bool inject_ids);

struct FormattedObservation {
    std::string system_text;
    std::string html_text; // id-injected serialization
    std::vector<std::string> history_lines;
    std::string instruction;
};

/// "1. Type "iPhone 13" into element [15]"
std::string history_line(int one_based_index, const Action& action);

FormattedObservation format_observation(const DomTree& tree, const std::string& instruction,
                                        const std::vector<Action>& history,
                                        const CleanConfig& config);

/// Flattens an observation into the ChatML-style training prompt. The
/// history block is omitted when there are no previous actions.
std::string render_chatml(const FormattedObservation& obs);

} // namespace forge
