#include "forge/preprocess.hpp"

#include "forge/error.hpp"
#include "forge/text.hpp"

#include <algorithm>
#include <set>

namespace forge {
namespace {

const std::set<std::string> kVoidElements = {
    "area", "base",  "br",   "col",  "embed",  "hr",    "img",
    "input", "link", "meta", "param", "source", "track", "wbr",
};

constexpr const char* kSystemPrompt =
    "You are a proficient web navigation agent. Given the HTML content and a user "
    "instruction, select the correct element and operation. Output format: Element ID "
    "and Operation.";

void escape_text(std::string_view in, std::string& out) {
    for (char c : in) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
}

void escape_attr(std::string_view in, std::string& out) {
    for (char c : in) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
}

struct Serializer {
    const DomTree& tree;
    const CleanConfig& config;
    bool inject_ids;
    std::string out;

    void newline() {
        if (!out.empty() && out.back() != '\n') out.push_back('\n');
    }

    // Walks by arena index; the injected marker uses the stored node_id so a
    // detached subtree view keeps its original ids.
    void write(int index) {
        const DomNode& node = tree.nodes[static_cast<std::size_t>(index)];
        bool interactive = inject_ids && is_interactive(node, config);
        if (interactive) newline();
        out.push_back('<');
        out += node.tag;
        if (interactive) {
            out += " id=\"";
            out += std::to_string(node.node_id);
            out += "\"";
        }
        for (const auto& [name, value] : node.attributes) {
            if (inject_ids && name == "id") continue; // injected marker owns the slot
            out.push_back(' ');
            out += name;
            out += "=\"";
            escape_attr(value, out);
            out += "\"";
        }
        out.push_back('>');
        if (kVoidElements.count(node.tag)) {
            if (interactive) newline();
            return;
        }
        escape_text(node.text, out);
        for (int child : node.children) write(child);
        out += "</";
        out += node.tag;
        out.push_back('>');
        if (interactive) newline();
    }
};

void copy_cleaned(const DomTree& src, int src_id, std::optional<int> parent, DomTree& dst,
                  const CleanConfig& config, std::unordered_map<int, int>& id_map) {
    const DomNode& node = src.nodes[static_cast<std::size_t>(src_id)];
    int new_id = static_cast<int>(dst.nodes.size());
    id_map.emplace(src_id, new_id);

    DomNode cleaned;
    cleaned.node_id = new_id;
    cleaned.tag = node.tag;
    cleaned.parent = parent;
    for (const std::string& name : config.kept_attributes) {
        if (auto value = node.attr(name)) cleaned.attributes.emplace_back(name, std::string(*value));
    }
    for (const std::string& name : structural_attributes()) {
        bool already = std::find(config.kept_attributes.begin(), config.kept_attributes.end(),
                                 name) != config.kept_attributes.end();
        if (already) continue;
        if (auto value = node.attr(name)) cleaned.attributes.emplace_back(name, std::string(*value));
    }
    cleaned.text = truncate_tokens(node.text, config.text_token_limit);
    dst.nodes.push_back(std::move(cleaned));

    for (int child : node.children) {
        const DomNode& child_node = src.nodes[static_cast<std::size_t>(child)];
        if (config.removed_tags.count(child_node.tag)) continue;
        dst.nodes[static_cast<std::size_t>(new_id)].children.push_back(
            static_cast<int>(dst.nodes.size()));
        copy_cleaned(src, child, new_id, dst, config, id_map);
    }
}

} // namespace

const std::vector<std::string>& structural_attributes() {
    static const std::vector<std::string> kStructural = {"role", "disabled"};
    return kStructural;
}

const std::set<std::string>& interactive_roles() {
    static const std::set<std::string> kRoles = {"button", "link",    "checkbox", "tab",
                                                 "menuitem", "textbox", "combobox"};
    return kRoles;
}

bool is_interactive(const DomNode& node, const CleanConfig& config) {
    if (config.interactive_tags.count(node.tag)) return true;
    if (auto role = node.attr("role")) {
        return interactive_roles().count(to_lower(*role)) > 0;
    }
    return false;
}

DomTree clean_tree(const DomTree& tree, const CleanConfig& config) {
    return clean_tree_mapped(tree, config).tree;
}

CleanResult clean_tree_mapped(const DomTree& tree, const CleanConfig& config) {
    const DomNode& root = tree.root();
    if (config.removed_tags.count(root.tag)) {
        throw EmptyAfterCleaningError("document root '" + root.tag + "' is a removed tag");
    }
    CleanResult result;
    result.tree.source_url = tree.source_url;
    copy_cleaned(tree, root.node_id, std::nullopt, result.tree, config, result.id_map);
    return result;
}

std::vector<int> extract_interactive(const DomTree& tree, const CleanConfig& config) {
    std::vector<int> ids;
    for (const DomNode& node : tree.nodes) {
        if (is_interactive(node, config)) ids.push_back(node.node_id);
    }
    return ids;
}

std::string serialize_html(const DomTree& tree, const CleanConfig& config, bool inject_ids) {
    Serializer serializer{tree, config, inject_ids, {}};
    serializer.write(0);
    std::string out = std::move(serializer.out);
    if (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

std::string history_line(int one_based_index, const Action& action) {
    std::string line = std::to_string(one_based_index) + ". ";
    switch (action.kind) {
        case ActionKind::Click:
            line += "Click element [" + std::to_string(action.element_id.value_or(-1)) + "]";
            break;
        case ActionKind::Type:
            line += "Type \"" + action.argument.value_or("") + "\" into element [" +
                    std::to_string(action.element_id.value_or(-1)) + "]";
            break;
        case ActionKind::Select:
            line += "Select \"" + action.argument.value_or("") + "\" in element [" +
                    std::to_string(action.element_id.value_or(-1)) + "]";
            break;
        case ActionKind::None:
            line += "None";
            break;
    }
    return line;
}

FormattedObservation format_observation(const DomTree& tree, const std::string& instruction,
                                        const std::vector<Action>& history,
                                        const CleanConfig& config) {
    FormattedObservation obs;
    obs.system_text = kSystemPrompt;
    obs.html_text = serialize_html(tree, config, /*inject_ids=*/true);
    obs.history_lines.reserve(history.size());
    for (std::size_t i = 0; i < history.size(); ++i) {
        obs.history_lines.push_back(history_line(static_cast<int>(i) + 1, history[i]));
    }
    obs.instruction = instruction;
    return obs;
}

std::string render_chatml(const FormattedObservation& obs) {
    std::string out;
    out += "<|im_start|>system\n";
    out += obs.system_text;
    out += "\n<|im_end|>\n<|im_start|>user\nObservation (Cleaned HTML):\n";
    out += obs.html_text;
    out += "\n";
    if (!obs.history_lines.empty()) {
        out += "\nPrevious Actions:\n";
        for (const std::string& line : obs.history_lines) {
            out += line;
            out += "\n";
        }
    }
    out += "\nCurrent Instruction:\n\"";
    out += obs.instruction;
    out += "\"\n<|im_end|>\n<|im_start|>assistant\n";
    return out;
}

} // namespace forge
