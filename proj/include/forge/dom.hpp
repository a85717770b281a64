#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace forge {

/// One element node of a parsed document. Text nodes are not materialized:
/// each element carries the whitespace-collapsed concatenation of its direct
/// text content, so the tree contains element nodes only.
struct DomNode {
    int node_id = 0;                                           // pre-order index, 0-based
    std::string tag;                                           // lowercase, non-empty
    std::vector<std::pair<std::string, std::string>> attributes; // source order, names lowercased
    std::string text;                                          // direct text, ws-collapsed
    std::vector<int> children;                                 // document order
    std::optional<int> parent;

    std::optional<std::string_view> attr(std::string_view name) const;
    bool has_attr(std::string_view name) const { return attr(name).has_value(); }
};

/// Immutable after construction; nodes are stored in pre-order so that
/// node_id doubles as the index into `nodes`.
struct DomTree {
    std::vector<DomNode> nodes;
    std::optional<std::string> source_url;

    int node_count() const { return static_cast<int>(nodes.size()); }
    bool contains(int node_id) const {
        return node_id >= 0 && node_id < node_count();
    }
    const DomNode& node(int node_id) const; // throws UnknownNodeError
    const DomNode& root() const { return nodes.front(); }
};

struct PathStep {
    std::string tag;
    int sibling_index = 0; // among preceding same-tag siblings, 0-based

    bool operator==(const PathStep&) const = default;
};

/// Root-to-node location; sibling indices count same-tag siblings only so a
/// path survives removal of unrelated siblings.
struct DomPath {
    std::vector<PathStep> steps;

    bool operator==(const DomPath&) const = default;
    std::size_t size() const { return steps.size(); }
};

/// Parses HTML with browser-style error recovery: tags are lowercased,
/// unclosed elements are closed at end of input, stray close tags are
/// ignored, and invalid UTF-8 is replaced with U+FFFD. Comments, doctypes
/// and processing instructions are dropped. If the document has several
/// top-level elements they are wrapped in a synthetic `html` root.
/// Throws UnparseableError when the input holds no element content.
DomTree parse_html(std::string_view source,
                   std::optional<std::string> source_url = std::nullopt);

DomPath node_path(const DomTree& tree, int node_id); // throws UnknownNodeError

/// Walks a path from the root; returns the node it lands on, or nothing if a
/// step does not resolve.
std::optional<int> resolve_path(const DomTree& tree, const DomPath& path);

/// Number of element nodes in the subtree rooted at node_id, inclusive.
int subtree_size(const DomTree& tree, int node_id); // throws UnknownNodeError

/// Whitespace-joined text of the whole subtree, in document order.
std::string inner_text(const DomTree& tree, int node_id);

} // namespace forge
