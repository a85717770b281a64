#include "forge/dom.hpp"

#include "forge/error.hpp"
#include "forge/text.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <stack>

namespace forge {
namespace {

const std::set<std::string> kVoidElements = {
    "area", "base",  "br",   "col",  "embed",  "hr",    "img",
    "input", "link", "meta", "param", "source", "track", "wbr",
};

// Content of these elements is raw text up to the matching close tag.
const std::set<std::string> kRawTextElements = {"script", "style", "textarea", "title"};

// Opening the key tag implicitly closes an open element whose tag is in the set.
const std::map<std::string, std::set<std::string>> kImpliedClose = {
    {"li", {"li"}},
    {"option", {"option"}},
    {"optgroup", {"option", "optgroup"}},
    {"tr", {"tr", "td", "th"}},
    {"td", {"td", "th"}},
    {"th", {"td", "th"}},
    {"dt", {"dt", "dd"}},
    {"dd", {"dt", "dd"}},
};

// Block-level tags that implicitly close an open <p>.
const std::set<std::string> kClosesParagraph = {
    "p",  "div", "ul", "ol", "li",    "table",   "form",       "article",
    "h1", "h2",  "h3", "h4", "h5",    "h6",      "blockquote", "pre",
    "section", "header", "footer", "nav", "main",
};

bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) != 0;
}

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-' || c == '_' ||
           c == ':' || c == '.';
}

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

void append_utf8(std::uint32_t cp, std::string& out) {
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        out.append("\xEF\xBF\xBD");
        return;
    }
    if (cp <= 0x7F) {
        out.push_back(static_cast<char>(cp));
    } else if (cp <= 0x7FF) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0xFFFF) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Decodes the handful of named entities plus numeric references; everything
// unrecognized passes through verbatim.
std::string decode_entities(std::string_view s) {
    static const std::map<std::string, std::string, std::less<>> kNamed = {
        {"amp", "&"},   {"lt", "<"},     {"gt", ">"},    {"quot", "\""},
        {"apos", "'"},  {"nbsp", "\xC2\xA0"}, {"copy", "\xC2\xA9"},
        {"mdash", "\xE2\x80\x94"}, {"ndash", "\xE2\x80\x93"},
    };
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        std::size_t semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(s[i++]);
            continue;
        }
        std::string_view body = s.substr(i + 1, semi - i - 1);
        if (!body.empty() && body[0] == '#') {
            std::uint32_t cp = 0;
            bool ok = body.size() > 1;
            if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) {
                for (std::size_t k = 2; k < body.size() && ok; ++k) {
                    char c = body[k];
                    int d = (c >= '0' && c <= '9')   ? c - '0'
                            : (c >= 'a' && c <= 'f') ? 10 + c - 'a'
                            : (c >= 'A' && c <= 'F') ? 10 + c - 'A'
                                                     : -1;
                    if (d < 0 || cp > 0x10FFFF) ok = false;
                    else cp = cp * 16 + static_cast<std::uint32_t>(d);
                }
            } else {
                for (std::size_t k = 1; k < body.size() && ok; ++k) {
                    char c = body[k];
                    if (c < '0' || c > '9' || cp > 0x10FFFF) ok = false;
                    else cp = cp * 10 + static_cast<std::uint32_t>(c - '0');
                }
            }
            if (ok) {
                append_utf8(cp, out);
                i = semi + 1;
                continue;
            }
        } else if (auto it = kNamed.find(body); it != kNamed.end()) {
            out.append(it->second);
            i = semi + 1;
            continue;
        }
        out.push_back(s[i++]);
    }
    return out;
}

struct BuildNode {
    std::string tag;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::string text;
    std::vector<int> children;
};

class Parser {
  public:
    explicit Parser(std::string_view source) : src_(sanitize_utf8(source)) {}

    DomTree run(std::optional<std::string> url) {
        while (pos_ < src_.size()) {
            if (src_[pos_] == '<') {
                handle_markup();
            } else {
                handle_text();
            }
        }
        open_.clear(); // everything left open closes at EOF

        if (top_level_.empty()) {
            throw UnparseableError("no element content");
        }
        int root;
        if (top_level_.size() == 1) {
            root = top_level_.front();
        } else {
            nodes_.push_back(BuildNode{"html", {}, "", top_level_});
            root = static_cast<int>(nodes_.size()) - 1;
        }

        DomTree tree;
        tree.source_url = std::move(url);
        tree.nodes.reserve(nodes_.size());
        renumber(root, std::nullopt, tree);
        return tree;
    }

  private:
    void renumber(int build_id, std::optional<int> parent, DomTree& tree) {
        int id = static_cast<int>(tree.nodes.size());
        DomNode node;
        node.node_id = id;
        node.tag = std::move(nodes_[build_id].tag);
        node.attributes = std::move(nodes_[build_id].attributes);
        node.text = std::move(nodes_[build_id].text);
        node.parent = parent;
        tree.nodes.push_back(std::move(node));
        for (int child : nodes_[build_id].children) {
            tree.nodes[id].children.push_back(static_cast<int>(tree.nodes.size()));
            renumber(child, id, tree);
        }
    }

    void handle_text() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && src_[pos_] != '<') ++pos_;
        if (open_.empty()) return; // text outside any element is dropped
        append_text(open_.back(), decode_entities(src_.substr(start, pos_ - start)));
    }

    void append_text(int build_id, std::string_view raw) {
        std::string collapsed = collapse_ws(raw);
        if (collapsed.empty()) return;
        std::string& text = nodes_[build_id].text;
        if (!text.empty()) text.push_back(' ');
        text.append(collapsed);
    }

    void handle_markup() {
        if (src_.compare(pos_, 4, "<!--") == 0) {
            std::size_t end = src_.find("-->", pos_ + 4);
            pos_ = (end == std::string::npos) ? src_.size() : end + 3;
            return;
        }
        if (pos_ + 1 < src_.size() && (src_[pos_ + 1] == '!' || src_[pos_ + 1] == '?')) {
            std::size_t end = src_.find('>', pos_);
            pos_ = (end == std::string::npos) ? src_.size() : end + 1;
            return;
        }
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
            handle_close_tag();
            return;
        }
        if (pos_ + 1 < src_.size() && is_name_start(src_[pos_ + 1])) {
            handle_open_tag();
            return;
        }
        // Stray '<': literal text.
        if (!open_.empty()) append_text(open_.back(), "<");
        ++pos_;
    }

    void handle_close_tag() {
        pos_ += 2;
        std::string name = read_name();
        std::size_t end = src_.find('>', pos_);
        pos_ = (end == std::string::npos) ? src_.size() : end + 1;
        if (name.empty()) return;
        // Pop to the nearest matching open element; ignore if there is none.
        for (std::size_t k = open_.size(); k > 0; --k) {
            if (nodes_[open_[k - 1]].tag == name) {
                open_.resize(k - 1);
                return;
            }
        }
    }

    void handle_open_tag() {
        ++pos_;
        std::string name = read_name();
        std::vector<std::pair<std::string, std::string>> attrs = read_attributes();
        bool self_closed = false;
        if (pos_ < src_.size() && src_[pos_] == '/') {
            self_closed = true;
            ++pos_;
        }
        if (pos_ < src_.size() && src_[pos_] == '>') ++pos_;

        apply_implied_closes(name);

        nodes_.push_back(BuildNode{name, std::move(attrs), "", {}});
        int id = static_cast<int>(nodes_.size()) - 1;
        if (open_.empty()) {
            top_level_.push_back(id);
        } else {
            nodes_[open_.back()].children.push_back(id);
        }

        if (self_closed || kVoidElements.count(name)) return;

        if (kRawTextElements.count(name)) {
            consume_raw_text(id, name);
            return;
        }
        open_.push_back(id);
    }

    void apply_implied_closes(const std::string& name) {
        while (!open_.empty()) {
            const std::string& top = nodes_[open_.back()].tag;
            auto it = kImpliedClose.find(name);
            if (it != kImpliedClose.end() && it->second.count(top)) {
                open_.pop_back();
                continue;
            }
            if (top == "p" && kClosesParagraph.count(name)) {
                open_.pop_back();
                continue;
            }
            break;
        }
    }

    void consume_raw_text(int build_id, const std::string& name) {
        std::string needle = "</" + name;
        // Case-insensitive search: scan for '<', then compare in place.
        std::size_t start = pos_;
        while (pos_ < src_.size()) {
            std::size_t lt = src_.find('<', pos_);
            if (lt == std::string::npos) {
                pos_ = src_.size();
                break;
            }
            if (lt + needle.size() <= src_.size()) {
                bool match = true;
                for (std::size_t k = 0; k < needle.size(); ++k) {
                    char a = src_[lt + k];
                    char b = needle[k];
                    if (std::tolower(static_cast<unsigned char>(a)) != b) {
                        match = false;
                        break;
                    }
                }
                if (match) {
                    append_text(build_id, src_.substr(start, lt - start));
                    std::size_t end = src_.find('>', lt);
                    pos_ = (end == std::string::npos) ? src_.size() : end + 1;
                    return;
                }
            }
            pos_ = lt + 1;
        }
        append_text(build_id, src_.substr(start));
    }

    std::string read_name() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_name_char(src_[pos_])) ++pos_;
        return to_lower(std::string_view(src_).substr(start, pos_ - start));
    }

    std::vector<std::pair<std::string, std::string>> read_attributes() {
        std::vector<std::pair<std::string, std::string>> attrs;
        while (pos_ < src_.size()) {
            while (pos_ < src_.size() && is_ws(src_[pos_])) ++pos_;
            if (pos_ >= src_.size() || src_[pos_] == '>' || src_[pos_] == '/') break;
            std::size_t start = pos_;
            while (pos_ < src_.size() && !is_ws(src_[pos_]) && src_[pos_] != '=' &&
                   src_[pos_] != '>' && src_[pos_] != '/') {
                ++pos_;
            }
            std::string name = to_lower(std::string_view(src_).substr(start, pos_ - start));
            while (pos_ < src_.size() && is_ws(src_[pos_])) ++pos_;
            std::string value;
            if (pos_ < src_.size() && src_[pos_] == '=') {
                ++pos_;
                while (pos_ < src_.size() && is_ws(src_[pos_])) ++pos_;
                if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'')) {
                    char quote = src_[pos_++];
                    std::size_t vstart = pos_;
                    while (pos_ < src_.size() && src_[pos_] != quote) ++pos_;
                    value = decode_entities(src_.substr(vstart, pos_ - vstart));
                    if (pos_ < src_.size()) ++pos_;
                } else {
                    std::size_t vstart = pos_;
                    while (pos_ < src_.size() && !is_ws(src_[pos_]) && src_[pos_] != '>' &&
                           src_[pos_] != '/') {
                        ++pos_;
                    }
                    value = decode_entities(src_.substr(vstart, pos_ - vstart));
                }
            }
            if (name.empty()) {
                if (pos_ < src_.size() && src_[pos_] != '>' && src_[pos_] != '/') ++pos_;
                continue;
            }
            bool duplicate = std::any_of(attrs.begin(), attrs.end(),
                                         [&](const auto& a) { return a.first == name; });
            if (!duplicate) attrs.emplace_back(std::move(name), std::move(value));
        }
        return attrs;
    }

    std::string src_;
    std::size_t pos_ = 0;
    std::vector<BuildNode> nodes_;
    std::vector<int> open_;      // stack of open build ids
    std::vector<int> top_level_; // elements created with an empty stack
};

} // namespace

std::optional<std::string_view> DomNode::attr(std::string_view name) const {
    for (const auto& [key, value] : attributes) {
        if (key == name) return std::string_view(value);
    }
    return std::nullopt;
}

const DomNode& DomTree::node(int node_id) const {
    if (!contains(node_id)) {
        throw UnknownNodeError("unknown node id " + std::to_string(node_id));
    }
    return nodes[static_cast<std::size_t>(node_id)];
}

DomTree parse_html(std::string_view source, std::optional<std::string> source_url) {
    if (source.empty()) throw UnparseableError("empty input");
    return Parser(source).run(std::move(source_url));
}

DomPath node_path(const DomTree& tree, int node_id) {
    const DomNode* node = &tree.node(node_id);
    std::vector<PathStep> reversed;
    while (true) {
        PathStep step{node->tag, 0};
        if (node->parent) {
            const DomNode& parent = tree.node(*node->parent);
            for (int sibling : parent.children) {
                if (sibling == node->node_id) break;
                if (tree.nodes[static_cast<std::size_t>(sibling)].tag == node->tag) {
                    ++step.sibling_index;
                }
            }
        }
        reversed.push_back(std::move(step));
        if (!node->parent) break;
        node = &tree.node(*node->parent);
    }
    DomPath path;
    path.steps.assign(reversed.rbegin(), reversed.rend());
    return path;
}

std::optional<int> resolve_path(const DomTree& tree, const DomPath& path) {
    if (path.steps.empty()) return std::nullopt;
    const DomNode& root = tree.root();
    if (root.tag != path.steps[0].tag || path.steps[0].sibling_index != 0) {
        return std::nullopt;
    }
    int current = root.node_id;
    for (std::size_t level = 1; level < path.steps.size(); ++level) {
        const PathStep& step = path.steps[level];
        int seen = 0;
        int next = -1;
        for (int child : tree.node(current).children) {
            if (tree.nodes[static_cast<std::size_t>(child)].tag == step.tag) {
                if (seen == step.sibling_index) {
                    next = child;
                    break;
                }
                ++seen;
            }
        }
        if (next < 0) return std::nullopt;
        current = next;
    }
    return current;
}

int subtree_size(const DomTree& tree, int node_id) {
    const DomNode& node = tree.node(node_id);
    int count = 1;
    for (int child : node.children) count += subtree_size(tree, child);
    return count;
}

std::string inner_text(const DomTree& tree, int node_id) {
    const DomNode& node = tree.node(node_id);
    std::string out = node.text;
    for (int child : node.children) {
        std::string child_text = inner_text(tree, child);
        if (child_text.empty()) continue;
        if (!out.empty()) out.push_back(' ');
        out.append(child_text);
    }
    return out;
}

} // namespace forge
