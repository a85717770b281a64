#include "forge/similarity.hpp"

#include "forge/error.hpp"
#include "forge/text.hpp"

#include <algorithm>
#include <vector>

namespace forge {
namespace {

// Post-order view of one subtree, annotated for Zhang-Shasha: for each
// post-order position, the tag label and the post-order index of its
// leftmost leaf descendant, plus the keyroot positions.
struct PostOrderView {
    std::vector<const std::string*> labels;
    std::vector<int> leftmost;
    std::vector<int> keyroots;
};

int fill_post_order(const DomTree& tree, int node_id, PostOrderView& view) {
    const DomNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
    int left = -1;
    for (int child : node.children) {
        int child_left = fill_post_order(tree, child, view);
        if (left < 0) left = child_left;
    }
    int index = static_cast<int>(view.labels.size());
    if (left < 0) left = index; // leaf
    view.labels.push_back(&node.tag);
    view.leftmost.push_back(left);
    return left;
}

PostOrderView make_view(const DomTree& tree, int root) {
    PostOrderView view;
    fill_post_order(tree, root, view);
    int n = static_cast<int>(view.labels.size());
    // keyroots: nodes with no left sibling on the path to the root, i.e. the
    // last post-order position for each distinct leftmost-leaf value.
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int i = n - 1; i >= 0; --i) {
        int l = view.leftmost[static_cast<std::size_t>(i)];
        if (!seen[static_cast<std::size_t>(l)]) {
            seen[static_cast<std::size_t>(l)] = true;
            view.keyroots.push_back(i);
        }
    }
    std::sort(view.keyroots.begin(), view.keyroots.end());
    return view;
}

} // namespace

int tree_edit_distance(const DomTree& tree_a, int root_a, const DomTree& tree_b, int root_b) {
    tree_a.node(root_a);
    tree_b.node(root_b);
    PostOrderView a = make_view(tree_a, root_a);
    PostOrderView b = make_view(tree_b, root_b);
    const int m = static_cast<int>(a.labels.size());
    const int n = static_cast<int>(b.labels.size());

    std::vector<std::vector<int>> treedist(static_cast<std::size_t>(m),
                                           std::vector<int>(static_cast<std::size_t>(n), 0));
    std::vector<std::vector<int>> fd(static_cast<std::size_t>(m) + 1,
                                     std::vector<int>(static_cast<std::size_t>(n) + 1, 0));

    for (int i : a.keyroots) {
        for (int j : b.keyroots) {
            const int li = a.leftmost[static_cast<std::size_t>(i)];
            const int lj = b.leftmost[static_cast<std::size_t>(j)];
            fd[0][0] = 0;
            for (int x = li; x <= i; ++x) {
                fd[static_cast<std::size_t>(x - li + 1)][0] =
                    fd[static_cast<std::size_t>(x - li)][0] + 1;
            }
            for (int y = lj; y <= j; ++y) {
                fd[0][static_cast<std::size_t>(y - lj + 1)] =
                    fd[0][static_cast<std::size_t>(y - lj)] + 1;
            }
            for (int x = li; x <= i; ++x) {
                for (int y = lj; y <= j; ++y) {
                    const std::size_t dx = static_cast<std::size_t>(x - li + 1);
                    const std::size_t dy = static_cast<std::size_t>(y - lj + 1);
                    const int lx = a.leftmost[static_cast<std::size_t>(x)];
                    const int ly = b.leftmost[static_cast<std::size_t>(y)];
                    if (lx == li && ly == lj) {
                        const int relabel =
                            (*a.labels[static_cast<std::size_t>(x)] ==
                             *b.labels[static_cast<std::size_t>(y)])
                                ? 0
                                : 1;
                        fd[dx][dy] = std::min({fd[dx - 1][dy] + 1, fd[dx][dy - 1] + 1,
                                               fd[dx - 1][dy - 1] + relabel});
                        treedist[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] =
                            fd[dx][dy];
                    } else {
                        const std::size_t px = static_cast<std::size_t>(lx - li);
                        const std::size_t py = static_cast<std::size_t>(ly - lj);
                        fd[dx][dy] = std::min(
                            {fd[dx - 1][dy] + 1, fd[dx][dy - 1] + 1,
                             fd[px][py] +
                                 treedist[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)]});
                    }
                }
            }
        }
    }
    return treedist[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(n - 1)];
}

double topo_similarity(const DomTree& tree, int e_i, int e_plus) {
    const int ted = tree_edit_distance(tree, e_i, tree, e_plus);
    const int larger = std::max(subtree_size(tree, e_i), subtree_size(tree, e_plus));
    const double score = 1.0 - static_cast<double>(ted) / static_cast<double>(larger);
    return std::max(0.0, score);
}

std::set<std::string> jaccard_tokens(const DomTree& tree, int node_id,
                                     bool include_role_tokens) {
    const DomNode& node = tree.node(node_id);
    std::set<std::string> tokens;
    auto add_split = [&](std::string_view value) {
        for (std::string& token : split_ws(value)) tokens.insert(to_lower(token));
    };
    if (auto cls = node.attr("class")) add_split(*cls);
    if (auto id = node.attr("id")) {
        std::string value = to_lower(collapse_ws(*id));
        if (!value.empty()) tokens.insert(std::move(value));
    }
    if (auto aria = node.attr("aria-label")) add_split(*aria);
    add_split(node.text);
    if (include_role_tokens) {
        if (auto role = node.attr("role")) add_split(*role);
    }
    return tokens;
}

double attr_similarity(const DomTree& tree, int e_i, int e_plus, bool include_role_tokens) {
    std::set<std::string> a = jaccard_tokens(tree, e_i, include_role_tokens);
    std::set<std::string> b = jaccard_tokens(tree, e_plus, include_role_tokens);
    if (a.empty() && b.empty()) return 1.0;
    std::size_t intersection = 0;
    for (const std::string& token : a) intersection += b.count(token);
    const std::size_t unions = a.size() + b.size() - intersection;
    return static_cast<double>(intersection) / static_cast<double>(unions);
}

SimilarityScore hybrid_score(const DomTree& tree, int e_i, int e_plus,
                             const SimilarityWeights& weights) {
    if (e_i == e_plus) throw SameNodeError("candidate equals target node");
    SimilarityScore score;
    score.candidate_id = e_i;
    score.s_topo = topo_similarity(tree, e_i, e_plus);
    score.s_attr = attr_similarity(tree, e_i, e_plus, weights.include_role_tokens);
    score.s_total = weights.lambda * score.s_topo + (1.0 - weights.lambda) * score.s_attr;
    return score;
}

} // namespace forge
