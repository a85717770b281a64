#pragma once

#include "forge/dom.hpp"

#include <set>
#include <string>

namespace forge {

struct SimilarityWeights {
    double lambda = 0.6;             // structural weight
    bool include_role_tokens = false; // add role attribute tokens to the Jaccard set
};

struct SimilarityScore {
    double s_topo = 0.0;
    double s_attr = 0.0;
    double s_total = 0.0;
    int candidate_id = -1;
};

/// Exact ordered-tree edit distance (unit-cost insert/delete, relabel 0/1 on
/// tag names) between the subtrees rooted at the two nodes. Zhang–Shasha
/// keyroot decomposition.
int tree_edit_distance(const DomTree& tree_a, int root_a, const DomTree& tree_b, int root_b);

inline int tree_edit_distance(const DomTree& tree, int root_a, int root_b) {
    return tree_edit_distance(tree, root_a, tree, root_b);
}

/// 1 - TED / max(subtree sizes), clamped below at 0.
double topo_similarity(const DomTree& tree, int e_i, int e_plus);

/// Lowercased token set feeding the attribute Jaccard: class tokens, the id
/// value, aria-label tokens and the node's own text tokens (role tokens when
/// enabled).
std::set<std::string> jaccard_tokens(const DomTree& tree, int node_id,
                                     bool include_role_tokens = false);

/// Jaccard similarity of the two token sets; 1.0 when both are empty.
double attr_similarity(const DomTree& tree, int e_i, int e_plus,
                       bool include_role_tokens = false);

/// Weighted combination lambda * s_topo + (1 - lambda) * s_attr.
/// Throws SameNodeError when e_i == e_plus.
SimilarityScore hybrid_score(const DomTree& tree, int e_i, int e_plus,
                             const SimilarityWeights& weights);

} // namespace forge
