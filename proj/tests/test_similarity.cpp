#include "forge/similarity.hpp"

#include "forge/error.hpp"
#include "forge/preprocess.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace forge;

namespace {

std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(FORGE_FIXTURE_DIR) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

int ted_between_shapes(const std::string& a, const std::string& b) {
    DomTree tree_a = parse_html(test::to_html(test::tree_from_shape(a)));
    DomTree tree_b = parse_html(test::to_html(test::tree_from_shape(b)));
    return tree_edit_distance(tree_a, 0, tree_b, 0);
}

} // namespace

TEST_CASE("tree_edit_distance on hand-checked shapes") {
    // Expected values re-derived with the reference recursion before being
    // frozen here.
    CHECK(test::naive_tree_edit_distance(test::tree_from_shape("div(a,b)"),
                                         test::tree_from_shape("div(a)")) == 1);
    CHECK(test::naive_tree_edit_distance(test::tree_from_shape("div(a)"),
                                         test::tree_from_shape("span(a)")) == 1);

    CHECK(ted_between_shapes("div(a,b)", "div(a,b)") == 0);
    CHECK(ted_between_shapes("div(a,b)", "div(a)") == 1);  // delete b
    CHECK(ted_between_shapes("div(a)", "span(a)") == 1);   // relabel root
    CHECK(ted_between_shapes("div(a,b(c))", "div(b(c))") == 1);
    CHECK(ted_between_shapes("a", "div(a,b(c))") == 3);
}

TEST_CASE("tree_edit_distance equals the reference recursion on random tree pairs") {
    Rng rng(1234);
    const std::vector<std::string> alphabet = {"div", "span", "a", "b"};
    std::vector<test::LabelTree> trees;
    for (int i = 0; i < 24; ++i) {
        int size = 1 + static_cast<int>(rng.uniform_index(6));
        trees.push_back(test::random_label_tree(rng, size, alphabet));
    }
    for (const test::LabelTree& a : trees) {
        DomTree tree_a = parse_html(test::to_html(a));
        for (const test::LabelTree& b : trees) {
            DomTree tree_b = parse_html(test::to_html(b));
            CHECK(tree_edit_distance(tree_a, 0, tree_b, 0) ==
                  test::naive_tree_edit_distance(a, b));
        }
    }
}

TEST_CASE("tree_edit_distance behaves like a metric on small trees") {
    Rng rng(555);
    const std::vector<std::string> alphabet = {"div", "span", "a"};
    std::vector<DomTree> trees;
    std::vector<test::LabelTree> shapes;
    for (int i = 0; i < 10; ++i) {
        int size = 1 + static_cast<int>(rng.uniform_index(5));
        shapes.push_back(test::random_label_tree(rng, size, alphabet));
        trees.push_back(parse_html(test::to_html(shapes.back())));
    }
    for (std::size_t i = 0; i < trees.size(); ++i) {
        CHECK(tree_edit_distance(trees[i], 0, trees[i], 0) == 0);
        for (std::size_t j = 0; j < trees.size(); ++j) {
            int dij = tree_edit_distance(trees[i], 0, trees[j], 0);
            CHECK(dij == tree_edit_distance(trees[j], 0, trees[i], 0)); // symmetry
            for (std::size_t k = 0; k < trees.size(); ++k) {
                int dik = tree_edit_distance(trees[i], 0, trees[k], 0);
                int dkj = tree_edit_distance(trees[k], 0, trees[j], 0);
                CHECK(dij <= dik + dkj); // triangle inequality
            }
        }
    }
}

TEST_CASE("topo_similarity") {
    SUBCASE("structurally identical subtrees score 1") {
        DomTree tree = parse_html("<div><a><b></b></a><a><b></b></a></div>");
        CHECK(topo_similarity(tree, 1, 3) == doctest::Approx(1.0));
    }
    SUBCASE("3-node vs 2-node subtree with one edit") {
        // a(b,c) vs a(b): TED 1, max size 3 -> 1 - 1/3
        DomTree tree = parse_html("<div><a><b></b><c></c></a><a><b></b></a></div>");
        CHECK(topo_similarity(tree, 1, 4) == doctest::Approx(2.0 / 3.0));
    }
    SUBCASE("disjoint single-node trees clamp at 0") {
        DomTree tree = parse_html("<div><a></a><b></b></div>");
        CHECK(topo_similarity(tree, 1, 2) == doctest::Approx(0.0));
    }
}

TEST_CASE("attr_similarity") {
    SUBCASE("formula-forced 1/3 overlap") {
        // {a,b} vs {b,c}
        DomTree tree = parse_html(
            "<div><p class=\"a b\"></p><p class=\"b c\"></p></div>");
        CHECK(attr_similarity(tree, 1, 2) == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("identical sets score 1") {
        DomTree tree = parse_html(
            "<div><p class=\"x y\">go</p><p class=\"y x\">go</p></div>");
        CHECK(attr_similarity(tree, 1, 2) == doctest::Approx(1.0));
    }
    SUBCASE("both empty sets score 1") {
        DomTree tree = parse_html("<div><p></p><p></p></div>");
        CHECK(attr_similarity(tree, 1, 2) == doctest::Approx(1.0));
    }
    SUBCASE("the two flight buttons have identical local attributes") {
        DomTree tree = clean_tree(parse_html(read_fixture("flight.html")), CleanConfig{});
        CHECK(attr_similarity(tree, 6, 11) == doctest::Approx(1.0));
    }
    SUBCASE("symmetric") {
        DomTree tree = parse_html(
            "<div><p class=\"a b\">t u</p><p class=\"c\" aria-label=\"b\">v</p></div>");
        CHECK(attr_similarity(tree, 1, 2) == doctest::Approx(attr_similarity(tree, 2, 1)));
    }
    SUBCASE("role tokens only count when enabled") {
        DomTree tree = parse_html(
            "<div><p role=\"tab\"></p><p role=\"tab\"></p></div>");
        CHECK(attr_similarity(tree, 1, 2, false) == doctest::Approx(1.0)); // both empty
        CHECK(attr_similarity(tree, 1, 2, true) == doctest::Approx(1.0));
        DomTree mixed = parse_html(
            "<div><p role=\"tab\" class=\"x\"></p><p class=\"x\"></p></div>");
        CHECK(attr_similarity(mixed, 1, 2, false) == doctest::Approx(1.0));
        CHECK(attr_similarity(mixed, 1, 2, true) == doctest::Approx(0.5));
    }
}

TEST_CASE("hybrid_score combines the two parts with the structural weight") {
    SimilarityWeights weights; // lambda 0.6
    SUBCASE("pure structure match") {
        // same tag, different attrs: s_topo 1, s_attr 0
        DomTree tree = parse_html("<div><p class=\"a\"></p><p class=\"b\"></p></div>");
        SimilarityScore score = hybrid_score(tree, 1, 2, weights);
        CHECK(score.s_topo == doctest::Approx(1.0));
        CHECK(score.s_attr == doctest::Approx(0.0));
        CHECK(score.s_total == doctest::Approx(0.6));
    }
    SUBCASE("pure attribute match") {
        // different tags, same class: s_topo 0, s_attr 1
        DomTree tree = parse_html("<div><p class=\"a\"></p><q class=\"a\"></q></div>");
        SimilarityScore score = hybrid_score(tree, 1, 2, weights);
        CHECK(score.s_topo == doctest::Approx(0.0));
        CHECK(score.s_attr == doctest::Approx(1.0));
        CHECK(score.s_total == doctest::Approx(0.4));
    }
    SUBCASE("the Delta button is a perfect hybrid match for the United button") {
        DomTree tree = clean_tree(parse_html(read_fixture("flight.html")), CleanConfig{});
        SimilarityScore score = hybrid_score(tree, 11, 6, weights);
        CHECK(score.s_topo == doctest::Approx(1.0));
        CHECK(score.s_attr == doctest::Approx(1.0));
        CHECK(score.s_total == doctest::Approx(1.0));
    }
    SUBCASE("same node is rejected") {
        DomTree tree = parse_html("<div><a></a></div>");
        CHECK_THROWS_AS(hybrid_score(tree, 1, 1, weights), SameNodeError);
    }
}

TEST_CASE("similarity stays in bounds and on formula over random pairs") {
    Rng rng(9001);
    SimilarityWeights weights;
    int checked = 0;
    while (checked < 300) {
        DomTree tree = parse_html(test::random_page_html(rng, 4, 30));
        if (tree.node_count() < 3) continue;
        int a = 1 + static_cast<int>(rng.uniform_index(tree.node_count() - 1));
        int b = 1 + static_cast<int>(rng.uniform_index(tree.node_count() - 1));
        if (a == b) continue;
        SimilarityScore score = hybrid_score(tree, a, b, weights);
        CHECK(score.s_topo >= 0.0);
        CHECK(score.s_topo <= 1.0);
        CHECK(score.s_attr >= 0.0);
        CHECK(score.s_attr <= 1.0);
        CHECK(score.s_total >= 0.0);
        CHECK(score.s_total <= 1.0);
        CHECK(std::abs(score.s_total - (0.6 * score.s_topo + 0.4 * score.s_attr)) < 1e-12);
        ++checked;
    }
}

TEST_CASE("hybrid_score is monotone in each sub-score") {
    // Fix one sub-score and vary the other through constructed pairs.
    DomTree tree = parse_html(
        "<div>"
        "<p class=\"a b c d\"></p>"   // 1: reference
        "<p class=\"a b c d\"></p>"   // 2: attr 1
        "<p class=\"a b\"></p>"       // 3: attr 1/3... relative to 4-token reference
        "<p class=\"z\"></p>"         // 4: attr 0
        "</div>");
    SimilarityWeights weights;
    double high = hybrid_score(tree, 2, 1, weights).s_total;
    double mid = hybrid_score(tree, 3, 1, weights).s_total;
    double low = hybrid_score(tree, 4, 1, weights).s_total;
    CHECK(high >= mid);
    CHECK(mid >= low);
}
