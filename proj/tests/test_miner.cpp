#include "forge/miner.hpp"

#include "forge/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
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

DomTree cleaned_fixture(const std::string& name) {
    return clean_tree(parse_html(read_fixture(name)), CleanConfig{});
}

} // namespace

TEST_CASE("the Delta select button is the top ranked negative for the United target") {
    SUBCASE("two-card page") {
        DomTree tree = cleaned_fixture("flight.html");
        HardNegativeSet set = mine_hard_negatives(tree, 6, MiningConfig{});
        REQUIRE(set.negatives.size() == 1);
        CHECK(set.negatives[0].candidate_id == 11);
        CHECK(set.negatives[0].s_total == doctest::Approx(1.0));
    }
    SUBCASE("full page with navigation distractors") {
        DomTree tree = cleaned_fixture("flight_page.html");
        // united button is node 11, delta button node 16 on this page
        REQUIRE(tree.node(11).tag == "button");
        REQUIRE(tree.node(16).tag == "button");
        HardNegativeSet set = mine_hard_negatives(tree, 11, MiningConfig{});
        REQUIRE(set.negatives.size() >= 3); // delta, search button, two links
        CHECK(set.negatives[0].candidate_id == 16);
        CHECK(set.negatives[0].s_total > set.negatives[1].s_total);
    }
}

TEST_CASE("fewer candidates than k returns all of them") {
    DomTree tree = clean_tree(
        parse_html("<html><body><a>x</a><button>y</button><input></body></html>"),
        CleanConfig{});
    std::vector<int> interactive = extract_interactive(tree, CleanConfig{});
    REQUIRE(interactive.size() == 3);
    HardNegativeSet set = mine_hard_negatives(tree, interactive[0], MiningConfig{});
    CHECK(set.negatives.size() == 2);
}

TEST_CASE("k truncates the ranked list") {
    std::string html = "<html><body>";
    for (int i = 0; i < 30; ++i) html += "<button class=\"same\">go</button>";
    html += "</body></html>";
    DomTree tree = clean_tree(parse_html(html), CleanConfig{});
    MiningConfig config;
    config.k = 20;
    HardNegativeSet set = mine_hard_negatives(tree, 2, config);
    CHECK(set.negatives.size() == 20);
}

TEST_CASE("equal scores tie-break by document order") {
    // Two identical candidates around an identical target.
    DomTree tree = clean_tree(
        parse_html("<html><body><button class=\"b\">go</button><button class=\"b\">go"
                   "</button><button class=\"b\">go</button></body></html>"),
        CleanConfig{});
    HardNegativeSet set = mine_hard_negatives(tree, 3, MiningConfig{});
    REQUIRE(set.negatives.size() == 2);
    CHECK(set.negatives[0].s_total == doctest::Approx(set.negatives[1].s_total));
    CHECK(set.negatives[0].candidate_id == 2);
    CHECK(set.negatives[1].candidate_id == 4);
}

TEST_CASE("a lone interactive target yields an empty negative set") {
    DomTree tree = clean_tree(parse_html("<html><body><button>only</button></body></html>"),
                              CleanConfig{});
    HardNegativeSet set = mine_hard_negatives(tree, 2, MiningConfig{});
    CHECK(set.target_id == 2);
    CHECK(set.negatives.empty());
}

TEST_CASE("non-interactive targets are rejected") {
    DomTree tree = cleaned_fixture("flight.html");
    CHECK_THROWS_AS(mine_hard_negatives(tree, 3, MiningConfig{}), TargetNotInteractiveError);
}

TEST_CASE("mining is deterministic and matches recomputed scores") {
    DomTree tree = cleaned_fixture("flight_page.html");
    MiningConfig config;
    HardNegativeSet first = mine_hard_negatives(tree, 11, config);
    HardNegativeSet second = mine_hard_negatives(tree, 11, config);
    REQUIRE(first.negatives.size() == second.negatives.size());
    for (std::size_t i = 0; i < first.negatives.size(); ++i) {
        CHECK(first.negatives[i].candidate_id == second.negatives[i].candidate_id);
        CHECK(first.negatives[i].s_total == second.negatives[i].s_total);
        // Independent recomputation of each ranked score.
        SimilarityScore recomputed =
            hybrid_score(tree, first.negatives[i].candidate_id, 11, config.weights);
        CHECK(first.negatives[i].s_total == doctest::Approx(recomputed.s_total));
    }
    // And the ranking is in fact descending.
    for (std::size_t i = 1; i < first.negatives.size(); ++i) {
        CHECK(first.negatives[i - 1].s_total >= first.negatives[i].s_total);
    }
}

TEST_CASE("mined negatives are interactive, distinct and never the target") {
    DomTree tree = cleaned_fixture("flight_page.html");
    HardNegativeSet set = mine_hard_negatives(tree, 11, MiningConfig{});
    std::vector<int> interactive = extract_interactive(tree, CleanConfig{});
    std::set<int> seen;
    for (const SimilarityScore& negative : set.negatives) {
        CHECK(negative.candidate_id != 11);
        CHECK(std::find(interactive.begin(), interactive.end(), negative.candidate_id) !=
              interactive.end());
        CHECK(seen.insert(negative.candidate_id).second);
    }
}

TEST_CASE("build_discrimination_instance embeds all candidates in situ") {
    DomTree tree = cleaned_fixture("flight_page.html");
    HardNegativeSet set = mine_hard_negatives(tree, 11, MiningConfig{});
    TrainingInstance instance = build_discrimination_instance(
        tree, "Select the United Airlines flight at 10:00 AM", {}, set, Action::click(11),
        CleanConfig{}, "flights:0:disc");

    CHECK(instance.kind == SampleKind::Discrimination);
    CHECK(instance.label == Action::click(11));
    CHECK(instance.metadata["target"] == 11);
    REQUIRE(instance.metadata["negatives"].is_array());
    CHECK(instance.metadata["negatives"].size() == set.negatives.size());

    // Target and negatives are all present as injected ids in the html.
    std::regex marker("id=\"(\\d+)\"");
    std::set<int> present;
    const std::string& html = instance.observation.html_text;
    for (std::sregex_iterator it(html.begin(), html.end(), marker), end; it != end; ++it) {
        present.insert(std::stoi((*it)[1].str()));
    }
    CHECK(present.count(11) == 1);
    for (const Json& id : instance.metadata["negatives"]) {
        CHECK(present.count(id.get<int>()) == 1);
    }
    CHECK(validate_instance(instance).empty());
}

TEST_CASE("build_discrimination_instance works with an empty negative set") {
    DomTree tree = clean_tree(parse_html("<html><body><button>only</button></body></html>"),
                              CleanConfig{});
    HardNegativeSet set = mine_hard_negatives(tree, 2, MiningConfig{});
    TrainingInstance instance = build_discrimination_instance(
        tree, "press it", {}, set, Action::click(2), CleanConfig{}, "solo:0:disc");
    CHECK(instance.metadata["negatives"].empty());
    CHECK(instance.observation.html_text.find("id=\"2\"") != std::string::npos);
    CHECK(validate_instance(instance).empty());
}

TEST_CASE("a gold action for a different element is rejected") {
    DomTree tree = cleaned_fixture("flight.html");
    HardNegativeSet set = mine_hard_negatives(tree, 6, MiningConfig{});
    CHECK_THROWS_AS(build_discrimination_instance(tree, "x", {}, set, Action::click(11),
                                                  CleanConfig{}, "id"),
                    MismatchedTargetError);
}
