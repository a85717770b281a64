#include "forge/dom.hpp"
#include "forge/error.hpp"

#include "oracles.hpp"

#include <doctest.h>

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

} // namespace

TEST_CASE("parse_html builds the smallest nested document") {
    DomTree tree = parse_html("<div><a>x</a></div>");
    REQUIRE(tree.node_count() == 2);
    CHECK(tree.root().tag == "div");
    CHECK(tree.root().node_id == 0);
    const DomNode& child = tree.node(1);
    CHECK(child.tag == "a");
    CHECK(child.text == "x");
    CHECK(child.parent == 0);
}

TEST_CASE("parse_html lowercases tags and attribute keys") {
    DomTree tree = parse_html("<DIV CLASS=\"A\">");
    CHECK(tree.root().tag == "div");
    REQUIRE(tree.root().attr("class").has_value());
    CHECK(*tree.root().attr("class") == "A"); // values keep their case
}

TEST_CASE("parse_html on the flight fixture yields two sibling cards") {
    DomTree tree = parse_html(read_fixture("flight.html"));
    const DomNode& body = tree.node(1);
    REQUIRE(body.tag == "body");
    REQUIRE(body.children.size() == 2);
    int buttons = 0;
    for (int card_id : body.children) {
        const DomNode& card = tree.node(card_id);
        CHECK(card.tag == "div");
        CHECK(*card.attr("class") == "flight-card");
        for (int child : card.children) {
            if (tree.node(child).tag == "button") ++buttons;
        }
    }
    CHECK(buttons == 2);
}

TEST_CASE("parse_html recovers from malformed input") {
    SUBCASE("unclosed elements close at EOF") {
        DomTree tree = parse_html("<div><span>hello");
        CHECK(tree.node_count() == 2);
        CHECK(tree.node(1).text == "hello");
    }
    SUBCASE("stray close tags are ignored") {
        DomTree tree = parse_html("<div></p>text</div>");
        CHECK(tree.node_count() == 1);
        CHECK(tree.root().text == "text");
    }
    SUBCASE("li implies closing the previous li") {
        DomTree tree = parse_html("<ul><li>a<li>b</ul>");
        REQUIRE(tree.root().children.size() == 2);
        CHECK(tree.node(tree.root().children[0]).text == "a");
        CHECK(tree.node(tree.root().children[1]).text == "b");
    }
    SUBCASE("multiple top-level elements get a synthetic html root") {
        DomTree tree = parse_html("<div>a</div><div>b</div>");
        CHECK(tree.root().tag == "html");
        CHECK(tree.root().children.size() == 2);
    }
    SUBCASE("comments and doctypes are dropped") {
        DomTree tree = parse_html("<!DOCTYPE html><!-- hi --><p>x</p>");
        CHECK(tree.root().tag == "p");
    }
}

TEST_CASE("attribute parsing edge cases") {
    SUBCASE("quoting styles, bare values and boolean attributes") {
        DomTree tree = parse_html("<div a=1 b='two' c=\"three\" disabled d='&amp;x'>y</div>");
        const DomNode& node = tree.root();
        CHECK(*node.attr("a") == "1");
        CHECK(*node.attr("b") == "two");
        CHECK(*node.attr("c") == "three");
        REQUIRE(node.attr("disabled").has_value());
        CHECK(*node.attr("disabled") == "");
        CHECK(*node.attr("d") == "&x");
    }
    SUBCASE("the first duplicate attribute wins") {
        DomTree tree = parse_html("<p x=\"1\" x=\"2\">t</p>");
        CHECK(*tree.root().attr("x") == "1");
        CHECK(tree.root().attributes.size() == 1);
    }
    SUBCASE("self-closing syntax") {
        DomTree tree = parse_html("<div><br/><span/>tail</div>");
        CHECK(tree.node_count() == 3);
        CHECK(tree.root().text == "tail");
    }
}

TEST_CASE("parse_html rejects input without element content") {
    CHECK_THROWS_AS(parse_html(""), UnparseableError);
    CHECK_THROWS_AS(parse_html("   \n\t"), UnparseableError);
    CHECK_THROWS_AS(parse_html("just some text"), UnparseableError);
    CHECK_THROWS_AS(parse_html("<!-- only a comment -->"), UnparseableError);
}

TEST_CASE("parse_html replaces invalid UTF-8 bytes") {
    std::string source = "<p>a\xFF\xFE b</p>";
    DomTree tree = parse_html(source);
    CHECK(tree.root().text == "a\xEF\xBF\xBD\xEF\xBF\xBD b");
}

TEST_CASE("parse_html collapses whitespace and decodes entities") {
    DomTree tree = parse_html("<p>  a &amp;   b &#65; </p>");
    CHECK(tree.root().text == "a & b A");
}

TEST_CASE("raw text elements swallow markup until their close tag") {
    DomTree tree = parse_html("<div><script>if (a < b) { x(); }</script><p>y</p></div>");
    REQUIRE(tree.root().children.size() == 2);
    CHECK(tree.node(tree.root().children[0]).tag == "script");
    CHECK(tree.node(tree.root().children[1]).text == "y");
}

TEST_CASE("ids are assigned in pre-order") {
    DomTree tree = parse_html(read_fixture("flight_page.html"));
    for (const DomNode& node : tree.nodes) {
        CHECK(node.node_id == &node - tree.nodes.data());
        for (int child : node.children) {
            CHECK(child > node.node_id); // every subtree id exceeds the root's
        }
        if (node.parent) CHECK(*node.parent < node.node_id);
    }
}

TEST_CASE("parsing is deterministic") {
    std::string source = read_fixture("flight_page.html");
    DomTree a = parse_html(source);
    DomTree b = parse_html(source);
    REQUIRE(a.node_count() == b.node_count());
    for (int i = 0; i < a.node_count(); ++i) {
        CHECK(a.node(i).tag == b.node(i).tag);
        CHECK(a.node(i).attributes == b.node(i).attributes);
        CHECK(a.node(i).text == b.node(i).text);
        CHECK(a.node(i).children == b.node(i).children);
    }
}

TEST_CASE("node_path basics") {
    DomTree tree = parse_html(read_fixture("flight.html"));

    SUBCASE("root path has length 1") {
        DomPath path = node_path(tree, 0);
        REQUIRE(path.steps.size() == 1);
        CHECK(path.steps[0].tag == "html");
        CHECK(path.steps[0].sibling_index == 0);
    }
    SUBCASE("sibling index counts same-tag siblings under the same parent only") {
        // Both buttons are each the first button under their own card.
        DomPath united = node_path(tree, 6);
        DomPath delta = node_path(tree, 11);
        CHECK(united.steps.back().sibling_index == 0);
        CHECK(delta.steps.back().sibling_index == 0);
    }
    SUBCASE("the Delta select button resolves to the expected path") {
        DomPath path = node_path(tree, 11);
        DomPath expected;
        expected.steps = {{"html", 0}, {"body", 0}, {"div", 1}, {"button", 0}};
        CHECK(path == expected);
    }
    SUBCASE("unknown node throws") {
        CHECK_THROWS_AS(node_path(tree, 99), UnknownNodeError);
    }
}

TEST_CASE("node_path then resolve_path is the identity on every fixture node") {
    for (const char* name :
         {"flight.html", "flight_page.html", "outofstock.html", "searchbar.html"}) {
        DomTree tree = parse_html(read_fixture(name));
        for (int id = 0; id < tree.node_count(); ++id) {
            auto resolved = resolve_path(tree, node_path(tree, id));
            REQUIRE(resolved.has_value());
            CHECK(*resolved == id);
        }
    }
}

TEST_CASE("subtree_size") {
    DomTree tree = parse_html("<div><a></a><b><c></c></b></div>");
    SUBCASE("leaf is 1") { CHECK(subtree_size(tree, 1) == 1); }
    SUBCASE("root counts every node") { CHECK(subtree_size(tree, 0) == 4); }
    SUBCASE("inner subtree counted by hand") {
        // div(a, b(c)) rooted at b -> 2
        CHECK(subtree_size(tree, 2) == 2);
    }
    SUBCASE("root size equals node_count and sizes are recursive") {
        DomTree page = parse_html(read_fixture("flight_page.html"));
        CHECK(subtree_size(page, 0) == page.node_count());
        for (const DomNode& node : page.nodes) {
            int children_total = 0;
            for (int child : node.children) children_total += subtree_size(page, child);
            CHECK(subtree_size(page, node.node_id) == 1 + children_total);
        }
    }
    SUBCASE("unknown node throws") {
        CHECK_THROWS_AS(subtree_size(tree, -1), UnknownNodeError);
    }
}

TEST_CASE("the parser survives random mutations of real pages") {
    std::string base = read_fixture("flight_page.html");
    Rng rng(0xDEAD);
    const std::string noise = "<>&\"='/ ";
    for (int round = 0; round < 300; ++round) {
        std::string mutated = base;
        const int edits = 1 + static_cast<int>(rng.uniform_index(8));
        for (int e = 0; e < edits; ++e) {
            if (mutated.empty()) break;
            std::size_t pos = rng.uniform_index(mutated.size());
            switch (rng.uniform_index(3)) {
                case 0: mutated.insert(pos, 1, noise[rng.uniform_index(noise.size())]); break;
                case 1: mutated.erase(pos, 1 + rng.uniform_index(5)); break;
                default: mutated[pos] = noise[rng.uniform_index(noise.size())];
            }
        }
        if (rng.uniform_index(4) == 0) mutated.resize(rng.uniform_index(mutated.size() + 1));
        try {
            DomTree tree = parse_html(mutated);
            // Whatever came out still honors the structural invariants.
            CHECK(tree.node_count() >= 1);
            for (const DomNode& node : tree.nodes) {
                CHECK_FALSE(node.tag.empty());
                if (node.parent) CHECK(*node.parent < node.node_id);
            }
        } catch (const UnparseableError&) {
            // Acceptable outcome for input reduced to no element content.
        }
    }
}

TEST_CASE("searchbar fixture parses with the documented ids") {
    DomTree tree = parse_html(read_fixture("searchbar.html"));
    CHECK(tree.node(42).tag == "input");
    CHECK(*tree.node(42).attr("placeholder") == "Search products...");
    CHECK(tree.node(43).tag == "button");
    CHECK(*tree.node(43).attr("aria-label") == "Search");
}
