#include "hb/dag.hpp"
#include "hb/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

using namespace hb;

namespace {

EquivalenceSet set_of(std::vector<std::string> classes, bool input = true, std::string text = {}) {
    EquivalenceSet s;
    s.bag = LemmaBag(classes);
    if (text.empty())
        for (const auto& c : s.bag.classes()) text += (text.empty() ? "" : " ") + c;
    s.members.push_back({text, std::nullopt, input ? 1u : 0u, input});
    s.is_input = input;
    s.total_count = input ? 1 : 0;
    return s;
}

std::set<std::pair<NodeId, NodeId>> edge_set(const ConceptDag& dag) {
    auto e = dag.edges();
    return {e.begin(), e.end()};
}

NodeId by_text(const ConceptDag& dag, const std::string& text) {
    for (const auto& [id, node] : dag.nodes())
        for (const auto& m : node.members)
            if (m.text == text) return id;
    FAIL("no node with member " << text);
    return 0;
}

ConceptNode input_node(const std::string& text) {
    ConceptNode n;
    n.members.push_back({text, 1, true});
    n.origin = Origin::input;
    return n;
}

ConceptNode plain_node(const std::string& text, Origin origin = Origin::substring) {
    ConceptNode n;
    n.members.push_back({text, 0, false});
    n.origin = origin;
    return n;
}

}  // namespace

TEST_CASE("build_dag keeps only covering edges") {
    auto dag = build_dag({set_of({"pain"}), set_of({"pain", "severe"}), set_of({"leg", "pain", "severe"})});
    auto p = by_text(dag, "pain"), sp = by_text(dag, "pain severe"), spl = by_text(dag, "leg pain severe");
    CHECK(edge_set(dag) == std::set<std::pair<NodeId, NodeId>>{{p, sp}, {sp, spl}});
    CHECK_FALSE(dag.has_edge(p, spl));
}

TEST_CASE("build_dag single set and two parents") {
    auto one = build_dag({set_of({"x"})});
    CHECK(one.size() == 1);
    CHECK(one.edge_count() == 0);

    auto dag = build_dag({set_of({"leg"}), set_of({"pain"}), set_of({"leg", "pain"})});
    CHECK(dag.parents(by_text(dag, "leg pain")).size() == 2);
}

TEST_CASE("build_dag origins and empty bags") {
    auto dag = build_dag({set_of({"pain"}, false), set_of({"chest", "pain"}), set_of({}, true, "of the")});
    CHECK(dag.node(by_text(dag, "pain")).origin == Origin::substring);
    CHECK(dag.node(by_text(dag, "chest pain")).origin == Origin::input);
    auto empty = by_text(dag, "of the");
    CHECK(dag.parents(empty).empty());
    CHECK(dag.children(empty).empty());
}

TEST_CASE("build_dag equals the brute-force Hasse diagram on random families") {
    std::mt19937 rng(5);
    const std::vector<std::string> classes{"a", "b", "c", "d", "e", "f"};
    for (int round = 0; round < 300; ++round) {
        std::set<std::vector<std::string>> family;
        const int n = 1 + static_cast<int>(rng() % 12);
        while (static_cast<int>(family.size()) < n) {
            std::vector<std::string> bag;
            for (const auto& c : classes)
                if (rng() % 2) bag.push_back(c);
            if (!bag.empty()) family.insert(bag);
        }
        std::vector<EquivalenceSet> sets;
        for (const auto& b : family) sets.push_back(set_of(b));
        auto dag = build_dag(sets);
        std::vector<NodeId> ids;
        for (const auto& [id, node] : dag.nodes()) ids.push_back(id);
        std::set<std::pair<NodeId, NodeId>> expected;
        for (auto a : ids)
            for (auto b : ids) {
                const auto& ba = dag.node(a).bag;
                const auto& bb = dag.node(b).bag;
                if (!bb.strictly_includes(ba)) continue;
                bool covered = std::any_of(ids.begin(), ids.end(), [&](NodeId c) {
                    return dag.node(c).bag.strictly_includes(ba) && bb.strictly_includes(dag.node(c).bag);
                });
                if (!covered) expected.emplace(a, b);
            }
        CHECK(edge_set(dag) == expected);
    }
}

TEST_CASE("add_head_roots: shared head governs both spans") {
    Lexicon lex;
    std::vector<AnnotatedSpan> spans{{"leg pain", std::nullopt, 1, true}, {"chest pain", std::nullopt, 1, true}};
    auto index = build_class_index({"leg", "pain", "chest"}, lex);
    auto dag = build_dag({set_of({"leg", "pain"}, true, "leg pain"), set_of({"chest", "pain"}, true, "chest pain")});
    add_head_roots(dag, spans, lex, index);
    auto pain = by_text(dag, "pain");
    CHECK(dag.node(pain).origin == Origin::head);
    CHECK(dag.has_edge(pain, by_text(dag, "leg pain")));
    CHECK(dag.has_edge(pain, by_text(dag, "chest pain")));
    REQUIRE(dag.root());
    CHECK(dag.has_edge(*dag.root(), pain));
    // Exactly one parentless node: the root.
    std::size_t parentless = 0;
    for (const auto& [id, node] : dag.nodes()) parentless += dag.parents(id).empty() ? 1 : 0;
    CHECK(parentless == 1);
    CHECK(dag.reachable_from_root().size() == dag.size());
}

TEST_CASE("add_head_roots reuses a node whose bag is the head class") {
    Lexicon lex;
    std::vector<AnnotatedSpan> spans{{"fracture", std::nullopt, 1, true}};
    auto index = build_class_index({"fracture"}, lex);
    auto dag = build_dag({set_of({"fracture"}, true, "fracture")});
    add_head_roots(dag, spans, lex, index);
    CHECK(dag.size() == 2);
    CHECK(dag.edge_count() == 1);
}

TEST_CASE("add_head_roots retags a derived node and respects the Hasse discipline") {
    Lexicon lex;
    std::vector<AnnotatedSpan> spans{{"severe chest pain", std::nullopt, 1, true}};
    auto index = build_class_index({"severe", "chest", "pain"}, lex);
    auto dag = build_dag({set_of({"chest", "pain", "severe"}, true, "severe chest pain"),
                          set_of({"chest", "pain"}, false, "chest pain")});
    add_head_roots(dag, spans, lex, index);
    auto pain = by_text(dag, "pain");
    CHECK(dag.has_edge(pain, by_text(dag, "chest pain")));
    CHECK_FALSE(dag.has_edge(pain, by_text(dag, "severe chest pain")));

    auto dag2 = build_dag({set_of({"chest", "pain", "severe"}, true, "severe chest pain"),
                           set_of({"pain"}, false, "pain")});
    add_head_roots(dag2, spans, lex, index);
    CHECK(dag2.node(by_text(dag2, "pain")).origin == Origin::head);
    CHECK(dag2.size() == 3);
}

TEST_CASE("add_head_roots with two heads over one span") {
    Lexicon lex;
    std::vector<AnnotatedSpan> spans{{"leg pain", std::nullopt, 1, true}, {"leg", std::nullopt, 1, true}};
    auto index = build_class_index({"leg", "pain"}, lex);
    auto dag = build_dag({set_of({"leg", "pain"}, true, "leg pain"), set_of({"leg"}, true, "leg")});
    add_head_roots(dag, spans, lex, index);
    auto lp = by_text(dag, "leg pain");
    CHECK(dag.has_path(by_text(dag, "leg"), lp));
    CHECK(dag.has_path(by_text(dag, "pain"), lp));
}

TEST_CASE("reachable_inputs") {
    ConceptDag dag;
    auto top = dag.add_node(plain_node("top"));
    auto l = dag.add_node(plain_node("l"));
    auto r = dag.add_node(plain_node("r"));
    auto leaf = dag.add_node(input_node("leaf"));
    dag.add_edge(top, l);
    dag.add_edge(top, r);
    dag.add_edge(l, leaf);
    dag.add_edge(r, leaf);
    CHECK(reachable_inputs(dag, leaf) == std::vector<NodeId>{leaf});
    CHECK(reachable_inputs(dag, top) == std::vector<NodeId>{leaf});
    auto all = all_reachable_inputs(dag);
    CHECK(all.at(top) == std::vector<NodeId>{leaf});
    CHECK(all.at(l) == std::vector<NodeId>{leaf});
    CHECK_THROWS_AS(reachable_inputs(dag, 99), ArgumentError);
}

TEST_CASE("edge bookkeeping") {
    ConceptDag dag;
    auto a = dag.add_node(plain_node("a"));
    auto b = dag.add_node(plain_node("b"));
    CHECK(dag.add_edge(a, b));
    CHECK_FALSE(dag.add_edge(a, b));
    CHECK_THROWS_AS(dag.add_edge(a, a), ArgumentError);
    CHECK(dag.edge_count() == 1);
    CHECK(dag.remove_edge(a, b));
    CHECK_FALSE(dag.remove_edge(a, b));
    CHECK(dag.edge_count() == 0);
    dag.add_edge(a, b);
    dag.remove_node(b);
    CHECK(dag.edge_count() == 0);
    CHECK(dag.children(a).empty());
    // Ids are never reused.
    auto c = dag.add_node(plain_node("c"));
    CHECK(c == 2);
}

TEST_CASE("topological order and cycle detection") {
    ConceptDag dag;
    auto a = dag.add_node(plain_node("a"));
    auto b = dag.add_node(plain_node("b"));
    auto c = dag.add_node(plain_node("c"));
    dag.add_edge(c, a);
    dag.add_edge(a, b);
    CHECK(dag.topological_order() == std::vector<NodeId>{c, a, b});
    CHECK(dag.is_acyclic());
    dag.add_edge(b, c);
    CHECK_FALSE(dag.is_acyclic());
    CHECK_THROWS_AS(dag.topological_order(), InvariantError);
}

TEST_CASE("would_create_cycle examples") {
    ConceptDag dag;
    auto p = dag.add_node(plain_node("p"));
    auto a = dag.add_node(plain_node("a"));
    auto x = dag.add_node(plain_node("x"));
    auto b = dag.add_node(plain_node("b"));
    auto s = dag.add_node(plain_node("s"));
    dag.add_edge(p, a);
    dag.add_edge(p, s);
    dag.add_edge(a, x);
    dag.add_edge(x, b);
    CHECK_FALSE(would_create_cycle(dag, a, s));
    CHECK(would_create_cycle(dag, a, b));
    CHECK(would_create_cycle(dag, b, a));
    CHECK_FALSE(would_create_cycle(dag, a, x));
    CHECK_THROWS_AS(merge_nodes(dag, a, b), MergeRejected);
}

TEST_CASE("merge siblings and parent-child pairs") {
    ConceptDag dag;
    auto p = dag.add_node(plain_node("p"));
    auto ha = dag.add_node(input_node("heart attack"));
    auto mi = dag.add_node(input_node("myocardial infarction"));
    auto kid = dag.add_node(input_node("kid"));
    dag.add_edge(p, ha);
    dag.add_edge(p, mi);
    dag.add_edge(mi, kid);
    auto m = merge_nodes(dag, mi, ha);
    CHECK(m == ha);
    CHECK_FALSE(dag.contains(mi));
    CHECK(dag.parents(m) == std::set<NodeId>{p});
    CHECK(dag.children(m) == std::set<NodeId>{kid});
    std::set<std::string> aliases;
    for (const auto& mem : dag.node(m).members) aliases.insert(mem.text);
    CHECK(aliases == std::set<std::string>{"heart attack", "myocardial infarction"});
    CHECK(dag.merges_performed() == 1);

    auto m2 = merge_nodes(dag, m, kid);
    CHECK(m2 == m);
    CHECK(dag.children(m2).empty());
    CHECK(dag.is_acyclic());
}

TEST_CASE("merge unites members, bags and picks the origin by precedence") {
    ConceptDag dag;
    auto a = plain_node("Pain", Origin::head);
    a.bag = LemmaBag({"pain"});
    auto b = input_node("pain");
    b.members[0].count = 4;
    b.bag = LemmaBag({"ache"});
    auto ia = dag.add_node(a);
    auto ib = dag.add_node(b);
    auto m = merge_nodes(dag, ia, ib);
    const auto& node = dag.node(m);
    CHECK(node.origin == Origin::input);
    REQUIRE(node.members.size() == 1);
    CHECK(node.members[0].is_input);
    CHECK(node.members[0].count == 4);
    CHECK(node.bag == LemmaBag({"ache", "pain"}));

    auto t = plain_node("t", Origin::taxonomic);
    auto s = plain_node("s", Origin::substring);
    auto it = dag.add_node(t);
    auto is = dag.add_node(s);
    CHECK(dag.node(merge_nodes(dag, is, it)).origin == Origin::taxonomic);
}

TEST_CASE("merging leaves unrelated reachability alone and unites it above the pair") {
    std::mt19937 rng(17);
    for (int round = 0; round < 150; ++round) {
        ConceptDag dag;
        const int n = 4 + static_cast<int>(rng() % 12);
        for (int i = 0; i < n; ++i)
            dag.add_node(rng() % 2 ? input_node("n" + std::to_string(i)) : plain_node("n" + std::to_string(i)));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng() % 4 == 0) dag.add_edge(i, j);
        NodeId a = rng() % n, b = rng() % n;
        if (a == b || would_create_cycle(dag, a, b)) continue;
        auto before = all_reachable_inputs(dag);
        std::map<NodeId, bool> above;
        for (const auto& [id, node] : dag.nodes()) above[id] = dag.has_path(id, a) || dag.has_path(id, b);
        auto m = merge_nodes(dag, a, b);
        const NodeId gone = m == a ? b : a;
        CHECK(dag.is_acyclic());
        auto after = all_reachable_inputs(dag);
        auto rename = [&](std::vector<NodeId> v) {
            for (auto& x : v)
                if (x == gone) x = m;
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
            return v;
        };
        auto pair_reach = before.at(a);
        pair_reach.insert(pair_reach.end(), before.at(b).begin(), before.at(b).end());
        if (dag.node(m).origin == Origin::input) pair_reach.push_back(m);
        CHECK(after.at(m) == rename(pair_reach));
        for (const auto& [id, node] : dag.nodes()) {
            if (id == m) continue;
            auto expect = before.at(id);
            if (above.at(id)) expect.insert(expect.end(), pair_reach.begin(), pair_reach.end());
            CHECK(after.at(id) == rename(expect));
        }
    }
}

TEST_CASE("origin names round-trip") {
    for (auto o : {Origin::input, Origin::substring, Origin::head, Origin::taxonomic, Origin::root})
        CHECK(origin_from_string(to_string(o)) == o);
}
