#include "hb/error.hpp"
#include "hb/refine.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace hb;

namespace {

// Every text gets the same vector, so every affinity is 1.
class FlatProvider final : public EmbeddingProvider {
public:
    std::vector<Embedding> embed(const std::vector<std::string>& texts) override {
        return std::vector<Embedding>(texts.size(), Embedding{1.0f, 0.0f});
    }
    std::size_t dimension() const override { return 2; }
    std::string fingerprint() const override { return "flat"; }
};

ConceptNode input(const std::string& text, std::uint64_t count = 1) {
    ConceptNode n;
    n.members.push_back({text, count, true});
    n.origin = Origin::input;
    return n;
}

ConceptNode hier(const std::string& text) {
    ConceptNode n;
    n.members.push_back({text, 0, false});
    n.origin = Origin::substring;
    return n;
}

NodeId add_root(ConceptDag& dag) {
    ConceptNode r;
    r.origin = Origin::root;
    auto id = dag.add_node(r);
    dag.set_root(id);
    return id;
}

std::size_t input_members(const ConceptDag& dag) {
    std::size_t n = 0;
    for (const auto& [id, node] : dag.nodes()) n += node.input_member_count();
    return n;
}

// Random rooted DAG: edges only go from lower to higher index.
ConceptDag random_dag(std::mt19937& rng, int max_nodes) {
    ConceptDag dag;
    add_root(dag);
    const int n = 2 + static_cast<int>(rng() % static_cast<unsigned>(max_nodes - 1));
    std::vector<NodeId> ids;
    for (int i = 0; i < n; ++i) {
        auto text = "n" + std::to_string(i);
        ids.push_back(dag.add_node(rng() % 2 ? input(text, 1 + rng() % 5) : hier(text)));
    }
    const int fanout = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i)
        for (int e = 0; e < fanout; ++e) {
            int span = std::min(n - i - 1, 12);
            if (span <= 0) break;
            dag.add_edge(ids[i], ids[i + 1 + static_cast<int>(rng() % static_cast<unsigned>(span))]);
        }
    attach_root(dag);
    return dag;
}

std::set<NodeId> inputs_reached_from(const ConceptDag& dag, const std::vector<NodeId>& from) {
    std::set<NodeId> out;
    for (auto f : from)
        for (auto v : reachable_inputs(dag, f)) out.insert(v);
    return out;
}

std::set<NodeId> all_inputs(const ConceptDag& dag) {
    std::set<NodeId> out;
    for (const auto& [id, node] : dag.nodes())
        if (node.origin == Origin::input) out.insert(id);
    return out;
}

}  // namespace

TEST_CASE("choose_representative") {
    ConceptNode mi;
    mi.members = {{"myocardial infarction", 9, true}, {"heart attack", 12, true}};
    CHECK(choose_representative(mi) == "heart attack");

    CHECK(choose_representative(input("only")) == "only");

    // Equal counts: shorter text first ("herniated disc" has 14 characters, "disc herniation" 15).
    ConceptNode tie;
    tie.members = {{"disc herniation", 5, true}, {"herniated disc", 5, true}};
    CHECK(choose_representative(tie) == "herniated disc");
    ConceptNode same_len;
    same_len.members = {{"bb", 5, true}, {"ab", 5, true}};
    CHECK(choose_representative(same_len) == "ab");

    ConceptNode mixed;
    mixed.members = {{"derived", 0, false}, {"typed in", 1, true}};
    CHECK(choose_representative(mixed) == "typed in");

    ConceptNode tax;
    tax.origin = Origin::taxonomic;
    tax.label = "respiratory diseases";
    CHECK(choose_representative(tax) == "respiratory diseases");
    ConceptNode root;
    root.origin = Origin::root;
    CHECK(choose_representative(root) == "root");

    ConceptDag dag;
    auto id = dag.add_node(mi);
    assign_representatives(dag);
    CHECK(dag.node(id).representative == "heart attack");
    dag.node(id).representative = "cached";
    CHECK(representative_of(dag.node(id)) == "cached");
}

TEST_CASE("greedy_cover basics") {
    std::vector<CoverCandidate> c{{{1, 2}, 0, "a", 10}, {{1}, 0, "b", 11}};
    CHECK(greedy_cover({1, 2}, c) == std::vector<std::size_t>{0});
    CHECK(greedy_cover({}, c).empty());
    // Elements nobody covers are left out without looping.
    CHECK(greedy_cover({1, 2, 3}, c) == std::vector<std::size_t>{0});
}

TEST_CASE("greedy_cover tie-breaks") {
    std::vector<CoverCandidate> by_count{{{1}, 1, "a", 1}, {{1}, 5, "z", 2}};
    CHECK(greedy_cover({1}, by_count) == std::vector<std::size_t>{1});
    std::vector<CoverCandidate> by_rep{{{1}, 3, "z", 1}, {{1}, 3, "a", 2}};
    CHECK(greedy_cover({1}, by_rep) == std::vector<std::size_t>{1});
    std::vector<CoverCandidate> by_id{{{1}, 3, "a", 9}, {{1}, 3, "a", 2}};
    CHECK(greedy_cover({1}, by_id) == std::vector<std::size_t>{1});
}

TEST_CASE("greedy_cover matches a step-by-step reimplementation") {
    std::mt19937 rng(17);
    for (int round = 0; round < 3000; ++round) {
        const int m = 1 + static_cast<int>(rng() % 6);
        const int u = 1 + static_cast<int>(rng() % 8);
        std::vector<NodeId> universe(u);
        for (int i = 0; i < u; ++i) universe[i] = static_cast<NodeId>(i);
        std::vector<CoverCandidate> cands;
        for (int c = 0; c < m; ++c) {
            CoverCandidate cand;
            for (int i = 0; i < u; ++i)
                if (rng() % 2) cand.covers.push_back(static_cast<NodeId>(i));
            cand.total_count = rng() % 3;
            cand.representative = std::string(1, static_cast<char>('a' + rng() % 3));
            cand.id = static_cast<NodeId>(100 + c);
            cands.push_back(cand);
        }
        // Reference: rank all unused candidates by (gain, count, -rep, -id) each round.
        std::set<NodeId> left(universe.begin(), universe.end());
        std::vector<std::size_t> expect;
        std::set<std::size_t> used;
        for (;;) {
            std::vector<std::tuple<std::size_t, std::uint64_t, std::string, NodeId, std::size_t>> ranked;
            for (std::size_t c = 0; c < cands.size(); ++c) {
                if (used.contains(c)) continue;
                std::size_t gain = std::count_if(cands[c].covers.begin(), cands[c].covers.end(),
                                                 [&](NodeId v) { return left.contains(v); });
                if (gain) ranked.emplace_back(gain, cands[c].total_count, cands[c].representative, cands[c].id, c);
            }
            if (ranked.empty() || left.empty()) break;
            std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
                if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
                if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) > std::get<1>(b);
                return std::tie(std::get<2>(a), std::get<3>(a)) < std::tie(std::get<2>(b), std::get<3>(b));
            });
            auto pick = std::get<4>(ranked.front());
            used.insert(pick);
            expect.push_back(pick);
            for (auto v : cands[pick].covers) left.erase(v);
        }
        CHECK(greedy_cover(universe, cands) == expect);
    }
}

TEST_CASE("prune drops redundant children") {
    ConceptDag dag;
    auto root = add_root(dag);
    auto p = dag.add_node(hier("p"));
    auto a = dag.add_node(hier("a"));
    auto b = dag.add_node(hier("b"));
    auto x = dag.add_node(input("x"));
    auto y = dag.add_node(input("y"));
    dag.add_edge(root, p);
    dag.add_edge(p, a);
    dag.add_edge(p, b);
    dag.add_edge(a, x);
    dag.add_edge(a, y);
    dag.add_edge(b, x);
    auto stats = prune_children(dag);
    CHECK(dag.has_edge(p, a));
    CHECK_FALSE(dag.has_edge(p, b));
    CHECK_FALSE(dag.contains(b));  // cut off from the root
    CHECK(stats.nodes_removed == 1);
    CHECK(stats.edges_removed == 2);
    CHECK(reachable_inputs(dag, root) == std::vector<NodeId>{x, y});
}

TEST_CASE("prune leaves single children alone") {
    ConceptDag dag;
    auto root = add_root(dag);
    auto p = dag.add_node(hier("p"));
    auto x = dag.add_node(input("x"));
    dag.add_edge(root, p);
    dag.add_edge(p, x);
    auto before = dag.edges();
    auto stats = prune_children(dag);
    CHECK(dag.edges() == before);
    CHECK(stats.edges_removed == 0);
}

TEST_CASE("random DAGs: pruning preserves reachable inputs; collapse leaves no single-child hierarchy nodes") {
    std::mt19937 rng(23);
    for (int round = 0; round < 200; ++round) {
        auto dag = random_dag(rng, round < 150 ? 40 : 300);
        std::map<NodeId, std::vector<NodeId>> before;
        for (const auto& [id, node] : dag.nodes()) before[id] = reachable_inputs(dag, id);
        const auto inputs = input_members(dag);

        prune_children(dag);
        CHECK(dag.is_acyclic());
        for (const auto& [id, node] : dag.nodes()) CHECK(reachable_inputs(dag, id) == before.at(id));
        CHECK(input_members(dag) == inputs);

        collapse_single_child(dag);
        CHECK(input_members(dag) == inputs);
        CHECK(reachable_inputs(dag, *dag.root()) == before.at(*dag.root()));
        for (const auto& [id, node] : dag.nodes()) {
            if (id == *dag.root() || node.has_input()) continue;
            CHECK(dag.children(id).size() != 1);
        }
    }
}

TEST_CASE("collapse_single_child") {
    ConceptDag dag;
    auto root = add_root(dag);
    auto h = dag.add_node(hier("h"));
    auto x = dag.add_node(input("x"));
    dag.add_edge(root, h);
    dag.add_edge(h, x);
    CHECK(collapse_single_child(dag) == 1);
    CHECK(dag.has_edge(root, x));
    CHECK_FALSE(dag.contains(h));
    CHECK(collapse_single_child(dag) == 0);

    ConceptDag kept;
    auto r2 = add_root(kept);
    auto i = kept.add_node(input("pain"));
    auto j = kept.add_node(input("severe pain"));
    kept.add_edge(r2, i);
    kept.add_edge(i, j);
    CHECK(collapse_single_child(kept) == 0);
    CHECK(kept.has_edge(i, j));

    // Chains collapse to the fixpoint.
    ConceptDag chain;
    auto r3 = add_root(chain);
    auto a = chain.add_node(hier("a"));
    auto b = chain.add_node(hier("b"));
    auto c = chain.add_node(input("c"));
    chain.add_edge(r3, a);
    chain.add_edge(a, b);
    chain.add_edge(b, c);
    CHECK(collapse_single_child(chain) == 2);
    CHECK(chain.children(r3) == std::set<NodeId>{c});
}

TEST_CASE("entry points: 3-input subtree beats 2-input subtree at k=1") {
    ConceptDag dag;
    auto root = add_root(dag);
    auto a = dag.add_node(hier("group a"));
    auto b = dag.add_node(hier("group b"));
    dag.add_edge(root, a);
    dag.add_edge(root, b);
    std::vector<NodeId> b_kids;
    for (int i = 0; i < 3; ++i) dag.add_edge(a, dag.add_node(input("a" + std::to_string(i))));
    for (int i = 0; i < 2; ++i) {
        b_kids.push_back(dag.add_node(input("b" + std::to_string(i))));
        dag.add_edge(b, b_kids.back());
    }
    FlatProvider p;
    EmbeddingCache cache(p);
    auto nav = select_entry_points(dag, cache, {1, 0.0});
    CHECK(nav.entry_points == std::vector<NodeId>{a});
    CHECK(nav.other_node == dag.next_id());
    auto others = nav.other_children();
    std::sort(others.begin(), others.end());
    CHECK(others == b_kids);
}

TEST_CASE("entry points: overlapping candidate loses to a disjoint one at k=2") {
    ConceptDag dag;
    auto root = add_root(dag);
    auto a = dag.add_node(hier("alpha"));
    auto a2 = dag.add_node(hier("beta"));
    auto c = dag.add_node(hier("gamma"));
    for (auto n : {a, a2, c}) dag.add_edge(root, n);
    for (const char* t : {"x", "y", "z"}) {
        auto v = dag.add_node(input(t));
        dag.add_edge(a, v);
        dag.add_edge(a2, v);
    }
    for (const char* t : {"u", "v"}) dag.add_edge(c, dag.add_node(input(t)));
    FlatProvider p;
    EmbeddingCache cache(p);
    auto nav = select_entry_points(dag, cache, {2, 0.0});
    CHECK(nav.entry_points == std::vector<NodeId>{a, c});
    CHECK(nav.other_children().empty());
}

TEST_CASE("entry points: k above the number of disjoint root children selects them all") {
    ConceptDag dag;
    auto root = add_root(dag);
    std::set<NodeId> heads;
    for (int h = 0; h < 3; ++h) {
        auto head = dag.add_node(hier("h" + std::to_string(h)));
        heads.insert(head);
        dag.add_edge(root, head);
        for (int i = 0; i < 2; ++i) dag.add_edge(head, dag.add_node(input("h" + std::to_string(h) + "x" + std::to_string(i))));
    }
    FlatProvider p;
    EmbeddingCache cache(p);
    auto nav = select_entry_points(dag, cache, {10, 0.0});
    CHECK(std::set<NodeId>(nav.entry_points.begin(), nav.entry_points.end()) == heads);
    CHECK(nav.other_children().empty());
    CHECK_THROWS_AS(select_entry_points(dag, cache, {0, 0.0}), ArgumentError);
}

TEST_CASE("entry points on random DAGs: coverage, distinctness, determinism and monotone k") {
    std::mt19937 rng(29);
    TrigramProvider p(256);
    for (int round = 0; round < 60; ++round) {
        auto dag = random_dag(rng, 30);
        prune_children(dag);
        collapse_single_child(dag);
        const auto inputs = all_inputs(dag);
        std::vector<NavigationResult> runs;
        for (std::size_t k = 1; k <= 10; ++k) {
            EmbeddingCache cache(p);
            auto nav = select_entry_points(dag, cache, {k, 0.0});
            CHECK(nav.entry_points.size() <= k);
            std::set<NodeId> distinct(nav.entry_points.begin(), nav.entry_points.end());
            CHECK(distinct.size() == nav.entry_points.size());
            CHECK_FALSE(distinct.contains(*dag.root()));
            auto covered = inputs_reached_from(dag, nav.entry_points);
            for (auto v : nav.other_children()) covered.insert(v);
            CHECK(covered == inputs);
            for (auto v : nav.other_children()) CHECK_FALSE(inputs_reached_from(dag, nav.entry_points).contains(v));
            runs.push_back(std::move(nav));
        }
        for (std::size_t k = 1; k < runs.size(); ++k) {
            const auto& small = runs[k - 1].entry_points;
            const auto& big = runs[k].entry_points;
            REQUIRE(big.size() >= small.size());
            CHECK(std::equal(small.begin(), small.end(), big.begin()));
        }
        EmbeddingCache again(p);
        CHECK(select_entry_points(dag, again, {10, 0.0}) == runs.back());
    }
}

TEST_CASE("display order tie-break chain") {
    ConceptDag dag;
    auto root = add_root(dag);
    auto big = dag.add_node(hier("zeta"));
    auto mid_hi = dag.add_node(input("mu", 9));
    auto mid_lo_b = dag.add_node(input("beta", 2));
    auto mid_lo_a = dag.add_node(input("alpha", 2));
    for (auto n : {big, mid_hi, mid_lo_b, mid_lo_a}) dag.add_edge(root, n);
    dag.add_edge(big, dag.add_node(input("q")));
    dag.add_edge(big, dag.add_node(input("r")));
    auto order = display_order(dag);
    // big reaches 2 inputs; the rest reach 1 each, then count 9 > 2, then alpha < beta.
    CHECK(order.at(root) == std::vector<NodeId>{big, mid_hi, mid_lo_a, mid_lo_b});
    CHECK(order.at(mid_hi).empty());

    ConceptDag flat;
    auto r = add_root(flat);
    auto c = flat.add_node(input("c"));
    auto a = flat.add_node(input("a"));
    auto b = flat.add_node(input("b"));
    for (auto n : {c, a, b}) flat.add_edge(r, n);
    CHECK(display_order(flat).at(r) == std::vector<NodeId>{a, b, c});
}
