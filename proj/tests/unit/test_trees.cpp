#include "doctest.h"

#include "opdual/trees.hpp"

#include <algorithm>
#include <map>
#include <set>

using namespace opdual;

namespace {

Tree T(const char* s) { return parse_tree(s); }

} // namespace

TEST_SUITE("trees") {

TEST_CASE("enumeration counts match the total-partition recurrence") {
    auto oracle = total_partition_counts(7);
    CHECK(oracle[3] == 4);
    CHECK(oracle[6] == 2752);
    for (int n = 1; n <= 7; ++n) CHECK(tree_count(n) == oracle[n]);
    CHECK_THROWS_AS(enumerate_trees(0), TreeError);
}

TEST_CASE("enumeration is canonical, unique and holds the corolla") {
    for (int n = 1; n <= 5; ++n) {
        const auto& ts = enumerate_trees(n);
        std::set<std::string> seen;
        for (const auto& t : ts) {
            CHECK(seen.insert(to_string(t)).second);
            CHECK(parse_tree(to_string(t)) == t);
        }
        CHECK(std::find(ts.begin(), ts.end(), Tree::corolla(n)) != ts.end());
        CHECK(std::is_sorted(ts.begin(), ts.end()));
    }
}

TEST_CASE("canonical form") {
    CHECK(to_string(T("(3 1 2)")) == "(1 2 3)");
    CHECK(T("(3 (2 1))") == T("((1 2) 3)"));
    CHECK(to_string(T("(4 (3 2) 1)")) == "(1 (2 3) 4)");
    auto t = T("((4 2) (1 3) 5)");
    CHECK(canonical_form(to_raw(t)) == t);
    CHECK_THROWS_AS(T("((1) 2)"), TreeError);
    CHECK_THROWS_AS(T("(1 1 2)"), TreeError);
    CHECK_THROWS_AS(T("(1 3)"), TreeError);
    CHECK_THROWS_AS(T("(1 2"), TreeError);
    CHECK(T("1").vertices() == 0);
}

TEST_CASE("relabel") {
    Perm s{2, 3, 1};
    CHECK(relabel(Tree::corolla(3), s) == Tree::corolla(3));
    CHECK(relabel(T("((1 2) 3)"), Perm{1, 3, 2}) == T("((1 3) 2)"));
    CHECK(relabel(T("((1 2) 3)"), identity_perm(3)) == T("((1 2) 3)"));
    CHECK_THROWS_AS(relabel(T("((1 2) 3)"), Perm{1, 1, 2}), TreeError);
}

TEST_CASE("relabel is a group action: Coxeter relations on adjacent transpositions") {
    for (int n = 2; n <= 5; ++n) {
        auto s = [&](int i) {
            Perm p = identity_perm(n);
            std::swap(p[i - 1], p[i]);
            return p;
        };
        for (const auto& t : enumerate_trees(n)) {
            for (int i = 1; i < n; ++i) {
                CHECK(relabel(relabel(t, s(i)), s(i)) == t);
                if (i + 1 < n) {
                    Tree a = t;
                    for (int r = 0; r < 3; ++r) a = relabel(relabel(a, s(i)), s(i + 1));
                    CHECK(a == t);
                }
                for (int j = i + 2; j < n; ++j)
                    CHECK(relabel(relabel(t, s(i)), s(j)) == relabel(relabel(t, s(j)), s(i)));
            }
            Perm a = identity_perm(n);
            std::rotate(a.begin(), a.begin() + 1, a.end());
            Perm b = identity_perm(n);
            std::swap(b[0], b[n - 1]);
            CHECK(relabel(relabel(t, a), b) == relabel(t, compose_perm(b, a)));
        }
    }
}

TEST_CASE("grafting") {
    CHECK(graft(Tree::corolla(2), 2, Tree::corolla(2)) == T("(1 (2 3))"));
    CHECK(graft(Tree::corolla(2), 1, Tree::corolla(3)) == T("((1 2 3) 4)"));
    const auto& four = enumerate_trees(4);
    CHECK(std::find(four.begin(), four.end(), T("((1 2 3) 4)")) != four.end());
    for (const auto& t : enumerate_trees(3))
        for (int i = 1; i <= 3; ++i) CHECK(graft(t, i, Tree::corolla(1)) == t);
    CHECK(graft(Tree::corolla(1), 1, T("((1 2) 3)")) == T("((1 2) 3)"));
    CHECK_THROWS_AS(graft(Tree::corolla(2), 3, Tree::corolla(2)), TreeError);
}

TEST_CASE("grafting is associative and contracting the grafted edge gives the merged vertex") {
    for (int n = 1; n <= 3; ++n)
        for (int m = 1; m <= 3; ++m)
            for (const auto& t : enumerate_trees(n))
                for (const auto& u : enumerate_trees(m)) {
                    for (int i = 1; i <= n; ++i) {
                        Tree g = graft(t, i, u);
                        CHECK(g.vertices() == t.vertices() + u.vertices());
                        for (int k = 1; k <= 2; ++k)
                            for (const auto& w : enumerate_trees(k)) {
                                // sequential: (t o_i u) o_j w with j inside the u block
                                for (int j = i; j < i + m; ++j)
                                    CHECK(graft(g, j, w) == graft(t, i, graft(u, j - i + 1, w)));
                                // parallel: j < i
                                for (int j = 1; j < i; ++j)
                                    CHECK(graft(g, j, w) == graft(graft(t, j, w), i + k - 1, u));
                            }
                        if (n >= 2 && m >= 2) {
                            Mask block = graft_block(i, m);
                            int e = g.find(block);
                            REQUIRE(e > 0);
                            // Merge: leaf i of t replaced by the leaves of u, attached to the parent vertex.
                            std::vector<Mask> cs;
                            for (Mask c : g.clusters())
                                if (c != block) cs.push_back(c);
                            CHECK(contract_edge(g, e) == Tree::from_clusters(n + m - 1, cs));
                            CHECK(contract_edge(g, e).vertices() == g.vertices() - 1);
                        }
                    }
                }
}

TEST_CASE("contract_edge") {
    for (const auto& t : enumerate_trees(3))
        if (t.vertices() == 2) CHECK(contract_edge(t, 1) == Tree::corolla(3));
    auto cat = T("(((1 2) 3) 4)");
    CHECK(contract_edge(cat, cat.find(0b0011)) == T("((1 2 3) 4)"));
    CHECK_THROWS_AS(contract_edge(cat, 0), TreeError);
    for (const auto& t : enumerate_trees(5)) {
        Tree s = t;
        while (s.vertices() > 1) {
            CHECK(leq(contract_edge(s, s.vertices() - 1), s));
            s = contract_edge(s, s.vertices() - 1);
        }
        CHECK(s == Tree::corolla(5));
    }
}

TEST_CASE("expansions") {
    CHECK(expansions(Tree::corolla(2)).empty());
    auto e3 = expansions(Tree::corolla(3));
    CHECK(e3.size() == 3);
    auto e4 = expansions(Tree::corolla(4));
    CHECK(e4.size() == 10);
    int two = 0, three = 0;
    for (const auto& x : e4) {
        CHECK(contract_edge(x.tree, x.edge) == Tree::corolla(4));
        (popcount(x.tree.cluster(x.edge)) == 2 ? two : three)++;
    }
    CHECK(two == 6);
    CHECK(three == 4);
    // Covers agree with brute force over the enumeration.
    for (int n = 2; n <= 5; ++n)
        for (const auto& t : enumerate_trees(n)) {
            std::set<std::string> a, b;
            for (const auto& x : expansions(t)) a.insert(to_string(x.tree));
            for (const auto& u : enumerate_trees(n))
                if (u.vertices() == t.vertices() + 1 && leq(t, u)) b.insert(to_string(u));
            CHECK(a == b);
            CHECK(a.size() == expansions(t).size());
        }
}

TEST_CASE("fragments") {
    for (const auto& t : enumerate_trees(4)) {
        auto self = fragments(t, t);
        REQUIRE(self);
        for (int v = 0; v < t.vertices(); ++v) CHECK((*self)[v] == Tree::corolla(t.valence(v)));
        auto top = fragments(t, Tree::corolla(4));
        REQUIRE(top);
        CHECK(top->size() == 1);
        CHECK((*top)[0] == t);
    }
    auto cat = T("(((1 2) 3) 4)");
    auto u = T("((1 2 3) 4)");
    auto f = fragments(cat, u);
    REQUIRE(f);
    CHECK((*f)[0] == Tree::corolla(2));
    CHECK((*f)[1] == T("((1 2) 3)"));
    CHECK_FALSE(fragments(u, cat).has_value());
    CHECK_THROWS_AS(fragments(cat, Tree::corolla(3)), TreeError);
}

TEST_CASE("fragments exist iff reachable by contractions, and regraft to the tree") {
    for (int n = 2; n <= 5; ++n) {
        const auto& ts = enumerate_trees(n);
        std::map<std::string, std::set<std::string>> below;
        for (const auto& t : ts) {
            std::set<std::string> reach{to_string(t)};
            std::vector<Tree> stack{t};
            while (!stack.empty()) {
                Tree s = stack.back();
                stack.pop_back();
                for (int v = 1; v < s.vertices(); ++v) {
                    Tree c = contract_edge(s, v);
                    if (reach.insert(to_string(c)).second) stack.push_back(c);
                }
            }
            below[to_string(t)] = reach;
        }
        for (const auto& t : ts)
            for (const auto& u : ts) {
                auto f = fragments(t, u);
                CHECK(f.has_value() == (below[to_string(t)].count(to_string(u)) == 1));
                if (!f) continue;
                int vs = 0;
                for (const auto& x : *f) vs += x.vertices();
                CHECK(vs == t.vertices());
            }
    }
}

}
