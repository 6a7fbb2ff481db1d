#include "doctest.h"

#include "opdual/operads.hpp"

#include <algorithm>

using namespace opdual;

namespace {

Field F2;
Field Q = Field::rationals();

Tree T(const char* s) { return parse_tree(s); }

std::vector<Perm> perms(int n) {
    std::vector<Perm> out;
    Perm p = identity_perm(n);
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

SymSeq generators(const Field& F, int N, std::vector<int> degs) {
    int d = static_cast<int>(degs.size());
    return symseq_from_terms(F, N, {{2, ChainComplex(F, degs, Matrix(d, d))}});
}

std::string first(const std::vector<std::string>& v) { return v.empty() ? "" : v.front(); }

} // namespace

TEST_SUITE("operads") {

TEST_CASE("builtin operads satisfy the axioms") {
    for (const Field& F : {Q, F2, Field::prime(3)})
        for (const char* name : {"com", "ass"}) {
            auto p = builtin_operad(name, F, 4);
            CHECK_MESSAGE(first(check_operad_axioms(*p)) == "", name);
        }
    auto ass = builtin_operad("ass", Q, 5);
    CHECK(ass->term(3)->dim() == 6);
    CHECK(ass->term(5)->dim() == 120);
    CHECK(builtin_operad("com", Q, 5)->term(5)->dim() == 1);
    CHECK_THROWS_AS(builtin_operad("lie", Q, 3), OperadError);
}

TEST_CASE("ass compositions substitute words") {
    auto ass = builtin_operad("ass", Q, 4);
    // x = 21, y = 12, x o_1 y = 312
    const auto& c = ass->circ_at(2, 2, 1);
    int x = 1, y = 0;
    auto col = c.col(x * 2 + y);
    REQUIRE(col.size() == 1);
    CHECK(ass->term(3)->name(col.begin()->first) == "312");
    CHECK(ass->term(3)->name(c.col(x * 2 + 1).begin()->first) == "321");
}

TEST_CASE("broken operads fail with a named identity") {
    auto ass = builtin_operad("ass", Q, 4);
    Operad bad = *ass;
    bad.circ[{2, 2, 1}] = ass->circ_at(2, 2, 2);
    auto fails = check_operad_axioms(bad);
    REQUIRE(!fails.empty());
    CHECK(fails.front().find('(') != std::string::npos);

    Operad shape = *ass;
    shape.circ[{2, 2, 1}] = Matrix(1, 1);
    CHECK(first(check_operad_axioms(shape)) == "shape(2,2,1)");

    Operad sigma = *ass;
    sigma.seq.set_s(3, 1, Matrix::identity(6));
    CHECK(!check_operad_axioms(sigma).empty());
}

TEST_CASE("free operads") {
    auto a = generators(Q, 4, {0});
    auto fr = free_operad(a, 4);
    CHECK(fr->term(3)->dim() == 3);
    CHECK(fr->term(4)->dim() == 15);
    CHECK(first(check_operad_axioms(*fr)) == "");

    auto g = generators(F2, 4, {0, 1});
    auto fg = free_operad(g, 4);
    CHECK(fg->term(3)->dims() == std::map<int, int>{{0, 3}, {1, 6}, {2, 3}});
    CHECK(fg->term(4)->dim() == 15 * 8);
    CHECK(first(check_operad_axioms(*fg)) == "");

    // Generators with the sign action.
    auto sgn = generators(Q, 4, {1});
    sgn.set_s(2, 1, scaled(Q, Matrix::identity(1), -1));
    auto fs = free_operad(sgn, 4);
    CHECK(first(check_operad_axioms(*fs)) == "");
}

TEST_CASE("trivial operads and truncations") {
    auto a = generators(Q, 4, {0, 1});
    CHECK(first(check_operad_axioms(*trivial_operad(a))) == "");
    auto ass = builtin_operad("ass", Q, 4);
    auto le3 = truncate(*ass, 3, TruncMode::AtMost);
    CHECK(le3->term(3)->dim() == 6);
    CHECK(le3->term(4)->dim() == 0);
    CHECK(first(check_operad_axioms(*le3)) == "");
    auto eq3 = truncate(*ass, 3, TruncMode::Exactly);
    CHECK(eq3->term(2)->dim() == 0);
    CHECK(eq3->term(3)->dim() == 6);
    CHECK(first(check_operad_axioms(*eq3)) == "");
    CHECK(truncate(*builtin_operad("com", Q, 4), 2, TruncMode::AtMost)->term(3)->dim() == 0);
    for (const auto& p : {ass, builtin_operad("com", Q, 4), free_operad(a, 4)})
        for (int n = 2; n <= 4; ++n) {
            auto le = truncate(*p, n, TruncMode::AtMost), below = truncate(*p, n - 1, TruncMode::AtMost);
            auto layer = truncate(*p, n, TruncMode::Exactly);
            for (int m = 2; m <= 4; ++m) {
                auto sum = layer->term(m)->dims();
                for (auto [d, k] : below->term(m)->dims()) sum[d] += k;
                CHECK(sum == le->term(m)->dims());
            }
        }
    auto same = truncate(*ass, 4, TruncMode::AtMost);
    for (const auto& [key, m] : ass->circ) CHECK(equal(Q, m, same->circ_at(std::get<0>(key), std::get<1>(key), std::get<2>(key))));
}

TEST_CASE("block permutations") {
    CHECK(block_expand({2, 1}, 1, 2) == Perm{2, 3, 1});
    CHECK(block_expand({2, 1}, 2, 3) == Perm{4, 1, 2, 3});
    CHECK(block_insert(3, 2, {2, 1}) == Perm{1, 3, 2, 4});
}

TEST_CASE("tree tensors and factor permutations") {
    auto g = generators(Q, 4, {0, 1});
    Tree t = T("((1 2) (3 4))");
    CHECK(tree_tensor(g, t)->dim() == 8);
    // swapping two odd factors costs a sign
    auto fs = tree_factors(g, T("((1 2) 3)"));
    Matrix sw = permute_factors(Q, fs, {1, 0});
    CHECK(sw.at(3, 3) == -1);
    CHECK(sw.at(2, 1) == 1);
    for (const Tree& s : enumerate_trees(4))
        for (const Perm& a : perms(4)) {
            Matrix m = transport_map(g, s, a);
            for (int k = 1; k < 4; ++k) {
                Perm b = identity_perm(4);
                std::swap(b[k - 1], b[k]);
                Matrix lhs = mul(Q, transport_map(g, relabel(s, a), b), m);
                CHECK(equal(Q, lhs, transport_map(g, s, compose_perm(b, a))));
            }
        }
}

TEST_CASE("composition along trees") {
    auto ass = builtin_operad("ass", Q, 4);
    // (1 3) under the root, then leaf 2: x1 x3 composed into slot 1 of x1 x2.
    Matrix c = compose_along_tree(*ass, T("((1 3) 2)"));
    CHECK(ass->term(3)->name(c.col(0).begin()->first) == "132");
    for (int n = 2; n <= 4; ++n)
        for (const Tree& t : enumerate_trees(n))
            for (const Perm& s : perms(n)) {
                Matrix lhs = mul(Q, ass->seq.act(n, s), compose_along_tree(*ass, t));
                Matrix rhs = mul(Q, compose_along_tree(*ass, relabel(t, s)), transport_map(ass->seq, t, s));
                CHECK(equal(Q, lhs, rhs));
            }
    auto fg = free_operad(generators(F2, 4, {0, 1}), 4);
    for (const Tree& t : enumerate_trees(4))
        for (const Tree& u : enumerate_trees(4)) {
            if (!leq(u, t)) continue;
            Matrix lhs = mul(F2, compose_along_tree(*fg, u), contract_map(*fg, t, u));
            CHECK(equal(F2, lhs, compose_along_tree(*fg, t)));
            for (const Tree& v : enumerate_trees(4))
                if (leq(v, u)) CHECK(equal(F2, mul(F2, contract_map(*fg, u, v), contract_map(*fg, t, u)), contract_map(*fg, t, v)));
        }
}

TEST_CASE("dualization") {
    for (const char* name : {"com", "ass"}) {
        auto p = builtin_operad(name, Q, 4);
        auto q = dualize(*p);
        CHECK(first(check_cooperad_axioms(*q)) == "");
        auto pp = dualize(*q);
        CHECK(is_operad_map(*p, *pp, double_dual_maps(p->seq)));
    }
    auto fg = free_operad(generators(Q, 4, {0, 1}), 4);
    auto q = dualize(*fg);
    CHECK(first(check_cooperad_axioms(*q)) == "");
    auto pp = dualize(*q);
    std::string why;
    CHECK_MESSAGE(is_operad_map(*fg, *pp, double_dual_maps(fg->seq), &why), why);
    std::vector<Matrix> zero(5);
    for (int n = 1; n <= 4; ++n) zero[n] = Matrix(pp->term(n)->dim(), fg->term(n)->dim());
    CHECK(!is_operad_map(*fg, *pp, zero, &why));
    CHECK(why == "unit");
    auto twice = double_dual_maps(fg->seq);
    twice[2] = scaled(Q, twice[2], 2);
    CHECK(!is_operad_map(*fg, *pp, twice, &why));
    CHECK(why == "composition(2,2,1)");

    // In degree 0 expansion is literally the transpose of contraction.
    auto ass = builtin_operad("ass", Q, 4);
    auto da = dualize(*ass);
    for (const Tree& t : enumerate_trees(4))
        for (const Tree& u : enumerate_trees(4))
            if (leq(u, t)) CHECK(equal(Q, expand_map(*da, u, t), transpose(contract_map(*ass, t, u))));
}

TEST_CASE("pre-cooperads from cooperads and duals") {
    for (const Field& F : {Q, F2}) {
        auto com = builtin_operad("com", F, 4);
        auto e = extend_cooperad(dualize(*com));
        CHECK(first(check_precooperad(*e, 4)) == "");
        CHECK(is_quasi_cooperad(*e, 4).ok);
        auto d = dual_precooperad(com);
        CHECK(first(check_precooperad(*d, 4)) == "");
        CHECK(is_quasi_cooperad(*d, 4).ok);
    }
    auto fg = free_operad(generators(Q, 4, {0, 1}), 4);
    CHECK(first(check_precooperad(*dual_precooperad(fg), 4)) == "");
    CHECK(first(check_precooperad(*extend_cooperad(dualize(*fg)), 4)) == "");

    auto com = builtin_operad("com", Q, 4);
    auto e = extend_cooperad(dualize(*com));
    Tree a = T("(1 2)"), b = T("(1 2 3)");
    auto broken = corrupt_precooperad(e, a, 2, b);
    auto rep = is_quasi_cooperad(*broken, 4);
    CHECK(!rep.ok);
    REQUIRE(rep.witnesses.size() == 1);
    CHECK(rep.witnesses[0] == "m((1 2),2,(1 2 3))");
}

TEST_CASE("free pre-cooperad and its monad structure") {
    auto com = builtin_operad("com", Q, 3);
    auto e = extend_cooperad(dualize(*com));
    auto fa = std::make_shared<FreePreCooperad>(family_of(e));
    // One summand per tree below t.
    CHECK(fa->at(Tree::corolla(3))->dim() == 1);
    CHECK(fa->at(T("((1 2) 3)"))->dim() == 2);
    CHECK(first(check_precooperad(*fa, 3)) == "");
    auto ffa = FreePreCooperad(family_of(fa));
    for (int n = 1; n <= 3; ++n)
        for (const Tree& t : enumerate_trees(n)) {
            Matrix mu = free_monad_mult(ffa, *fa, t);
            int d = fa->at(t)->dim();
            CHECK(equal(Q, mul(Q, mu, ffa.unit(t)), Matrix::identity(d)));
            // F(unit): apply the unit inside every factor.
            Matrix fu(ffa.at(t)->dim(), d);
            const auto& outer = ffa.summands(t);
            for (const auto& s : fa->summands(t)) {
                const auto& o = *std::find_if(outer.begin(), outer.end(), [&](const auto& x) { return x.u == s.u; });
                std::vector<Matrix> us;
                for (const Tree& f : s.frags) us.push_back(fa->unit(f));
                Matrix blk = kron_all(Q, us);
                for (int j = 0; j < blk.cols(); ++j)
                    for (const auto& [r, v] : blk.col(j)) fu.add(o.offset + r, s.offset + j, v);
            }
            CHECK(equal(Q, mul(Q, mu, fu), Matrix::identity(d)));
            for (const auto& ex : expansions(t))
                CHECK(equal(Q, mul(Q, fa->cover_map(t, ex.tree), mu), mul(Q, free_monad_mult(ffa, *fa, ex.tree), ffa.cover_map(t, ex.tree))));
        }
    auto fc = FreePreCooperad(corolla_family(generators(Q, 4, {0, 1})));
    CHECK(fc.at(T("((1 2) (3 4))"))->dim() == 8);
    CHECK(fc.at(T("((1 2) 3)"))->dim() == 4);
    CHECK(fc.at(Tree::corolla(3))->dim() == 0);
    CHECK(first(check_precooperad(fc, 4)) == "");
}

TEST_CASE("dual composition product") {
    auto com = builtin_operad("com", Q, 4);
    CHECK(dual_compose(com->seq, com->seq, 3).dim() == 5);
    CHECK(dual_compose(com->seq, com->seq, 4).dim() == 15);
    auto g = generators(Q, 4, {1});
    // partitions of 3 into blocks with arities in {1, 2}: three with one pair
    CHECK(dual_compose(g, g, 3).dims() == std::map<int, int>{{2, 3}});
    auto unit = symseq_from_terms(Q, 4, {});
    for (int n = 2; n <= 4; ++n) {
        CHECK(dual_compose(com->seq, unit, n).dims() == com->term(n)->dims());
        CHECK(dual_compose(g, unit, n).dims() == g.term(n)->dims());
    }
}

}
